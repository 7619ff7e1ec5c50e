#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "fmm2d/connectivity.hpp"
#include "fmm2d/operators.hpp"
#include "fmm2d/tree.hpp"

namespace fmm2d {

enum class Phase { Sort, Connect, P2M, M2M, M2L, L2L, L2P, P2P, Other };
inline constexpr std::size_t kPhaseCount = 9;
std::string_view phase_name(Phase phase);

/// Potential per evaluation point, in input order.
struct PotentialField {
  std::vector<Complex> values;
};

struct ListHistogram {
  // counts[k] = number of target boxes whose list has length k.
  std::vector<std::size_t> counts;
  std::size_t max_length() const { return counts.empty() ? 0 : counts.size() - 1; }
  void add(std::size_t length);
};

struct TreeStats {
  int levels = 0;
  std::size_t boxes = 0;
  std::size_t finest_boxes = 0;
  std::size_t min_sources_per_box = 0;
  std::size_t max_sources_per_box = 0;
  double mean_sources_per_box = 0.0;
  ListHistogram weak;  // over all levels
  ListHistogram p2p;
  ListHistogram p2l;
  ListHistogram m2p;
};

struct EngineReport {
  std::array<double, kPhaseCount> seconds{};
  TreeStats stats;
  // Distinct source/target pairs skipped because their positions coincide.
  std::size_t coincident_pairs = 0;

  double& operator[](Phase phase) { return seconds[static_cast<std::size_t>(phase)]; }
  double operator[](Phase phase) const { return seconds[static_cast<std::size_t>(phase)]; }
  double total() const;
};

struct EvalOptions {
  // Level-synchronous parallel execution, one task per target box.
  bool parallel = false;
  // Pairwise-symmetric near field; only used when evaluating at the sources
  // in sequential mode.
  bool symmetric_p2p = false;
  ShiftVariant m2m_variant = ShiftVariant::Scaled;
};

struct FmmResult {
  PotentialField potential;
  EngineReport report;
};

/// Full pipeline: tree, connectivity, upward pass, downward pass, near field.
/// Throws DegenerateInputError if the tree cannot be built.
FmmResult fmm_evaluate(const ParticleSet& points, const TreeConfig& cfg,
                       const EvalOptions& options = {});

/// O(N*M) summation, skipping coincident source/target pairs. `symmetric`
/// requires evaluation at the sources and visits every unordered pair once.
/// `parallel` splits the targets; each value is summed in the same order.
PotentialField direct_evaluate(const ParticleSet& points, bool symmetric = false,
                               bool parallel = false);

class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// max_i |approx_i - exact_i| / |exact_i|, skipping entries with exact_i == 0.
double max_rel_error(std::span<const Complex> approx, std::span<const Complex> exact,
                     std::size_t* skipped = nullptr);
inline double max_rel_error(const PotentialField& approx, const PotentialField& exact,
                            std::size_t* skipped = nullptr) {
  return max_rel_error(approx.values, exact.values, skipped);
}

}  // namespace fmm2d
