#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmm2d/geometry.hpp"

namespace fmm2d {

using Index = std::uint32_t;

/// Thrown when the source points cannot be separated into the requested
/// number of boxes (all points of a box coincide).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sources with real strengths, plus the points where the potential is wanted.
/// An empty `eval_positions` means the potential is evaluated at the sources.
struct ParticleSet {
  std::vector<Complex> positions;
  std::vector<double> strengths;
  std::vector<Complex> eval_positions;

  bool evaluates_at_sources() const { return eval_positions.empty(); }
  std::size_t source_count() const { return positions.size(); }
  std::size_t eval_count() const {
    return evaluates_at_sources() ? positions.size() : eval_positions.size();
  }
  std::span<const Complex> targets() const {
    return evaluates_at_sources() ? std::span<const Complex>(positions)
                                  : std::span<const Complex>(eval_positions);
  }

  /// Throws std::invalid_argument on empty input, size mismatch or non-finite values.
  void validate() const;
};

struct TreeConfig {
  int n_desired_per_box = 35;
  ThetaConfig theta{};
  int p_terms = 17;
  // Replaces the level-count formula when set (still clamped to 4^l <= N).
  std::optional<int> levels_override;
};

struct BoxNode {
  BoxGeometry geometry;
  Index src_begin = 0;
  Index src_end = 0;
  Index eval_begin = 0;
  Index eval_end = 0;

  Index src_count() const { return src_end - src_begin; }
  Index eval_count() const { return eval_end - eval_begin; }
};

/// Balanced pyramid: level l holds 4^l boxes and box k has children
/// 4k..4k+3 on the next level. Point arrays are stored in tree order.
struct FmmTree {
  int n_levels = 0;
  std::vector<std::vector<BoxNode>> levels;
  // Tree-order position i holds original source src_perm[i].
  std::vector<Index> src_perm;
  std::vector<Index> eval_perm;
  bool eval_aliases_sources = true;

  // Point data permuted into tree order.
  std::vector<Complex> src_positions;
  std::vector<double> src_strengths;
  std::vector<Complex> eval_positions;

  const std::vector<BoxNode>& level(int l) const { return levels.at(static_cast<std::size_t>(l)); }
  const std::vector<BoxNode>& finest() const { return levels.back(); }
  std::size_t box_count() const;

  static constexpr Index parent(Index k) { return k / 4; }
  static constexpr Index first_child(Index k) { return 4 * k; }
};

/// Number of tree levels for n_sources points with about n_desired per finest box,
/// ceil(0.5*log2(5/8 * N/N_d)) clamped at 0. Evaluated in integer arithmetic.
int num_levels(std::size_t n_sources, std::size_t n_desired);

/// Largest l with 4^l <= n.
int max_levels_for(std::size_t n);

/// Rearranges `coords` (and `companion` identically) so that the first
/// ceil(n/2) entries are <= the remaining ones, and the entry just before the
/// split is the largest of the left part. Returns the split index ceil(n/2).
/// Quickselect with median-of-three pivots; deterministic.
std::size_t partition_median(std::span<double> coords, std::span<Index> companion);

/// Builds the tree by two successive median splits per box and level.
/// `parallel` splits the boxes of one level concurrently; the result is
/// identical to the sequential build.
FmmTree build_tree(const ParticleSet& points, const TreeConfig& cfg, bool parallel = false);

}  // namespace fmm2d
