#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "fmm2d/bench/io.hpp"
#include "fmm2d/bench/sampling.hpp"
#include "fmm2d/engine.hpp"

namespace fmm2d::bench {

enum class RunMode { Fmm, Direct, Both };

struct ExperimentArgs {
  std::size_t n = 10000;
  DistributionSpec dist{};
  int p = 17;
  int nd = 35;
  double theta = 0.5;
  RunMode mode = RunMode::Both;
  bool parallel = false;
  // Timed repetitions after one discarded warm-up run.
  int repetitions = 5;
  // Replaces the sampled points when set (read from --in).
  std::optional<ParticleSet> points;

  // Sweeps; empty means the experiment's default.
  std::vector<int> nd_sweep;
  std::vector<int> p_sweep;
  std::vector<std::size_t> n_sweep;
  std::vector<DistributionKind> dist_sweep;

  TreeConfig tree_config() const;
  EvalOptions eval_options() const;
};

struct FmmTiming {
  std::array<double, kPhaseCount> mean_seconds{};
  double mean_total = 0.0;
  int levels = 0;
  PotentialField potential;  // from the last run
};

/// Mean phase times over `repetitions` runs after a discarded warm-up.
FmmTiming time_fmm(const ParticleSet& points, const TreeConfig& cfg, const EvalOptions& options,
                   int repetitions);
double time_direct(const ParticleSet& points, bool parallel, int repetitions);

/// Oracle used for every reported tolerance.
PotentialField reference_potential(const ParticleSet& points, bool parallel);

/// Rows: one per FMM phase plus `total` (with tol when both routes ran) and `direct`.
std::vector<BenchmarkRow> run_accuracy(const ExperimentArgs& args);

struct CalibrationResult {
  std::vector<BenchmarkRow> rows;
  std::map<int, int> optimal_nd;  // p -> fastest N_d
};
/// Sweeps N_d for each p: `total` rows, `normalized` rows (seconds column
/// holds time / fastest time) and one `optimal` row per p.
CalibrationResult run_calibration(const ExperimentArgs& args);

struct BreakevenResult {
  std::vector<BenchmarkRow> rows;
  // Smallest swept N from which the FMM is faster for every larger N.
  std::optional<std::size_t> crossover;
};
/// `fmm` and `direct` total-time rows per N plus a `crossover` row when found.
BreakevenResult run_breakeven(const ExperimentArgs& args);

/// Per (distribution, N), experiment `adaptivity_<dist>`: a `total` row with
/// tol and a `normalized` row holding time / uniform time at the same N.
std::vector<BenchmarkRow> run_adaptivity(const ExperimentArgs& args);

std::vector<std::size_t> default_breakeven_sizes();

}  // namespace fmm2d::bench
