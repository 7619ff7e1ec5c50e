#include "fmm2d/bench/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace fmm2d::bench {

namespace {

using Clock = std::chrono::steady_clock;

ParticleSet points_for(const ExperimentArgs& args) {
  return args.points ? *args.points : sample_points(args.dist, args.n);
}

BenchmarkRow base_row(const char* experiment, const ParticleSet& points, const TreeConfig& cfg,
                      int levels) {
  BenchmarkRow row;
  row.experiment = experiment;
  row.n = points.source_count();
  row.m = points.eval_count();
  row.p = cfg.p_terms;
  row.nd = cfg.n_desired_per_box;
  row.theta = cfg.theta.theta;
  row.levels = levels;
  return row;
}

void check_repetitions(int repetitions) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
}

}  // namespace

TreeConfig ExperimentArgs::tree_config() const {
  TreeConfig cfg;
  cfg.n_desired_per_box = nd;
  cfg.p_terms = p;
  cfg.theta.theta = theta;
  return cfg;
}

EvalOptions ExperimentArgs::eval_options() const {
  EvalOptions opt;
  opt.parallel = parallel;
  return opt;
}

FmmTiming time_fmm(const ParticleSet& points, const TreeConfig& cfg, const EvalOptions& options,
                   int repetitions) {
  check_repetitions(repetitions);
  FmmTiming timing;
  FmmResult warmup = fmm_evaluate(points, cfg, options);
  timing.levels = warmup.report.stats.levels;
  for (int rep = 0; rep < repetitions; ++rep) {
    FmmResult run = fmm_evaluate(points, cfg, options);
    for (std::size_t k = 0; k < kPhaseCount; ++k) timing.mean_seconds[k] += run.report.seconds[k];
    timing.mean_total += run.report.total();
    if (rep + 1 == repetitions) timing.potential = std::move(run.potential);
  }
  for (double& s : timing.mean_seconds) s /= repetitions;
  timing.mean_total /= repetitions;
  return timing;
}

double time_direct(const ParticleSet& points, bool parallel, int repetitions) {
  check_repetitions(repetitions);
  direct_evaluate(points, false, parallel);
  double total = 0.0;
  for (int rep = 0; rep < repetitions; ++rep) {
    const auto start = Clock::now();
    direct_evaluate(points, false, parallel);
    total += std::chrono::duration<double>(Clock::now() - start).count();
  }
  return total / repetitions;
}

PotentialField reference_potential(const ParticleSet& points, bool parallel) {
  return direct_evaluate(points, false, parallel);
}

std::vector<BenchmarkRow> run_accuracy(const ExperimentArgs& args) {
  const ParticleSet points = points_for(args);
  const TreeConfig cfg = args.tree_config();
  std::vector<BenchmarkRow> rows;

  std::optional<FmmTiming> fmm;
  if (args.mode != RunMode::Direct) {
    fmm = time_fmm(points, cfg, args.eval_options(), args.repetitions);
    for (std::size_t k = 0; k < kPhaseCount; ++k) {
      BenchmarkRow row = base_row("accuracy", points, cfg, fmm->levels);
      row.phase = phase_name(static_cast<Phase>(k));
      row.seconds = fmm->mean_seconds[k];
      rows.push_back(row);
    }
    BenchmarkRow total = base_row("accuracy", points, cfg, fmm->levels);
    total.phase = "total";
    total.seconds = fmm->mean_total;
    if (args.mode == RunMode::Both) {
      total.tol = max_rel_error(fmm->potential, reference_potential(points, args.parallel));
    }
    rows.push_back(total);
  }
  if (args.mode != RunMode::Fmm) {
    BenchmarkRow row = base_row("accuracy", points, cfg, fmm ? fmm->levels : 0);
    row.phase = "direct";
    row.seconds = time_direct(points, args.parallel, args.repetitions);
    rows.push_back(row);
  }
  return rows;
}

CalibrationResult run_calibration(const ExperimentArgs& args) {
  std::vector<int> nds = args.nd_sweep;
  if (nds.empty()) {
    for (int nd = 10; nd <= 100; nd += 5) nds.push_back(nd);
  }
  const std::vector<int> ps = args.p_sweep.empty() ? std::vector<int>{args.p} : args.p_sweep;
  const ParticleSet points = points_for(args);

  CalibrationResult result;
  for (int p : ps) {
    std::vector<BenchmarkRow> totals;
    for (int nd : nds) {
      TreeConfig cfg = args.tree_config();
      cfg.p_terms = p;
      cfg.n_desired_per_box = nd;
      const FmmTiming t = time_fmm(points, cfg, args.eval_options(), args.repetitions);
      BenchmarkRow row = base_row("calibrate", points, cfg, t.levels);
      row.phase = "total";
      row.seconds = t.mean_total;
      totals.push_back(row);
    }
    const auto best = std::min_element(totals.begin(), totals.end(),
                                       [](const auto& a, const auto& b) { return a.seconds < b.seconds; });
    result.optimal_nd[p] = best->nd;
    const double fastest = best->seconds;
    for (const auto& row : totals) {
      result.rows.push_back(row);
      BenchmarkRow norm = row;
      norm.phase = "normalized";
      norm.seconds = fastest > 0.0 ? row.seconds / fastest : 1.0;
      result.rows.push_back(norm);
    }
    BenchmarkRow opt = *best;
    opt.phase = "optimal";
    result.rows.push_back(opt);
  }
  return result;
}

std::vector<std::size_t> default_breakeven_sizes() {
  std::vector<std::size_t> sizes;
  for (std::size_t n = 1u << 8; n <= (1u << 17); n *= 2) sizes.push_back(n);
  return sizes;
}

BreakevenResult run_breakeven(const ExperimentArgs& args) {
  std::vector<std::size_t> sizes = args.n_sweep.empty() ? default_breakeven_sizes() : args.n_sweep;
  std::sort(sizes.begin(), sizes.end());
  const TreeConfig cfg = args.tree_config();

  BreakevenResult result;
  std::vector<bool> fmm_wins;
  for (std::size_t n : sizes) {
    const ParticleSet points = sample_points(args.dist, n);
    const FmmTiming t = time_fmm(points, cfg, args.eval_options(), args.repetitions);
    const double direct = time_direct(points, args.parallel, args.repetitions);

    BenchmarkRow fmm_row = base_row("breakeven", points, cfg, t.levels);
    fmm_row.phase = "fmm";
    fmm_row.seconds = t.mean_total;
    BenchmarkRow direct_row = base_row("breakeven", points, cfg, t.levels);
    direct_row.phase = "direct";
    direct_row.seconds = direct;
    result.rows.push_back(fmm_row);
    result.rows.push_back(direct_row);
    fmm_wins.push_back(t.mean_total < direct);
  }

  std::size_t first = sizes.size();
  while (first > 0 && fmm_wins[first - 1]) --first;
  if (first < sizes.size()) {
    result.crossover = sizes[first];
    BenchmarkRow row;
    row.experiment = "breakeven";
    row.n = row.m = sizes[first];
    row.p = cfg.p_terms;
    row.nd = cfg.n_desired_per_box;
    row.theta = cfg.theta.theta;
    row.levels = num_levels(sizes[first], static_cast<std::size_t>(cfg.n_desired_per_box));
    row.phase = "crossover";
    result.rows.push_back(row);
  }
  return result;
}

std::vector<BenchmarkRow> run_adaptivity(const ExperimentArgs& args) {
  const std::vector<DistributionKind> kinds =
      args.dist_sweep.empty()
          ? std::vector<DistributionKind>{DistributionKind::Uniform, DistributionKind::Normal,
                                          DistributionKind::Layer}
          : args.dist_sweep;
  const std::vector<std::size_t> sizes = args.n_sweep.empty() ? std::vector<std::size_t>{args.n}
                                                              : args.n_sweep;
  const TreeConfig cfg = args.tree_config();

  std::vector<BenchmarkRow> rows;
  for (std::size_t n : sizes) {
    auto measure = [&](DistributionKind kind) {
      DistributionSpec spec = args.dist;
      spec.kind = kind;
      const ParticleSet points = sample_points(spec, n);
      const FmmTiming t = time_fmm(points, cfg, args.eval_options(), args.repetitions);
      BenchmarkRow row = base_row("adaptivity", points, cfg, t.levels);
      row.experiment = "adaptivity_" + std::string(to_string(kind));
      row.phase = "total";
      row.seconds = t.mean_total;
      if (args.mode != RunMode::Fmm) {
        row.tol = max_rel_error(t.potential, reference_potential(points, args.parallel));
      }
      return row;
    };
    std::optional<BenchmarkRow> uniform;
    std::vector<BenchmarkRow> measured;
    for (DistributionKind kind : kinds) {
      measured.push_back(measure(kind));
      if (kind == DistributionKind::Uniform) uniform = measured.back();
    }
    if (!uniform) uniform = measure(DistributionKind::Uniform);
    for (const auto& row : measured) {
      rows.push_back(row);
      BenchmarkRow norm = row;
      norm.phase = "normalized";
      norm.seconds = uniform->seconds > 0.0 ? row.seconds / uniform->seconds : 1.0;
      norm.tol.reset();
      rows.push_back(norm);
    }
  }
  return rows;
}

}  // namespace fmm2d::bench
