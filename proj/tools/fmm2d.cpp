// fmm2d: benchmark and evaluation driver for the 2D adaptive FMM.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fmm2d/bench/experiments.hpp"
#include "fmm2d/bench/io.hpp"
#include "fmm2d/connectivity.hpp"

namespace {

using namespace fmm2d;
using namespace fmm2d::bench;

enum ExitCode { kOk = 0, kBadArguments = 2, kDegenerate = 3, kIoFailure = 4 };

struct CliOptions {
  std::size_t n = 10000;
  std::string dist = "uniform";
  double sigma2 = 0.01;
  int p = 17;
  int nd = 35;
  double theta = 0.5;
  std::uint64_t seed = 1;
  std::string mode = "both";
  bool parallel = false;
  std::string in;
  std::string out;
  int reps = 5;
  std::vector<int> nd_list;
  std::vector<int> p_list;
  std::vector<std::size_t> n_list;
  std::vector<std::string> dists;
  std::string dump_mesh;
  bool symmetric_p2p = false;
};

void add_common(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--n", o.n, "number of sources")->check(CLI::PositiveNumber);
  cmd->add_option("--dist", o.dist, "point distribution")
      ->check(CLI::IsMember({"uniform", "normal", "layer"}));
  cmd->add_option("--sigma2", o.sigma2, "variance for normal/layer")->check(CLI::PositiveNumber);
  cmd->add_option("--p", o.p, "expansion order")->check(CLI::Range(1, 200));
  cmd->add_option("--nd", o.nd, "desired sources per finest box")->check(CLI::PositiveNumber);
  cmd->add_option("--theta", o.theta, "separation parameter")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--mode", o.mode, "what to run")->check(CLI::IsMember({"fmm", "direct", "both"}));
  cmd->add_option("--parallel", o.parallel, "one task per target box (true/false)");
  cmd->add_option("--in", o.in, "point file: `x y gamma` per line");
  cmd->add_option("--out", o.out, "output CSV (stdout if omitted)");
  cmd->add_option("--reps", o.reps, "timed repetitions after a warm-up")->check(CLI::PositiveNumber);
}

ExperimentArgs to_args(const CliOptions& o) {
  if (!(o.theta > 0.0 && o.theta < 1.0)) throw std::invalid_argument("--theta must lie in (0, 1)");
  ExperimentArgs a;
  a.n = o.n;
  a.dist = {parse_distribution(o.dist), o.sigma2, o.seed};
  a.p = o.p;
  a.nd = o.nd;
  a.theta = o.theta;
  a.mode = o.mode == "fmm" ? RunMode::Fmm : o.mode == "direct" ? RunMode::Direct : RunMode::Both;
  a.parallel = o.parallel;
  a.repetitions = o.reps;
  if (!o.in.empty()) a.points = read_points_file(o.in);
  a.nd_sweep = o.nd_list;
  a.p_sweep = o.p_list;
  a.n_sweep = o.n_list;
  for (const auto& d : o.dists) a.dist_sweep.push_back(parse_distribution(d));
  return a;
}

template <class Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write(out);
  if (!out) throw IoError("write to '" + path + "' failed");
}

void emit_rows(const CliOptions& o, const std::vector<BenchmarkRow>& rows) {
  emit(o.out, [&](std::ostream& s) { write_benchmark_csv(s, rows); });
}

void run_evaluate(const CliOptions& o) {
  const ExperimentArgs args = to_args(o);
  const ParticleSet points = args.points ? *args.points : sample_points(args.dist, args.n);
  const TreeConfig cfg = args.tree_config();

  if (!o.dump_mesh.empty()) {
    const FmmTree tree = build_tree(points, cfg);
    const InteractionLists lists = build_connectivity(tree, cfg.theta);
    emit(o.dump_mesh + "_boxes.csv", [&](std::ostream& s) { write_boxes_csv(s, tree); });
    emit(o.dump_mesh + "_lists.csv", [&](std::ostream& s) { write_connectivity_csv(s, lists); });
  }

  PotentialField field;
  if (args.mode == RunMode::Direct) {
    field = direct_evaluate(points, false, args.parallel);
  } else {
    EvalOptions opt = args.eval_options();
    opt.symmetric_p2p = o.symmetric_p2p;
    FmmResult r = fmm_evaluate(points, cfg, opt);
    field = std::move(r.potential);
    std::fprintf(stderr, "levels=%d boxes=%zu time=%.6fs", r.report.stats.levels,
                 r.report.stats.boxes, r.report.total());
    if (args.mode == RunMode::Both) {
      std::fprintf(stderr, " tol=%.3e",
                   max_rel_error(field, reference_potential(points, args.parallel)));
    }
    std::fprintf(stderr, "\n");
  }
  emit(o.out, [&](std::ostream& s) { write_potential_csv(s, field); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D adaptive fast multipole method: evaluation and benchmarks"};
  app.require_subcommand(1);
  CliOptions o;

  auto* accuracy = app.add_subcommand("accuracy", "FMM vs direct summation: phase times and tolerance");
  auto* calibrate = app.add_subcommand("calibrate", "sweep sources per box for one or more orders");
  auto* breakeven = app.add_subcommand("breakeven", "FMM vs direct total time over N");
  auto* adaptivity = app.add_subcommand("adaptivity", "time and tolerance across distributions");
  auto* evaluate = app.add_subcommand("evaluate", "evaluate potentials, write index,re,im");
  for (auto* cmd : {accuracy, calibrate, breakeven, adaptivity, evaluate}) add_common(cmd, o);
  calibrate->add_option("--nd-list", o.nd_list, "N_d values (default 10..100 step 5)")->delimiter(',');
  calibrate->add_option("--p-list", o.p_list, "orders (default --p)")->delimiter(',');
  breakeven->add_option("--n-list", o.n_list, "sizes (default 2^8..2^17)")->delimiter(',');
  adaptivity->add_option("--n-list", o.n_list, "sizes (default --n)")->delimiter(',');
  adaptivity->add_option("--dists", o.dists, "distributions (default all)")->delimiter(',');
  evaluate->add_option("--dump-mesh", o.dump_mesh, "write PREFIX_boxes.csv and PREFIX_lists.csv");
  evaluate->add_flag("--symmetric-p2p", o.symmetric_p2p, "pairwise-symmetric near field");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadArguments;
  }

  try {
    if (*accuracy) {
      emit_rows(o, run_accuracy(to_args(o)));
    } else if (*calibrate) {
      const auto result = run_calibration(to_args(o));
      emit_rows(o, result.rows);
      for (const auto& [p, nd] : result.optimal_nd) {
        std::fprintf(stderr, "p=%d optimal nd=%d\n", p, nd);
      }
    } else if (*breakeven) {
      const auto result = run_breakeven(to_args(o));
      emit_rows(o, result.rows);
      if (result.crossover) {
        std::fprintf(stderr, "crossover N=%zu\n", *result.crossover);
      } else {
        std::fprintf(stderr, "no crossover within the sweep\n");
      }
    } else if (*adaptivity) {
      emit_rows(o, run_adaptivity(to_args(o)));
    } else if (*evaluate) {
      run_evaluate(o);
    }
  } catch (const DegenerateInputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDegenerate;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIoFailure;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadArguments;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kOk;
}
