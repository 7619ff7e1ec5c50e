#include <doctest.h>

#include <random>
#include <sstream>

#include "fmm2d/bench/experiments.hpp"
#include "fmm2d/bench/io.hpp"
#include "fmm2d/bench/sampling.hpp"

using namespace fmm2d;
using namespace fmm2d::bench;

namespace {

bool in_unit_square(Complex z) { return z.real() >= 0 && z.real() <= 1 && z.imag() >= 0 && z.imag() <= 1; }

const BenchmarkRow* find_row(const std::vector<BenchmarkRow>& rows, const std::string& experiment,
                             const std::string& phase) {
  for (const auto& r : rows) {
    if (r.experiment == experiment && r.phase == phase) return &r;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("splitmix64 reference values") {
  // First outputs of the reference generator seeded with 0.
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafull);
  CHECK(splitmix64(0x9E3779B97F4A7C15ull) == 0x6e789e6aa1b965f4ull);
}

TEST_CASE("stream rng") {
  StreamRng a(7, Stream::Positions), b(7, Stream::Positions), c(7, Stream::Strengths);
  bool differs = false;
  double mean = 0.0, var = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    if (u != c.uniform()) differs = true;
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  CHECK(differs);
  for (int i = 0; i < n; ++i) {
    const double z = a.normal();
    mean += z;
    var += z * z;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("distribution names") {
  for (auto k : {DistributionKind::Uniform, DistributionKind::Normal, DistributionKind::Layer}) {
    CHECK(parse_distribution(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_distribution("gaussian"), std::invalid_argument);
}

TEST_CASE("sampling") {
  for (auto kind : {DistributionKind::Uniform, DistributionKind::Normal, DistributionKind::Layer}) {
    CAPTURE(to_string(kind));
    const DistributionSpec spec{kind, 0.01, 42};
    const ParticleSet a = sample_points(spec, 5000);
    const ParticleSet b = sample_points(spec, 5000);
    CHECK(a.positions == b.positions);
    CHECK(a.strengths == b.strengths);
    CHECK(a.evaluates_at_sources());
    for (std::size_t i = 0; i < a.positions.size(); ++i) {
      REQUIRE(in_unit_square(a.positions[i]));
      REQUIRE(std::abs(a.strengths[i]) <= 1.0);
    }
    const ParticleSet other = sample_points({kind, 0.01, 43}, 5000);
    CHECK(other.positions != a.positions);
    CHECK(sample_points(spec, 1).positions.size() == 1);
  }

  SUBCASE("normal points cluster around the center") {
    const ParticleSet s = sample_points({DistributionKind::Normal, 0.01, 1}, 20000);
    double mx = 0, my = 0, vx = 0;
    for (const auto& z : s.positions) {
      mx += z.real();
      my += z.imag();
      vx += (z.real() - 0.5) * (z.real() - 0.5);
    }
    const double n = double(s.positions.size());
    CHECK(mx / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(my / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(vx / n == doctest::Approx(0.01).epsilon(0.1));
  }
  SUBCASE("layer points are uniform in x and narrow in y") {
    const ParticleSet s = sample_points({DistributionKind::Layer, 0.01, 1}, 20000);
    double mx = 0, vy = 0;
    for (const auto& z : s.positions) {
      mx += z.real();
      vy += (z.imag() - 0.5) * (z.imag() - 0.5);
    }
    const double n = double(s.positions.size());
    CHECK(mx / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(vy / n == doctest::Approx(0.01).epsilon(0.1));
  }
}

TEST_CASE("point files") {
  std::istringstream in("# header\n0.1 0.2 1.5\n\n  0.3\t0.4 -2\n# trailing comment\n");
  const ParticleSet s = read_points(in);
  REQUIRE(s.positions.size() == 2);
  CHECK(s.positions[1] == Complex{0.3, 0.4});
  CHECK(s.strengths[1] == -2.0);

  std::ostringstream out;
  write_points(out, s);
  std::istringstream back(out.str());
  const ParticleSet t = read_points(back);
  CHECK(t.positions == s.positions);
  CHECK(t.strengths == s.strengths);

  for (const char* bad : {"0.1 0.2\n", "0.1 0.2 x\n", "0.1 0.2 3 4\n", "", "# only comments\n"}) {
    CAPTURE(bad);
    std::istringstream b(bad);
    CHECK_THROWS_AS(read_points(b), IoError);
  }
  CHECK_THROWS_AS(read_points_file("/nonexistent/points.txt"), IoError);
}

TEST_CASE("potential CSV round trip") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  PotentialField f;
  for (int i = 0; i < 500; ++i) f.values.emplace_back(u(rng) * std::exp(u(rng) * 1e-5), u(rng));
  f.values.emplace_back(0.0, -0.0);
  f.values.emplace_back(std::numeric_limits<double>::denorm_min(), 1e300);
  std::ostringstream out;
  write_potential_csv(out, f);
  CHECK(out.str().rfind("index,re,im\n", 0) == 0);
  std::istringstream in(out.str());
  CHECK(read_potential_csv(in).values == f.values);
}

TEST_CASE("benchmark CSV round trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<BenchmarkRow> rows;
  for (int i = 0; i < 200; ++i) {
    BenchmarkRow r;
    r.experiment = i % 2 ? "accuracy" : "adaptivity_layer";
    r.n = rng() % 1000000;
    r.m = r.n;
    r.p = int(rng() % 40);
    r.nd = int(rng() % 100);
    r.theta = u(rng);
    r.levels = int(rng() % 10);
    r.phase = "m2l";
    r.seconds = u(rng) * 1e-3;
    if (i % 3) r.tol = u(rng) * 1e-7;
    rows.push_back(r);
  }
  std::ostringstream out;
  write_benchmark_csv(out, rows);
  CHECK(out.str().rfind(std::string(kBenchmarkHeader) + "\n", 0) == 0);
  std::istringstream in(out.str());
  CHECK(read_benchmark_csv(in) == rows);

  std::istringstream bad(std::string(kBenchmarkHeader) + "\naccuracy,1,1,17\n");
  CHECK_THROWS_AS(read_benchmark_csv(bad), IoError);
  std::istringstream wrong_header("a,b\n");
  CHECK_THROWS_AS(read_benchmark_csv(wrong_header), IoError);
}

TEST_CASE("accuracy experiment") {
  ExperimentArgs args;
  args.n = 3000;
  args.repetitions = 1;
  const auto rows = run_accuracy(args);
  CHECK(rows.size() == kPhaseCount + 2);
  const BenchmarkRow* total = find_row(rows, "accuracy", "total");
  REQUIRE(total);
  REQUIRE(total->tol);
  CHECK(*total->tol <= 1e-5);
  CHECK(find_row(rows, "accuracy", "direct"));

  double phases = 0.0;
  for (std::size_t k = 0; k < kPhaseCount; ++k) {
    const auto* r = find_row(rows, "accuracy", std::string(phase_name(static_cast<Phase>(k))));
    REQUIRE(r);
    phases += r->seconds;
  }
  CHECK(phases == doctest::Approx(total->seconds).epsilon(1e-9));

  SUBCASE("lower order is less accurate") {
    ExperimentArgs low = args;
    low.p = 4;
    CHECK(*find_row(run_accuracy(low), "accuracy", "total")->tol > *total->tol);
  }
  SUBCASE("zero levels") {
    ExperimentArgs tiny = args;
    tiny.n = 100;
    tiny.nd = 100;
    const auto* t = find_row(run_accuracy(tiny), "accuracy", "total");
    CHECK(t->levels == 0);
    CHECK(*t->tol <= 1e-14);
  }
  SUBCASE("modes") {
    ExperimentArgs fmm_only = args;
    fmm_only.mode = RunMode::Fmm;
    const auto r = run_accuracy(fmm_only);
    CHECK_FALSE(find_row(r, "accuracy", "total")->tol);
    CHECK_FALSE(find_row(r, "accuracy", "direct"));
    ExperimentArgs direct_only = args;
    direct_only.mode = RunMode::Direct;
    CHECK(run_accuracy(direct_only).size() == 1);
  }
  SUBCASE("invalid repetitions") {
    ExperimentArgs bad = args;
    bad.repetitions = 0;
    CHECK_THROWS_AS(run_accuracy(bad), std::invalid_argument);
  }
}

TEST_CASE("calibration experiment") {
  ExperimentArgs args;
  args.n = 2000;
  args.repetitions = 1;
  args.nd_sweep = {20};
  const auto single = run_calibration(args);
  CHECK(single.optimal_nd.at(17) == 20);
  const auto* norm = find_row(single.rows, "calibrate", "normalized");
  REQUIRE(norm);
  CHECK(norm->seconds == 1.0);

  args.nd_sweep = {10, 40};
  args.p_sweep = {8, 12};
  const auto sweep = run_calibration(args);
  CHECK(sweep.optimal_nd.size() == 2);
  CHECK(sweep.rows.size() == 2 * (2 * 2 + 1));
  for (const auto& [p, nd] : sweep.optimal_nd) CHECK((nd == 10 || nd == 40));
}

TEST_CASE("breakeven experiment") {
  ExperimentArgs args;
  args.repetitions = 1;
  args.n_sweep = {8192, 256, 1024};
  const auto result = run_breakeven(args);
  CHECK(result.rows.size() >= 6);
  CHECK(result.rows.front().n == 256);
  // Far above any crossover the FMM wins.
  REQUIRE(result.crossover);
  CHECK(*result.crossover <= 8192);
  CHECK(find_row(result.rows, "breakeven", "crossover")->n == *result.crossover);
}

TEST_CASE("adaptivity experiment") {
  ExperimentArgs args;
  args.n = 3000;
  args.repetitions = 1;
  const auto rows = run_adaptivity(args);
  CHECK(rows.size() == 6);
  CHECK(find_row(rows, "adaptivity_uniform", "normalized")->seconds == 1.0);
  for (const char* name : {"adaptivity_uniform", "adaptivity_normal", "adaptivity_layer"}) {
    const auto* total = find_row(rows, name, "total");
    REQUIRE(total);
    REQUIRE(total->tol);
    CHECK(*total->tol <= 1e-5);
  }

  args.dist_sweep = {DistributionKind::Layer};
  const auto layer_only = run_adaptivity(args);
  CHECK(layer_only.size() == 2);
  CHECK(layer_only[0].experiment == "adaptivity_layer");
}
