#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "fmm2d/tree.hpp"
#include "test_support.hpp"

using namespace fmm2d;
using fmm2d::testing::uniform_particles;

namespace {

void check_tree_invariants(const FmmTree& tree, const ParticleSet& points) {
  for (int l = 0; l <= tree.n_levels; ++l) {
    REQUIRE(tree.level(l).size() == (std::size_t{1} << (2 * l)));
  }
  // Children partition the parent's ranges and tile its rectangle.
  for (int l = 0; l < tree.n_levels; ++l) {
    const auto& parents = tree.level(l);
    const auto& children = tree.level(l + 1);
    for (Index k = 0; k < parents.size(); ++k) {
      const BoxNode& p = parents[k];
      Index src = p.src_begin, eval = p.eval_begin;
      double area = 0.0;
      for (Index c = FmmTree::first_child(k); c < FmmTree::first_child(k) + 4; ++c) {
        const BoxNode& ch = children[c];
        CHECK(ch.src_begin == src);
        CHECK(ch.eval_begin == eval);
        CHECK(ch.src_begin <= ch.src_end);
        src = ch.src_end;
        eval = ch.eval_end;
        CHECK(ch.geometry.x0() >= p.geometry.x0() - 1e-15);
        CHECK(ch.geometry.x1() <= p.geometry.x1() + 1e-15);
        CHECK(ch.geometry.y0() >= p.geometry.y0() - 1e-15);
        CHECK(ch.geometry.y1() <= p.geometry.y1() + 1e-15);
        area += 4.0 * ch.geometry.half_width * ch.geometry.half_height;
      }
      CHECK(src == p.src_end);
      CHECK(eval == p.eval_end);
      CHECK(area == doctest::Approx(4.0 * p.geometry.half_width * p.geometry.half_height).epsilon(1e-9));
    }
  }
  // Containment at every level.
  for (int l = 0; l <= tree.n_levels; ++l) {
    for (const BoxNode& b : tree.level(l)) {
      for (Index i = b.src_begin; i < b.src_end; ++i) CHECK(b.geometry.contains(tree.src_positions[i]));
      for (Index i = b.eval_begin; i < b.eval_end; ++i) CHECK(b.geometry.contains(tree.eval_positions[i]));
    }
  }
  // Permutations are bijections and the permuted data matches.
  std::vector<Index> sorted = tree.src_perm;
  std::sort(sorted.begin(), sorted.end());
  for (Index i = 0; i < sorted.size(); ++i) REQUIRE(sorted[i] == i);
  for (std::size_t i = 0; i < tree.src_perm.size(); ++i) {
    CHECK(tree.src_positions[i] == points.positions[tree.src_perm[i]]);
    CHECK(tree.src_strengths[i] == points.strengths[tree.src_perm[i]]);
  }
  std::vector<Index> eval_sorted = tree.eval_perm;
  std::sort(eval_sorted.begin(), eval_sorted.end());
  REQUIRE(eval_sorted.size() == points.eval_count());
  for (Index i = 0; i < eval_sorted.size(); ++i) REQUIRE(eval_sorted[i] == i);
}

std::pair<std::size_t, std::size_t> finest_count_range(const FmmTree& tree) {
  std::size_t lo = SIZE_MAX, hi = 0;
  for (const auto& b : tree.finest()) {
    lo = std::min<std::size_t>(lo, b.src_count());
    hi = std::max<std::size_t>(hi, b.src_count());
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("num_levels reproduces the level-count formula") {
  CHECK(num_levels(2949120, 45) == 8);
  CHECK(num_levels(1179648, 45) == 7);
  CHECK(num_levels(45, 45) == 0);
  CHECK(num_levels(1, 1) == 0);
  // Interval (18*2^16, 72*2^16] maps to 8 levels for N_d = 45.
  CHECK(num_levels(18 * 65536 + 1, 45) == 8);
  CHECK(num_levels(72 * 65536, 45) == 8);
  CHECK(num_levels(72 * 65536 + 1, 45) == 9);
}

TEST_CASE("num_levels agrees with the floating-point formula off the boundaries") {
  for (std::size_t n = 1; n < 200000; n += 37) {
    for (std::size_t nd : {1u, 7u, 35u, 45u}) {
      const double raw = 0.5 * std::log2(0.625 * double(n) / double(nd));
      if (std::abs(raw - std::round(raw)) < 1e-9) continue;
      CHECK(num_levels(n, nd) == std::max(0, int(std::ceil(raw))));
    }
  }
}

TEST_CASE("max_levels_for keeps boxes non-empty") {
  CHECK(max_levels_for(1) == 0);
  CHECK(max_levels_for(3) == 0);
  CHECK(max_levels_for(4) == 1);
  CHECK(max_levels_for(15) == 1);
  CHECK(max_levels_for(16) == 2);
}

TEST_CASE("partition_median examples") {
  SUBCASE("three values") {
    std::vector<double> c{3, 1, 2};
    std::vector<Index> perm{0, 1, 2};
    CHECK(partition_median(c, perm) == 2);
    CHECK(std::multiset<double>(c.begin(), c.begin() + 2) == std::multiset<double>{1, 2});
    CHECK(c[2] == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(c[i] == std::vector<double>{3, 1, 2}[perm[i]]);
  }
  SUBCASE("all ties") {
    std::vector<double> c{5, 5, 5, 5};
    std::vector<Index> perm{0, 1, 2, 3};
    CHECK(partition_median(c, perm) == 2);
    CHECK(std::all_of(c.begin(), c.end(), [](double v) { return v == 5; }));
  }
  SUBCASE("singleton") {
    std::vector<double> c{42};
    std::vector<Index> perm{0};
    CHECK(partition_median(c, perm) == 1);
  }
}

TEST_CASE("partition_median matches a full sort on random arrays") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> len(1, 10000);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = trial < 40 ? std::size_t(trial + 1) : len(rng);
    // Some arrays draw from a tiny value set to exercise ties.
    const bool ties = trial % 3 == 0;
    std::uniform_int_distribution<int> small(0, 5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> original(n);
    for (auto& v : original) v = ties ? double(small(rng)) : u(rng);

    std::vector<double> coords = original;
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), Index{0});
    const std::size_t split = partition_median(coords, perm);
    REQUIRE(split == (n + 1) / 2);

    std::vector<double> sorted = original;
    std::sort(sorted.begin(), sorted.end());
    std::multiset<double> left(coords.begin(), coords.begin() + split);
    std::multiset<double> oracle_left(sorted.begin(), sorted.begin() + split);
    CHECK(left == oracle_left);
    CHECK(coords[split - 1] == sorted[split - 1]);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(coords[i] == original[perm[i]]);
  }
}

TEST_CASE("four corners give one source per box") {
  ParticleSet pts;
  pts.positions = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  pts.strengths = {1, 1, 1, 1};
  TreeConfig cfg;
  cfg.n_desired_per_box = 1;
  const FmmTree tree = build_tree(pts, cfg);
  CHECK(tree.n_levels == 1);
  for (const auto& b : tree.finest()) CHECK(b.src_count() == 1);
  check_tree_invariants(tree, pts);
}

TEST_CASE("coincident points are rejected as degenerate") {
  ParticleSet pts;
  pts.positions.assign(10, Complex{0.3, 0.3});
  pts.strengths.assign(10, 1.0);
  TreeConfig cfg;
  cfg.n_desired_per_box = 1;
  CHECK_THROWS_AS(build_tree(pts, cfg), DegenerateInputError);
  // Direct evaluation only: nothing to split.
  cfg.n_desired_per_box = 35;
  CHECK(build_tree(pts, cfg).n_levels == 0);
}

TEST_CASE("invalid particle sets are rejected") {
  ParticleSet empty;
  CHECK_THROWS_AS(build_tree(empty, {}), std::invalid_argument);
  ParticleSet mismatch;
  mismatch.positions = {{0, 0}};
  CHECK_THROWS_AS(build_tree(mismatch, {}), std::invalid_argument);
  ParticleSet nan;
  nan.positions = {{std::nan(""), 0}};
  nan.strengths = {1};
  CHECK_THROWS_AS(build_tree(nan, {}), std::invalid_argument);
}

TEST_CASE("tree invariants on random inputs") {
  for (std::size_t n : {1u, 2u, 5u, 1000u, 10000u, 100000u}) {
    CAPTURE(n);
    const ParticleSet pts = uniform_particles(n, n);
    TreeConfig cfg;
    const FmmTree tree = build_tree(pts, cfg);
    CHECK(tree.n_levels == std::min(num_levels(n, 35), max_levels_for(n)));
    check_tree_invariants(tree, pts);
    const auto [lo, hi] = finest_count_range(tree);
    CHECK(hi - lo <= 1);
  }
}

TEST_CASE("levels are clamped so that no box is empty") {
  const ParticleSet pts = uniform_particles(20, 3);
  TreeConfig cfg;
  cfg.levels_override = 5;
  const FmmTree tree = build_tree(pts, cfg);
  CHECK(tree.n_levels == 2);
  CHECK(finest_count_range(tree).first >= 1);
}

TEST_CASE("separate evaluation points follow the source cuts") {
  ParticleSet pts = uniform_particles(3000, 5);
  const ParticleSet targets = uniform_particles(1700, 6);
  pts.eval_positions = targets.positions;
  pts.eval_positions.push_back({1.5, -0.5});  // outside the source hull
  TreeConfig cfg;
  cfg.n_desired_per_box = 20;
  const FmmTree tree = build_tree(pts, cfg);
  CHECK_FALSE(tree.eval_aliases_sources);
  check_tree_invariants(tree, pts);
  CHECK(tree.level(0)[0].geometry.contains({1.5, -0.5}));
}

TEST_CASE("parallel build equals sequential build") {
  const ParticleSet pts = uniform_particles(50000, 9);
  const FmmTree a = build_tree(pts, {}, false);
  const FmmTree b = build_tree(pts, {}, true);
  CHECK(a.src_perm == b.src_perm);
  for (int l = 0; l <= a.n_levels; ++l) {
    for (std::size_t k = 0; k < a.level(l).size(); ++k) {
      CHECK(a.level(l)[k].geometry.center == b.level(l)[k].geometry.center);
      CHECK(a.level(l)[k].src_begin == b.level(l)[k].src_begin);
    }
  }
}

TEST_CASE("45*2^16 uniform sources give 8 levels of exactly 45 per box") {
  const std::size_t n = 45u << 16;
  const ParticleSet pts = uniform_particles(n, 2024);
  TreeConfig cfg;
  cfg.n_desired_per_box = 45;
  const FmmTree tree = build_tree(pts, cfg);
  CHECK(tree.n_levels == 8);
  const auto [lo, hi] = finest_count_range(tree);
  CHECK(lo == 45);
  CHECK(hi == 45);
}
