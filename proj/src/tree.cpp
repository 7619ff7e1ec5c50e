#include "fmm2d/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <utility>

namespace fmm2d {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void swap_entries(std::span<double> coords, std::span<Index> companion, std::size_t i,
                  std::size_t j) {
  std::swap(coords[i], coords[j]);
  std::swap(companion[i], companion[j]);
}

void insertion_sort(std::span<double> coords, std::span<Index> companion, std::size_t lo,
                    std::size_t hi) {
  for (std::size_t i = lo + 1; i <= hi; ++i) {
    for (std::size_t j = i; j > lo && coords[j] < coords[j - 1]; --j) {
      swap_entries(coords, companion, j, j - 1);
    }
  }
}

// Middle element for odd counts, mean of the two middle elements for even
// counts. Expects `coords` as left by partition_median.
double median_value(std::span<const double> coords, std::size_t split) {
  const double left_max = coords[split - 1];
  if (coords.size() % 2 == 1) return left_max;
  const double right_min = *std::min_element(coords.begin() + static_cast<std::ptrdiff_t>(split), coords.end());
  return 0.5 * (left_max + right_min);
}

struct Half {
  BoxGeometry rect;
  Index src_begin, src_end, eval_begin, eval_end;
};

struct Bisection {
  Half left;
  Half right;
};

class TreeBuilder {
 public:
  TreeBuilder(FmmTree& tree, const ParticleSet& points)
      : tree_(tree), points_(points), coords_(points.source_count()) {}

  Bisection bisect(const Half& box) {
    const Axis axis = split_direction(box.rect);
    const std::size_t n = box.src_end - box.src_begin;
    check_separable(box);

    const std::span<double> coords(coords_.data() + box.src_begin, n);
    const std::span<Index> perm(tree_.src_perm.data() + box.src_begin, n);
    for (std::size_t i = 0; i < n; ++i) {
      coords[i] = coordinate(points_.positions[perm[i]], axis);
    }
    const std::size_t split = n == 0 ? 0 : partition_median(coords, perm);
    const double cut = n == 0 ? coordinate(box.rect.center, axis) : median_value(coords, split);
    const Index src_mid = box.src_begin + static_cast<Index>(split);

    Index eval_mid;
    if (tree_.eval_aliases_sources) {
      eval_mid = src_mid;
    } else {
      auto first = tree_.eval_perm.begin() + box.eval_begin;
      auto last = tree_.eval_perm.begin() + box.eval_end;
      auto mid = std::partition(first, last, [&](Index i) {
        return coordinate(points_.eval_positions[i], axis) <= cut;
      });
      eval_mid = static_cast<Index>(mid - tree_.eval_perm.begin());
    }

    const auto& r = box.rect;
    BoxGeometry lo_rect, hi_rect;
    if (axis == Axis::X) {
      lo_rect = BoxGeometry::from_corners(r.x0(), r.y0(), cut, r.y1());
      hi_rect = BoxGeometry::from_corners(cut, r.y0(), r.x1(), r.y1());
    } else {
      lo_rect = BoxGeometry::from_corners(r.x0(), r.y0(), r.x1(), cut);
      hi_rect = BoxGeometry::from_corners(r.x0(), cut, r.x1(), r.y1());
    }
    return {{lo_rect, box.src_begin, src_mid, box.eval_begin, eval_mid},
            {hi_rect, src_mid, box.src_end, eval_mid, box.eval_end}};
  }

 private:
  void check_separable(const Half& box) const {
    if (box.src_end - box.src_begin < 2) return;
    const Complex first = points_.positions[tree_.src_perm[box.src_begin]];
    for (Index i = box.src_begin + 1; i < box.src_end; ++i) {
      if (points_.positions[tree_.src_perm[i]] != first) return;
    }
    throw DegenerateInputError("degenerate input: " + std::to_string(box.src_end - box.src_begin) +
                               " coincident sources cannot be split further");
  }

  FmmTree& tree_;
  const ParticleSet& points_;
  std::vector<double> coords_;
};

BoxGeometry bounding_rect(const ParticleSet& points) {
  double x0 = points.positions[0].real(), x1 = x0;
  double y0 = points.positions[0].imag(), y1 = y0;
  auto grow = [&](Complex z) {
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
  };
  for (Complex z : points.positions) grow(z);
  for (Complex z : points.eval_positions) grow(z);
  return BoxGeometry::from_corners(x0, y0, x1, y1);
}

}  // namespace

void ParticleSet::validate() const {
  if (positions.empty()) throw std::invalid_argument("particle set has no sources");
  if (strengths.size() != positions.size()) {
    throw std::invalid_argument("positions and strengths differ in length");
  }
  if (!std::all_of(positions.begin(), positions.end(), finite) ||
      !std::all_of(eval_positions.begin(), eval_positions.end(), finite) ||
      !std::all_of(strengths.begin(), strengths.end(), [](double g) { return std::isfinite(g); })) {
    throw std::invalid_argument("particle set contains non-finite values");
  }
  if (positions.size() > std::numeric_limits<Index>::max() ||
      eval_positions.size() > std::numeric_limits<Index>::max()) {
    throw std::invalid_argument("particle set too large for 32-bit indices");
  }
}

std::size_t FmmTree::box_count() const {
  std::size_t total = 0;
  for (const auto& lvl : levels) total += lvl.size();
  return total;
}

int num_levels(std::size_t n_sources, std::size_t n_desired) {
  // Smallest l >= 0 with 4^l >= (5/8) * N / N_d, i.e. 8 * N_d * 4^l >= 5 * N.
  const unsigned __int128 lhs_base = static_cast<unsigned __int128>(8) * n_desired;
  const unsigned __int128 rhs = static_cast<unsigned __int128>(5) * n_sources;
  int levels = 0;
  unsigned __int128 lhs = lhs_base;
  while (lhs < rhs) {
    lhs *= 4;
    ++levels;
  }
  return levels;
}

int max_levels_for(std::size_t n) {
  int levels = 0;
  std::size_t boxes = 1;
  while (boxes <= n / 4) {
    boxes *= 4;
    ++levels;
  }
  return levels;
}

std::size_t partition_median(std::span<double> coords, std::span<Index> companion) {
  const std::size_t n = coords.size();
  if (n == 0) return 0;
  const std::size_t split = (n + 1) / 2;
  const std::size_t target = split - 1;

  std::size_t lo = 0, hi = n - 1;
  while (hi > lo) {
    if (hi - lo < 16) {
      insertion_sort(coords, companion, lo, hi);
      break;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    if (coords[mid] < coords[lo]) swap_entries(coords, companion, mid, lo);
    if (coords[hi] < coords[lo]) swap_entries(coords, companion, hi, lo);
    if (coords[hi] < coords[mid]) swap_entries(coords, companion, hi, mid);
    // coords[lo] <= pivot <= coords[hi] act as sentinels.
    swap_entries(coords, companion, mid, hi - 1);
    const double pivot = coords[hi - 1];
    std::size_t i = lo, j = hi - 1;
    for (;;) {
      while (coords[++i] < pivot) {
      }
      while (pivot < coords[--j]) {
      }
      if (i >= j) break;
      swap_entries(coords, companion, i, j);
    }
    swap_entries(coords, companion, i, hi - 1);

    if (target == i) break;
    if (target < i) {
      hi = i - 1;
    } else {
      lo = i + 1;
    }
  }
  return split;
}

FmmTree build_tree(const ParticleSet& points, const TreeConfig& cfg, bool parallel) {
  points.validate();
  if (cfg.n_desired_per_box < 1) throw std::invalid_argument("n_desired_per_box must be >= 1");

  const std::size_t n = points.source_count();
  FmmTree tree;
  tree.eval_aliases_sources = points.evaluates_at_sources();
  int levels = cfg.levels_override ? std::max(0, *cfg.levels_override)
                                   : num_levels(n, static_cast<std::size_t>(cfg.n_desired_per_box));
  tree.n_levels = std::min(levels, max_levels_for(n));

  tree.src_perm.resize(n);
  std::iota(tree.src_perm.begin(), tree.src_perm.end(), Index{0});
  if (!tree.eval_aliases_sources) {
    tree.eval_perm.resize(points.eval_positions.size());
    std::iota(tree.eval_perm.begin(), tree.eval_perm.end(), Index{0});
  }
  const auto m = static_cast<Index>(points.eval_count());

  tree.levels.reserve(static_cast<std::size_t>(tree.n_levels) + 1);
  tree.levels.push_back({BoxNode{bounding_rect(points), 0, static_cast<Index>(n), 0, m}});

  TreeBuilder builder(tree, points);
  for (int l = 0; l < tree.n_levels; ++l) {
    const auto& parents = tree.levels.back();
    std::vector<BoxNode> children(parents.size() * 4);
    const auto count = static_cast<std::ptrdiff_t>(parents.size());

    // Degenerate-input errors cannot leave an OpenMP region; collect them.
    std::vector<std::string> failures(parents.size());
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      try {
        const BoxNode& p = parents[static_cast<std::size_t>(k)];
        const Bisection first = builder.bisect({p.geometry, p.src_begin, p.src_end, p.eval_begin, p.eval_end});
        const Bisection lower = builder.bisect(first.left);
        const Bisection upper = builder.bisect(first.right);
        const Half quarters[4] = {lower.left, lower.right, upper.left, upper.right};
        for (std::size_t c = 0; c < 4; ++c) {
          const Half& h = quarters[c];
          children[4 * static_cast<std::size_t>(k) + c] =
              BoxNode{h.rect, h.src_begin, h.src_end, h.eval_begin, h.eval_end};
        }
      } catch (const DegenerateInputError& e) {
        failures[static_cast<std::size_t>(k)] = e.what();
      }
    }
    for (const auto& f : failures) {
      if (!f.empty()) throw DegenerateInputError(f);
    }
    tree.levels.push_back(std::move(children));
  }

  tree.src_positions.resize(n);
  tree.src_strengths.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    tree.src_positions[i] = points.positions[tree.src_perm[i]];
    tree.src_strengths[i] = points.strengths[tree.src_perm[i]];
  }
  if (tree.eval_aliases_sources) {
    tree.eval_perm = tree.src_perm;
    tree.eval_positions = tree.src_positions;
  } else {
    tree.eval_positions.resize(tree.eval_perm.size());
    for (std::size_t i = 0; i < tree.eval_perm.size(); ++i) {
      tree.eval_positions[i] = points.eval_positions[tree.eval_perm[i]];
    }
  }
  return tree;
}

}  // namespace fmm2d
