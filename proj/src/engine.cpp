#include "fmm2d/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace fmm2d {

namespace {

using Clock = std::chrono::steady_clock;

class PhaseTimer {
 public:
  explicit PhaseTimer(EngineReport& report) : report_(report), last_(Clock::now()) {}

  void lap(Phase phase) {
    const auto now = Clock::now();
    report_[phase] += std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }

 private:
  EngineReport& report_;
  Clock::time_point last_;
};

// Coefficient storage for one level: (p+1) coefficients per box.
class LevelCoefficients {
 public:
  LevelCoefficients(std::size_t boxes, std::size_t terms) : terms_(terms), data_(boxes * terms) {}
  std::span<Complex> operator[](std::size_t box) { return {data_.data() + box * terms_, terms_}; }
  std::span<const Complex> operator[](std::size_t box) const {
    return {data_.data() + box * terms_, terms_};
  }

 private:
  std::size_t terms_;
  std::vector<Complex> data_;
};

template <class T>
std::span<T> slice(std::vector<T>& v, Index begin, Index end) {
  return {v.data() + begin, static_cast<std::size_t>(end - begin)};
}
template <class T>
std::span<const T> slice(const std::vector<T>& v, Index begin, Index end) {
  return {v.data() + begin, static_cast<std::size_t>(end - begin)};
}

TreeStats collect_stats(const FmmTree& tree, const InteractionLists& lists) {
  TreeStats s;
  s.levels = tree.n_levels;
  s.boxes = tree.box_count();
  const auto& finest = tree.finest();
  s.finest_boxes = finest.size();
  s.min_sources_per_box = std::numeric_limits<std::size_t>::max();
  std::size_t total = 0;
  for (const auto& box : finest) {
    s.min_sources_per_box = std::min<std::size_t>(s.min_sources_per_box, box.src_count());
    s.max_sources_per_box = std::max<std::size_t>(s.max_sources_per_box, box.src_count());
    total += box.src_count();
  }
  s.mean_sources_per_box = static_cast<double>(total) / static_cast<double>(finest.size());
  for (std::size_t l = 1; l < lists.weak.size(); ++l) {
    for (const auto& list : lists.weak[l]) s.weak.add(list.size());
  }
  for (const auto& list : lists.p2p) s.p2p.add(list.size());
  for (const auto& list : lists.p2l) s.p2l.add(list.size());
  for (const auto& list : lists.m2p) s.m2p.add(list.size());
  return s;
}

}  // namespace

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::Sort: return "sort";
    case Phase::Connect: return "connect";
    case Phase::P2M: return "p2m";
    case Phase::M2M: return "m2m";
    case Phase::M2L: return "m2l";
    case Phase::L2L: return "l2l";
    case Phase::L2P: return "l2p";
    case Phase::P2P: return "p2p";
    case Phase::Other: return "other";
  }
  return "unknown";
}

void ListHistogram::add(std::size_t length) {
  if (counts.size() <= length) counts.resize(length + 1, 0);
  ++counts[length];
}

double EngineReport::total() const {
  double sum = 0.0;
  for (double s : seconds) sum += s;
  return sum;
}

FmmResult fmm_evaluate(const ParticleSet& points, const TreeConfig& cfg,
                       const EvalOptions& options) {
  if (cfg.p_terms < 1) throw std::invalid_argument("p_terms must be >= 1");
  FmmResult result;
  EngineReport& report = result.report;
  PhaseTimer timer(report);
  const bool par = options.parallel;

  const FmmTree tree = build_tree(points, cfg, par);
  timer.lap(Phase::Sort);

  const InteractionLists lists = build_connectivity(tree, cfg.theta, par);
  timer.lap(Phase::Connect);

  const auto terms = static_cast<std::size_t>(cfg.p_terms) + 1;
  const int finest = tree.n_levels;
  std::vector<LevelCoefficients> multipoles;
  std::vector<LevelCoefficients> locals;
  for (int l = 0; l <= finest; ++l) {
    multipoles.emplace_back(tree.level(l).size(), terms);
    locals.emplace_back(tree.level(l).size(), terms);
  }
  std::vector<Complex> potential(tree.eval_positions.size());
  timer.lap(Phase::Other);

  const auto& leaves = tree.finest();
  const auto n_leaves = static_cast<std::ptrdiff_t>(leaves.size());

  // Initialization: P2M for every leaf, P2L from the reclassified pairs.
#pragma omp parallel for schedule(dynamic, 8) if (par)
  for (std::ptrdiff_t k = 0; k < n_leaves; ++k) {
    const auto b = static_cast<Index>(k);
    const BoxNode& box = leaves[b];
    p2m_accumulate(slice(tree.src_positions, box.src_begin, box.src_end),
                   slice(tree.src_strengths, box.src_begin, box.src_end), box.geometry.center,
                   multipoles[finest][b]);
    for (Index a : lists.p2l[b]) {
      const BoxNode& src = leaves[a];
      p2l_accumulate(slice(tree.src_positions, src.src_begin, src.src_end),
                     slice(tree.src_strengths, src.src_begin, src.src_end), box.geometry.center,
                     locals[finest][b]);
    }
  }
  timer.lap(Phase::P2M);

  for (int l = finest - 1; l >= 0; --l) {
    const auto& parents = tree.level(l);
    const auto& children = tree.level(l + 1);
    const auto count = static_cast<std::ptrdiff_t>(parents.size());
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      const auto b = static_cast<Index>(k);
      for (Index c = FmmTree::first_child(b); c < FmmTree::first_child(b) + 4; ++c) {
        m2m_accumulate(multipoles[l + 1][c], children[c].geometry.center,
                       parents[b].geometry.center, multipoles[l][b], options.m2m_variant);
      }
    }
  }
  timer.lap(Phase::M2M);

  for (int l = 1; l <= finest; ++l) {
    const auto& boxes = tree.level(l);
    const auto count = static_cast<std::ptrdiff_t>(boxes.size());
#pragma omp parallel for schedule(dynamic, 16) if (par)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      const auto b = static_cast<Index>(k);
      for (Index a : lists.weak[l][b]) {
        m2l_accumulate(multipoles[l][a], boxes[a].geometry.center, boxes[b].geometry.center,
                       locals[l][b]);
      }
    }
  }
  timer.lap(Phase::M2L);

  for (int l = 1; l <= finest; ++l) {
    const auto& parents = tree.level(l - 1);
    const auto& boxes = tree.level(l);
    const auto count = static_cast<std::ptrdiff_t>(boxes.size());
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      const auto b = static_cast<Index>(k);
      const Index parent = FmmTree::parent(b);
      l2l_accumulate(locals[l - 1][parent], parents[parent].geometry.center,
                     boxes[b].geometry.center, locals[l][b]);
    }
  }
  timer.lap(Phase::L2L);

  // Evaluation: L2P for every leaf, M2P from the reclassified pairs.
#pragma omp parallel for schedule(dynamic, 8) if (par)
  for (std::ptrdiff_t k = 0; k < n_leaves; ++k) {
    const auto b = static_cast<Index>(k);
    const BoxNode& box = leaves[b];
    const auto local = locals[finest][b];
    for (Index i = box.eval_begin; i < box.eval_end; ++i) {
      Complex value = l2p(local, box.geometry.center, tree.eval_positions[i]);
      for (Index a : lists.m2p[b]) {
        value += m2p(multipoles[finest][a], leaves[a].geometry.center, tree.eval_positions[i]);
      }
      potential[i] += value;
    }
  }
  timer.lap(Phase::L2P);

  std::size_t coincident = 0;
  if (options.symmetric_p2p && !par && tree.eval_aliases_sources) {
    for (Index b = 0; b < leaves.size(); ++b) {
      const BoxNode& tb = leaves[b];
      for (Index a : lists.p2p[b]) {
        if (a < b) continue;
        const BoxNode& sb = leaves[a];
        if (a == b) {
          coincident += p2p_symmetric_self_accumulate(
              slice(tree.src_positions, tb.src_begin, tb.src_end),
              slice(tree.src_strengths, tb.src_begin, tb.src_end),
              slice(potential, tb.eval_begin, tb.eval_end));
        } else {
          // Each unordered pair is visited once, so count both directions.
          coincident += 2 * p2p_symmetric_accumulate(
              slice(tree.src_positions, tb.src_begin, tb.src_end),
              slice(tree.src_strengths, tb.src_begin, tb.src_end),
              slice(potential, tb.eval_begin, tb.eval_end),
              slice(tree.src_positions, sb.src_begin, sb.src_end),
              slice(tree.src_strengths, sb.src_begin, sb.src_end),
              slice(potential, sb.eval_begin, sb.eval_end));
        }
      }
    }
  } else {
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : coincident) if (par)
    for (std::ptrdiff_t k = 0; k < n_leaves; ++k) {
      const auto b = static_cast<Index>(k);
      const BoxNode& tb = leaves[b];
      for (Index a : lists.p2p[b]) {
        const BoxNode& sb = leaves[a];
        coincident += p2p_accumulate(slice(tree.eval_positions, tb.eval_begin, tb.eval_end),
                                     slice(tree.src_positions, sb.src_begin, sb.src_end),
                                     slice(tree.src_strengths, sb.src_begin, sb.src_end),
                                     slice(potential, tb.eval_begin, tb.eval_end),
                                     tree.eval_aliases_sources && a == b);
      }
    }
  }
  report.coincident_pairs = coincident;
  timer.lap(Phase::P2P);

  result.potential.values.resize(potential.size());
  for (std::size_t i = 0; i < potential.size(); ++i) {
    result.potential.values[tree.eval_perm[i]] = potential[i];
  }
  report.stats = collect_stats(tree, lists);
  timer.lap(Phase::Other);
  return result;
}

PotentialField direct_evaluate(const ParticleSet& points, bool symmetric, bool parallel) {
  points.validate();
  PotentialField field;
  const auto targets = points.targets();
  field.values.assign(targets.size(), Complex{});

  if (symmetric) {
    if (!points.evaluates_at_sources()) {
      throw std::invalid_argument("symmetric direct summation needs evaluation at the sources");
    }
    p2p_symmetric_self_accumulate(points.positions, points.strengths, field.values);
    return field;
  }

  // Coincidence counts (including self pairs) are not reported here.
  constexpr std::size_t kBlock = 256;
  const auto blocks = static_cast<std::ptrdiff_t>((targets.size() + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::ptrdiff_t k = 0; k < blocks; ++k) {
    const std::size_t begin = static_cast<std::size_t>(k) * kBlock;
    const std::size_t len = std::min(targets.size() - begin, kBlock);
    p2p_accumulate(targets.subspan(begin, len), points.positions, points.strengths,
                   std::span<Complex>(field.values).subspan(begin, len));
  }
  return field;
}

double max_rel_error(std::span<const Complex> approx, std::span<const Complex> exact,
                     std::size_t* skipped) {
  if (approx.size() != exact.size()) throw std::invalid_argument("fields differ in length");
  double worst = 0.0;
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double scale = std::abs(exact[i]);
    if (scale == 0.0) {
      ++zeros;
      continue;
    }
    worst = std::max(worst, std::abs(approx[i] - exact[i]) / scale);
  }
  if (skipped) *skipped = zeros;
  if (zeros == exact.size()) throw UndefinedMetricError("relative error undefined: all exact values are zero");
  return worst;
}

}  // namespace fmm2d
