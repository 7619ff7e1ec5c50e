#include "fmm2d/connectivity.hpp"

#include <cstddef>
#include <ostream>

namespace fmm2d {

namespace {

// Boxes sharing a center (zero-size boxes of duplicated points) would need
// a shift of length zero; keep them strongly coupled.
bool weakly_coupled(const BoxGeometry& a, const BoxGeometry& b, ThetaConfig cfg) {
  return a.center != b.center && well_separated(a, b, cfg);
}

}  // namespace

LevelCoupling classify_level(const FmmTree& tree, int level, const LevelLists& parent_strong,
                             ThetaConfig cfg, bool parallel) {
  const auto& boxes = tree.level(level);
  const auto& parents = tree.level(level - 1);
  if (parent_strong.size() != parents.size()) {
    throw std::invalid_argument("parent strong lists do not match the parent level");
  }
  LevelCoupling out;
  out.strong.resize(boxes.size());
  out.weak.resize(boxes.size());

  const auto count = static_cast<std::ptrdiff_t>(boxes.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto b = static_cast<Index>(k);
    const BoxGeometry& target = boxes[b].geometry;
    BoxList& strong = out.strong[b];
    BoxList& weak = out.weak[b];
    for (Index s : parent_strong[FmmTree::parent(b)]) {
      for (Index c = FmmTree::first_child(s); c < FmmTree::first_child(s) + 4; ++c) {
        if (c != b && weakly_coupled(target, boxes[c].geometry, cfg)) {
          weak.push_back(c);
        } else {
          strong.push_back(c);
        }
      }
    }
  }
  return out;
}

FinestLists reclassify_finest(const FmmTree& tree, const LevelLists& strong, ThetaConfig cfg,
                              bool parallel) {
  const auto& boxes = tree.finest();
  FinestLists out;
  out.p2p.resize(boxes.size());
  out.p2l.resize(boxes.size());
  out.m2p.resize(boxes.size());

  const auto count = static_cast<std::ptrdiff_t>(boxes.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto b = static_cast<Index>(k);
    const BoxGeometry& target = boxes[b].geometry;
    const double rb = target.radius();
    for (Index a : strong[b]) {
      const BoxGeometry& source = boxes[a].geometry;
      const double ra = source.radius();
      if (a == b || ra == rb || source.center == target.center ||
          !well_separated_swapped(source, target, cfg)) {
        out.p2p[b].push_back(a);
      } else if (ra > rb) {
        out.p2l[b].push_back(a);
      } else {
        out.m2p[b].push_back(a);
      }
    }
  }
  return out;
}

InteractionLists build_connectivity(const FmmTree& tree, ThetaConfig cfg, bool parallel) {
  InteractionLists lists;
  lists.weak.reserve(static_cast<std::size_t>(tree.n_levels) + 1);
  lists.weak.push_back(LevelLists(1));

  LevelLists strong{BoxList{0}};
  for (int l = 1; l <= tree.n_levels; ++l) {
    LevelCoupling coupling = classify_level(tree, l, strong, cfg, parallel);
    lists.weak.push_back(std::move(coupling.weak));
    strong = std::move(coupling.strong);
  }
  FinestLists finest = reclassify_finest(tree, strong, cfg, parallel);
  lists.p2p = std::move(finest.p2p);
  lists.p2l = std::move(finest.p2l);
  lists.m2p = std::move(finest.m2p);
  return lists;
}

void write_connectivity_csv(std::ostream& out, const InteractionLists& lists) {
  out << "level,target_box,kind,source_box\n";
  for (std::size_t l = 0; l < lists.weak.size(); ++l) {
    for (std::size_t b = 0; b < lists.weak[l].size(); ++b) {
      for (Index a : lists.weak[l][b]) out << l << ',' << b << ",weak," << a << '\n';
    }
  }
  const std::size_t finest = lists.weak.empty() ? 0 : lists.weak.size() - 1;
  auto dump = [&](const LevelLists& ll, const char* kind) {
    for (std::size_t b = 0; b < ll.size(); ++b) {
      for (Index a : ll[b]) out << finest << ',' << b << ',' << kind << ',' << a << '\n';
    }
  };
  dump(lists.p2p, "p2p");
  dump(lists.p2l, "p2l");
  dump(lists.m2p, "m2p");
}

void write_boxes_csv(std::ostream& out, const FmmTree& tree) {
  const auto old_precision = out.precision(17);
  out << "level,box,x0,y0,x1,y1\n";
  for (std::size_t l = 0; l < tree.levels.size(); ++l) {
    for (std::size_t b = 0; b < tree.levels[l].size(); ++b) {
      const BoxGeometry& g = tree.levels[l][b].geometry;
      out << l << ',' << b << ',' << g.x0() << ',' << g.y0() << ',' << g.x1() << ',' << g.y1()
          << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace fmm2d
