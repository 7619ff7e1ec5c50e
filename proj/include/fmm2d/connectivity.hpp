#pragma once

#include <iosfwd>
#include <vector>

#include "fmm2d/geometry.hpp"
#include "fmm2d/tree.hpp"

namespace fmm2d {

using BoxList = std::vector<Index>;
/// One incoming list per box of a level.
using LevelLists = std::vector<BoxList>;

/// Directed, incoming interaction lists. All lists are sorted ascending.
struct InteractionLists {
  // weak[l][b]: boxes whose multipole expansion is shifted into b's local
  // expansion at level l. weak[0] is a single empty list.
  std::vector<LevelLists> weak;
  // Finest level only.
  LevelLists p2p;  // near field, including b itself
  LevelLists p2l;  // larger boxes whose particles go straight into b's local expansion
  LevelLists m2p;  // smaller boxes whose multipole is evaluated at b's points
};

struct LevelCoupling {
  LevelLists strong;
  LevelLists weak;
};

/// Couples the boxes of `level` from the strong lists of level-1: every child
/// of a box strongly coupled to b's parent becomes weak if well separated from
/// b, strong otherwise.
LevelCoupling classify_level(const FmmTree& tree, int level, const LevelLists& parent_strong,
                             ThetaConfig cfg, bool parallel = false);

struct FinestLists {
  LevelLists p2p;
  LevelLists p2l;
  LevelLists m2p;
};

/// Re-examines the finest strong pairs with the radii interchanged. A pair
/// passing that test is handled by P2L when the source box is the larger one
/// and by M2P when it is the smaller one. Equal radii stay in P2P.
FinestLists reclassify_finest(const FmmTree& tree, const LevelLists& strong, ThetaConfig cfg,
                              bool parallel = false);

InteractionLists build_connectivity(const FmmTree& tree, ThetaConfig cfg, bool parallel = false);

/// CSV `level,target_box,kind,source_box`, kind in {weak,p2p,p2l,m2p}.
void write_connectivity_csv(std::ostream& out, const InteractionLists& lists);

/// CSV `level,box,x0,y0,x1,y1`.
void write_boxes_csv(std::ostream& out, const FmmTree& tree);

}  // namespace fmm2d
