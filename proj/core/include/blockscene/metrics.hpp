#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blockscene/scene_graph.hpp"

namespace blockscene {

/// A block addressed by its object id and position in the object's list.
struct BlockRef {
  std::string object;
  std::size_t index = 0;
  friend auto operator<=>(const BlockRef&, const BlockRef&) = default;
};

struct OverlapPair {
  BlockRef a;
  BlockRef b;
  double volume = 0.0;
};

struct SceneMetrics {
  double overlap_score = 0.0;
  double isolation_score = 0.0;
  std::vector<OverlapPair> overlapping_pairs;
  std::vector<BlockRef> isolated_blocks;
};

inline constexpr double kDefaultContactEpsilon = 0.01;

/// Every block of the scene, objects in id order.
struct SceneBlocks {
  std::vector<BlockRef> refs;
  std::vector<AABB> boxes;
};
SceneBlocks collect_blocks(const SceneGraphStore& store);

/// Inter-object intersection volume summed over unordered block pairs,
/// divided by the summed volume of all blocks. Blocks of the same object
/// are never paired. Throws InputError on a scene without blocks.
double overlap_score(const SceneGraphStore& store);

/// Fraction of blocks whose box, grown by contact_epsilon on every face,
/// touches no other block (same-object siblings included).
double isolation_score(const SceneGraphStore& store, double contact_epsilon = kDefaultContactEpsilon);

/// Undirected contact adjacency over collect_blocks() order; neighbor lists
/// are sorted. Built with a sweep over x.
std::vector<std::vector<std::size_t>> contact_graph(const SceneGraphStore& store,
                                                    double contact_epsilon = kDefaultContactEpsilon);

SceneMetrics compute_metrics(const SceneGraphStore& store,
                             double contact_epsilon = kDefaultContactEpsilon);

nlohmann::json to_json(const SceneMetrics& m);
/// Fixed-width table for terminals.
std::string format_table(const SceneMetrics& m);

}  // namespace blockscene
