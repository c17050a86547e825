#include "blockscene/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "blockscene/error.hpp"

namespace blockscene {

namespace {

std::string ref_label(const BlockRef& r) { return r.object + "#" + std::to_string(r.index); }

nlohmann::json ref_json(const BlockRef& r) { return {{"object", r.object}, {"block", r.index}}; }

void require_blocks(const SceneBlocks& blocks) {
  if (blocks.boxes.empty()) throw InputError("no blocks");
}

// Pairs whose boxes, grown by `margin`, touch. Sorted (i < j).
std::vector<std::pair<std::size_t, std::size_t>> touching_pairs(const std::vector<AABB>& boxes,
                                                                double margin) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return boxes[a].min.x < boxes[b].min.x || (boxes[a].min.x == boxes[b].min.x && a < b);
  });

  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const AABB grown = boxes[order[i]].expanded(margin);
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const AABB& other = boxes[order[j]];
      if (other.min.x > grown.max.x) break;
      if (grown.touches(other)) out.emplace_back(std::minmax(order[i], order[j]));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double overlap_from(const SceneBlocks& blocks, std::vector<OverlapPair>* pairs) {
  double total_volume = 0.0;
  for (const AABB& b : blocks.boxes) total_volume += b.volume();
  if (!(total_volume > 0.0)) throw InputError("no blocks");

  double shared = 0.0;
  for (auto [i, j] : touching_pairs(blocks.boxes, 0.0)) {
    if (blocks.refs[i].object == blocks.refs[j].object) continue;
    const double v = intersection_volume(blocks.boxes[i], blocks.boxes[j]);
    if (v <= 0.0) continue;
    shared += v;
    if (pairs) pairs->push_back({blocks.refs[i], blocks.refs[j], v});
  }
  return std::clamp(shared / total_volume, 0.0, 1.0);
}

}  // namespace

SceneBlocks collect_blocks(const SceneGraphStore& store) {
  SceneBlocks out;
  for (const std::string& id : store.ids()) {
    const auto blocks = store.object(id).blocks();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      out.refs.push_back({id, i});
      out.boxes.push_back(aabb_of_block(blocks[i]));
    }
  }
  return out;
}

double overlap_score(const SceneGraphStore& store) {
  const SceneBlocks blocks = collect_blocks(store);
  require_blocks(blocks);
  return overlap_from(blocks, nullptr);
}

std::vector<std::vector<std::size_t>> contact_graph(const SceneGraphStore& store,
                                                    double contact_epsilon) {
  if (!(contact_epsilon >= 0.0)) throw InputError("contact_epsilon must be >= 0");
  const SceneBlocks blocks = collect_blocks(store);
  std::vector<std::vector<std::size_t>> adj(blocks.boxes.size());
  for (auto [i, j] : touching_pairs(blocks.boxes, contact_epsilon)) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& n : adj) std::sort(n.begin(), n.end());
  return adj;
}

double isolation_score(const SceneGraphStore& store, double contact_epsilon) {
  const auto adj = contact_graph(store, contact_epsilon);
  if (adj.empty()) throw InputError("no blocks");
  const auto isolated = std::count_if(adj.begin(), adj.end(), [](const auto& n) { return n.empty(); });
  return static_cast<double>(isolated) / static_cast<double>(adj.size());
}

SceneMetrics compute_metrics(const SceneGraphStore& store, double contact_epsilon) {
  const SceneBlocks blocks = collect_blocks(store);
  require_blocks(blocks);

  SceneMetrics m;
  m.overlap_score = overlap_from(blocks, &m.overlapping_pairs);
  const auto adj = contact_graph(store, contact_epsilon);
  for (std::size_t i = 0; i < adj.size(); ++i) {
    if (adj[i].empty()) m.isolated_blocks.push_back(blocks.refs[i]);
  }
  m.isolation_score =
      static_cast<double>(m.isolated_blocks.size()) / static_cast<double>(adj.size());
  return m;
}

nlohmann::json to_json(const SceneMetrics& m) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : m.overlapping_pairs) {
    pairs.push_back({{"a", ref_json(p.a)}, {"b", ref_json(p.b)}, {"volume", p.volume}});
  }
  nlohmann::json isolated = nlohmann::json::array();
  for (const auto& r : m.isolated_blocks) isolated.push_back(ref_json(r));
  return {{"overlap_score", m.overlap_score},
          {"isolation_score", m.isolation_score},
          {"pairs", std::move(pairs)},
          {"isolated", std::move(isolated)}};
}

std::string format_table(const SceneMetrics& m) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %10.6f\n", "overlap_score", m.overlap_score);
  out << line;
  std::snprintf(line, sizeof line, "%-18s %10.6f\n", "isolation_score", m.isolation_score);
  out << line;
  if (!m.overlapping_pairs.empty()) {
    out << "\noverlapping pairs:\n";
    for (const auto& p : m.overlapping_pairs) {
      std::snprintf(line, sizeof line, "  %-24s %-24s %12.6g\n", ref_label(p.a).c_str(),
                    ref_label(p.b).c_str(), p.volume);
      out << line;
    }
  }
  if (!m.isolated_blocks.empty()) {
    out << "\nisolated blocks:\n";
    for (const auto& r : m.isolated_blocks) out << "  " << ref_label(r) << '\n';
  }
  return out.str();
}

}  // namespace blockscene
