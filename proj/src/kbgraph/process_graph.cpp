#include "flowsynth/kbgraph/process_graph.hpp"

#include <algorithm>

#include "flowsynth/errors.hpp"

namespace flowsynth {

std::string describe_edge(const Edge& e) {
  std::string s = e.from + " -> " + e.to;
  if (e.material) s += " [" + *e.material + "]";
  return s;
}

ProcessGraph::ProcessGraph(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::sort(nodes_.begin(), nodes_.end());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id.empty()) throw Error(ErrorCode::kInvalidGraph, "node with empty id");
    if (!index_.emplace(nodes_[i].id, i).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate node id \"" + nodes_[i].id + "\"", nodes_[i].id);
    }
  }
  std::sort(edges_.begin(), edges_.end());
  out_.assign(nodes_.size(), {});
  in_.assign(nodes_.size(), {});
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const Edge& e = edges_[k];
    auto from = index_.find(e.from);
    auto to = index_.find(e.to);
    if (from == index_.end() || to == index_.end()) {
      const std::string& missing = from == index_.end() ? e.from : e.to;
      throw Error(ErrorCode::kUnknownNode, "edge " + describe_edge(e) + " references undeclared node \"" + missing + "\"",
                  missing);
    }
    if (e.from == e.to) {
      throw Error(ErrorCode::kInvalidGraph, "self-loop edge " + describe_edge(e), e.from);
    }
    if (k > 0 && edges_[k - 1] == e) {
      throw Error(ErrorCode::kInvalidGraph,
                  "parallel edge " + describe_edge(e) + " repeats an existing material label", e.from);
    }
    out_[from->second].push_back(k);
    in_[to->second].push_back(k);
  }
}

bool ProcessGraph::has_node(std::string_view id) const { return index_.find(id) != index_.end(); }

bool ProcessGraph::has_edge(const Edge& e) const { return std::binary_search(edges_.begin(), edges_.end(), e); }

std::size_t ProcessGraph::index_of(std::string_view node_id) const {
  auto it = index_.find(node_id);
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownNode, "unknown node \"" + std::string(node_id) + "\"", std::string(node_id));
  }
  return it->second;
}

const std::string& ProcessGraph::unit_of(std::string_view node_id) const { return nodes_[index_of(node_id)].unit; }

ProcessGraph ProcessGraph::with_edges(const std::vector<Edge>& extra) const {
  std::vector<Edge> all = edges_;
  all.insert(all.end(), extra.begin(), extra.end());
  return ProcessGraph(nodes_, std::move(all));
}

ProcessGraph ProcessGraph::without_edges(const std::function<bool(const Edge&)>& drop) const {
  std::vector<Edge> kept;
  kept.reserve(edges_.size());
  for (const auto& e : edges_) {
    if (!drop(e)) kept.push_back(e);
  }
  return ProcessGraph(nodes_, std::move(kept));
}

}  // namespace flowsynth
