#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flowsynth {

struct Node {
  std::string id;
  std::string unit;

  auto operator<=>(const Node&) const = default;
};

struct Edge {
  std::string from;
  std::string to;
  std::optional<std::string> material;

  auto operator<=>(const Edge&) const = default;
};

std::string describe_edge(const Edge& e);

// Directed multigraph of unit instances. Nodes are kept sorted by id and edges
// lexicographically by (from, to, material), so two graphs with the same
// content compare equal and serialize identically.
//
// Construction rejects duplicate node ids, dangling endpoints, self-loops and
// parallel edges that repeat a material label (or are both unlabeled).
class ProcessGraph {
 public:
  ProcessGraph() = default;
  ProcessGraph(std::vector<Node> nodes, std::vector<Edge> edges);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  bool has_node(std::string_view id) const;
  bool has_edge(const Edge& e) const;
  // Throws Error(kUnknownNode).
  const std::string& unit_of(std::string_view node_id) const;
  std::size_t index_of(std::string_view node_id) const;

  // Edge indices leaving / entering the node at `node_index`.
  const std::vector<std::size_t>& out_edges(std::size_t node_index) const { return out_[node_index]; }
  const std::vector<std::size_t>& in_edges(std::size_t node_index) const { return in_[node_index]; }

  ProcessGraph with_edges(const std::vector<Edge>& extra) const;
  ProcessGraph without_edges(const std::function<bool(const Edge&)>& drop) const;

  friend bool operator==(const ProcessGraph& a, const ProcessGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

}  // namespace flowsynth
