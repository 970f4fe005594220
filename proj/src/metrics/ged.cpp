#include "flowsynth/metrics/ged.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>

#include "flowsynth/errors.hpp"
#include "flowsynth/metrics/assignment.hpp"

namespace flowsynth {

namespace {

constexpr std::size_t kUnmapped = std::numeric_limits<std::size_t>::max();
constexpr double kImprovement = 1e-9;
constexpr int kMaxSwapPasses = 50;

// Cost of editing one ordered node pair's label set L1 into L2, where equal
// labels match for free and the rest are substituted or inserted/deleted.
double label_set_cost(std::size_t common, std::size_t n1, std::size_t n2, double sub, double del, double ins) {
  const double a = static_cast<double>(n1 - common);
  const double b = static_cast<double>(n2 - common);
  const double m = std::min(a, b);
  return std::min(a * del + b * ins, m * sub + (a - m) * del + (b - m) * ins);
}

template <typename T>
std::size_t sorted_common(const std::vector<T>& a, const std::vector<T>& b) {
  std::size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

// Dense view of a graph: interned unit and label ids, per ordered pair label
// lists, and per node outgoing/incoming edge signatures.
struct DenseGraph {
  std::size_t n = 0;
  std::vector<int> unit;
  std::vector<std::vector<int>> labels;  // n*n, sorted
  std::vector<std::vector<std::pair<int, int>>> out_sig, in_sig;  // (label, neighbour unit), sorted

  const std::vector<int>& pair(std::size_t u, std::size_t v) const { return labels[u * n + v]; }
};

class Interner {
 public:
  int id(const std::optional<std::string>& s) {
    auto [it, inserted] = ids_.emplace(s, static_cast<int>(ids_.size()));
    return it->second;
  }

 private:
  std::map<std::optional<std::string>, int> ids_;
};

DenseGraph densify(const ProcessGraph& g, Interner& units, Interner& labels) {
  DenseGraph d;
  d.n = g.node_count();
  d.labels.assign(d.n * d.n, {});
  d.out_sig.assign(d.n, {});
  d.in_sig.assign(d.n, {});
  for (const auto& node : g.nodes()) d.unit.push_back(units.id(node.unit));
  for (const auto& e : g.edges()) {
    const std::size_t u = g.index_of(e.from);
    const std::size_t v = g.index_of(e.to);
    const int l = labels.id(e.material);
    d.labels[u * d.n + v].push_back(l);
    d.out_sig[u].emplace_back(l, d.unit[v]);
    d.in_sig[v].emplace_back(l, d.unit[u]);
  }
  for (auto& l : d.labels) std::sort(l.begin(), l.end());
  for (auto& s : d.out_sig) std::sort(s.begin(), s.end());
  for (auto& s : d.in_sig) std::sort(s.begin(), s.end());
  return d;
}

// Exact cost of the edit path induced by a node mapping (g1 index -> g2 index
// or kUnmapped). Unmapped g2 nodes are inserted.
double induced_cost(const DenseGraph& a, const DenseGraph& b, const std::vector<std::size_t>& map,
                    const GedCosts& c) {
  double total = 0.0;
  std::vector<std::size_t> inverse(b.n, kUnmapped);
  for (std::size_t i = 0; i < a.n; ++i) {
    if (map[i] == kUnmapped) {
      total += c.node_delete;
    } else {
      inverse[map[i]] = i;
      if (a.unit[i] != b.unit[map[i]]) total += c.node_substitute;
    }
  }
  for (std::size_t j = 0; j < b.n; ++j) {
    if (inverse[j] == kUnmapped) total += c.node_insert;
  }
  for (std::size_t u = 0; u < a.n; ++u) {
    for (std::size_t v = 0; v < a.n; ++v) {
      const auto& l1 = a.pair(u, v);
      if (map[u] == kUnmapped || map[v] == kUnmapped) {
        total += static_cast<double>(l1.size()) * c.edge_delete;
        continue;
      }
      const auto& l2 = b.pair(map[u], map[v]);
      if (l1.empty() && l2.empty()) continue;
      total += label_set_cost(sorted_common(l1, l2), l1.size(), l2.size(), c.edge_substitute, c.edge_delete,
                              c.edge_insert);
    }
  }
  for (std::size_t x = 0; x < b.n; ++x) {
    for (std::size_t y = 0; y < b.n; ++y) {
      if (inverse[x] == kUnmapped || inverse[y] == kUnmapped) {
        total += static_cast<double>(b.pair(x, y).size()) * c.edge_insert;
      }
    }
  }
  return total;
}

// Cost of turning one node's incident edge signatures into another's. Each
// edge is shared by two endpoints, so callers weight it by one half.
double signature_cost(const std::vector<std::pair<int, int>>& s1, const std::vector<std::pair<int, int>>& s2,
                      const GedCosts& c) {
  return label_set_cost(sorted_common(s1, s2), s1.size(), s2.size(), c.edge_substitute, c.edge_delete,
                        c.edge_insert);
}

double directed_approx(const DenseGraph& a, const DenseGraph& b, const GedCosts& c) {
  const std::size_t n = a.n + b.n;
  if (n == 0) return 0.0;
  // Large but finite so the assignment solver never selects forbidden cells
  // unless forced, which the padding structure rules out.
  double big = 1.0;
  for (std::size_t i = 0; i < a.n; ++i) big += c.node_delete + c.edge_delete * (a.out_sig[i].size() + a.in_sig[i].size());
  for (std::size_t j = 0; j < b.n; ++j) big += c.node_insert + c.edge_insert * (b.out_sig[j].size() + b.in_sig[j].size());
  big += static_cast<double>(a.n * b.n) * (c.node_substitute + c.edge_substitute);
  big *= 4.0;

  std::vector<std::vector<double>> m(n, std::vector<double>(n, big));
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t j = 0; j < b.n; ++j) {
      const double node = a.unit[i] == b.unit[j] ? 0.0 : c.node_substitute;
      m[i][j] = node + 0.5 * (signature_cost(a.out_sig[i], b.out_sig[j], c) +
                              signature_cost(a.in_sig[i], b.in_sig[j], c));
    }
    const double degree = static_cast<double>(a.out_sig[i].size() + a.in_sig[i].size());
    m[i][b.n + i] = c.node_delete + 0.5 * degree * c.edge_delete;
  }
  for (std::size_t j = 0; j < b.n; ++j) {
    const double degree = static_cast<double>(b.out_sig[j].size() + b.in_sig[j].size());
    m[a.n + j][j] = c.node_insert + 0.5 * degree * c.edge_insert;
    for (std::size_t i = 0; i < a.n; ++i) m[a.n + j][b.n + i] = 0.0;
  }

  const Assignment assignment = solve_assignment(m);
  std::vector<std::size_t> map(a.n, kUnmapped);
  for (std::size_t i = 0; i < a.n; ++i) {
    const std::size_t col = assignment.column_of_row[i];
    if (col < b.n) map[i] = col;
  }

  // First-improvement local search over swaps and reassignments.
  double best = induced_cost(a, b, map, c);
  for (int pass = 0; pass < kMaxSwapPasses; ++pass) {
    bool improved = false;
    std::vector<bool> used(b.n, false);
    for (std::size_t x : map) {
      if (x != kUnmapped) used[x] = true;
    }
    auto try_move = [&](std::vector<std::size_t>& candidate) {
      const double cost = induced_cost(a, b, candidate, c);
      if (cost < best - kImprovement) {
        best = cost;
        map = candidate;
        improved = true;
        return true;
      }
      return false;
    };
    std::vector<std::size_t> candidate = map;
    for (std::size_t i = 0; i < a.n && !improved; ++i) {
      for (std::size_t k = i + 1; k < a.n && !improved; ++k) {
        if (map[i] == map[k]) continue;  // both unmapped
        std::swap(candidate[i], candidate[k]);
        if (!try_move(candidate)) std::swap(candidate[i], candidate[k]);
      }
      for (std::size_t j = 0; j < b.n && !improved; ++j) {
        if (used[j]) continue;
        const std::size_t old = candidate[i];
        candidate[i] = j;
        if (!try_move(candidate)) candidate[i] = old;
      }
      if (!improved && map[i] != kUnmapped) {
        const std::size_t old = candidate[i];
        candidate[i] = kUnmapped;
        if (!try_move(candidate)) candidate[i] = old;
      }
    }
    if (!improved) break;
  }
  return best;
}

}  // namespace

double approx_ged(const ProcessGraph& g1, const ProcessGraph& g2, const GedCosts& costs) {
  Interner units;
  Interner labels;
  const DenseGraph a = densify(g1, units, labels);
  const DenseGraph b = densify(g2, units, labels);
  return std::min(directed_approx(a, b, costs), directed_approx(b, a, costs));
}

double approx_nged(const ProcessGraph& g1, const ProcessGraph& g2, const GedCosts& costs) {
  const std::size_t denom = std::max(g1.node_count(), g2.node_count());
  if (denom == 0) return 0.0;
  return std::clamp(approx_ged(g1, g2, costs) / static_cast<double>(denom), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Exhaustive oracle. Kept independent of the dense representation above: it
// walks the edge lists directly.

namespace {

class ExactSearch {
 public:
  ExactSearch(const ProcessGraph& g1, const ProcessGraph& g2, const GedCosts& c) : g1_(g1), g2_(g2), c_(c) {
    for (const auto& e : g1.edges()) pairs1_[{g1.index_of(e.from), g1.index_of(e.to)}].push_back(e.material);
    for (const auto& e : g2.edges()) pairs2_[{g2.index_of(e.from), g2.index_of(e.to)}].push_back(e.material);
    map_.assign(g1.node_count(), kUnmapped);
    taken_.assign(g2.node_count(), false);
  }

  double run() {
    best_ = std::numeric_limits<double>::infinity();
    descend(0, 0.0);
    return best_;
  }

 private:
  using Labels = std::vector<std::optional<std::string>>;

  static const Labels& labels_of(const std::map<std::pair<std::size_t, std::size_t>, Labels>& pairs, std::size_t u,
                                 std::size_t v) {
    static const Labels kNone;
    auto it = pairs.find({u, v});
    return it == pairs.end() ? kNone : it->second;
  }

  double pair_cost(const Labels& l1, const Labels& l2) const {
    std::size_t common = 0;
    std::vector<bool> used(l2.size(), false);
    for (const auto& x : l1) {
      for (std::size_t k = 0; k < l2.size(); ++k) {
        if (!used[k] && l2[k] == x) {
          used[k] = true;
          ++common;
          break;
        }
      }
    }
    return label_set_cost(common, l1.size(), l2.size(), c_.edge_substitute, c_.edge_delete, c_.edge_insert);
  }

  // Cost of edges between node i and already decided nodes < i (plus i's own
  // node operation). Fully determined once both endpoints are decided.
  double step_cost(std::size_t i) const {
    double cost = 0.0;
    if (map_[i] == kUnmapped) {
      cost += c_.node_delete;
    } else if (g1_.nodes()[i].unit != g2_.nodes()[map_[i]].unit) {
      cost += c_.node_substitute;
    }
    for (std::size_t k = 0; k <= i; ++k) {
      for (int dir = 0; dir < (k == i ? 1 : 2); ++dir) {
        const std::size_t u = dir == 0 ? i : k;
        const std::size_t v = dir == 0 ? k : i;
        if (u == v) continue;
        const Labels& l1 = labels_of(pairs1_, u, v);
        if (map_[u] == kUnmapped || map_[v] == kUnmapped) {
          cost += static_cast<double>(l1.size()) * c_.edge_delete;
        } else {
          const Labels& l2 = labels_of(pairs2_, map_[u], map_[v]);
          if (!l1.empty() || !l2.empty()) cost += pair_cost(l1, l2);
        }
      }
    }
    return cost;
  }

  double completion_cost() const {
    double cost = 0.0;
    for (std::size_t j = 0; j < g2_.node_count(); ++j) {
      if (!taken_[j]) cost += c_.node_insert;
    }
    for (const auto& e : g2_.edges()) {
      if (!taken_[g2_.index_of(e.from)] || !taken_[g2_.index_of(e.to)]) cost += c_.edge_insert;
    }
    return cost;
  }

  void descend(std::size_t i, double so_far) {
    if (so_far >= best_) return;
    if (i == g1_.node_count()) {
      best_ = std::min(best_, so_far + completion_cost());
      return;
    }
    for (std::size_t j = 0; j <= g2_.node_count(); ++j) {
      const bool skip = j < g2_.node_count() && taken_[j];
      if (skip) continue;
      map_[i] = j < g2_.node_count() ? j : kUnmapped;
      if (map_[i] != kUnmapped) taken_[j] = true;
      descend(i + 1, so_far + step_cost(i));
      if (map_[i] != kUnmapped) taken_[j] = false;
      map_[i] = kUnmapped;
    }
  }

  const ProcessGraph& g1_;
  const ProcessGraph& g2_;
  const GedCosts& c_;
  std::map<std::pair<std::size_t, std::size_t>, Labels> pairs1_, pairs2_;
  std::vector<std::size_t> map_;
  std::vector<bool> taken_;
  double best_ = 0.0;
};

}  // namespace

double exact_ged(const ProcessGraph& g1, const ProcessGraph& g2, const GedCosts& costs, std::size_t node_limit) {
  const std::size_t largest = std::max(g1.node_count(), g2.node_count());
  if (largest > node_limit) {
    throw Error(ErrorCode::kSizeLimit,
                "exact GED limited to " + std::to_string(node_limit) + " nodes, got " + std::to_string(largest),
                std::to_string(largest));
  }
  return ExactSearch(g1, g2, costs).run();
}

}  // namespace flowsynth
