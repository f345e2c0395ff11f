#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graphpass/errors.hpp"

namespace graphpass {

using VertexId = std::string;

/// Finite connected weighted graph with a positive vertex measure.
/// Vertex ordering is fixed at construction and is the canonical index
/// for every vector/matrix built on top of the graph.
class WeightedGraph {
 public:
  struct Neighbor {
    int index;
    double weight;
  };

  WeightedGraph(std::vector<VertexId> vertex_ids,
                const std::vector<std::tuple<VertexId, VertexId, double>>& edges,
                std::vector<double> measure)
      : ids_(std::move(vertex_ids)), measure_(std::move(measure)), tag_(next_tag()) {
    if (ids_.empty()) throw BadParams("graph needs at least one vertex");
    if (measure_.size() != ids_.size())
      throw BadParams("measure size does not match vertex count");
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!index_.emplace(ids_[i], static_cast<int>(i)).second)
        throw BadParams("duplicate vertex id: " + ids_[i]);
    }
    mu_min_ = std::numeric_limits<double>::infinity();
    for (double m : measure_) {
      if (!(m > 0.0)) throw NonPositiveWeightOrMeasure("vertex measure must be positive");
      mu_min_ = std::min(mu_min_, m);
    }

    adj_.resize(ids_.size());
    std::map<std::pair<int, int>, double> seen;
    for (const auto& [a, b, w] : edges) {
      int ia = index_of(a);
      int ib = index_of(b);
      if (ia == ib) throw SelfLoop("self-loop at vertex " + a);
      if (!(w > 0.0)) throw NonPositiveWeightOrMeasure("edge weight must be positive");
      auto key = std::minmax(ia, ib);
      auto [it, inserted] = seen.emplace(key, w);
      if (!inserted) {
        if (it->second != w)
          throw NonSymmetricWeight("conflicting weights for edge " + a + "-" + b);
        continue;  // same weight listed twice, keep one copy
      }
    }
    edges_.reserve(seen.size());
    for (const auto& [key, w] : seen) {
      edges_.push_back({key.first, key.second, w});
      adj_[key.first].push_back({key.second, w});
      adj_[key.second].push_back({key.first, w});
    }
    check_connected();
  }

  struct Edge {
    int a, b;
    double weight;
  };

  int size() const { return static_cast<int>(ids_.size()); }
  const std::vector<VertexId>& vertex_ids() const { return ids_; }
  const VertexId& id(int i) const { return ids_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& measure() const { return measure_; }
  double mu(int i) const { return measure_[static_cast<std::size_t>(i)]; }
  double mu_min() const { return mu_min_; }
  const std::vector<Neighbor>& neighbors(int i) const { return adj_[static_cast<std::size_t>(i)]; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::uint64_t tag() const { return tag_; }

  int index_of(const VertexId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw UnknownVertex("unknown vertex: " + id);
    return it->second;
  }
  bool has_vertex(const VertexId& id) const { return index_.count(id) != 0; }

 private:
  void check_connected() const {
    std::vector<char> seen(ids_.size(), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop_front();
      for (const auto& nb : adj_[static_cast<std::size_t>(x)]) {
        if (!seen[static_cast<std::size_t>(nb.index)]) {
          seen[static_cast<std::size_t>(nb.index)] = 1;
          ++reached;
          queue.push_back(nb.index);
        }
      }
    }
    if (reached != ids_.size()) throw DisconnectedGraph("graph is not connected");
  }

  static std::uint64_t next_tag() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
  }

  std::vector<VertexId> ids_;
  std::unordered_map<VertexId, int> index_;
  std::vector<double> measure_;
  std::vector<std::vector<Neighbor>> adj_;
  std::vector<Edge> edges_;
  double mu_min_ = 0.0;
  std::uint64_t tag_;
};

inline WeightedGraph build_graph(
    std::vector<VertexId> vertex_ids,
    const std::vector<std::tuple<VertexId, VertexId, double>>& edges,
    std::vector<double> measure) {
  return WeightedGraph(std::move(vertex_ids), edges, std::move(measure));
}

/// Shortest-path distance counted in edges (breadth-first search).
inline int graph_distance(const WeightedGraph& g, const VertexId& x, const VertexId& y) {
  int src = g.index_of(x);
  int dst = g.index_of(y);
  if (src == dst) return 0;
  std::vector<int> dist(static_cast<std::size_t>(g.size()), -1);
  std::deque<int> queue{src};
  dist[static_cast<std::size_t>(src)] = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (const auto& nb : g.neighbors(v)) {
      auto ni = static_cast<std::size_t>(nb.index);
      if (dist[ni] < 0) {
        dist[ni] = dist[static_cast<std::size_t>(v)] + 1;
        if (nb.index == dst) return dist[ni];
        queue.push_back(nb.index);
      }
    }
  }
  throw DisconnectedGraph("no path between vertices");  // unreachable on a valid graph
}

// ---------------------------------------------------------------------------
// Generators (unit weight and measure unless profiles are given).

struct GraphProfile {
  double weight = 1.0;
  double measure = 1.0;
};

namespace detail {

inline WeightedGraph from_index_edges(std::vector<VertexId> ids,
                                      const std::vector<std::pair<int, int>>& edges,
                                      const GraphProfile& profile) {
  std::vector<std::tuple<VertexId, VertexId, double>> named;
  named.reserve(edges.size());
  for (auto [a, b] : edges)
    named.emplace_back(ids[static_cast<std::size_t>(a)], ids[static_cast<std::size_t>(b)],
                       profile.weight);
  std::vector<double> mu(ids.size(), profile.measure);
  return WeightedGraph(std::move(ids), named, std::move(mu));
}

inline std::string lattice_label(const std::vector<int>& coord) {
  std::string s;
  for (std::size_t i = 0; i < coord.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(coord[i]);
  }
  return s;
}

}  // namespace detail

inline WeightedGraph generate_path(int n, const GraphProfile& profile = {}) {
  if (n < 1) throw BadParams("path: n must be >= 1");
  std::vector<VertexId> ids;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) ids.push_back("x" + std::to_string(i + 1));
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return detail::from_index_edges(std::move(ids), edges, profile);
}

/// star(n): one center plus n leaves.
inline WeightedGraph generate_star(int n, const GraphProfile& profile = {}) {
  if (n < 1) throw BadParams("star: n must be >= 1");
  std::vector<VertexId> ids{"c"};
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= n; ++i) {
    ids.push_back("x" + std::to_string(i));
    edges.emplace_back(0, i);
  }
  return detail::from_index_edges(std::move(ids), edges, profile);
}

/// l1-ball of radius R in the Z^d lattice, nearest-neighbor edges.
inline WeightedGraph generate_lattice_ball(int d, int R, const GraphProfile& profile = {}) {
  if (d < 1 || d > 3) throw BadParams("lattice_ball: d must be 1, 2 or 3");
  if (R < 0) throw BadParams("lattice_ball: R must be >= 0");
  std::vector<std::vector<int>> points;
  std::vector<int> coord(static_cast<std::size_t>(d), -R);
  // enumerate the box [-R,R]^d and keep the l1 ball
  while (true) {
    int l1 = 0;
    for (int c : coord) l1 += std::abs(c);
    if (l1 <= R) points.push_back(coord);
    int k = 0;
    while (k < d && coord[static_cast<std::size_t>(k)] == R) {
      coord[static_cast<std::size_t>(k)] = -R;
      ++k;
    }
    if (k == d) break;
    ++coord[static_cast<std::size_t>(k)];
  }
  std::sort(points.begin(), points.end());
  std::map<std::vector<int>, int> idx;
  std::vector<VertexId> ids;
  for (const auto& p : points) {
    idx.emplace(p, static_cast<int>(ids.size()));
    ids.push_back(detail::lattice_label(p));
  }
  std::vector<std::pair<int, int>> edges;
  for (const auto& p : points) {
    for (int k = 0; k < d; ++k) {
      auto q = p;
      ++q[static_cast<std::size_t>(k)];
      auto it = idx.find(q);
      if (it != idx.end()) edges.emplace_back(idx.at(p), it->second);
    }
  }
  return detail::from_index_edges(std::move(ids), edges, profile);
}

/// Uniform random attachment tree; deterministic for a given seed.
inline WeightedGraph generate_random_tree(int n, std::uint64_t seed,
                                          const GraphProfile& profile = {}) {
  if (n < 1) throw BadParams("random_tree: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<VertexId> ids;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) ids.push_back("x" + std::to_string(i + 1));
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    edges.emplace_back(pick(rng), i);
  }
  return detail::from_index_edges(std::move(ids), edges, profile);
}

// ---------------------------------------------------------------------------
// Ball truncation of an implicit infinite graph family.

/// On-demand description of a locally finite graph family (e.g. a lattice):
/// neighbors of any vertex, edge weights, and the vertex measure.
struct GraphFamily {
  std::function<std::vector<VertexId>(const VertexId&)> neighbors;
  std::function<double(const VertexId&, const VertexId&)> weight =
      [](const VertexId&, const VertexId&) { return 1.0; };
  std::function<double(const VertexId&)> measure = [](const VertexId&) { return 1.0; };
};

/// The integer lattice Z^d with nearest-neighbor edges, w = mu = 1.
inline GraphFamily zd_lattice(int d) {
  if (d < 1 || d > 3) throw BadParams("zd_lattice: d must be 1, 2 or 3");
  GraphFamily fam;
  fam.neighbors = [d](const VertexId& id) {
    std::vector<int> coord;
    std::stringstream ss(id);
    std::string part;
    while (std::getline(ss, part, ',')) coord.push_back(std::stoi(part));
    if (static_cast<int>(coord.size()) != d) throw BadParams("bad lattice label: " + id);
    std::vector<VertexId> out;
    for (int k = 0; k < d; ++k) {
      for (int s : {-1, 1}) {
        auto q = coord;
        q[static_cast<std::size_t>(k)] += s;
        out.push_back(detail::lattice_label(q));
      }
    }
    return out;
  };
  return fam;
}

/// Ball truncation with two ghost layers. Functions are identically zero on
/// ghost vertices; two layers are kept because the bilaplacian stencil at a
/// distance-R vertex reads values two hops out.
struct TruncatedGraph {
  WeightedGraph interior;   // induced graph on dist <= R
  WeightedGraph extended;   // interior plus both ghost layers, for operator evaluation
  std::vector<char> is_interior;  // mask over extended ordering
  std::vector<int> layer;         // distance-from-ball layer: 0 interior, 1, 2 for ghosts
  VertexId center;
  int radius = 0;
};

inline TruncatedGraph truncate_ball(const GraphFamily& family, const VertexId& x0, int R) {
  if (R < 0) throw BadParams("truncate_ball: R must be >= 0");
  std::map<VertexId, int> dist;
  std::deque<VertexId> queue{x0};
  dist[x0] = 0;
  while (!queue.empty()) {
    VertexId v = queue.front();
    queue.pop_front();
    int dv = dist.at(v);
    if (dv == R + 2) continue;
    for (const auto& nb : family.neighbors(v)) {
      if (dist.emplace(nb, dv + 1).second) queue.push_back(nb);
    }
  }

  auto build_subgraph = [&](int max_dist) {
    std::vector<VertexId> ids;
    for (const auto& [v, d] : dist)
      if (d <= max_dist) ids.push_back(v);
    std::vector<std::tuple<VertexId, VertexId, double>> edges;
    for (const auto& v : ids) {
      for (const auto& nb : family.neighbors(v)) {
        auto it = dist.find(nb);
        if (it != dist.end() && it->second <= max_dist && v < nb)
          edges.emplace_back(v, nb, family.weight(v, nb));
      }
    }
    std::vector<double> mu;
    for (const auto& v : ids) mu.push_back(family.measure(v));
    return WeightedGraph(std::move(ids), edges, std::move(mu));
  };

  TruncatedGraph t{build_subgraph(R), build_subgraph(R + 2), {}, {}, x0, R};
  t.is_interior.resize(static_cast<std::size_t>(t.extended.size()));
  t.layer.resize(static_cast<std::size_t>(t.extended.size()));
  for (int i = 0; i < t.extended.size(); ++i) {
    int d = dist.at(t.extended.id(i));
    t.is_interior[static_cast<std::size_t>(i)] = d <= R ? 1 : 0;
    t.layer[static_cast<std::size_t>(i)] = std::max(0, d - R);
  }
  return t;
}

}  // namespace graphpass
