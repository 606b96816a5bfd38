#pragma once

#include "blowup/error.hpp"
#include "blowup/exact_linalg.hpp"
#include "blowup/integer.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace blowup {

/// Opaque, stable vertex identifier.
struct VertexId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(VertexId, VertexId) = default;
};

inline std::string to_string(VertexId v) { return std::to_string(v.value); }
inline std::ostream& operator<<(std::ostream& os, VertexId v) { return os << v.value; }

/// Unordered vertex pair, stored with lo < hi.
struct Edge {
  VertexId lo;
  VertexId hi;

  static Edge between(VertexId a, VertexId b) { return a < b ? Edge{a, b} : Edge{b, a}; }
  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

inline std::string to_string(const Edge& e) { return to_string(e.lo) + "-" + to_string(e.hi); }

/// Acyclic graph with integer vertex weights. The weight of a vertex is its
/// self-intersection number; the associated Gram matrix has -weight on the
/// diagonal and -1 for every edge.
class WeightedForest {
 public:
  struct Vertex {
    VertexId id;
    Integer weight;
    std::vector<VertexId> neighbors;  // sorted

    friend bool operator==(const Vertex&, const Vertex&) = default;
  };

  bool empty() const { return vertices_.empty(); }
  std::size_t size() const { return vertices_.size(); }
  const std::vector<Vertex>& vertices() const { return vertices_; }

  bool contains(VertexId v) const { return find(v) != nullptr; }

  const Integer& weight(VertexId v) const { return at(v).weight; }
  std::span<const VertexId> neighbors(VertexId v) const { return at(v).neighbors; }
  std::size_t degree(VertexId v) const { return at(v).neighbors.size(); }

  bool has_edge(VertexId a, VertexId b) const {
    const Vertex* va = find(a);
    return va != nullptr && std::binary_search(va->neighbors.begin(), va->neighbors.end(), b);
  }

  std::vector<VertexId> vertex_ids() const {
    std::vector<VertexId> ids;
    ids.reserve(vertices_.size());
    for (const auto& v : vertices_) ids.push_back(v.id);
    return ids;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (const auto& v : vertices_)
      for (VertexId n : v.neighbors)
        if (v.id < n) out.push_back(Edge{v.id, n});
    return out;
  }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& v : vertices_) twice += v.neighbors.size();
    return twice / 2;
  }

  void add_vertex(VertexId v, Integer weight) {
    auto it = lower(v);
    if (it != vertices_.end() && it->id == v) throw Error("duplicate vertex " + to_string(v));
    vertices_.insert(it, Vertex{v, std::move(weight), {}});
  }

  /// Adds edge a-b. Rejects self-loops, unknown endpoints, duplicates and
  /// edges that would close a cycle.
  void add_edge(VertexId a, VertexId b) {
    if (a == b) throw Error("self-loop at vertex " + to_string(a));
    at(a);
    at(b);
    if (has_edge(a, b)) throw Error("duplicate edge " + to_string(Edge::between(a, b)));
    if (connected(a, b)) throw Error("edge " + to_string(Edge::between(a, b)) + " would close a cycle");
    insert_sorted(mut(a).neighbors, b);
    insert_sorted(mut(b).neighbors, a);
  }

  void erase_edge(VertexId a, VertexId b) {
    if (!has_edge(a, b)) throw Error("no edge " + to_string(Edge::between(a, b)));
    std::erase(mut(a).neighbors, b);
    std::erase(mut(b).neighbors, a);
  }

  /// Removes v together with its incident edges.
  void erase_vertex(VertexId v) {
    const std::vector<VertexId> nbrs = at(v).neighbors;
    for (VertexId n : nbrs) std::erase(mut(n).neighbors, v);
    vertices_.erase(lower(v));
  }

  void set_weight(VertexId v, Integer weight) { mut(v).weight = std::move(weight); }

  std::size_t index_of(VertexId v) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v,
                               [](const Vertex& x, VertexId id) { return x.id < id; });
    if (it == vertices_.end() || it->id != v) throw Error("unknown vertex " + to_string(v));
    return static_cast<std::size_t>(it - vertices_.begin());
  }

  friend bool operator==(const WeightedForest&, const WeightedForest&) = default;

 private:
  std::vector<Vertex>::iterator lower(VertexId v) {
    return std::lower_bound(vertices_.begin(), vertices_.end(), v,
                            [](const Vertex& x, VertexId id) { return x.id < id; });
  }
  const Vertex* find(VertexId v) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v,
                               [](const Vertex& x, VertexId id) { return x.id < id; });
    return (it != vertices_.end() && it->id == v) ? &*it : nullptr;
  }
  const Vertex& at(VertexId v) const {
    const Vertex* p = find(v);
    if (p == nullptr) throw Error("unknown vertex " + to_string(v));
    return *p;
  }
  Vertex& mut(VertexId v) { return const_cast<Vertex&>(at(v)); }

  static void insert_sorted(std::vector<VertexId>& xs, VertexId v) {
    xs.insert(std::lower_bound(xs.begin(), xs.end(), v), v);
  }

  bool connected(VertexId from, VertexId to) const {
    std::vector<VertexId> stack{from};
    std::set<VertexId> seen{from};
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      for (VertexId n : at(v).neighbors)
        if (seen.insert(n).second) stack.push_back(n);
    }
    return false;
  }

  std::vector<Vertex> vertices_;
};

/// Q(forest) together with the vertex ordering that indexes it.
struct GramMatrix {
  std::vector<VertexId> order;
  IntegerMatrix entries;
};

inline GramMatrix gram_matrix(const WeightedForest& forest, std::vector<VertexId> order) {
  GramMatrix g{std::move(order), IntegerMatrix(forest.size())};
  if (g.order.size() != forest.size()) throw Error("ordering does not cover the forest");
  for (std::size_t i = 0; i < g.order.size(); ++i) {
    for (std::size_t j = 0; j < g.order.size(); ++j) {
      if (i == j)
        g.entries(i, j) = -forest.weight(g.order[i]);
      else if (forest.has_edge(g.order[i], g.order[j]))
        g.entries(i, j) = -1;
    }
  }
  return g;
}

inline GramMatrix gram_matrix(const WeightedForest& forest) {
  return gram_matrix(forest, forest.vertex_ids());
}

// ---------------------------------------------------------------------------
// Removals (value semantics; the input is never modified)

inline WeightedForest remove_vertices(const WeightedForest& forest, std::span<const VertexId> subset) {
  WeightedForest out = forest;
  for (VertexId v : subset) {
    if (!forest.contains(v)) throw Error("unknown vertex " + to_string(v));
    if (out.contains(v)) out.erase_vertex(v);
  }
  return out;
}

inline WeightedForest remove_vertices(const WeightedForest& forest, std::initializer_list<VertexId> subset) {
  return remove_vertices(forest, std::span<const VertexId>(subset.begin(), subset.size()));
}

inline WeightedForest remove_edge(const WeightedForest& forest, VertexId p, VertexId q) {
  WeightedForest out = forest;
  out.erase_edge(p, q);
  return out;
}

/// Vertex sets of the connected components, each sorted, ordered by
/// smallest member.
inline std::vector<std::vector<VertexId>> components(const WeightedForest& forest) {
  std::vector<std::vector<VertexId>> out;
  std::set<VertexId> seen;
  for (const auto& v : forest.vertices()) {
    if (seen.contains(v.id)) continue;
    std::vector<VertexId> comp;
    std::vector<VertexId> stack{v.id};
    seen.insert(v.id);
    while (!stack.empty()) {
      VertexId x = stack.back();
      stack.pop_back();
      comp.push_back(x);
      for (VertexId n : forest.neighbors(x))
        if (seen.insert(n).second) stack.push_back(n);
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Determinants

/// Sum over sets of pairwise disjoint edges S of
/// (-1)^|S| * prod_{v not covered by S} (-weight(v)). Exponential; this is
/// the reference definition, not the fast path. At most 64 vertices.
inline Integer det_matchings(const WeightedForest& forest) {
  const std::size_t n = forest.size();
  if (n > 64) throw Error("det_matchings supports at most 64 vertices");
  std::vector<Integer> minus_w(n);
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = forest.vertices()[i];
    minus_w[i] = -v.weight;
    for (VertexId nb : v.neighbors) adj[i].push_back(forest.index_of(nb));
  }
  auto rec = [&](auto&& self, std::size_t i, std::uint64_t used) -> Integer {
    while (i < n && ((used >> i) & 1U)) ++i;
    if (i == n) return 1;
    const std::uint64_t with_i = used | (std::uint64_t{1} << i);
    Integer total = minus_w[i] * self(self, i + 1, with_i);
    for (std::size_t j : adj[i]) {
      if ((used >> j) & 1U) continue;
      total -= self(self, i + 1, with_i | (std::uint64_t{1} << j));
    }
    return total;
  };
  return rec(rec, 0, 0);
}

namespace detail {

// Linear-time determinant of the forest with some vertices and at most one
// edge masked out. Each component is rooted; bottom-up every vertex carries
// the determinant of its subtree with and without itself, combined by
// expansion along the vertex:
//   D(v)  = -w(v) * prod D(c) - sum_c D'(c) * prod_{c' != c} D(c')
//   D'(v) = prod D(c)
inline Integer masked_det(const WeightedForest& forest, const std::vector<char>& removed,
                          std::optional<std::pair<std::size_t, std::size_t>> cut = std::nullopt) {
  const auto& verts = forest.vertices();
  const std::size_t n = verts.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) continue;
    for (VertexId nb : verts[i].neighbors) {
      const std::size_t j = forest.index_of(nb);
      if (removed[j]) continue;
      if (cut && ((cut->first == i && cut->second == j) || (cut->first == j && cut->second == i))) continue;
      adj[i].push_back(j);
    }
  }

  std::vector<Integer> with_v(n), without_v(n);
  std::vector<std::size_t> parent(n, n);
  std::vector<char> visited(n, 0);
  std::vector<std::size_t> order;
  order.reserve(n);
  Integer total = 1;

  for (std::size_t root = 0; root < n; ++root) {
    if (removed[root] || visited[root]) continue;
    order.clear();
    std::vector<std::size_t> stack{root};
    visited[root] = 1;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (std::size_t c : adj[v]) {
        if (visited[c]) continue;
        visited[c] = 1;
        parent[c] = v;
        stack.push_back(c);
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t v = *it;
      Integer prod = 1;
      Integer sum = 0;
      for (std::size_t c : adj[v]) {
        if (c == parent[v]) continue;
        sum = sum * with_v[c] + prod * without_v[c];
        prod *= with_v[c];
      }
      with_v[v] = -verts[v].weight * prod - sum;
      without_v[v] = std::move(prod);
    }
    total *= with_v[root];
  }
  return total;
}

}  // namespace detail

/// Determinant of Q(forest) in time linear in the vertex count.
inline Integer det_fast(const WeightedForest& forest) {
  return detail::masked_det(forest, std::vector<char>(forest.size(), 0));
}

/// det_fast(remove_vertices(forest, subset)) without materialising the copy.
inline Integer det_without(const WeightedForest& forest, std::span<const VertexId> subset) {
  std::vector<char> removed(forest.size(), 0);
  for (VertexId v : subset) removed[forest.index_of(v)] = 1;
  return detail::masked_det(forest, removed);
}

inline Integer det_without(const WeightedForest& forest, std::initializer_list<VertexId> subset) {
  return det_without(forest, std::span<const VertexId>(subset.begin(), subset.size()));
}

/// det_fast(remove_edge(forest, p, q)) without materialising the copy.
inline Integer det_without_edge(const WeightedForest& forest, VertexId p, VertexId q) {
  if (!forest.has_edge(p, q)) throw Error("no edge " + to_string(Edge::between(p, q)));
  return detail::masked_det(forest, std::vector<char>(forest.size(), 0),
                            std::pair{forest.index_of(p), forest.index_of(q)});
}

// ---------------------------------------------------------------------------
// Signature

/// Exact inertia of Q(forest). Tree congruence elimination: leaves are
/// folded into their parents; a child whose value is exactly zero pairs with
/// its parent into a hyperbolic 2x2 block, which decouples the parent from
/// the rest of the tree.
inline Signature signature(const WeightedForest& forest) {
  const auto& verts = forest.vertices();
  const std::size_t n = verts.size();
  std::vector<Rational> value(n);
  std::vector<std::size_t> parent(n, n);
  std::vector<char> visited(n, 0), detached(n, 0);
  std::vector<std::vector<std::size_t>> children(n);

  for (std::size_t root = 0; root < n; ++root) {
    if (visited[root]) continue;
    std::vector<std::size_t> order;
    std::vector<std::size_t> stack{root};
    visited[root] = 1;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (VertexId nb : verts[v].neighbors) {
        const std::size_t c = forest.index_of(nb);
        if (visited[c]) continue;
        visited[c] = 1;
        parent[c] = v;
        children[v].push_back(c);
        stack.push_back(c);
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t v = *it;
      value[v] = Rational(-verts[v].weight);
      std::optional<std::size_t> zero_child;
      for (std::size_t c : children[v]) {
        if (detached[c]) continue;
        if (value[c] == 0) {
          zero_child = c;
          break;
        }
      }
      if (zero_child) {
        value[*zero_child] = 2;
        value[v] = Rational(-1, 2);
        detached[v] = 1;
        continue;
      }
      for (std::size_t c : children[v]) {
        if (!detached[c]) value[v] -= 1 / value[c];
      }
    }
  }

  Signature sig;
  for (const auto& x : value) {
    if (x > 0)
      ++sig.n_positive;
    else if (x < 0)
      ++sig.n_negative;
    else
      ++sig.n_zero;
  }
  return sig;
}

}  // namespace blowup
