#pragma once

#include "blowup/exact_linalg.hpp"
#include "blowup/forest.hpp"
#include "blowup/state.hpp"

#include <optional>
#include <string>
#include <vector>

namespace blowup {

struct VertexLabels {
  VertexId id;
  Integer weight;
  Integer kbar;
  Integer det;
  Integer mult;
  Integer det_without_root;  // determinant with both the root and this vertex removed
  Integer level;             // 2 * det + det_without_root

  friend bool operator==(const VertexLabels&, const VertexLabels&) = default;
};

struct EdgeLabels {
  Edge edge;
  Integer det;

  friend bool operator==(const EdgeLabels&, const EdgeLabels&) = default;
};

/// Snapshot of every label of a state, vertices and edges in id order.
struct LabelReport {
  std::vector<VertexLabels> vertices;
  std::vector<EdgeLabels> edges;
  Integer total_det;

  friend bool operator==(const LabelReport&, const LabelReport&) = default;
};

/// Determinant of the forest with the root and v removed. For the root
/// itself this is the determinant with only the root removed.
inline Integer det_without_root(const WeightedForest& forest, VertexId root, VertexId v) {
  if (v == root) return det_without(forest, {root});
  return det_without(forest, {root, v});
}

/// Report built from the incrementally maintained labels.
inline LabelReport label_report(const BlowupState& state) {
  LabelReport r;
  for (const auto& [id, rec] : state.vertices()) {
    Integer dprime = det_without_root(state.forest(), state.root(), id);
    Integer level = 2 * rec.det + dprime;
    r.vertices.push_back(
        VertexLabels{id, state.forest().weight(id), rec.kbar, rec.det, rec.mult, std::move(dprime), std::move(level)});
  }
  for (const auto& [edge, det] : state.edge_dets()) r.edges.push_back(EdgeLabels{edge, det});
  r.total_det = state.total_det();
  return r;
}

namespace detail {

inline IntegerMatrix intersection_matrix(const WeightedForest& forest, const std::vector<VertexId>& order) {
  GramMatrix q = gram_matrix(forest, order);
  IntegerMatrix m(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = 0; j < order.size(); ++j) m(i, j) = -q.entries(i, j);
  return m;
}

inline std::vector<Integer> solve_integral(const IntegerMatrix& m, std::vector<Integer> rhs, const char* what) {
  auto sol = solve_exact(m, std::move(rhs));
  if (!sol) throw Error(std::string(what) + ": intersection matrix is singular");
  std::vector<Integer> out;
  out.reserve(sol->size());
  for (const auto& x : *sol) {
    if (!is_integral(x)) throw Error(std::string(what) + ": non-integral solution " + x.str());
    out.push_back(to_integer(x));
  }
  return out;
}

}  // namespace detail

/// K-bar labels solved from the adjunction relations
///   kbar_P * w_P + sum_{Q adj P} kbar_Q = -2 + deg(P).
inline std::vector<Integer> solve_kbar(const WeightedForest& forest) {
  const auto order = forest.vertex_ids();
  std::vector<Integer> rhs;
  for (VertexId v : order) rhs.push_back(Integer(forest.degree(v)) - 2);
  return detail::solve_integral(detail::intersection_matrix(forest, order), std::move(rhs), "adjunction system");
}

/// Multiplicities u of the total transform L = sum u_P P of the line at
/// infinity, from L.root = 1 and L.P = 0 for every other curve.
inline std::vector<Integer> solve_pullback(const WeightedForest& forest, VertexId root) {
  const auto order = forest.vertex_ids();
  std::vector<Integer> rhs;
  for (VertexId v : order) rhs.push_back(v == root ? 1 : 0);
  return detail::solve_integral(detail::intersection_matrix(forest, order), std::move(rhs), "pullback system");
}

/// Every label recomputed from the tree alone: determinant labels by
/// removal, K-bar labels by the adjunction system, multiplicities by the
/// pullback system. Must agree with label_report on a correct engine.
inline LabelReport recompute_from_scratch(const BlowupState& state) {
  const WeightedForest& forest = state.forest();
  const auto order = forest.vertex_ids();
  const auto kbar = solve_kbar(forest);
  const auto mult = solve_pullback(forest, state.root());

  LabelReport r;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const VertexId v = order[i];
    Integer det = det_without(forest, {v});
    Integer dprime = det_without_root(forest, state.root(), v);
    Integer level = 2 * det + dprime;
    r.vertices.push_back(VertexLabels{v, forest.weight(v), kbar[i], std::move(det), mult[i], std::move(dprime),
                                      std::move(level)});
  }
  for (const Edge& e : forest.edges()) r.edges.push_back(EdgeLabels{e, det_without_edge(forest, e.lo, e.hi)});
  r.total_det = det_fast(forest);
  return r;
}

/// Names the first label on which `actual` disagrees with `expected`, e.g.
/// "vertex 3 dP: expected 2, found 1".
inline std::optional<std::string> first_mismatch(const LabelReport& expected, const LabelReport& actual) {
  auto diff = [](const std::string& where, const char* label, const Integer& e, const Integer& a) {
    return where + " " + label + ": expected " + to_string(e) + ", found " + to_string(a);
  };
  if (expected.total_det != actual.total_det) return diff("total", "d", expected.total_det, actual.total_det);
  if (expected.vertices.size() != actual.vertices.size())
    return "vertex count: expected " + std::to_string(expected.vertices.size()) + ", found " +
           std::to_string(actual.vertices.size());
  for (std::size_t i = 0; i < expected.vertices.size(); ++i) {
    const auto& e = expected.vertices[i];
    const auto& a = actual.vertices[i];
    const std::string where = "vertex " + to_string(e.id);
    if (e.id != a.id) return "vertex ids: expected " + to_string(e.id) + ", found " + to_string(a.id);
    if (e.weight != a.weight) return diff(where, "w", e.weight, a.weight);
    if (e.kbar != a.kbar) return diff(where, "b", e.kbar, a.kbar);
    if (e.det != a.det) return diff(where, "dP", e.det, a.det);
    if (e.mult != a.mult) return diff(where, "u", e.mult, a.mult);
    if (e.det_without_root != a.det_without_root) return diff(where, "d'P", e.det_without_root, a.det_without_root);
    if (e.level != a.level) return diff(where, "l", e.level, a.level);
  }
  if (expected.edges.size() != actual.edges.size())
    return "edge count: expected " + std::to_string(expected.edges.size()) + ", found " +
           std::to_string(actual.edges.size());
  for (std::size_t i = 0; i < expected.edges.size(); ++i) {
    const auto& e = expected.edges[i];
    const auto& a = actual.edges[i];
    if (e.edge != a.edge) return "edges: expected " + to_string(e.edge) + ", found " + to_string(a.edge);
    if (e.det != a.det) return diff("edge " + to_string(e.edge), "dPQ", e.det, a.det);
  }
  return std::nullopt;
}

}  // namespace blowup
