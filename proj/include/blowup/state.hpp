#pragma once

#include "blowup/error.hpp"
#include "blowup/forest.hpp"
#include "blowup/integer.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace blowup {

struct VertexBlowup {
  VertexId target;
  friend auto operator<=>(const VertexBlowup&, const VertexBlowup&) = default;
};

struct EdgeBlowup {
  VertexId p;
  VertexId q;
  friend auto operator<=>(const EdgeBlowup&, const EdgeBlowup&) = default;
};

/// One atomic step: blow up a free point on a curve, or the intersection
/// point of two adjacent curves.
using BlowupOp = std::variant<VertexBlowup, EdgeBlowup>;

inline std::string to_string(const BlowupOp& op) {
  if (const auto* v = std::get_if<VertexBlowup>(&op)) return "v" + to_string(v->target);
  const auto& e = std::get<EdgeBlowup>(op);
  return "e" + to_string(e.p) + "-" + to_string(e.q);
}

/// Labels attached to one curve. All of them are frozen once the vertex is
/// created; only the self-intersection (kept in the forest) changes later.
struct VertexRecord {
  Integer kbar;  // coefficient in the augmented canonical class
  Integer det;   // determinant of the tree with this vertex removed
  Integer mult;  // multiplicity in the total transform of the line at infinity
  std::size_t creation_index = 0;
  std::vector<VertexId> parents;

  friend bool operator==(const VertexRecord&, const VertexRecord&) = default;
};

struct HistoryEntry {
  BlowupOp op;
  VertexId created;
  std::optional<Integer> retired_edge_det;  // label of the edge an edge blow-up destroyed

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

/// Raw contents of a blow-up state. Only the engine and the file loader
/// build these; everyone else sees an immutable BlowupState.
struct StateData {
  WeightedForest forest;
  VertexId root;
  std::map<VertexId, VertexRecord> vertices;
  std::map<Edge, Integer> edge_dets;
  std::vector<HistoryEntry> history;
  Integer total_det;

  friend bool operator==(const StateData&, const StateData&) = default;
};

/// Immutable snapshot of a rooted blow-up tree with all label systems.
/// Copies share the underlying data, so passing states between threads or
/// keeping many snapshots is cheap.
class BlowupState {
 public:
  explicit BlowupState(StateData data) : data_(std::make_shared<const StateData>(std::move(data))) {}

  const StateData& data() const { return *data_; }
  const WeightedForest& forest() const { return data_->forest; }
  VertexId root() const { return data_->root; }
  const Integer& total_det() const { return data_->total_det; }
  const std::vector<HistoryEntry>& history() const { return data_->history; }
  const std::map<VertexId, VertexRecord>& vertices() const { return data_->vertices; }
  const std::map<Edge, Integer>& edge_dets() const { return data_->edge_dets; }
  std::size_t size() const { return data_->vertices.size(); }

  bool contains(VertexId v) const { return data_->vertices.contains(v); }

  const VertexRecord& vertex(VertexId v) const {
    auto it = data_->vertices.find(v);
    if (it == data_->vertices.end()) throw Error("unknown vertex " + to_string(v));
    return it->second;
  }
  const Integer& weight(VertexId v) const {
    vertex(v);
    return data_->forest.weight(v);
  }
  const Integer& kbar(VertexId v) const { return vertex(v).kbar; }
  const Integer& det(VertexId v) const { return vertex(v).det; }
  const Integer& mult(VertexId v) const { return vertex(v).mult; }

  const Integer& edge_det(VertexId p, VertexId q) const {
    auto it = data_->edge_dets.find(Edge::between(p, q));
    if (it == data_->edge_dets.end()) throw Error("no edge " + to_string(Edge::between(p, q)));
    return it->second;
  }

  /// Id the next blow-up will assign: ids equal creation indices.
  VertexId next_id() const { return VertexId{static_cast<std::uint32_t>(data_->history.size() + 1)}; }

  std::vector<BlowupOp> ops() const {
    std::vector<BlowupOp> out;
    out.reserve(data_->history.size());
    for (const auto& h : data_->history) out.push_back(h.op);
    return out;
  }

  friend bool operator==(const BlowupState& a, const BlowupState& b) {
    return a.data_ == b.data_ || *a.data_ == *b.data_;
  }

 private:
  std::shared_ptr<const StateData> data_;
};

/// Label update formulas applied by the engine. A policy type so a test
/// double with a deliberately wrong rule can be driven through the checks.
struct StandardLabelRules {
  static Integer vertex_blowup_kbar(const Integer& kbar_p) { return kbar_p + 1; }
  static Integer edge_blowup_kbar(const Integer& kbar_p, const Integer& kbar_q) { return kbar_p + kbar_q; }

  static Integer vertex_blowup_det(const Integer& det_p, const Integer& d) { return det_p + d; }
  static Integer vertex_blowup_edge_det(const Integer& det_p, const Integer& d) { return det_p + d; }

  static Integer edge_blowup_det(const Integer& det_pq, const Integer& det_p, const Integer& det_q, const Integer& d) {
    return 2 * det_pq + det_p + det_q - d;
  }
  static Integer edge_blowup_side_det(const Integer& det_side, const Integer& det_pq) { return det_side + det_pq; }

  static Integer vertex_blowup_mult(const Integer& mult_p) { return mult_p; }
  static Integer edge_blowup_mult(const Integer& mult_p, const Integer& mult_q) { return mult_p + mult_q; }
};

/// P^2 with its line at infinity: one vertex, self-intersection 1,
/// K-bar label -2, total determinant -1.
inline BlowupState seed_p2() {
  StateData s;
  s.root = VertexId{0};
  s.forest.add_vertex(s.root, 1);
  s.vertices.emplace(s.root, VertexRecord{-2, 1, 1, 0, {}});
  s.total_det = -1;
  return BlowupState(std::move(s));
}

template <typename Rules = StandardLabelRules>
BlowupState blow_up_vertex(const BlowupState& state, VertexId p) {
  const VertexRecord& rp = state.vertex(p);
  StateData s = state.data();
  const VertexId r = state.next_id();
  const Integer& d = s.total_det;

  s.forest.set_weight(p, s.forest.weight(p) - 1);
  s.forest.add_vertex(r, -1);
  s.forest.add_edge(p, r);

  s.vertices.emplace(r, VertexRecord{Rules::vertex_blowup_kbar(rp.kbar), Rules::vertex_blowup_det(rp.det, d),
                                     Rules::vertex_blowup_mult(rp.mult), s.history.size() + 1, {p}});
  s.edge_dets.emplace(Edge::between(p, r), Rules::vertex_blowup_edge_det(rp.det, d));
  s.history.push_back(HistoryEntry{VertexBlowup{p}, r, std::nullopt});
  return BlowupState(std::move(s));
}

template <typename Rules = StandardLabelRules>
BlowupState blow_up_edge(const BlowupState& state, VertexId p, VertexId q) {
  if (!state.contains(p) || !state.contains(q) || !state.forest().has_edge(p, q))
    throw Error("no edge " + to_string(p) + "-" + to_string(q));
  const VertexRecord& rp = state.vertex(p);
  const VertexRecord& rq = state.vertex(q);
  const Integer det_pq = state.edge_det(p, q);

  StateData s = state.data();
  const VertexId r = state.next_id();
  const Integer& d = s.total_det;

  s.forest.erase_edge(p, q);
  s.forest.set_weight(p, s.forest.weight(p) - 1);
  s.forest.set_weight(q, s.forest.weight(q) - 1);
  s.forest.add_vertex(r, -1);
  s.forest.add_edge(p, r);
  s.forest.add_edge(r, q);

  s.vertices.emplace(r, VertexRecord{Rules::edge_blowup_kbar(rp.kbar, rq.kbar),
                                     Rules::edge_blowup_det(det_pq, rp.det, rq.det, d),
                                     Rules::edge_blowup_mult(rp.mult, rq.mult), s.history.size() + 1, {p, q}});
  s.edge_dets.erase(Edge::between(p, q));
  s.edge_dets.emplace(Edge::between(p, r), Rules::edge_blowup_side_det(rp.det, det_pq));
  s.edge_dets.emplace(Edge::between(r, q), Rules::edge_blowup_side_det(rq.det, det_pq));
  s.history.push_back(HistoryEntry{EdgeBlowup{p, q}, r, det_pq});
  return BlowupState(std::move(s));
}

template <typename Rules = StandardLabelRules>
BlowupState apply(const BlowupState& state, const BlowupOp& op) {
  if (const auto* v = std::get_if<VertexBlowup>(&op)) return blow_up_vertex<Rules>(state, v->target);
  const auto& e = std::get<EdgeBlowup>(op);
  return blow_up_edge<Rules>(state, e.p, e.q);
}

template <typename Rules = StandardLabelRules>
BlowupState replay(std::span<const BlowupOp> ops) {
  BlowupState state = seed_p2();
  for (const auto& op : ops) state = blowup::apply<Rules>(state, op);
  return state;
}

inline bool is_final(const BlowupState& state, VertexId p) {
  state.vertex(p);
  for (const auto& [id, rec] : state.vertices())
    for (VertexId parent : rec.parents)
      if (parent == p) return false;
  return true;
}

/// Undoes the most recent blow-up. The result equals the state before that
/// blow-up exactly.
inline BlowupState blow_down(const BlowupState& state) {
  if (state.history().empty()) throw Error("cannot blow down the seed: history is empty");
  const HistoryEntry& last = state.history().back();
  const VertexId r = last.created;
  if (state.forest().weight(r) != -1)
    throw Error("vertex " + to_string(r) + " has self-intersection " + to_string(state.forest().weight(r)) +
                ", not -1");
  if (!is_final(state, r)) throw Error("vertex " + to_string(r) + " is a parent and cannot be blown down");

  StateData s = state.data();
  s.forest.erase_vertex(r);
  if (const auto* v = std::get_if<VertexBlowup>(&last.op)) {
    s.forest.set_weight(v->target, s.forest.weight(v->target) + 1);
    s.edge_dets.erase(Edge::between(v->target, r));
  } else {
    const auto& e = std::get<EdgeBlowup>(last.op);
    s.forest.set_weight(e.p, s.forest.weight(e.p) + 1);
    s.forest.set_weight(e.q, s.forest.weight(e.q) + 1);
    s.forest.add_edge(e.p, e.q);
    s.edge_dets.erase(Edge::between(e.p, r));
    s.edge_dets.erase(Edge::between(r, e.q));
    s.edge_dets.emplace(Edge::between(e.p, e.q), *last.retired_edge_det);
  }
  s.vertices.erase(r);
  s.history.pop_back();
  return BlowupState(std::move(s));
}

/// Finality read off the K-bar labels alone. For kbar >= 2 a strict local
/// maximum is sufficient for finality; for kbar == 1 the neighbor labels
/// {0} or {0,1} characterise it. Other labels: nullopt.
inline std::optional<bool> final_by_labels(const BlowupState& state, VertexId p) {
  const Integer& b = state.kbar(p);
  std::vector<Integer> nbr;
  for (VertexId n : state.forest().neighbors(p)) nbr.push_back(state.kbar(n));
  if (b >= 2) {
    for (const auto& x : nbr)
      if (x >= b) return false;
    return true;
  }
  if (b == 1) {
    std::sort(nbr.begin(), nbr.end());
    return nbr == std::vector<Integer>{0} || nbr == std::vector<Integer>{0, 1};
  }
  return std::nullopt;
}

/// Transitive closure of the parent relation. Empty exactly for the root.
inline std::set<VertexId> ancestors(const BlowupState& state, VertexId p) {
  std::set<VertexId> out;
  std::vector<VertexId> stack = state.vertex(p).parents;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    if (!out.insert(v).second) continue;
    for (VertexId parent : state.vertex(v).parents) stack.push_back(parent);
  }
  return out;
}

/// Every op applicable to the state: vertex blow-ups in id order, then edge
/// blow-ups in edge order.
inline std::vector<BlowupOp> available_ops(const BlowupState& state) {
  std::vector<BlowupOp> ops;
  for (const auto& [id, rec] : state.vertices()) ops.emplace_back(VertexBlowup{id});
  for (const auto& [edge, det] : state.edge_dets()) ops.emplace_back(EdgeBlowup{edge.lo, edge.hi});
  return ops;
}

}  // namespace blowup
