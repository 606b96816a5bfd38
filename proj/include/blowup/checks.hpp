#pragma once

#include "blowup/forest.hpp"
#include "blowup/history.hpp"
#include "blowup/labels.hpp"
#include "blowup/parallel.hpp"
#include "blowup/state.hpp"
#include "blowup/worked_examples.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blowup {

// ---------------------------------------------------------------------------
// Deterministic history sampling

/// SplitMix64 (Steele, Lea, Flood 2014): 64-bit state, add the golden gamma,
/// then two xor-shift-multiply rounds. Output is identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform-ish value in [0, n) by reduction modulo n.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

enum class KbarConstraint {
  none,
  never_zero,  // only ops whose new vertex has a nonzero K-bar label
};

struct HistorySampler {
  std::uint64_t seed = 1;
  std::size_t max_depth = 12;
  unsigned vertex_weight = 1;  // relative odds of a vertex blow-up
  unsigned edge_weight = 1;    // relative odds of an edge blow-up
  KbarConstraint constraint = KbarConstraint::none;
};

/// Generator for one trial; trials are independent streams so they can run
/// in any order or concurrently.
inline SplitMix64 trial_rng(std::uint64_t seed, std::size_t trial) {
  return SplitMix64(seed ^ (0xD1B54A32D192ED03ULL * (static_cast<std::uint64_t>(trial) + 1)));
}

/// Seed state followed by every state of one sampled history.
template <typename Rules = StandardLabelRules>
std::vector<BlowupState> sample_trajectory(const HistorySampler& sampler, std::size_t trial) {
  SplitMix64 rng = trial_rng(sampler.seed, trial);
  std::vector<BlowupState> states{seed_p2()};
  for (std::size_t step = 0; step < sampler.max_depth; ++step) {
    const BlowupState& cur = states.back();
    std::vector<BlowupOp> vertex_ops, edge_ops;
    for (const auto& [id, rec] : cur.vertices()) {
      if (sampler.constraint == KbarConstraint::never_zero && Rules::vertex_blowup_kbar(rec.kbar) == 0) continue;
      vertex_ops.emplace_back(VertexBlowup{id});
    }
    for (const auto& [edge, det] : cur.edge_dets()) {
      if (sampler.constraint == KbarConstraint::never_zero &&
          Rules::edge_blowup_kbar(cur.kbar(edge.lo), cur.kbar(edge.hi)) == 0)
        continue;
      edge_ops.emplace_back(EdgeBlowup{edge.lo, edge.hi});
    }
    const bool can_v = !vertex_ops.empty() && sampler.vertex_weight > 0;
    const bool can_e = !edge_ops.empty() && sampler.edge_weight > 0;
    if (!can_v && !can_e) break;
    bool pick_vertex = can_v;
    if (can_v && can_e) pick_vertex = rng.below(sampler.vertex_weight + sampler.edge_weight) < sampler.vertex_weight;
    const auto& pool = pick_vertex ? vertex_ops : edge_ops;
    const BlowupOp op = pool[rng.below(pool.size())];
    states.push_back(blowup::apply<Rules>(cur, op));
  }
  return states;
}

// ---------------------------------------------------------------------------
// Reports

struct CheckFailure {
  std::size_t trial = 0;
  std::string history;  // replayable, see parse_history
  std::string detail;
};

struct CheckReport {
  std::string name;
  std::size_t trials = 0;
  std::size_t cases = 0;  // non-vacuous instances examined
  std::size_t failure_count = 0;
  std::vector<CheckFailure> failures;  // first kMaxRecordedFailures, trial order
  std::vector<std::string> notes;
  std::chrono::milliseconds wall_time{0};

  static constexpr std::size_t kMaxRecordedFailures = 20;

  bool passed() const { return failure_count == 0; }
};

struct CheckOutcome {
  std::optional<CheckFailure> failure;
  std::size_t cases = 0;
};

using Trajectory = std::span<const BlowupState>;
using CheckFn = CheckOutcome (*)(Trajectory);

namespace detail {

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ",";
    out += to_string(x);
  }
  return out;
}

inline CheckOutcome fail(const BlowupState& at, std::string detail) {
  auto ops = at.ops();
  return CheckOutcome{CheckFailure{0, format_history(ops), std::move(detail)}, 0};
}

inline std::string vstr(VertexId v) { return "vertex " + to_string(v); }

/// Vertices of the component of `forest` containing v.
inline std::vector<VertexId> component_of(const WeightedForest& forest, VertexId v) {
  for (auto& c : components(forest))
    if (std::binary_search(c.begin(), c.end(), v)) return c;
  return {};
}

inline Integer det_of_subset(const WeightedForest& forest, const std::vector<VertexId>& keep) {
  std::vector<VertexId> drop;
  for (VertexId v : forest.vertex_ids())
    if (!std::binary_search(keep.begin(), keep.end(), v)) drop.push_back(v);
  return det_without(forest, drop);
}

inline CheckOutcome check_matchings(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    const auto& f = s.forest();
    if (det_matchings(f) != det_fast(f)) return fail(s, "matching expansion disagrees with det_fast on the full tree");
    for (VertexId v : f.vertex_ids()) {
      if (det_matchings(remove_vertices(f, {v})) != det_without(f, {v}))
        return fail(s, "matching expansion disagrees with det_fast with " + vstr(v) + " removed");
      ++out.cases;
    }
  }
  return out;
}

inline CheckOutcome check_multiplicativity(Trajectory states) {
  CheckOutcome out;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& s = states[k];
    const auto& f = s.forest();
    for (VertexId v : f.vertex_ids()) {
      const WeightedForest rest = remove_vertices(f, {v});
      Integer product = 1;
      for (const auto& comp : components(rest)) product *= det_of_subset(rest, comp);
      if (product != det_matchings(rest))
        return fail(s, "determinant with " + vstr(v) + " removed is not the product over components");
      ++out.cases;
    }
    for (const Edge& e : f.edges()) {
      const WeightedForest cut = remove_edge(f, e.lo, e.hi);
      const Integer product = det_of_subset(cut, component_of(cut, e.lo)) * det_of_subset(cut, component_of(cut, e.hi));
      if (product != det_without_edge(f, e.lo, e.hi))
        return fail(s, "edge " + to_string(e) + " split is not multiplicative");
      ++out.cases;
    }
    if (k > 0) {
      // Disjoint union with the previous tree, ids shifted past this one.
      WeightedForest u = f;
      const auto& g = states[k - 1].forest();
      const std::uint32_t shift = 1000;
      for (const auto& v : g.vertices()) u.add_vertex(VertexId{v.id.value + shift}, v.weight);
      for (const Edge& e : g.edges()) u.add_edge(VertexId{e.lo.value + shift}, VertexId{e.hi.value + shift});
      if (det_fast(u) != det_matchings(f) * det_matchings(g)) return fail(s, "disjoint union is not multiplicative");
      ++out.cases;
    }
  }
  return out;
}

inline CheckOutcome check_vertex_expansion(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    const auto& f = s.forest();
    const Integer d = det_matchings(f);
    for (VertexId p : f.vertex_ids()) {
      Integer rhs = -f.weight(p) * det_without(f, {p});
      for (VertexId q : f.neighbors(p)) rhs -= det_without(f, {p, q});
      if (rhs != d) return fail(s, "expansion along " + vstr(p) + " gives " + to_string(rhs) + ", not " + to_string(d));
      ++out.cases;
    }
  }
  return out;
}

inline CheckOutcome check_edge_expansion(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    const auto& f = s.forest();
    const Integer d = det_matchings(f);
    for (const Edge& e : f.edges()) {
      const Integer rhs = det_without_edge(f, e.lo, e.hi) - det_without(f, {e.lo, e.hi});
      if (rhs != d) return fail(s, "expansion along edge " + to_string(e) + " gives " + to_string(rhs));
      ++out.cases;
    }
  }
  return out;
}

inline CheckOutcome check_weight_increment(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    const auto& f = s.forest();
    const Integer d = det_fast(f);
    for (VertexId p : f.vertex_ids()) {
      WeightedForest g = f;
      g.set_weight(p, f.weight(p) - 1);
      if (det_matchings(g) != d + det_without(f, {p}))
        return fail(s, "decrementing the weight of " + vstr(p) + " does not add its determinant label");
      ++out.cases;
    }
  }
  return out;
}

inline CheckOutcome check_total_det(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    if (s.total_det() != -1) return fail(s, "cached total determinant is " + to_string(s.total_det()));
    const Integer d = det_fast(s.forest());
    if (d != -1) return fail(s, "total determinant is " + to_string(d));
    ++out.cases;
    if (!s.history().empty()) {
      const BlowupState down = blow_down(s);
      if (det_fast(down.forest()) != -1) return fail(s, "blow-down changed the total determinant");
      ++out.cases;
    }
  }
  return out;
}

inline CheckOutcome check_new_labels(Trajectory states) {
  CheckOutcome out;
  for (std::size_t k = 1; k < states.size(); ++k) {
    const auto& prev = states[k - 1];
    const auto& cur = states[k];
    const auto& pf = prev.forest();
    const auto& cf = cur.forest();
    const HistoryEntry& h = cur.history().back();
    const VertexId r = h.created;
    const Integer d = det_fast(pf);
    Integer expect_r;
    std::vector<std::pair<Edge, Integer>> expect_edges;
    if (const auto* v = std::get_if<VertexBlowup>(&h.op)) {
      const Integer dp = det_without(pf, {v->target});
      expect_r = dp + d;
      expect_edges.emplace_back(Edge::between(v->target, r), dp + d);
    } else {
      const auto& e = std::get<EdgeBlowup>(h.op);
      const Integer dp = det_without(pf, {e.p});
      const Integer dq = det_without(pf, {e.q});
      const Integer dpq = det_without_edge(pf, e.p, e.q);
      expect_r = 2 * dpq + dp + dq - d;
      expect_edges.emplace_back(Edge::between(e.p, r), dp + dpq);
      expect_edges.emplace_back(Edge::between(r, e.q), dq + dpq);
    }
    const Integer actual_r = det_without(cf, {r});
    if (actual_r != expect_r)
      return fail(cur, "new " + vstr(r) + ": determinant " + to_string(actual_r) + ", formula " + to_string(expect_r));
    if (cur.det(r) != expect_r)
      return fail(cur, "engine label of new " + vstr(r) + " is " + to_string(cur.det(r)) + ", expected " +
                           to_string(expect_r));
    for (const auto& [edge, value] : expect_edges) {
      const Integer actual = det_without_edge(cf, edge.lo, edge.hi);
      if (actual != value) return fail(cur, "new edge " + to_string(edge) + ": determinant " + to_string(actual));
      if (cur.edge_det(edge.lo, edge.hi) != value)
        return fail(cur, "engine label of new edge " + to_string(edge) + " is " +
                             to_string(cur.edge_det(edge.lo, edge.hi)));
    }
    ++out.cases;
  }
  return out;
}

inline CheckOutcome check_multiplicity_identity(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    const auto& f = s.forest();
    const auto solved = solve_pullback(f, s.root());
    const auto ids = f.vertex_ids();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const VertexId p = ids[i];
      const Integer& u = s.mult(p);
      if (u != solved[i]) return fail(s, vstr(p) + ": u=" + to_string(u) + " but pullback gives " + to_string(solved[i]));
      if (u <= 0) return fail(s, vstr(p) + ": u is not positive");
      if (p == s.root()) {
        if (u != 1) return fail(s, "root multiplicity is " + to_string(u));
        continue;
      }
      const Integer dp = det_without(f, {p});
      const Integer dpp = det_without(f, {s.root(), p});
      if (u * u != dp + dpp)
        return fail(s, vstr(p) + ": u^2=" + to_string(u * u) + " but dP+d'P=" + to_string(dp + dpp));
      ++out.cases;
    }
  }
  return out;
}

inline CheckOutcome check_multiplicity_bound(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    const auto& f = s.forest();
    for (VertexId p : f.vertex_ids()) {
      if (p == s.root() || s.kbar(p) >= 0) continue;
      const Integer dp = det_without(f, {p});
      if (dp >= 0) continue;
      const Integer& u = s.mult(p);
      const Integer level = 2 * dp + det_without(f, {s.root(), p});
      if (u * u < -dp || level < 0)
        return fail(s, vstr(p) + ": u^2=" + to_string(u * u) + " < |dP|=" + to_string(-dp) + " (l=" +
                           to_string(level) + ")");
      ++out.cases;
    }
  }
  return out;
}

inline CheckOutcome check_zero_ancestor(Trajectory states) {
  CheckOutcome out;
  const BlowupState& last = states.back();
  bool zero_free = true;
  for (const auto& [id, rec] : last.vertices())
    if (rec.kbar == 0) zero_free = false;

  for (const auto& s : states) {
    const auto& f = s.forest();
    if (zero_free) {
      for (VertexId p : f.vertex_ids()) {
        const Integer dp = det_without(f, {p});
        if (dp + s.kbar(p) < -1) return fail(s, vstr(p) + ": dP + b = " + to_string(dp + s.kbar(p)) + " < -1");
      }
      for (const Edge& e : f.edges()) {
        const Integer dpq = det_without_edge(f, e.lo, e.hi);
        if (dpq < 0) return fail(s, "edge " + to_string(e) + ": dPQ = " + to_string(dpq) + " < 0");
      }
      ++out.cases;
    }
    for (VertexId p : f.vertex_ids()) {
      if (s.kbar(p) >= 0 || det_without(f, {p}) >= 0) continue;
      bool found = false;
      for (VertexId a : ancestors(s, p))
        if (s.kbar(a) == 0) found = true;
      if (!found) return fail(s, vstr(p) + " has b<0 and dP<0 but no ancestor with b=0");
      ++out.cases;
    }
  }
  return out;
}

/// Non-root vertices on different sides of the root.
inline bool separated_by_root(const std::vector<std::vector<VertexId>>& sides, VertexId p, VertexId q) {
  for (const auto& side : sides) {
    const bool hp = std::binary_search(side.begin(), side.end(), p);
    const bool hq = std::binary_search(side.begin(), side.end(), q);
    if (hp || hq) return hp != hq;
  }
  return false;
}

inline CheckOutcome check_two_sided_pairs(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    const auto& f = s.forest();
    const auto sides = components(remove_vertices(f, {s.root()}));
    std::vector<VertexId> negative;
    for (VertexId p : f.vertex_ids())
      if (p != s.root() && s.kbar(p) < 0 && det_without(f, {p}) < 0) negative.push_back(p);
    for (std::size_t i = 0; i < negative.size(); ++i) {
      for (std::size_t j = i + 1; j < negative.size(); ++j) {
        if (!separated_by_root(sides, negative[i], negative[j])) continue;
        const Integer dpq = det_without(f, {negative[i], negative[j]});
        if (dpq < 0)
          return fail(s, "pair " + to_string(negative[i]) + "," + to_string(negative[j]) + ": d = " + to_string(dpq));
        ++out.cases;
      }
    }
  }
  return out;
}

inline CheckOutcome check_one_side(Trajectory states) {
  CheckOutcome out;
  const BlowupState& s = states.back();
  const auto& f = s.forest();
  const auto sides = components(remove_vertices(f, {s.root()}));
  std::vector<VertexId> negative;
  for (VertexId p : f.vertex_ids())
    if (p != s.root() && s.kbar(p) < 0) negative.push_back(p);
  const std::size_t n = negative.size();
  const std::size_t max_size = n <= 10 ? n : 3;
  // All subsets when small, else all subsets of size <= 3.
  std::vector<VertexId> subset;
  auto visit = [&](auto&& self, std::size_t from) -> std::optional<std::string> {
    if (subset.size() >= 2 && det_without(f, subset) < 0) {
      for (std::size_t i = 1; i < subset.size(); ++i) {
        if (separated_by_root(sides, subset[0], subset[i]))
          return "subset {" + join(subset) + "} has negative determinant but spans both sides of the root";
      }
      ++out.cases;
    }
    if (subset.size() == max_size) return std::nullopt;
    for (std::size_t i = from; i < n; ++i) {
      subset.push_back(negative[i]);
      if (auto r = self(self, i + 1)) return r;
      subset.pop_back();
    }
    return std::nullopt;
  };
  if (auto r = visit(visit, 0)) return fail(s, *r);
  return out;
}

inline CheckOutcome check_kbar_coprime(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    for (const Edge& e : s.forest().edges()) {
      if (gcd(s.kbar(e.lo), s.kbar(e.hi)) != 1)
        return fail(s, "edge " + to_string(e) + ": gcd(" + to_string(s.kbar(e.lo)) + "," + to_string(s.kbar(e.hi)) +
                           ") != 1");
      ++out.cases;
    }
  }
  return out;
}

inline CheckOutcome check_adjunction(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    const auto& f = s.forest();
    for (VertexId p : f.vertex_ids()) {
      Integer lhs = s.kbar(p) * f.weight(p);
      for (VertexId q : f.neighbors(p)) lhs += s.kbar(q);
      const Integer rhs = Integer(f.degree(p)) - 2;
      if (lhs != rhs) return fail(s, vstr(p) + ": adjunction gives " + to_string(lhs) + ", expected " + to_string(rhs));
      ++out.cases;
    }
  }
  return out;
}

inline CheckOutcome check_structure(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    const auto& f = s.forest();
    std::vector<VertexId> non_negative;
    for (VertexId p : f.vertex_ids())
      if (s.kbar(p) >= 0) non_negative.push_back(p);
    if (components(remove_vertices(f, non_negative)).size() > 1)
      return fail(s, "vertices with negative K-bar label are not connected");
    for (VertexId p : f.vertex_ids()) {
      if (s.kbar(p) == 0) {
        for (VertexId q : f.neighbors(p))
          if (s.kbar(q) != 1 && s.kbar(q) != -1) return fail(s, "K-bar-0 " + vstr(p) + " touches label " + to_string(s.kbar(q)));
      }
    }
    for (const Edge& e : f.edges())
      if (s.kbar(e.lo) % 2 == 0 && s.kbar(e.hi) % 2 == 0) return fail(s, "edge " + to_string(e) + " joins two even labels");
    ++out.cases;
  }
  return out;
}

inline CheckOutcome check_final_labels(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    for (VertexId p : s.forest().vertex_ids()) {
      const auto by_labels = final_by_labels(s, p);
      if (!by_labels) continue;
      const bool final = is_final(s, p);
      if (s.kbar(p) >= 2 && *by_labels && !final)
        return fail(s, vstr(p) + " is a strict K-bar maximum >= 2 but not final");
      if (s.kbar(p) == 1 && *by_labels != final)
        return fail(s, vstr(p) + " (label 1): label criterion " + std::to_string(*by_labels) + ", parent relation " +
                           std::to_string(final));
      ++out.cases;
    }
  }
  return out;
}

inline CheckOutcome check_signature(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    const Signature sig = signature(s.forest());
    if (sig.n_negative != 1 || sig.n_zero != 0)
      return fail(s, "inertia (" + std::to_string(sig.n_positive) + "," + std::to_string(sig.n_zero) + "," +
                         std::to_string(sig.n_negative) + ")");
    ++out.cases;
  }
  const BlowupState& last = states.back();
  if (matrix_inertia(gram_matrix(last.forest()).entries) != signature(last.forest()))
    return fail(last, "tree and dense inertia disagree");
  return out;
}

inline CheckOutcome check_label_freeze(Trajectory states) {
  CheckOutcome out;
  struct Frozen {
    Integer kbar, det, mult;
  };
  std::map<VertexId, Frozen> vertices;
  std::map<Edge, Integer> edges;
  for (const auto& s : states) {
    const LabelReport r = recompute_from_scratch(s);
    for (const auto& v : r.vertices) {
      auto [it, fresh] = vertices.try_emplace(v.id, Frozen{v.kbar, v.det, v.mult});
      if (fresh) continue;
      if (it->second.kbar != v.kbar || it->second.det != v.det || it->second.mult != v.mult)
        return fail(s, vstr(v.id) + " labels changed after creation");
      ++out.cases;
    }
    for (const auto& e : r.edges) {
      auto [it, fresh] = edges.try_emplace(e.edge, e.det);
      if (fresh) continue;
      if (it->second != e.det) return fail(s, "edge " + to_string(e.edge) + " label changed after creation");
      ++out.cases;
    }
  }
  return out;
}

inline CheckOutcome check_blowdown(Trajectory states) {
  CheckOutcome out;
  try {
    (void)blow_down(states.front());
    return fail(states.front(), "blow-down of the seed did not fail");
  } catch (const Error&) {
  }
  for (std::size_t k = 1; k < states.size(); ++k) {
    if (!(blow_down(states[k]) == states[k - 1])) return fail(states[k], "blow-down does not restore the previous state");
    ++out.cases;
  }
  const BlowupState& last = states.back();
  for (const auto& op : available_ops(last)) {
    if (!(blow_down(blowup::apply(last, op)) == last)) return fail(last, "blow-down after " + to_string(op) + " is not an inverse");
    ++out.cases;
  }
  return out;
}

inline CheckOutcome check_incremental(Trajectory states) {
  CheckOutcome out;
  for (const auto& s : states) {
    if (auto m = first_mismatch(recompute_from_scratch(s), label_report(s))) return fail(s, *m);
    ++out.cases;
  }
  return out;
}

}  // namespace detail

struct CheckDef {
  std::string_view name;
  std::string_view description;
  CheckFn run;
};

/// Every registered check, in report order.
inline std::span<const CheckDef> check_registry() {
  static const CheckDef registry[] = {
      {"lemma_5_1", "matching expansion equals the fast determinant", detail::check_matchings},
      {"lemma_5_2", "determinants multiply over disjoint unions", detail::check_multiplicativity},
      {"lemma_5_3", "expansion along a vertex", detail::check_vertex_expansion},
      {"lemma_5_4", "expansion along an edge", detail::check_edge_expansion},
      {"lemma_5_5", "decrementing a weight adds the vertex determinant", detail::check_weight_increment},
      {"lemma_5_6", "total determinant stays -1 under blow-ups and blow-downs", detail::check_total_det},
      {"lemma_5_7", "closed forms for the labels of a new vertex and its edges", detail::check_new_labels},
      {"lemma_5_8", "u^2 = dP + d'P, with u from the pullback system", detail::check_multiplicity_identity},
      {"lemma_5_10", "u^2 >= |dP| when b < 0 and dP < 0", detail::check_multiplicity_bound},
      {"thm_5_2", "dP + b >= -1 and dPQ >= 0 without K-bar-0 curves; otherwise a K-bar-0 ancestor",
       detail::check_zero_ancestor},
      {"thm_5_3", "root-separated negative pairs have non-negative pair determinant", detail::check_two_sided_pairs},
      {"cor_5_2", "negative-b sets with negative removal determinant lie on one side of the root",
       detail::check_one_side},
      {"prop_2_3", "K-bar labels of adjacent vertices are coprime", detail::check_kbar_coprime},
      {"adjunction", "b_P w_P + sum of neighbor labels = deg(P) - 2", detail::check_adjunction},
      {"structure", "negative part connected, zero labels touch only +-1, no adjacent even labels",
       detail::check_structure},
      {"final_labels", "label-based finality agrees with the parent relation", detail::check_final_labels},
      {"signature_hodge", "Gram matrix has exactly one negative and no zero eigenvalue", detail::check_signature},
      {"label_freeze", "recomputed labels never change after creation", detail::check_label_freeze},
      {"blowdown_roundtrip", "blow-down inverts the last blow-up exactly", detail::check_blowdown},
      {"incremental", "maintained labels equal labels recomputed from scratch", detail::check_incremental},
  };
  return registry;
}

inline const CheckDef* find_check(std::string_view name) {
  for (const auto& def : check_registry())
    if (def.name == name) return &def;
  return nullptr;
}

inline std::string registry_names() {
  std::string out;
  for (const auto& def : check_registry()) {
    if (!out.empty()) out += ", ";
    out += def.name;
  }
  return out;
}

/// Runs one named check over `trials` sampled histories. Trials may run
/// concurrently; outcomes are merged in trial order.
template <typename Rules = StandardLabelRules>
CheckReport run_check(std::string_view name, const HistorySampler& sampler, std::size_t trials,
                      std::size_t threads = 1) {
  const CheckDef* def = find_check(name);
  if (def == nullptr) throw Error("unknown check '" + std::string(name) + "'; known checks: " + registry_names());

  const auto start = std::chrono::steady_clock::now();
  std::vector<CheckOutcome> outcomes(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto states = sample_trajectory<Rules>(sampler, t);
    try {
      outcomes[t] = def->run(states);
    } catch (const std::exception& e) {
      outcomes[t] = detail::fail(states.back(), std::string("exception: ") + e.what());
    }
  });

  CheckReport report;
  report.name = std::string(def->name);
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    report.cases += outcomes[t].cases;
    if (!outcomes[t].failure) continue;
    ++report.failure_count;
    if (report.failures.size() < CheckReport::kMaxRecordedFailures) {
      CheckFailure f = std::move(*outcomes[t].failure);
      f.trial = t;
      report.failures.push_back(std::move(f));
    }
  }
  report.wall_time =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return report;
}

// ---------------------------------------------------------------------------
// Pair-determinant formula discrimination

/// One root-separated pair (P, Q) with its removal determinant and the two
/// candidate closed forms.
struct PairFormulaCase {
  std::vector<BlowupOp> history;
  VertexId p;
  VertexId q;
  Integer u_p, u_q, d_p, d_q;
  Integer observed;  // det of the tree with P and Q removed
  Integer squared;   // u_P^2 u_Q^2 - d_P d_Q
  Integer literal;   // u_P u_Q - d_P d_Q
};

enum class PairFormulaVerdict { squared_form, literal_form, neither, inconclusive };

inline std::string_view to_string(PairFormulaVerdict v) {
  switch (v) {
    case PairFormulaVerdict::squared_form: return "squared form u_P^2 u_Q^2 - d_P d_Q";
    case PairFormulaVerdict::literal_form: return "literal form u_P u_Q - d_P d_Q";
    case PairFormulaVerdict::neither: return "neither form";
    case PairFormulaVerdict::inconclusive: return "inconclusive at this depth";
  }
  return "?";
}

struct PairFormulaReport {
  std::size_t max_depth = 0;
  std::uint64_t seed = 0;
  std::size_t histories = 0;
  std::size_t pairs = 0;
  std::size_t separating_pairs = 0;  // pairs where the two forms differ
  std::size_t squared_mismatches = 0;
  std::size_t literal_mismatches = 0;
  std::optional<PairFormulaCase> smallest_separating;
  std::optional<PairFormulaCase> first_squared_mismatch;
  PairFormulaVerdict verdict = PairFormulaVerdict::inconclusive;
};

namespace detail {

inline void scan_pairs(const BlowupState& s, PairFormulaReport& report) {
  const auto& f = s.forest();
  const auto sides = components(remove_vertices(f, {s.root()}));
  const auto ids = f.vertex_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const VertexId p = ids[i], q = ids[j];
      if (p == s.root() || q == s.root() || !separated_by_root(sides, p, q)) continue;
      PairFormulaCase c{s.ops(), p, q, s.mult(p), s.mult(q), s.det(p), s.det(q), det_without(f, {p, q}), 0, 0};
      c.squared = c.u_p * c.u_p * c.u_q * c.u_q - c.d_p * c.d_q;
      c.literal = c.u_p * c.u_q - c.d_p * c.d_q;
      ++report.pairs;
      const bool sq_ok = c.squared == c.observed;
      const bool lit_ok = c.literal == c.observed;
      if (!sq_ok) {
        ++report.squared_mismatches;
        if (!report.first_squared_mismatch) report.first_squared_mismatch = c;
      }
      if (!lit_ok) ++report.literal_mismatches;
      if (c.squared != c.literal) {
        ++report.separating_pairs;
        if (!report.smallest_separating || s.size() < report.smallest_separating->history.size() + 1)
          report.smallest_separating = c;
      }
    }
  }
}

}  // namespace detail

/// Compares the two candidate forms against the determinant oracle on every
/// root-separated pair of every history of length <= max_depth (exhaustive),
/// plus `sampled` seeded random histories of length max_depth + 4.
inline PairFormulaReport discriminate_pair_formula(std::size_t max_depth, std::uint64_t seed,
                                                   std::size_t sampled = 200) {
  PairFormulaReport report;
  report.max_depth = max_depth;
  report.seed = seed;

  std::vector<BlowupState> level{seed_p2()};
  for (std::size_t depth = 0; depth <= max_depth; ++depth) {
    std::vector<BlowupState> next;
    for (const auto& s : level) {
      ++report.histories;
      detail::scan_pairs(s, report);
      if (depth < max_depth)
        for (const auto& op : available_ops(s)) next.push_back(blowup::apply(s, op));
    }
    level = std::move(next);
  }

  HistorySampler sampler{seed, max_depth + 4, 1, 1, KbarConstraint::none};
  for (std::size_t t = 0; t < sampled; ++t) {
    const auto states = sample_trajectory(sampler, t);
    ++report.histories;
    detail::scan_pairs(states.back(), report);
  }

  if (report.separating_pairs == 0)
    report.verdict = PairFormulaVerdict::inconclusive;
  else if (report.squared_mismatches == 0)
    report.verdict = PairFormulaVerdict::squared_form;
  else if (report.literal_mismatches == 0)
    report.verdict = PairFormulaVerdict::literal_form;
  else
    report.verdict = PairFormulaVerdict::neither;
  return report;
}

// ---------------------------------------------------------------------------
// Worked examples

namespace detail {

inline std::vector<Integer> ints(std::initializer_list<long> xs) { return {xs.begin(), xs.end()}; }

struct ExampleCheck {
  std::string name;
  std::vector<BlowupOp> ops;
  std::function<std::optional<std::string>(const BlowupState&)> verify;
};

inline std::optional<std::string> expect_rows(const BlowupState& s, const std::vector<VertexId>& order,
                                              const std::vector<Integer>& kbar, const std::vector<Integer>& weight,
                                              const std::vector<Integer>& det,
                                              const std::vector<Integer>& edge_det) {
  std::vector<Integer> k, w, d, ed;
  for (std::size_t i = 0; i < order.size(); ++i) {
    k.push_back(s.kbar(order[i]));
    w.push_back(s.weight(order[i]));
    d.push_back(s.det(order[i]));
    if (i + 1 < order.size()) ed.push_back(s.edge_det(order[i], order[i + 1]));
  }
  if (!kbar.empty() && k != kbar) return "K-bar row " + join(k) + ", expected " + join(kbar);
  if (!weight.empty() && w != weight) return "weight row " + join(w) + ", expected " + join(weight);
  if (!det.empty() && d != det) return "determinant row " + join(d) + ", expected " + join(det);
  if (!edge_det.empty() && ed != edge_det) return "edge row " + join(ed) + ", expected " + join(edge_det);
  if (s.total_det() != -1 || det_fast(s.forest()) != -1) return std::string("total determinant is not -1");
  if (auto m = first_mismatch(recompute_from_scratch(s), label_report(s))) return *m;
  return std::nullopt;
}

inline std::vector<ExampleCheck> worked_example_checks() {
  std::vector<ExampleCheck> out;
  out.push_back({"kbar_walkthrough", examples::kbar_walkthrough(), [](const BlowupState& s) -> std::optional<std::string> {
                   if (s.size() != 11) return "expected 11 curves, found " + std::to_string(s.size());
                   const auto spine = examples::kbar_walkthrough_spine();
                   if (auto e = expect_rows(s, spine, ints({0, -1, -2, -1, -2, -1, 0}),
                                            ints({-3, -2, -1, -4, -1, -2, -4}), {}, {}))
                     return e;
                   for (std::uint32_t tip = 7; tip <= 10; ++tip) {
                     const VertexId v{tip};
                     if (s.kbar(v) != 1 || s.weight(v) != -1 || s.forest().degree(v) != 1)
                       return "tip " + to_string(v) + " is not a label-1, weight -1 leaf";
                   }
                   for (VertexId end : {VertexId{6}, VertexId{3}})
                     if (s.forest().degree(end) != 3) return "spine end " + to_string(end) + " should carry two tips";
                   return std::nullopt;
                 }});
  out.push_back({"determinant_chain", examples::determinant_chain(), [](const BlowupState& s) {
                   return expect_rows(s, {VertexId{0}, VertexId{1}, VertexId{2}}, ints({-2, -1, 0}),
                                      ints({0, -2, -1}), ints({1, 0, -1}), ints({0, -1}));
                 }});
  out.push_back({"edge_chain", examples::edge_chain(), [](const BlowupState& s) {
                   return expect_rows(s, {VertexId{0}, VertexId{2}, VertexId{1}}, ints({-2, -3, -1}),
                                      ints({-1, -1, -2}), ints({1, 2, 0}), ints({1, 0}));
                 }});
  for (unsigned k = 1; k <= 8; ++k) {
    out.push_back({"edge_chain_k" + std::to_string(k), examples::edge_chain_extended(k), [k](const BlowupState& s) {
                     std::vector<Integer> kbar, weight, det, edge;
                     // kbar: -2, -3, ..., -(k+3), -1
                     for (unsigned j = 0; j <= k + 1; ++j) kbar.push_back(-Integer(2 + j));
                     kbar.push_back(-1);
                     // dets: 1, 2, ..., k+2, 0 and edges 1, ..., k+1, 0
                     for (unsigned j = 1; j <= k + 2; ++j) det.push_back(j);
                     det.push_back(0);
                     for (unsigned j = 1; j <= k + 1; ++j) edge.push_back(j);
                     edge.push_back(0);
                     // weights: -1, -2, ..., -2, -1, -(k+2)
                     weight.push_back(-1);
                     for (unsigned j = 0; j < k; ++j) weight.push_back(-2);
                     weight.push_back(-1);
                     weight.push_back(-Integer(k + 2));
                     return expect_rows(s, examples::edge_chain_extended_order(k), kbar, weight, det, edge);
                   }});
  }
  return out;
}

}  // namespace detail

/// Replays each scripted example and compares every label row exactly.
inline CheckReport verify_worked_examples() {
  const auto start = std::chrono::steady_clock::now();
  CheckReport report;
  report.name = "worked_examples";
  for (const auto& ex : detail::worked_example_checks()) {
    ++report.trials;
    std::optional<std::string> problem;
    try {
      problem = ex.verify(replay(ex.ops));
    } catch (const std::exception& e) {
      problem = std::string("exception: ") + e.what();
    }
    if (problem) {
      ++report.failure_count;
      report.failures.push_back(CheckFailure{report.trials - 1, format_history(ex.ops), ex.name + ": " + *problem});
    } else {
      ++report.cases;
      report.notes.push_back(ex.name + " ok");
    }
  }
  report.wall_time =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return report;
}

}  // namespace blowup
