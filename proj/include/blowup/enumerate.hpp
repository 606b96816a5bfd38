#pragma once

#include "blowup/error.hpp"
#include "blowup/forest.hpp"
#include "blowup/labels.hpp"
#include "blowup/parallel.hpp"
#include "blowup/state.hpp"

#include <algorithm>
#include <compare>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace blowup {

/// Canonical encoding of a rooted, vertex-weighted tree. Equal keys iff a
/// root- and weight-preserving isomorphism exists.
struct CanonicalKey {
  std::string bytes;

  friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;
};

/// Sorted recursive encoding: "(" weight children... ")" with the children's
/// encodings in lexicographic order.
inline CanonicalKey canonical_key(const WeightedForest& forest, VertexId root) {
  const auto& verts = forest.vertices();
  const std::size_t n = verts.size();
  std::vector<std::size_t> parent(n, n), order;
  std::vector<char> seen(n, 0);
  const std::size_t r = forest.index_of(root);
  std::vector<std::size_t> stack{r};
  seen[r] = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (VertexId nb : verts[v].neighbors) {
      const std::size_t c = forest.index_of(nb);
      if (seen[c]) continue;
      seen[c] = 1;
      parent[c] = v;
      stack.push_back(c);
    }
  }
  if (order.size() != n) throw Error("canonical_key needs a connected tree");

  std::vector<std::string> code(n);
  std::vector<std::vector<std::string>> child_codes(n);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t v = *it;
    auto& kids = child_codes[v];
    std::sort(kids.begin(), kids.end());
    std::string c = "(" + to_string(verts[v].weight);
    for (auto& k : kids) c += k;
    c += ")";
    kids.clear();
    if (parent[v] != n)
      child_codes[parent[v]].push_back(std::move(c));
    else
      code[v] = std::move(c);
  }
  return CanonicalKey{std::move(code[r])};
}

inline CanonicalKey canonical_key(const BlowupState& state) { return canonical_key(state.forest(), state.root()); }

// ---------------------------------------------------------------------------
// Label filters

enum class LabelKind { weight, kbar, det, mult, level };
enum class Comparator { lt, le, eq, ne, ge, gt };
enum class Quantifier { some, all };

struct LabelConstraint {
  Quantifier quantifier = Quantifier::some;
  LabelKind label = LabelKind::det;
  Comparator comparator = Comparator::eq;
  Integer value;
};

inline bool compare(const Integer& lhs, Comparator c, const Integer& rhs) {
  switch (c) {
    case Comparator::lt: return lhs < rhs;
    case Comparator::le: return lhs <= rhs;
    case Comparator::eq: return lhs == rhs;
    case Comparator::ne: return lhs != rhs;
    case Comparator::ge: return lhs >= rhs;
    case Comparator::gt: return lhs > rhs;
  }
  return false;
}

/// Conjunction of label constraints. Text form, atoms joined by '&':
///   some dP==-1 & some b==0 & all u<=3
/// Labels: w, b, dP, u, l. Comparators: < <= == != >= >. Quantifiers: some, all.
struct FilterSpec {
  std::vector<LabelConstraint> constraints;

  bool empty() const { return constraints.empty(); }

  bool matches(const BlowupState& state) const {
    if (constraints.empty()) return true;
    for (const auto& c : constraints) {
      bool any = false, all = true;
      for (const auto& [id, rec] : state.vertices()) {
        Integer value;
        switch (c.label) {
          case LabelKind::weight: value = state.forest().weight(id); break;
          case LabelKind::kbar: value = rec.kbar; break;
          case LabelKind::det: value = rec.det; break;
          case LabelKind::mult: value = rec.mult; break;
          case LabelKind::level:
            value = 2 * rec.det + det_without_root(state.forest(), state.root(), id);
            break;
        }
        const bool ok = compare(value, c.comparator, c.value);
        any |= ok;
        all &= ok;
      }
      if (c.quantifier == Quantifier::some ? !any : !all) return false;
    }
    return true;
  }

  static FilterSpec parse(std::string_view text) {
    FilterSpec spec;
    std::string s(text);
    std::size_t start = 0;
    while (start <= s.size()) {
      const std::size_t amp = s.find('&', start);
      const std::string atom = s.substr(start, amp == std::string::npos ? std::string::npos : amp - start);
      start = amp == std::string::npos ? s.size() + 1 : amp + 1;
      if (atom.find_first_not_of(" \t") == std::string::npos) {
        if (amp == std::string::npos && spec.constraints.empty()) break;
        throw Error("empty filter atom in '" + s + "'");
      }
      spec.constraints.push_back(parse_atom(atom));
    }
    return spec;
  }

 private:
  static LabelConstraint parse_atom(const std::string& atom) {
    std::istringstream in(atom);
    std::string quant, rest, piece;
    in >> quant;
    while (in >> piece) rest += piece;
    if (rest.empty()) throw Error("filter atom '" + atom + "' must read '<some|all> <label><cmp><int>'");
    LabelConstraint c;
    if (quant == "some" || quant == "exists")
      c.quantifier = Quantifier::some;
    else if (quant == "all" || quant == "forall")
      c.quantifier = Quantifier::all;
    else
      throw Error("unknown quantifier '" + quant + "'");

    const std::size_t op_pos = rest.find_first_of("<>=!");
    if (op_pos == std::string::npos) throw Error("missing comparator in '" + rest + "'");
    const std::string label = rest.substr(0, op_pos);
    std::size_t op_len = (op_pos + 1 < rest.size() && rest[op_pos + 1] == '=') ? 2 : 1;
    const std::string op = rest.substr(op_pos, op_len);
    const std::string value = rest.substr(op_pos + op_len);

    if (label == "w") c.label = LabelKind::weight;
    else if (label == "b") c.label = LabelKind::kbar;
    else if (label == "dP" || label == "d") c.label = LabelKind::det;
    else if (label == "u") c.label = LabelKind::mult;
    else if (label == "l") c.label = LabelKind::level;
    else throw Error("unknown label '" + label + "' (expected w, b, dP, u or l)");

    if (op == "<") c.comparator = Comparator::lt;
    else if (op == "<=") c.comparator = Comparator::le;
    else if (op == "==") c.comparator = Comparator::eq;
    else if (op == "!=") c.comparator = Comparator::ne;
    else if (op == ">=") c.comparator = Comparator::ge;
    else if (op == ">") c.comparator = Comparator::gt;
    else throw Error("unknown comparator '" + op + "'");

    auto v = parse_integer(value);
    if (!v) throw Error("bad integer '" + value + "' in filter");
    c.value = *v;
    return c;
  }
};

// ---------------------------------------------------------------------------
// Enumeration

struct EnumeratedClass {
  CanonicalKey key;
  BlowupState witness;  // reached by a minimal-length history
  std::size_t depth = 0;
};

struct EnumerationOptions {
  std::size_t max_depth = 0;
  FilterSpec filter;
  std::size_t threads = 1;
  std::optional<std::size_t> max_frontier;  // abort when a level exceeds this many classes
};

struct EnumerationSummary {
  std::vector<std::size_t> classes_per_depth;  // before filtering
  std::size_t emitted = 0;                     // after filtering
};

/// Raised when a level outgrows EnumerationOptions::max_frontier.
class FrontierLimitError : public Error {
 public:
  using Error::Error;
};

/// Breadth-first enumeration from the seed. Every op adds one vertex, so a
/// class first appears at depth = vertex count - 1 and deduplication is per
/// level. Each level is expanded in parallel blocks and merged in
/// (frontier index, op index) order, so the emitted sequence does not depend
/// on the thread count.
inline EnumerationSummary enumerate_states(const EnumerationOptions& options,
                                           const std::function<void(const EnumeratedClass&)>& sink) {
  EnumerationSummary summary;
  std::vector<EnumeratedClass> level{EnumeratedClass{canonical_key(seed_p2()), seed_p2(), 0}};

  for (std::size_t depth = 0;; ++depth) {
    summary.classes_per_depth.push_back(level.size());
    for (const auto& c : level) {
      if (options.filter.matches(c.witness)) {
        ++summary.emitted;
        sink(c);
      }
    }
    if (depth == options.max_depth) break;

    const std::size_t threads = std::max<std::size_t>(1, options.threads);
    const std::size_t blocks = std::min(level.size(), threads * 4);
    std::vector<std::vector<EnumeratedClass>> produced(blocks);
    const std::size_t per_block = (level.size() + blocks - 1) / blocks;
    parallel_for(blocks, threads, [&](std::size_t b) {
      std::unordered_set<std::string> local;
      for (std::size_t i = b * per_block; i < std::min(level.size(), (b + 1) * per_block); ++i) {
        for (const auto& op : available_ops(level[i].witness)) {
          BlowupState child = blowup::apply(level[i].witness, op);
          CanonicalKey key = canonical_key(child);
          if (!local.insert(key.bytes).second) continue;
          produced[b].push_back(EnumeratedClass{std::move(key), std::move(child), depth + 1});
        }
      }
    });

    std::vector<EnumeratedClass> next;
    std::unordered_set<std::string> seen;
    for (auto& block : produced) {
      for (auto& c : block) {
        if (!seen.insert(c.key.bytes).second) continue;
        next.push_back(std::move(c));
        if (options.max_frontier && next.size() > *options.max_frontier)
          throw FrontierLimitError("frontier at depth " + std::to_string(depth + 1) + " exceeds " +
                                   std::to_string(*options.max_frontier) + " classes");
      }
    }
    level = std::move(next);
  }
  return summary;
}

inline std::vector<EnumeratedClass> enumerate_all(const EnumerationOptions& options) {
  std::vector<EnumeratedClass> out;
  enumerate_states(options, [&](const EnumeratedClass& c) { out.push_back(c); });
  return out;
}

// ---------------------------------------------------------------------------
// Census of (determinant label, K-bar label) pairs

struct CensusReport {
  Integer det_label;
  Integer kbar_label;
  std::size_t max_depth = 0;
  std::size_t count = 0;
  std::optional<std::size_t> min_depth;
  std::vector<std::size_t> count_by_depth;
  std::vector<EnumeratedClass> witnesses;  // first `witness_limit` classes
  std::vector<VertexId> witness_vertices;  // the matching vertex of each witness
};

/// Vertex of `state` carrying both labels, if any.
inline std::optional<VertexId> find_labelled_vertex(const BlowupState& state, const Integer& det_label,
                                                    const Integer& kbar_label) {
  for (const auto& [id, rec] : state.vertices())
    if (rec.det == det_label && rec.kbar == kbar_label) return id;
  return std::nullopt;
}

/// Canonical classes up to max_depth containing a vertex with determinant
/// label `det_label` and K-bar label `kbar_label`. Classes are rooted
/// weighted trees; no further geometric equivalence is quotiented.
inline CensusReport census(const Integer& det_label, const Integer& kbar_label, std::size_t max_depth,
                           std::size_t threads = 1, std::size_t witness_limit = 5) {
  CensusReport report{det_label, kbar_label, max_depth, 0, std::nullopt, std::vector<std::size_t>(max_depth + 1, 0), {}, {}};
  EnumerationOptions options;
  options.max_depth = max_depth;
  options.threads = threads;
  enumerate_states(options, [&](const EnumeratedClass& c) {
    const auto v = find_labelled_vertex(c.witness, det_label, kbar_label);
    if (!v) return;
    ++report.count;
    ++report.count_by_depth[c.depth];
    if (!report.min_depth) report.min_depth = c.depth;
    if (report.witnesses.size() < witness_limit) {
      report.witnesses.push_back(c);
      report.witness_vertices.push_back(*v);
    }
  });
  return report;
}

}  // namespace blowup
