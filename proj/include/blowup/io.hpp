#pragma once

#include "blowup/checks.hpp"
#include "blowup/enumerate.hpp"
#include "blowup/error.hpp"
#include "blowup/history.hpp"
#include "blowup/labels.hpp"
#include "blowup/state.hpp"

#include <json.hpp>

#include <algorithm>
#include <istream>
#include <map>
#include <set>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace blowup {

// ---------------------------------------------------------------------------
// State files
//
//   blowup-state 1
//   root 0
//   total-det -1
//   vertex <id> w=<int> b=<int> dP=<int> u=<int> created=<n> parents=<id>[,<id>]|-
//   ...                                   (ascending id)
//   edge <p> <q> dPQ=<int>                (ascending (p, q), p < q)
//   ...
//   op vertex <id> | op edge <p> <q>      (history order)
//   end
//
// Integers are decimal text of any length. Files written by
// write_state_file re-save byte-identically after read_state_file.

inline constexpr int kStateFileVersion = 1;

/// Raised by read_state_file. `malformed` covers syntax and structure
/// problems; `verification` means the file parsed but its labels or history
/// are inconsistent.
class LoadError : public Error {
 public:
  enum class Kind { malformed, verification };

  LoadError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline void write_state_file(std::ostream& os, const BlowupState& state) {
  os << "blowup-state " << kStateFileVersion << '\n';
  os << "root " << state.root() << '\n';
  os << "total-det " << state.total_det() << '\n';
  for (const auto& [id, rec] : state.vertices()) {
    os << "vertex " << id << " w=" << state.forest().weight(id) << " b=" << rec.kbar << " dP=" << rec.det
       << " u=" << rec.mult << " created=" << rec.creation_index << " parents=";
    if (rec.parents.empty()) os << '-';
    for (std::size_t i = 0; i < rec.parents.size(); ++i) os << (i ? "," : "") << rec.parents[i];
    os << '\n';
  }
  for (const auto& [edge, det] : state.edge_dets()) os << "edge " << edge.lo << ' ' << edge.hi << " dPQ=" << det << '\n';
  for (const auto& h : state.history()) {
    if (const auto* v = std::get_if<VertexBlowup>(&h.op))
      os << "op vertex " << v->target << '\n';
    else {
      const auto& e = std::get<EdgeBlowup>(h.op);
      os << "op edge " << e.p << ' ' << e.q << '\n';
    }
  }
  os << "end\n";
}

inline std::string state_file_text(const BlowupState& state) {
  std::ostringstream os;
  write_state_file(os, state);
  return os.str();
}

namespace detail {

class LineParser {
 public:
  LineParser(std::size_t line, std::string text) : line_(line) {
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) tokens_.push_back(tok);
  }

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }

  [[noreturn]] void fail(const std::string& field, const std::string& message) const {
    throw LoadError(LoadError::Kind::malformed,
                    "line " + std::to_string(line_) + ", field '" + field + "': " + message);
  }

  void expect_count(std::size_t n, const std::string& what) const {
    if (tokens_.size() != n)
      fail(what, "expected " + std::to_string(n) + " tokens, found " + std::to_string(tokens_.size()));
  }

  Integer integer(std::size_t i, const std::string& field) const {
    auto v = parse_integer(tokens_.at(i));
    if (!v) fail(field, "bad integer '" + tokens_.at(i) + "'");
    return *v;
  }

  VertexId vertex_id(std::size_t i, const std::string& field) const { return id_text(tokens_.at(i), field); }

  VertexId id_text(const std::string& text, const std::string& field) const {
    auto v = parse_integer(text);
    if (!v || *v < 0 || *v > Integer(0xFFFFFFFFu)) fail(field, "bad vertex id '" + text + "'");
    return VertexId{static_cast<std::uint32_t>(*v)};
  }

  /// Value of a `key=value` token.
  std::string keyed(std::size_t i, const std::string& key) const {
    const std::string& tok = tokens_.at(i);
    if (tok.rfind(key + "=", 0) != 0) fail(key, "expected '" + key + "=...', found '" + tok + "'");
    return tok.substr(key.size() + 1);
  }

  Integer keyed_integer(std::size_t i, const std::string& key) const {
    const std::string text = keyed(i, key);
    auto v = parse_integer(text);
    if (!v) fail(key, "bad integer '" + text + "'");
    return *v;
  }

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
  std::vector<std::string> tokens_;
};

}  // namespace detail

/// Parses a state file, rebuilds it by replaying its history from the seed
/// and verifies every stored label against recompute_from_scratch.
inline BlowupState read_state_file(std::istream& is) {
  using detail::LineParser;
  std::vector<LineParser> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(is, text)) {
    ++number;
    LineParser p(number, text);
    if (p.size() == 0) continue;
    lines.push_back(std::move(p));
  }
  std::size_t at = 0;
  auto next = [&](const char* what) -> const LineParser& {
    if (at >= lines.size())
      throw LoadError(LoadError::Kind::malformed, std::string("unexpected end of file, expected '") + what + "'");
    return lines[at++];
  };

  {
    const auto& p = next("blowup-state");
    if (p.token(0) != "blowup-state") p.fail("header", "expected 'blowup-state', found '" + p.token(0) + "'");
    p.expect_count(2, "header");
    if (p.integer(1, "version") != kStateFileVersion) p.fail("version", "unsupported version " + p.token(1));
  }
  StateData data;
  {
    const auto& p = next("root");
    if (p.token(0) != "root") p.fail("root", "expected 'root', found '" + p.token(0) + "'");
    p.expect_count(2, "root");
    data.root = p.vertex_id(1, "root");
  }
  {
    const auto& p = next("total-det");
    if (p.token(0) != "total-det") p.fail("total-det", "expected 'total-det', found '" + p.token(0) + "'");
    p.expect_count(2, "total-det");
    data.total_det = p.integer(1, "total-det");
  }

  std::vector<BlowupOp> ops;
  bool ended = false;
  std::vector<std::pair<std::size_t, Edge>> edge_lines;
  while (at < lines.size()) {
    const auto& p = lines[at++];
    const std::string& kind = p.token(0);
    if (kind == "vertex") {
      if (!edge_lines.empty() || !ops.empty()) p.fail("vertex", "vertex lines must precede edges and ops");
      p.expect_count(8, "vertex");
      const VertexId id = p.vertex_id(1, "id");
      VertexRecord rec;
      const Integer w = p.keyed_integer(2, "w");
      rec.kbar = p.keyed_integer(3, "b");
      rec.det = p.keyed_integer(4, "dP");
      rec.mult = p.keyed_integer(5, "u");
      const Integer created = p.keyed_integer(6, "created");
      if (created < 0) p.fail("created", "negative creation index");
      rec.creation_index = static_cast<std::size_t>(created);
      const std::string parents = p.keyed(7, "parents");
      if (parents != "-") {
        std::istringstream in(parents);
        std::string part;
        while (std::getline(in, part, ',')) rec.parents.push_back(p.id_text(part, "parents"));
      }
      try {
        data.forest.add_vertex(id, w);
      } catch (const Error& e) {
        p.fail("id", e.what());
      }
      data.vertices.emplace(id, std::move(rec));
    } else if (kind == "edge") {
      if (!ops.empty()) p.fail("edge", "edge lines must precede ops");
      p.expect_count(4, "edge");
      const VertexId a = p.vertex_id(1, "p");
      const VertexId b = p.vertex_id(2, "q");
      const Integer det = p.keyed_integer(3, "dPQ");
      try {
        data.forest.add_edge(a, b);
      } catch (const Error& e) {
        p.fail("edge", e.what());
      }
      data.edge_dets.emplace(Edge::between(a, b), det);
      edge_lines.emplace_back(p.line(), Edge::between(a, b));
    } else if (kind == "op") {
      if (p.size() < 2) p.fail("op", "missing op kind");
      if (p.token(1) == "vertex") {
        p.expect_count(3, "op");
        ops.emplace_back(VertexBlowup{p.vertex_id(2, "target")});
      } else if (p.token(1) == "edge") {
        p.expect_count(4, "op");
        ops.emplace_back(EdgeBlowup{p.vertex_id(2, "p"), p.vertex_id(3, "q")});
      } else {
        p.fail("op", "unknown op kind '" + p.token(1) + "'");
      }
    } else if (kind == "end") {
      p.expect_count(1, "end");
      ended = true;
      if (at != lines.size()) lines[at].fail("end", "content after 'end'");
      break;
    } else {
      p.fail("record", "unknown record '" + kind + "'");
    }
  }
  if (!ended) throw LoadError(LoadError::Kind::malformed, "missing 'end' line");
  if (!data.forest.contains(data.root)) throw LoadError(LoadError::Kind::malformed, "root vertex is not listed");
  if (components(data.forest).size() != 1) throw LoadError(LoadError::Kind::malformed, "graph is not connected");

  // Stored labels against labels recomputed from the stored tree.
  const BlowupState stored(data);
  LabelReport from_scratch;
  try {
    from_scratch = recompute_from_scratch(stored);
  } catch (const Error& e) {
    throw LoadError(LoadError::Kind::verification, std::string("label verification: ") + e.what());
  }
  if (auto m = first_mismatch(from_scratch, label_report(stored)))
    throw LoadError(LoadError::Kind::verification, "label verification: " + *m);

  // History must rebuild exactly this tree.
  BlowupState replayed = seed_p2();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    try {
      replayed = blowup::apply(replayed, ops[i]);
    } catch (const Error& e) {
      throw LoadError(LoadError::Kind::verification,
                      "history op " + std::to_string(i + 1) + " (" + to_string(ops[i]) + "): " + e.what());
    }
  }
  const StateData& r = replayed.data();
  if (r.root != data.root) throw LoadError(LoadError::Kind::verification, "history: root differs");
  if (!(r.forest == data.forest)) throw LoadError(LoadError::Kind::verification, "history: replay yields a different tree");
  for (const auto& [id, rec] : r.vertices) {
    const auto& stored_rec = data.vertices.at(id);
    if (stored_rec.creation_index != rec.creation_index)
      throw LoadError(LoadError::Kind::verification, "history: vertex " + to_string(id) + " created differs");
    if (stored_rec.parents != rec.parents)
      throw LoadError(LoadError::Kind::verification, "history: vertex " + to_string(id) + " parents differ");
  }
  if (r.vertices != data.vertices || r.edge_dets != data.edge_dets || r.total_det != data.total_det) {
    if (auto m = first_mismatch(label_report(replayed), label_report(stored)))
      throw LoadError(LoadError::Kind::verification, "history: " + *m);
    throw LoadError(LoadError::Kind::verification, "history: replay differs from stored state");
  }
  return replayed;
}

inline BlowupState read_state_text(const std::string& text) {
  std::istringstream is(text);
  return read_state_file(is);
}

// ---------------------------------------------------------------------------
// Label table
//
// Columns follow a depth-first walk from the root (children by id). Rows:
// vertex ids; determinant labels with the label of the edge joining two
// consecutive columns, in parentheses, between them; K-bar labels;
// self-intersections. Every cell is right-aligned to a common width of
// max(longest cell, 4) + 2. Trailing lines list all edges and the total
// determinant.

inline std::vector<VertexId> display_order(const BlowupState& state) {
  std::vector<VertexId> order;
  std::vector<VertexId> stack{state.root()};
  std::set<VertexId> seen{state.root()};
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    order.push_back(v);
    const auto nbrs = state.forest().neighbors(v);
    for (auto it = nbrs.rbegin(); it != nbrs.rend(); ++it)
      if (seen.insert(*it).second) stack.push_back(*it);
  }
  return order;
}

inline std::string format_label_table(const BlowupState& state) {
  const auto order = display_order(state);
  const std::size_t n = order.size();
  std::vector<std::vector<std::string>> rows(4);
  for (std::size_t i = 0; i < n; ++i) {
    const VertexId v = order[i];
    rows[0].push_back(to_string(v));
    rows[1].push_back(to_string(state.det(v)));
    rows[2].push_back(to_string(state.kbar(v)));
    rows[3].push_back(to_string(state.weight(v)));
    if (i + 1 < n) {
      const bool adjacent = state.forest().has_edge(v, order[i + 1]);
      rows[0].push_back("");
      rows[1].push_back(adjacent ? "(" + to_string(state.edge_det(v, order[i + 1])) + ")" : "");
      rows[2].push_back("");
      rows[3].push_back("");
    }
  }
  std::size_t width = 4;
  for (const auto& row : rows)
    for (const auto& cell : row) width = std::max(width, cell.size());
  width += 2;

  static const char* names[] = {"vertex", "det", "kbar", "weight"};
  std::ostringstream os;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line = names[r];
    line.resize(8, ' ');
    for (const auto& cell : rows[r]) line += std::string(width - cell.size(), ' ') + cell;
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << '\n';
  }
  os << "edges:";
  for (const auto& [edge, det] : state.edge_dets()) os << ' ' << to_string(edge) << ':' << det;
  os << '\n' << "d: " << state.total_det() << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Exports

/// Graphviz DOT: one node per vertex annotated with its labels, one edge per
/// live edge annotated with its determinant label.
inline std::string export_graph(const BlowupState& state) {
  std::ostringstream os;
  os << "graph blowup {\n";
  for (const auto& [id, rec] : state.vertices()) {
    os << "  v" << id << " [label=\"" << id << ": w=" << state.weight(id) << ", b=" << rec.kbar << ", d=" << rec.det
       << ", u=" << rec.mult << "\"";
    if (id == state.root()) os << ", shape=doublecircle";
    os << "];\n";
  }
  for (const auto& [edge, det] : state.edge_dets())
    os << "  v" << edge.lo << " -- v" << edge.hi << " [label=\"" << det << "\"];\n";
  os << "}\n";
  return os.str();
}

/// JSON document of the full label report. Integers are decimal strings.
inline nlohmann::ordered_json export_json(const BlowupState& state) {
  const LabelReport report = label_report(state);
  nlohmann::ordered_json j;
  j["schema"] = kStateFileVersion;
  j["root"] = state.root().value;
  j["total_det"] = to_string(state.total_det());
  j["vertices"] = nlohmann::ordered_json::array();
  for (const auto& v : report.vertices) {
    const auto& rec = state.vertex(v.id);
    nlohmann::ordered_json parents = nlohmann::ordered_json::array();
    for (VertexId p : rec.parents) parents.push_back(p.value);
    j["vertices"].push_back({{"id", v.id.value},
                             {"w", to_string(v.weight)},
                             {"b", to_string(v.kbar)},
                             {"dP", to_string(v.det)},
                             {"u", to_string(v.mult)},
                             {"d_prime", to_string(v.det_without_root)},
                             {"l", to_string(v.level)},
                             {"created", rec.creation_index},
                             {"parents", parents}});
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : report.edges)
    j["edges"].push_back({{"p", e.edge.lo.value}, {"q", e.edge.hi.value}, {"dPQ", to_string(e.det)}});
  j["history"] = nlohmann::ordered_json::array();
  for (const auto& op : state.ops()) j["history"].push_back(to_string(op));
  return j;
}

// ---------------------------------------------------------------------------
// Reports

/// One status line plus one indented line per recorded failure. The wall
/// time is the last field of the status line and can be left out to get a
/// byte-stable report.
inline std::string format_check_report(const CheckReport& r, bool with_time = true) {
  std::ostringstream os;
  os << "check " << r.name << ": " << (r.passed() ? "PASS" : "FAIL") << " trials=" << r.trials << " cases=" << r.cases
     << " failures=" << r.failure_count;
  if (with_time) os << " time=" << r.wall_time.count() << "ms";
  os << '\n';
  for (const auto& f : r.failures)
    os << "  failure trial=" << f.trial << " history=\"" << f.history << "\" detail=\"" << f.detail << "\"\n";
  for (const auto& n : r.notes) os << "  note " << n << '\n';
  return os.str();
}

inline std::string format_pair_case(const PairFormulaCase& c) {
  std::ostringstream os;
  os << "history=\"" << format_history(c.history) << "\" pair=(" << c.p << "," << c.q << ") u=(" << c.u_p << ","
     << c.u_q << ") d=(" << c.d_p << "," << c.d_q << ") observed=" << c.observed << " squared=" << c.squared
     << " literal=" << c.literal;
  return os.str();
}

inline std::string format_pair_report(const PairFormulaReport& r) {
  std::ostringstream os;
  os << "pair determinant discrimination: depth<=" << r.max_depth << " seed=" << r.seed << '\n';
  os << "  histories=" << r.histories << " root-separated pairs=" << r.pairs
     << " separating pairs=" << r.separating_pairs << '\n';
  os << "  squared form mismatches=" << r.squared_mismatches << '\n';
  os << "  literal form mismatches=" << r.literal_mismatches << '\n';
  if (r.smallest_separating) os << "  smallest separating instance: " << format_pair_case(*r.smallest_separating) << '\n';
  if (r.first_squared_mismatch)
    os << "  first squared-form mismatch: " << format_pair_case(*r.first_squared_mismatch) << '\n';
  os << "  verdict: " << to_string(r.verdict) << '\n';
  return os.str();
}

inline std::string format_class_line(const EnumeratedClass& c) {
  auto ops = c.witness.ops();
  return "depth=" + std::to_string(c.depth) + " key=" + c.key.bytes + " history=\"" + format_history(ops) + "\"";
}

inline std::string format_census_report(const CensusReport& r) {
  std::ostringstream os;
  os << "census dP=" << r.det_label << " b=" << r.kbar_label << " depth<=" << r.max_depth << ": count=" << r.count;
  if (r.min_depth) os << " min_depth=" << *r.min_depth;
  os << '\n' << "  by depth:";
  for (std::size_t d = 0; d < r.count_by_depth.size(); ++d) os << ' ' << d << ':' << r.count_by_depth[d];
  os << '\n';
  for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
    auto ops = r.witnesses[i].witness.ops();
    os << "  witness vertex=" << r.witness_vertices[i] << " depth=" << r.witnesses[i].depth << " history=\""
       << format_history(ops) << "\"\n";
  }
  os << "  caveat: classes are rooted weighted trees up to isomorphism; plane automorphisms are not quotiented\n";
  return os.str();
}

}  // namespace blowup
