#pragma once

#include "blowup/error.hpp"
#include "blowup/state.hpp"

#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace blowup {

// Compact op-list text: space separated tokens, "v<id>" for a vertex
// blow-up and "e<p>-<q>" for an edge blow-up. The empty history is "-".

inline std::string format_history(std::span<const BlowupOp> ops) {
  if (ops.empty()) return "-";
  std::string out;
  for (const auto& op : ops) {
    if (!out.empty()) out += ' ';
    out += to_string(op);
  }
  return out;
}

namespace detail {

inline VertexId parse_vertex_id(std::string_view text, std::string_view context) {
  if (text.empty() || text.size() > 9) throw Error("bad vertex id '" + std::string(text) + "' in " + std::string(context));
  std::uint32_t v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw Error("bad vertex id '" + std::string(text) + "' in " + std::string(context));
    v = v * 10 + static_cast<std::uint32_t>(c - '0');
  }
  return VertexId{v};
}

}  // namespace detail

inline BlowupOp parse_op_token(std::string_view token) {
  if (token.size() >= 2 && token[0] == 'v') return VertexBlowup{detail::parse_vertex_id(token.substr(1), token)};
  if (token.size() >= 4 && token[0] == 'e') {
    const auto dash = token.find('-');
    if (dash != std::string_view::npos)
      return EdgeBlowup{detail::parse_vertex_id(token.substr(1, dash - 1), token),
                        detail::parse_vertex_id(token.substr(dash + 1), token)};
  }
  throw Error("bad op token '" + std::string(token) + "'");
}

inline std::vector<BlowupOp> parse_history(std::string_view text) {
  std::vector<BlowupOp> ops;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    if (token == "-") continue;
    ops.push_back(parse_op_token(token));
  }
  return ops;
}

}  // namespace blowup
