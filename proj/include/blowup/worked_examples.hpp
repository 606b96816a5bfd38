#pragma once

#include "blowup/state.hpp"

#include <vector>

// Scripted blow-up histories for the standard worked examples. Vertex ids are
// creation indices: the seed is 0 and the k-th blow-up creates vertex k.
namespace blowup::examples {

/// Two vertex blow-ups on the line at infinity, one on the second new curve,
/// two edge blow-ups next to it, one more vertex blow-up on the first new
/// curve, then two free points on each of the two K-bar-0 ends.
inline std::vector<BlowupOp> kbar_walkthrough() {
  return {VertexBlowup{VertexId{0}}, VertexBlowup{VertexId{0}}, VertexBlowup{VertexId{2}},
          EdgeBlowup{VertexId{2}, VertexId{3}}, EdgeBlowup{VertexId{2}, VertexId{4}}, VertexBlowup{VertexId{1}},
          VertexBlowup{VertexId{6}}, VertexBlowup{VertexId{6}}, VertexBlowup{VertexId{3}},
          VertexBlowup{VertexId{3}}};
}

/// Spine of the walkthrough's final tree, left to right.
inline std::vector<VertexId> kbar_walkthrough_spine() {
  return {VertexId{6}, VertexId{1}, VertexId{0}, VertexId{2}, VertexId{5}, VertexId{4}, VertexId{3}};
}

/// Blow up the root, then the new curve: chain 0-1-2.
inline std::vector<BlowupOp> determinant_chain() {
  return {VertexBlowup{VertexId{0}}, VertexBlowup{VertexId{1}}};
}

/// Blow up the root, then the edge it forms: chain 0-2-1.
inline std::vector<BlowupOp> edge_chain() {
  return {VertexBlowup{VertexId{0}}, EdgeBlowup{VertexId{0}, VertexId{1}}};
}

/// edge_chain followed by k blow-ups of the edge next to vertex 1. The chain
/// reads 0, 2, 3, ..., k+2, 1.
inline std::vector<BlowupOp> edge_chain_extended(unsigned k) {
  auto ops = edge_chain();
  for (unsigned j = 0; j < k; ++j) ops.push_back(EdgeBlowup{VertexId{2 + j}, VertexId{1}});
  return ops;
}

inline std::vector<VertexId> edge_chain_extended_order(unsigned k) {
  std::vector<VertexId> order{VertexId{0}};
  for (unsigned j = 0; j <= k; ++j) order.push_back(VertexId{2 + j});
  order.push_back(VertexId{1});
  return order;
}

/// Smallest tree on which the two candidate closed forms for the
/// determinant with two root-separated vertices removed disagree.
inline std::vector<BlowupOp> pair_formula_instance() {
  return {VertexBlowup{VertexId{0}}, EdgeBlowup{VertexId{0}, VertexId{1}}, VertexBlowup{VertexId{0}}};
}

}  // namespace blowup::examples
