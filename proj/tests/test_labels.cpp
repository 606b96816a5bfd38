#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace blowup;

TEST(Labels, MaintainedLabelsMatchCofactorOracle) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 200; ++t) {
    const auto s = replay(oracle::random_history(rng, 1 + t % 11));
    const auto& f = s.forest();
    for (const auto& [v, rec] : s.vertices()) {
      ASSERT_EQ(rec.det, oracle::cofactor_det(remove_vertices(f, {v}))) << format_history(s.ops()) << " vertex " << v;
    }
    for (const auto& [e, det] : s.edge_dets())
      ASSERT_EQ(det, oracle::cofactor_det(remove_edge(f, e.lo, e.hi))) << format_history(s.ops()) << " edge " << to_string(e);
    ASSERT_EQ(oracle::cofactor_det(f), -1);
  }
}

TEST(Labels, KbarAndMultiplicityMatchRationalSolve) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 200; ++t) {
    const auto s = replay(oracle::random_history(rng, 1 + t % 11));
    const auto m = oracle::intersection(s.forest());
    const auto ids = s.forest().vertex_ids();
    std::vector<Integer> adj_rhs, pull_rhs;
    for (VertexId v : ids) {
      adj_rhs.push_back(Integer(s.forest().degree(v)) - 2);
      pull_rhs.push_back(v == s.root() ? 1 : 0);
    }
    const auto kbar = oracle::rational_solve(m, adj_rhs);
    const auto mult = oracle::rational_solve(m, pull_rhs);
    ASSERT_EQ(kbar.size(), ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      ASSERT_EQ(kbar[i], Rational(s.kbar(ids[i]))) << format_history(s.ops());
      ASSERT_EQ(mult[i], Rational(s.mult(ids[i]))) << format_history(s.ops());
    }
  }
}

TEST(Labels, RecomputeFromScratchAgrees) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 200; ++t) {
    const auto s = replay(oracle::random_history(rng, t % 13));
    const auto diff = first_mismatch(recompute_from_scratch(s), label_report(s));
    ASSERT_FALSE(diff) << *diff;
  }
}

TEST(Labels, MultiplicitySquareIdentity) {
  std::mt19937_64 rng(34);
  for (int t = 0; t < 200; ++t) {
    const auto s = replay(oracle::random_history(rng, t % 13));
    for (const auto& v : label_report(s).vertices) {
      ASSERT_EQ(v.level, 2 * v.det + v.det_without_root);
      if (v.id == s.root()) continue;
      ASSERT_EQ(v.mult * v.mult, v.det + v.det_without_root) << format_history(s.ops()) << " vertex " << v.id;
    }
  }
}

TEST(Labels, RootPrimeLabelRemovesOnlyTheRoot) {
  const auto s = replay(examples::edge_chain());
  EXPECT_EQ(det_without_root(s.forest(), s.root(), s.root()), det_without(s.forest(), {s.root()}));
}

TEST(Labels, FirstMismatchNamesTheLabel) {
  const auto s = replay(examples::determinant_chain());
  auto good = label_report(s);
  EXPECT_FALSE(first_mismatch(good, good));
  auto bad = good;
  bad.vertices[2].kbar += 1;
  EXPECT_EQ(*first_mismatch(good, bad), "vertex 2 b: expected 0, found 1");
  bad = good;
  bad.edges[1].det = 7;
  EXPECT_EQ(*first_mismatch(good, bad), "edge 1-2 dPQ: expected -1, found 7");
}

TEST(Labels, SolveKbarOnTheSeed) {
  const auto kbar = solve_kbar(seed_p2().forest());
  ASSERT_EQ(kbar.size(), 1u);
  EXPECT_EQ(kbar[0], -2);
}
