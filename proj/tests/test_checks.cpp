#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace blowup;

namespace {

HistorySampler sampler(std::uint64_t seed = 7, std::size_t depth = 10) {
  HistorySampler s;
  s.seed = seed;
  s.max_depth = depth;
  return s;
}

// Test doubles, each with one wrong update rule.
struct WrongEdgeKbar : StandardLabelRules {
  static Integer edge_blowup_kbar(const Integer& a, const Integer& b) { return a + b + 1; }
};
struct WrongEdgeDet : StandardLabelRules {
  static Integer edge_blowup_det(const Integer& pq, const Integer& p, const Integer& q, const Integer& d) {
    return 2 * pq + p + q + d;
  }
};
struct WrongVertexDet : StandardLabelRules {
  static Integer vertex_blowup_det(const Integer& p, const Integer&) { return p; }
};
struct WrongMult : StandardLabelRules {
  static Integer edge_blowup_mult(const Integer& a, const Integer& b) { return a > b ? a : b; }
};

std::string without_time(const CheckReport& r) { return format_check_report(r, false); }

}  // namespace

class RegistryCheck : public ::testing::TestWithParam<std::string> {};

TEST_P(RegistryCheck, PassesOnTheStandardEngine) {
  const auto report = run_check(GetParam(), sampler(), 300);
  EXPECT_TRUE(report.passed()) << format_check_report(report);
  EXPECT_EQ(report.trials, 300u);
}

INSTANTIATE_TEST_SUITE_P(All, RegistryCheck, ::testing::ValuesIn([] {
                           std::vector<std::string> names;
                           for (const auto& def : check_registry()) names.emplace_back(def.name);
                           return names;
                         }()),
                         [](const ::testing::TestParamInfo<std::string>& info) { return info.param; });

TEST(Checks, UnknownNameListsTheRegistry) {
  try {
    run_check("lemma_9_9", sampler(), 1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("lemma_5_6"), std::string::npos);
  }
}

TEST(Checks, ReportsAreDeterministicAcrossThreadCounts) {
  for (const char* name : {"lemma_5_7", "lemma_5_8", "label_freeze"}) {
    const auto serial = run_check(name, sampler(3), 200, 1);
    const auto parallel = run_check(name, sampler(3), 200, 4);
    EXPECT_EQ(without_time(serial), without_time(parallel)) << name;
    EXPECT_GT(serial.cases, 0u) << name;
  }
}

TEST(Checks, SeedChangesTheSample) {
  const auto a = sample_trajectory(sampler(1), 0);
  const auto b = sample_trajectory(sampler(2), 0);
  EXPECT_NE(format_history(a.back().ops()), format_history(b.back().ops()));
  EXPECT_EQ(format_history(a.back().ops()), format_history(sample_trajectory(sampler(1), 0).back().ops()));
}

TEST(Checks, NeverZeroSamplerAvoidsZeroLabels) {
  HistorySampler s = sampler(5, 12);
  s.constraint = KbarConstraint::never_zero;
  for (std::size_t t = 0; t < 200; ++t) {
    const auto trajectory = sample_trajectory(s, t);
    for (const auto& [v, rec] : trajectory.back().vertices()) ASSERT_NE(rec.kbar, 0);
  }
}

TEST(ChecksMutation, WrongEdgeKbarIsCaught) {
  for (const char* name : {"adjunction", "incremental"})
    EXPECT_FALSE(run_check<WrongEdgeKbar>(name, sampler(), 200).passed()) << name;
}

TEST(ChecksMutation, WrongEdgeDeterminantIsCaught) {
  for (const char* name : {"lemma_5_7", "incremental"})
    EXPECT_FALSE(run_check<WrongEdgeDet>(name, sampler(), 200).passed()) << name;
}

TEST(ChecksMutation, WrongVertexDeterminantIsCaught) {
  for (const char* name : {"lemma_5_7", "incremental"})
    EXPECT_FALSE(run_check<WrongVertexDet>(name, sampler(), 200).passed()) << name;
}

TEST(ChecksMutation, WrongMultiplicityIsCaught) {
  for (const char* name : {"lemma_5_8", "incremental"})
    EXPECT_FALSE(run_check<WrongMult>(name, sampler(), 200).passed()) << name;
}

TEST(ChecksMutation, FailuresCarryReplayableHistories) {
  const auto report = run_check<WrongEdgeKbar>("incremental", sampler(), 100);
  ASSERT_FALSE(report.failures.empty());
  const auto& f = report.failures.front();
  const auto replayed = replay<WrongEdgeKbar>(parse_history(f.history));
  EXPECT_TRUE(first_mismatch(recompute_from_scratch(replayed), label_report(replayed)).has_value());
  EXPECT_LE(report.failures.size(), CheckReport::kMaxRecordedFailures);
}

TEST(WorkedExamples, AllPass) {
  const auto report = verify_worked_examples();
  EXPECT_TRUE(report.passed()) << format_check_report(report);
  EXPECT_EQ(report.trials, 11u);
}

TEST(PairFormula, SeparatingInstanceValues) {
  const auto s = replay(examples::pair_formula_instance());
  const VertexId p{2}, q{3};
  const Integer observed = det_without(s.forest(), {p, q});
  const Integer up = s.mult(p), uq = s.mult(q), dp = s.det(p), dq = s.det(q);
  EXPECT_EQ(observed, oracle::cofactor_det(remove_vertices(s.forest(), {p, q})));
  EXPECT_EQ(observed, 4);
  EXPECT_EQ(up * up * uq * uq - dp * dq, 4);
  EXPECT_EQ(up * uq - dp * dq, 2);
}

TEST(PairFormula, DiscriminationFavoursTheSquaredForm) {
  const auto a = discriminate_pair_formula(4, 1);
  EXPECT_EQ(a.verdict, PairFormulaVerdict::squared_form);
  EXPECT_EQ(a.squared_mismatches, 0u);
  EXPECT_GT(a.literal_mismatches, 0u);
  ASSERT_TRUE(a.smallest_separating);
  const auto& c = *a.smallest_separating;
  EXPECT_EQ(replay(c.history).size(), 4u);
  EXPECT_EQ(c.observed, 4);
  EXPECT_EQ(c.squared, 4);
  EXPECT_EQ(c.literal, 2);
  EXPECT_EQ(format_pair_report(a), format_pair_report(discriminate_pair_formula(4, 1)));
}

TEST(PairFormula, ShallowDepthIsInconclusive) {
  EXPECT_EQ(discriminate_pair_formula(1, 1, 0).verdict, PairFormulaVerdict::inconclusive);
}
