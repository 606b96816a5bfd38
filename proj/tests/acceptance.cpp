// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "oracles.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace blowup;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    if (ok) detail = what;
    ok = false;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<Integer> ints(std::initializer_list<int> xs) { return {xs.begin(), xs.end()}; }

template <typename F>
std::vector<Integer> row(const BlowupState& s, const std::vector<VertexId>& order, F f) {
  std::vector<Integer> out;
  for (VertexId v : order) out.push_back(f(v));
  return out;
}

std::vector<Integer> edge_row(const BlowupState& s, const std::vector<VertexId>& order) {
  std::vector<Integer> out;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) out.push_back(s.edge_det(order[i], order[i + 1]));
  return out;
}

Verdict chain_rows(const BlowupState& s, const std::vector<VertexId>& order, const std::vector<Integer>& det,
                   const std::vector<Integer>& edge, const std::vector<Integer>& kbar,
                   const std::vector<Integer>& weight, const std::string& name) {
  Verdict v;
  v.require(row(s, order, [&](VertexId x) { return s.det(x); }) == det, name + ": vertex determinant row");
  v.require(edge_row(s, order) == edge, name + ": edge determinant row");
  v.require(row(s, order, [&](VertexId x) { return s.kbar(x); }) == kbar, name + ": K-bar row");
  v.require(row(s, order, [&](VertexId x) { return s.weight(x); }) == weight, name + ": weight row");
  return v;
}

Verdict ac1() {
  Verdict v;
  const auto start = Clock::now();
  const auto s = replay(examples::kbar_walkthrough());
  const auto spine = examples::kbar_walkthrough_spine();
  v.require(s.history().size() == 10 && s.size() == 11, "expected 10 blow-ups and 11 curves");
  v.require(row(s, spine, [&](VertexId x) { return s.kbar(x); }) == ints({0, -1, -2, -1, -2, -1, 0}), "spine K-bar row");
  v.require(row(s, spine, [&](VertexId x) { return s.weight(x); }) == ints({-3, -2, -1, -4, -1, -2, -4}),
            "spine weight row");
  for (std::size_t i = 0; i + 1 < spine.size(); ++i)
    v.require(s.forest().has_edge(spine[i], spine[i + 1]), "spine is not a path");
  for (std::uint32_t tip = 7; tip <= 10; ++tip) {
    v.require(s.kbar(VertexId{tip}) == 1 && s.weight(VertexId{tip}) == -1, "tip labels");
    v.require(s.forest().degree(VertexId{tip}) == 1, "tips are leaves");
  }
  v.require(s.forest().has_edge(VertexId{6}, VertexId{7}) && s.forest().has_edge(VertexId{6}, VertexId{8}) &&
                s.forest().has_edge(VertexId{3}, VertexId{9}) && s.forest().has_edge(VertexId{3}, VertexId{10}),
            "tips hang off the two K-bar-0 ends");
  v.require(signature(s.forest()) == Signature{10, 0, 1}, "inertia (10,0,1)");
  const double t = seconds_since(start);
  v.require(t < 1.0, "slower than 1 s");
  if (v.ok) {
    std::ostringstream os;
    os << "10 blow-ups, 11 curves, spine and tips exact, " << t * 1000 << " ms";
    v.detail = os.str();
  }
  return v;
}

Verdict ac2() {
  const auto s = replay(examples::determinant_chain());
  auto v = chain_rows(s, {VertexId{0}, VertexId{1}, VertexId{2}}, ints({1, 0, -1}), ints({0, -1}), ints({-2, -1, 0}),
                      ints({0, -2, -1}), "determinant chain");
  if (v.ok) v.detail = "dets (1,0,-1), edges (0,-1), kbar (-2,-1,0), weights (0,-2,-1)";
  return v;
}

Verdict ac3() {
  const auto s = replay(examples::edge_chain());
  auto v = chain_rows(s, {VertexId{0}, VertexId{2}, VertexId{1}}, ints({1, 2, 0}), ints({1, 0}), ints({-2, -3, -1}),
                      ints({-1, -1, -2}), "edge chain");
  for (unsigned k = 1; k <= 8; ++k) {
    const auto sk = replay(examples::edge_chain_extended(k));
    std::vector<Integer> det, edge, kbar, weight{-1};
    for (unsigned i = 1; i <= k + 2; ++i) det.push_back(i);
    det.push_back(0);
    for (unsigned i = 1; i <= k + 1; ++i) edge.push_back(i);
    edge.push_back(0);
    for (unsigned i = 2; i <= k + 3; ++i) kbar.push_back(-Integer(i));
    kbar.push_back(-1);
    for (unsigned i = 0; i < k; ++i) weight.push_back(-2);
    weight.push_back(-1);
    weight.push_back(-Integer(k + 2));
    const auto vk = chain_rows(sk, examples::edge_chain_extended_order(k), det, edge, kbar, weight,
                               "chain k=" + std::to_string(k));
    v.require(vk.ok, vk.detail);
  }
  if (v.ok) v.detail = "chain rows exact; k-chains for k = 1..8 exact";
  return v;
}

Verdict ac4() {
  Verdict v;
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(0, 10);
  std::uniform_real_distribution<double> keep(0.5, 1.0);
  std::size_t mismatches = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto f = oracle::random_forest(rng, size(rng), -6, 6, keep(rng));
    const Integer oracle_det = oracle::cofactor_det(f);
    if (det_fast(f) != oracle_det || det_matchings(f) != oracle_det) ++mismatches;
  }
  const double t = seconds_since(start);
  v.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  v.require(t < 60.0, "slower than 60 s");
  if (v.ok) v.detail = "10000 random forests, 0 mismatches, " + std::to_string(t) + " s";
  return v;
}

Verdict ac5() {
  Verdict v;
  const auto start = Clock::now();
  const std::size_t threads = default_thread_count();
  HistorySampler sampler;
  sampler.seed = 1;
  sampler.max_depth = 12;
  std::size_t cases = 0;
  for (const char* name : {"lemma_5_2", "lemma_5_3", "lemma_5_4", "lemma_5_5", "lemma_5_6", "lemma_5_7", "lemma_5_8",
                           "lemma_5_10", "thm_5_2", "thm_5_3", "prop_2_3", "adjunction", "label_freeze",
                           "blowdown_roundtrip"}) {
    const auto r = run_check(name, sampler, 10000, threads);
    cases += r.cases;
    v.require(r.passed(), format_check_report(r));
    std::cerr << format_check_report(r);
  }
  HistorySampler no_zero = sampler;
  no_zero.constraint = KbarConstraint::never_zero;
  const auto r = run_check("thm_5_2", no_zero, 10000, threads);
  std::cerr << "(K-bar-0-free sampler) " << format_check_report(r);
  v.require(r.passed(), format_check_report(r));
  v.require(r.cases > 0, "K-bar-0-free sampler produced no cases");
  if (v.ok)
    v.detail = "14 checks x 10000 histories of depth 12 plus the K-bar-0-free run, 0 failures, " +
               std::to_string(cases) + " cases, " + std::to_string(seconds_since(start)) + " s";
  return v;
}

Verdict ac6() {
  Verdict v;
  const auto a = discriminate_pair_formula(4, 1);
  const auto b = discriminate_pair_formula(4, 1);
  v.require(format_pair_report(a) == format_pair_report(b), "not deterministic");
  v.require(a.verdict == PairFormulaVerdict::squared_form, std::string("verdict: ") + std::string(to_string(a.verdict)));
  v.require(a.squared_mismatches == 0, "squared form mismatches");
  v.require(a.smallest_separating.has_value(), "no separating instance");
  if (a.smallest_separating) {
    const auto& c = *a.smallest_separating;
    const auto s = replay(c.history);
    v.require(s.size() == 4, "separating instance has " + std::to_string(s.size()) + " curves");
    v.require(c.squared == 4 && c.literal == 2 && c.observed == 4, "separating values");
    v.require(oracle::cofactor_det(remove_vertices(s.forest(), {c.p, c.q})) == c.observed, "cofactor oracle");
    if (v.ok) v.detail = "squared form holds on all " + std::to_string(a.pairs) + " pairs; separating instance " +
                         format_pair_case(c);
  }
  return v;
}

Verdict ac7() {
  Verdict v;
  const auto start = Clock::now();
  EnumerationOptions o;
  o.max_depth = 8;
  o.threads = default_thread_count();
  std::size_t classes = 0;
  enumerate_states(o, [&](const EnumeratedClass& c) {
    ++classes;
    const Signature tree = signature(c.witness.forest());
    v.require(tree.n_negative == 1 && tree.n_zero == 0,
              "inertia of " + format_history(c.witness.ops()) + " is not (n-1,0,1)");
    v.require(tree == matrix_inertia(gram_matrix(c.witness.forest()).entries),
              "tree and dense inertia disagree on " + format_history(c.witness.ops()));
  });
  if (v.ok)
    v.detail = std::to_string(classes) + " classes through depth 8, each with one negative eigenvalue, " +
               std::to_string(seconds_since(start)) + " s";
  return v;
}

Verdict ac8() {
  Verdict v;
  EnumerationOptions serial;
  serial.max_depth = 6;
  serial.threads = 1;
  EnumerationOptions parallel = serial;
  parallel.threads = std::max<std::size_t>(4, default_thread_count());
  const auto a = enumerate_all(serial);
  const auto b = enumerate_all(parallel);
  std::vector<std::size_t> per_depth(7, 0);
  for (const auto& c : a) ++per_depth[c.depth];
  v.require(per_depth[0] == 1 && per_depth[1] == 1 && per_depth[2] == 3, "counts at depths 0/1/2");
  const auto reps = oracle::brute_force_classes(3);
  v.require(per_depth[3] == reps.size(), "depth 3: " + std::to_string(per_depth[3]) + " vs brute force " +
                                             std::to_string(reps.size()));
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].key == b[i].key && a[i].witness == b[i].witness;
  v.require(same, "parallel run differs from serial");
  if (v.ok) {
    std::ostringstream os;
    os << "counts 1/1/3, depth 3: " << per_depth[3] << " (brute force " << reps.size()
       << "), parallel == serial through depth 6 (" << a.size() << " classes)";
    v.detail = os.str();
  }
  return v;
}

Verdict ac9() {
  Verdict v;
  struct Case {
    int a, b;
    std::size_t depth;
    bool exact_one;
  };
  std::ostringstream os;
  for (const Case& c : {Case{-1, 0, 2, false}, Case{1, -2, 0, true}, Case{2, -3, 2, false}}) {
    const auto r = census(c.a, c.b, c.depth);
    const std::string name = "census(" + std::to_string(c.a) + "," + std::to_string(c.b) + "," + std::to_string(c.depth) + ")";
    v.require(c.exact_one ? r.count == 1 : r.count >= 1, name + " = " + std::to_string(r.count));
    v.require(!r.witnesses.empty(), name + " has no witness");
    for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
      const auto s = replay(r.witnesses[i].witness.ops());
      const VertexId x = r.witness_vertices[i];
      v.require(s.contains(x) && s.det(x) == c.a && s.kbar(x) == c.b, name + " witness does not replay");
    }
    os << name << " = " << r.count << "  ";
  }
  if (v.ok) v.detail = os.str() + "witnesses replay";
  return v;
}

Verdict ac10() {
  Verdict v;
  std::mt19937_64 rng(10);
  for (int t = 0; t < 1000; ++t) {
    const auto s = replay(oracle::random_history(rng, t % 16));
    const auto text = state_file_text(s);
    const auto loaded = read_state_text(text);
    v.require(state_file_text(loaded) == text && loaded == s, "state file round trip: " + format_history(s.ops()));
  }
  for (int t = 0; t < 1000; ++t) {
    const auto s = replay(oracle::random_history(rng, t % 12));
    const auto ops = available_ops(s);
    const auto& op = ops[rng() % ops.size()];
    v.require(blow_down(blowup::apply(s, op)) == s, "blow-down after " + to_string(op));
  }
  if (v.ok) v.detail = "1000 byte-identical state file round trips, 1000 blow-up/blow-down identities";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = std::string("exception: ") + e.what();
    }
    std::cout << name << ' ' << (v.ok ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
    failed += !v.ok;
  }
  return failed == 0 ? 0 : 1;
}
