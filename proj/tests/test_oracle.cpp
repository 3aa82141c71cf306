#include <catch_amalgamated.hpp>

#include <random>
#include <set>

#include "support.hpp"

using namespace tnbpa;
using namespace testing_support;

namespace {

std::set<Process> as_set(const SilentClosure& c) { return {c.states.begin(), c.states.end()}; }

// Processes on the BFS path from the origin to states[i], origin first.
std::vector<Process> path_to(const SilentClosure& c, std::size_t i) {
  std::vector<Process> path;
  for (std::optional<std::size_t> at = i; at; at = c.parent[*at]) path.push_back(c.states[*at]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

TEST_CASE("silent closures") {
  const auto sys = fixture("ex1.bpa");
  const auto norms = compute_norms(sys);
  const auto X = parse_process("X", sys), XP = parse_process("X'", sys), Y = parse_process("Y", sys);
  CHECK(as_set(silent_closure_dec(sys, norms, X)) == std::set<Process>{X, XP});
  CHECK(as_set(silent_closure_dec(sys, norms, concat(X, Y))) == std::set<Process>{concat(X, Y), concat(XP, Y)});
  CHECK(as_set(silent_closure_dec(sys, norms, XP)) == std::set<Process>{XP});
  CHECK(as_set(silent_closure_dec(sys, norms, {})) == std::set<Process>{Process{}});

  const auto sysb = fixture("sys-b.bpa");
  const auto nb = compute_norms(sysb);
  // Y -tau-> X raises the norm and is not followed.
  CHECK(as_set(silent_closure_dec(sysb, nb, parse_process("Y", sysb))).size() == 1);
  CHECK_THROWS_AS(silent_closure_dec(sys, norms, X, 1), GuardExceeded);
}

TEST_CASE("silent closures agree with unrestricted search filtered by norm") {
  std::mt19937_64 rng(41);
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    auto params = small_params(seed, 2 + seed % 7);
    params.silent_prob = 0.7;
    const auto sys = random_system(params);
    const auto norms = compute_norms(sys);
    for (int i = 0; i < 5; ++i) {
      const auto p = random_process(sys, rng, 3);
      const auto fast = silent_closure_dec(sys, norms, p);
      REQUIRE(as_set(fast) == naive_silent_closure(sys, p, 64));
      for (std::size_t s = 1; s < fast.states.size(); ++s) REQUIRE(fast.parent[s].value() < s);
    }
  }
}

TEST_CASE("branching example verdicts from the oracle") {
  const auto sys = fixture("ex1.bpa");
  BranchingOracle oracle(sys);
  const auto X = parse_process("X", sys), Y = parse_process("Y", sys);
  const auto XP = parse_process("X'", sys), YP = parse_process("Y'", sys);

  CHECK(oracle.related(X, Y, 1));
  CHECK_FALSE(oracle.related(X, Y, 2));
  CHECK(oracle.refuting_level(X, Y, 16) == 2U);
  CHECK_FALSE(oracle.related(Y, YP, 1));
  for (unsigned k = 0; k <= 16; ++k) {
    CHECK(oracle.related(XP, YP, k));
    CHECK(oracle.related(X, X, k));
  }

  auto d = oracle.find_distinction(X, Y, 16);
  REQUIRE(d != nullptr);
  std::string why;
  CHECK(replay_distinction(sys, *d, &why));
  CHECK(why.empty());
  CHECK(oracle.find_distinction(X, X, 16) == nullptr);
  CHECK(oracle.find_distinction(XP, YP, 16) == nullptr);

  const auto j = distinction_to_json(sys, *d);
  CHECK(j["left"] == "X");
  CHECK(j["right"] == "Y");
  CHECK(j.contains("attack"));
}

TEST_CASE("SYS-B: no distinction between the bisimilar pairs") {
  const auto sys = fixture("sys-b.bpa");
  BranchingOracle oracle(sys);
  auto p = [&](const char* t) { return parse_process(t, sys); };
  CHECK(oracle.find_distinction(p("A"), p("B"), 16) == nullptr);
  CHECK(oracle.find_distinction(p("A Y"), p("B Y"), 16) == nullptr);
  CHECK(oracle.find_distinction(p("X"), p("B Y"), 16) == nullptr);
  auto d = oracle.find_distinction(p("Y"), p("B"), 16);
  REQUIRE(d != nullptr);
  CHECK(replay_distinction(sys, *d));
}

TEST_CASE("collapsed silent cycles are not distinguished") {
  const auto sys = fixture("tau-cycle.bpa");
  BranchingOracle oracle(sys);
  const auto s = standardize(sys);
  for (ConstantId a = 0; a < sys.constant_count(); ++a)
    for (ConstantId b = 0; b < sys.constant_count(); ++b)
      if (s.from_input[a] == s.from_input[b]) CHECK(oracle.find_distinction({a}, {b}, 16) == nullptr);
}

TEST_CASE("memoized levels agree with a direct evaluation") {
  std::mt19937_64 rng(43);
  std::size_t separated = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto params = small_params(seed, 2 + seed % 4);
    params.silent_prob = 0.5;
    params.max_extra_rules = 1;
    const auto sys = random_system(params);
    BranchingOracle oracle(sys);
    const auto norms = compute_norms(sys);
    for (int i = 0; i < 6; ++i) {
      const auto p = random_process(sys, rng, 2);
      auto q = random_process_with_norm(norms, rng, norm_of(norms, p).value(), sys.constant_count()).value_or(p);
      for (unsigned k = 0; k <= 2; ++k) {
        const bool fast = oracle.related(p, q, k);
        REQUIRE(fast == naive_related(sys, p, q, k));
        if (!fast) ++separated;
      }
    }
  }
  CHECK(separated > 20);
}

TEST_CASE("levels shrink and refutations replay") {
  std::mt19937_64 rng(47);
  std::size_t refuted = 0;
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const auto sys = random_system(small_params(seed));
    BranchingOracle oracle(sys);
    const auto norms = compute_norms(sys);
    for (int i = 0; i < 10; ++i) {
      const auto p = random_process(sys, rng, 3);
      auto q = random_process_with_norm(norms, rng, norm_of(norms, p).value(), sys.constant_count()).value_or(p);
      for (unsigned k = 0; k < 12; ++k)
        if (oracle.related(p, q, k + 1)) REQUIRE(oracle.related(p, q, k));
      if (auto d = oracle.find_distinction(p, q, 12)) {
        ++refuted;
        std::string why;
        REQUIRE(replay_distinction(sys, *d, &why));
      }
    }
  }
  CHECK(refuted > 50);
}

TEST_CASE("tampered certificates fail replay") {
  const auto sys = fixture("ex1.bpa");
  BranchingOracle oracle(sys);
  auto d = oracle.find_distinction(parse_process("X", sys), parse_process("Y", sys), 16);
  REQUIRE(d != nullptr);
  REQUIRE(d->attack.has_value());

  Distinction no_replies = *d;
  no_replies.replies.clear();
  CHECK_FALSE(replay_distinction(sys, no_replies));

  Distinction wrong_attack = *d;
  wrong_attack.attack->target = parse_process("X", sys);
  CHECK_FALSE(replay_distinction(sys, wrong_attack));

  Distinction equal_norm_leaf;
  equal_norm_leaf.left = parse_process("X", sys);
  equal_norm_leaf.right = parse_process("Y", sys);
  CHECK_FALSE(replay_distinction(sys, equal_norm_leaf));
}

TEST_CASE("intermediate states of undistinguished silent paths stay undistinguished") {
  std::mt19937_64 rng(53);
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto params = small_params(seed, 2 + seed % 7);
    params.silent_prob = 0.7;
    params.clone_prob = 0.4;
    const auto sys = random_system(params);
    BranchingOracle oracle(sys);
    const auto norms = compute_norms(sys);
    for (int i = 0; i < 5; ++i) {
      const auto a = random_process(sys, rng, 2);
      const auto closure = silent_closure_dec(sys, norms, a);
      for (std::size_t end = 1; end < closure.states.size(); ++end) {
        const unsigned k = 8;
        if (!oracle.related(a, closure.states[end], k)) continue;
        for (const auto& mid : path_to(closure, end)) {
          REQUIRE(oracle.related(a, mid, k));
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("base self-verification") {
  const auto s = standardize(fixture("ex1.bpa"));
  const auto final_base = compute_bisimilarity_base(s).base;
  const auto clean = verify_base_generators(s, final_base, 16, 30);
  CHECK(clean.clean());
  CHECK(clean.equations_checked == 1);
  CHECK(clean.structural_checked > 0);
  CHECK(clean.samples_checked == 30);

  // Y = X instead of Y' = X'.
  using Eqs = std::vector<std::optional<NormedString>>;
  const auto X = s.name_map.at("X");
  const DecompositionBase corrupted(
      s.norms, Eqs{std::nullopt, std::nullopt, std::nullopt, NormedString(s.norms, Process{X})});
  const auto bad = verify_base_generators(s, corrupted, 16, 0);
  REQUIRE(bad.failures.size() == 1);
  CHECK(bad.failures[0].kind == "equation");
  REQUIRE(bad.failures[0].certificate != nullptr);
  CHECK(replay_distinction(s.system, *bad.failures[0].certificate));

  const auto init = verify_base_generators(s, initial_base(s), 16, 0);
  CHECK_FALSE(init.clean());
  bool x_refuted = false;
  for (const auto& f : init.failures)
    if (f.kind == "equation" && f.left == Process{X}) x_refuted = true;
  CHECK(x_refuted);

  const auto j = report_to_json(s.system, bad);
  CHECK(j["failures"][0]["left"] == "Y");
  CHECK(j["failures"][0]["right"] == "X");
}

TEST_CASE("base self-verification on SYS-B") {
  const auto s = standardize(fixture("sys-b.bpa"));
  const auto r = verify_base_generators(s, compute_bisimilarity_base(s).base, 16, 40);
  CHECK(r.clean());
  CHECK(r.equations_checked == 2);
}

TEST_CASE("the oracle rejects systems that are not totally normed") {
  CHECK_THROWS_AS(BranchingOracle(parse_system("constants: X\nX -a-> X\n")), NormednessError);
}

TEST_CASE("state guard") {
  const auto sys = fixture("sys-b.bpa");
  BranchingOracle oracle(sys, OracleLimits{2, 100});
  CHECK_THROWS_AS(oracle.related(parse_process("X Y Y", sys), parse_process("A Y Y Y", sys), 16), GuardExceeded);
}
