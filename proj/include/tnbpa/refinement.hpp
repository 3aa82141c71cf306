#pragma once

// Partition refinement over decomposition bases.
//
// Starting from the norm-equality base, each round rebuilds the base in index
// order: a composite X_i either keeps a decomposition X_j . sffx(...) accepted
// by the candidate test, or becomes a new prime. The sequence stabilises after
// at most n rounds at branching bisimilarity.

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tnbpa/core_model.hpp"
#include "tnbpa/decomposition_base.hpp"
#include "tnbpa/error.hpp"
#include "tnbpa/normalization.hpp"
#include "tnbpa/normed_string.hpp"

namespace tnbpa {

// One chosen decreasing rule per constant (index into the rule table).
struct FixedDecreasingRules {
  std::vector<std::size_t> rule;
};

// Minimal decreasing rule under (visible before silent, action name, rhs ids).
inline FixedDecreasingRules select_decreasing_rules(const StandardSystem& std_sys) {
  const auto& sys = std_sys.system;
  FixedDecreasingRules fixed;
  for (ConstantId c = 0; c < sys.constant_count(); ++c) {
    std::optional<std::size_t> best;
    auto key = [&](std::size_t r) {
      const Rule& rule = sys.rule(r);
      return std::make_tuple(rule.action.is_silent(), sys.action_name(rule.action), rule.rhs);
    };
    for (auto r : sys.rules_of(c)) {
      if (!std_sys.is_decreasing(r)) continue;
      if (!best || key(r) < key(*best)) best = r;
    }
    ensure(best.has_value(), "constant " + sys.constant_name(c) + " has no decreasing rule");
    fixed.rule.push_back(*best);
  }
  return fixed;
}

enum class CandidateMode { Pruned, Exhaustive };

inline std::string to_string(CandidateMode m) { return m == CandidateMode::Pruned ? "pruned" : "exhaustive"; }

// Result of testing X_i against a candidate delta. `step` is the step of the
// test procedure that decided: the rejecting step, or the accepting one.
struct TestOutcome {
  bool accepted = false;
  int step = 0;

  friend bool operator==(const TestOutcome&, const TestOutcome&) = default;
};

struct TestContext {
  const StandardSystem& std_sys;
  const DecompositionBase& old_base;  // B
  const PartialBase& new_base;        // B', settled below the constant under test
};

using CandidateTest = std::function<TestOutcome(const TestContext&, ConstantId, const NormedString&)>;

namespace detail {

struct Move {
  Action action;
  NormedString target;  // decomposed target
};

// Moves of a word whose head is `head` and whose tail is already in prime form.
template <class Decompose>
std::vector<Move> moves(const StandardSystem& s, ConstantId head, const Process& tail, RuleClass cls,
                        Decompose&& decompose) {
  std::vector<Move> out;
  for (auto r : s.system.rules_of(head)) {
    if (s.classes[r] != cls) continue;
    Process target = concat(s.system.rule(r).rhs, tail);
    out.push_back(Move{s.system.rule(r).action, decompose(target)});
  }
  return out;
}

inline bool has_move(const std::vector<Move>& ms, Action a, const NormedString& target) {
  return std::any_of(ms.begin(), ms.end(), [&](const Move& m) { return m.action == a && equal(m.target, target); });
}

// Every move of `from` has an equally labelled move of `to` with equal target.
inline bool simulated_by(const std::vector<Move>& from, const std::vector<Move>& to) {
  return std::all_of(from.begin(), from.end(), [&](const Move& m) { return has_move(to, m.action, m.target); });
}

}  // namespace detail

// Steps a test may be told to skip; used only to build deliberately broken engines.
struct LpfTestOptions {
  unsigned skip_steps = 0;  // bit s set => step s always passes
  bool skips(int step) const { return (skip_steps >> step) & 1U; }
};

// Branching test of X_i == delta modulo B'. delta must lie in (P' with index < i)*.
//   1  dcmp_B(X_i) = dcmp_B(delta)
//   2  each decreasing X_i -l-> a: l = tau and dcmp_B'(a) = delta, or a decreasing
//      delta -l-> b with dcmp_B'(a) = dcmp_B'(b)
//   3  each increasing X_i -l-> a: an increasing delta -l-> b with dcmp_B(a) = dcmp_B(b)
//   4  some X_i -tau->dec a with dcmp_B'(a) = delta: accept
//   5  each decreasing delta -l-> b matched by a decreasing X_i -l-> a under B'
//   6  each increasing delta -l-> b matched by an increasing X_i -l-> a under B
//   7  accept
inline TestOutcome branching_lpftest(const TestContext& ctx, ConstantId x, const NormedString& delta,
                                     LpfTestOptions opts = {}) {
  const auto& s = ctx.std_sys;
  ensure(!delta.empty(), "empty candidate");
  for (auto c : delta.word())
    ensure(c < x && ctx.new_base.is_prime(c), "candidate is not a word over earlier new primes");

  auto by_new = [&](const Process& p) { return ctx.new_base.dcmp(p); };
  auto by_old = [&](const Process& p) { return ctx.old_base.dcmp(p); };
  const Process tail(delta.word().begin() + 1, delta.word().end());

  if (!opts.skips(1) && !equal(ctx.old_base.dcmp(Process{x}), ctx.old_base.dcmp(delta))) return {false, 1};

  auto x_dec = detail::moves(s, x, {}, RuleClass::Decreasing, by_new);
  auto d_dec = detail::moves(s, delta.front(), tail, RuleClass::Decreasing, by_new);
  if (!opts.skips(2)) {
    for (const auto& m : x_dec) {
      bool vacuous = m.action.is_silent() && equal(m.target, delta);
      if (!vacuous && !detail::has_move(d_dec, m.action, m.target)) return {false, 2};
    }
  }

  auto x_inc = detail::moves(s, x, {}, RuleClass::Increasing, by_old);
  auto d_inc = detail::moves(s, delta.front(), tail, RuleClass::Increasing, by_old);
  if (!opts.skips(3) && !detail::simulated_by(x_inc, d_inc)) return {false, 3};

  if (!opts.skips(4)) {
    for (const auto& m : x_dec)
      if (m.action.is_silent() && equal(m.target, delta)) return {true, 4};
  }

  if (!opts.skips(5) && !detail::simulated_by(d_dec, x_dec)) return {false, 5};
  if (!opts.skips(6) && !detail::simulated_by(d_inc, x_inc)) return {false, 6};
  return {true, 7};
}

// The silent-free test, transcribed separately:
//   1  dcmp_B(X_i) = dcmp_B(delta)
//   2  decreasing moves of X_i matched by delta under B'
//   3  increasing moves of X_i matched by delta under B
//   4  decreasing moves of delta matched by X_i under B'
//   5  increasing moves of delta matched by X_i under B
//   6  accept
inline TestOutcome realtime_lpftest(const TestContext& ctx, ConstantId x, const NormedString& delta) {
  const auto& s = ctx.std_sys;
  ensure(s.system.is_realtime(), "realtime test on a system with silent rules");
  auto by_new = [&](const Process& p) { return ctx.new_base.dcmp(p); };
  auto by_old = [&](const Process& p) { return ctx.old_base.dcmp(p); };
  const Process tail(delta.word().begin() + 1, delta.word().end());

  if (!equal(ctx.old_base.dcmp(Process{x}), ctx.old_base.dcmp(delta))) return {false, 1};
  auto x_dec = detail::moves(s, x, {}, RuleClass::Decreasing, by_new);
  auto d_dec = detail::moves(s, delta.front(), tail, RuleClass::Decreasing, by_new);
  if (!detail::simulated_by(x_dec, d_dec)) return {false, 2};
  auto x_inc = detail::moves(s, x, {}, RuleClass::Increasing, by_old);
  auto d_inc = detail::moves(s, delta.front(), tail, RuleClass::Increasing, by_old);
  if (!detail::simulated_by(x_inc, d_inc)) return {false, 3};
  if (!detail::simulated_by(d_dec, x_dec)) return {false, 4};
  if (!detail::simulated_by(d_inc, x_inc)) return {false, 5};
  return {true, 6};
}

struct EngineOptions {
  CandidateMode mode = CandidateMode::Pruned;
  std::size_t max_exhaustive = 100000;
  // Keep testing after the first acceptance and fail if a second candidate is accepted.
  bool check_unique_acceptance = true;
  CandidateTest test = [](const TestContext& ctx, ConstantId x, const NormedString& d) {
    return branching_lpftest(ctx, x, d);
  };
};

namespace detail {

inline void enumerate_words(const std::vector<ConstantId>& letters, const NormTable& norms, std::uint64_t remaining,
                            Process& prefix, std::vector<Process>& out, std::size_t limit) {
  if (remaining == 0) {
    if (out.size() >= limit)
      throw GuardExceeded("exhaustive candidate enumeration exceeds " + std::to_string(limit) + " candidates");
    out.push_back(prefix);
    return;
  }
  for (auto c : letters) {
    const auto n = norms.at(c).value();
    if (n > remaining) continue;
    prefix.push_back(c);
    enumerate_words(letters, norms, remaining - n, prefix, out, limit);
    prefix.pop_back();
  }
}

}  // namespace detail

// Candidates delta for X_i. Pruned: lpf_B(X_i) first, then new primes between
// lpf_B(X_i) and X_i, each extended by the suffix of dcmp_B'(alpha_i) carrying
// the remaining norm; heads without such a suffix are skipped. Exhaustive: every
// word over earlier primes of B' with the norm of X_i, in lexicographic order.
inline std::vector<NormedString> candidates_for(const StandardSystem& s, const DecompositionBase& old_base,
                                                const PartialBase& new_base, ConstantId x,
                                                const FixedDecreasingRules& fixed, const EngineOptions& opts) {
  std::vector<NormedString> out;
  const auto norm_x = s.norm(x);
  if (opts.mode == CandidateMode::Exhaustive) {
    std::vector<ConstantId> letters;
    for (ConstantId c = 0; c < x; ++c)
      if (new_base.is_prime(c)) letters.push_back(c);
    std::vector<Process> words;
    Process prefix;
    detail::enumerate_words(letters, *s.norms, norm_x, prefix, words, opts.max_exhaustive);
    for (auto& w : words) out.emplace_back(s.norms, std::move(w));
    return out;
  }

  const NormedString reduct = new_base.dcmp(s.system.rule(fixed.rule.at(x)).rhs);
  const ConstantId lpf = old_base.lpf(x);
  ensure(new_base.is_prime(lpf), "old leftmost prime factor is not prime in the new base");

  std::vector<ConstantId> heads{lpf};
  for (ConstantId j = lpf + 1; j < x; ++j)
    if (new_base.is_prime(j) && !old_base.is_prime(j)) heads.push_back(j);

  for (auto j : heads) {
    const auto norm_j = s.norm(j);
    if (norm_j > norm_x) continue;
    const auto h = norm_x - norm_j;
    if (h > reduct.norm()) continue;
    auto suffix = reduct.suffix_with_norm(h);
    if (!suffix) continue;
    out.push_back(concat(NormedString(s.norms, j), *suffix));
  }
  return out;
}

struct CandidateRecord {
  NormedString delta;
  TestOutcome outcome;
};

struct ConstantRecord {
  ConstantId constant = 0;
  std::vector<CandidateRecord> candidates;
  bool became_prime = false;
};

struct IterationRecord {
  DecompositionBase before;
  DecompositionBase after;
  std::vector<ConstantId> new_primes;
  std::vector<ConstantRecord> constants;  // composites of `before`, in index order
};

struct RefinementTrace {
  std::vector<IterationRecord> iterations;
};

// One round B -> B'.
inline std::pair<DecompositionBase, IterationRecord> refine(const StandardSystem& s, const DecompositionBase& base,
                                                            const FixedDecreasingRules& fixed,
                                                            const EngineOptions& opts = {}) {
  PartialBase next(s.norms);
  IterationRecord record{base, {}, {}, {}};
  const TestContext ctx{s, base, next};
  for (ConstantId x = 0; x < s.size(); ++x) {
    if (base.is_prime(x)) {
      next.settle_prime(x);
      continue;
    }
    ConstantRecord rec{x, {}, false};
    std::optional<NormedString> accepted;
    for (auto& delta : candidates_for(s, base, next, x, fixed, opts)) {
      TestOutcome outcome = opts.test(ctx, x, delta);
      rec.candidates.push_back(CandidateRecord{delta, outcome});
      if (!outcome.accepted) continue;
      if (accepted)
        throw InternalError("two decompositions accepted for " + s.system.constant_name(x) + ": " +
                            format_string(s.system, *accepted) + " and " + format_string(s.system, delta));
      accepted = std::move(delta);
      if (!opts.check_unique_acceptance) break;
    }
    if (accepted) {
      next.settle_equation(x, std::move(*accepted));
    } else {
      next.settle_prime(x);
      rec.became_prime = true;
      record.new_primes.push_back(x);
    }
    record.constants.push_back(std::move(rec));
  }
  record.after = next.finish();
  return {record.after, std::move(record)};
}

struct BisimilarityBase {
  DecompositionBase base;
  RefinementTrace trace;
};

// Iterates refine from the initial base until no new prime appears.
inline BisimilarityBase compute_bisimilarity_base(const StandardSystem& s, const EngineOptions& opts = {}) {
  const auto fixed = select_decreasing_rules(s);
  BisimilarityBase result{initial_base(s), {}};
  for (;;) {
    auto [next, record] = refine(s, result.base, fixed, opts);
    const auto old_primes = result.base.primes();
    const auto new_primes = next.primes();
    ensure(std::includes(new_primes.begin(), new_primes.end(), old_primes.begin(), old_primes.end()),
           "a prime lost its primality");
    result.trace.iterations.push_back(std::move(record));
    ensure(result.trace.iterations.size() <= std::max<std::size_t>(s.size(), 1), "more refinement rounds than constants");
    if (new_primes == old_primes) {
      ensure(base_equal(next, result.base), "equal prime sets but different bases");
      return result;
    }
    result.base = std::move(next);
  }
}

enum class VerdictKind { Bisimilar, NotBisimilar, Unknown };

inline std::string to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::Bisimilar: return "bisimilar";
    case VerdictKind::NotBisimilar: return "not-bisimilar";
    case VerdictKind::Unknown: return "unknown";
  }
  return "?";
}

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  std::optional<DecompositionBase> base;  // final base used as evidence
};

inline Verdict check_equivalence(const DecompositionBase& final_base, const Process& p, const Process& q) {
  return Verdict{final_base.equivalent(p, q) ? VerdictKind::Bisimilar : VerdictKind::NotBisimilar, final_base};
}

inline Verdict check_equivalence(const StandardSystem& s, const Process& p, const Process& q,
                                 const EngineOptions& opts = {}) {
  return check_equivalence(compute_bisimilarity_base(s, opts).base, p, q);
}

inline nlohmann::ordered_json trace_to_json(const StandardSystem& s, const RefinementTrace& trace) {
  const auto& sys = s.system;
  auto names = [&](const std::vector<ConstantId>& cs) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (auto c : cs) a.push_back(sys.constant_name(c));
    return a;
  };
  nlohmann::ordered_json iterations = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    const auto& it = trace.iterations[i];
    nlohmann::ordered_json constants = nlohmann::ordered_json::array();
    for (const auto& rec : it.constants) {
      nlohmann::ordered_json cands = nlohmann::ordered_json::array();
      for (const auto& c : rec.candidates) {
        nlohmann::ordered_json j{{"delta", format_string(sys, c.delta)}, {"accepted", c.outcome.accepted}};
        j[c.outcome.accepted ? "accepted_at_step" : "rejected_at_step"] = c.outcome.step;
        cands.push_back(std::move(j));
      }
      constants.push_back({{"constant", sys.constant_name(rec.constant)},
                           {"candidates", cands},
                           {"result", rec.became_prime ? std::string("prime")
                                                       : format_string(sys, it.after.decomposition(rec.constant))}});
    }
    iterations.push_back({{"iteration", i + 1},
                          {"before", base_to_json(sys, it.before)},
                          {"after", base_to_json(sys, it.after)},
                          {"new_primes", names(it.new_primes)},
                          {"constants", constants}});
  }
  return {{"iterations", iterations}};
}

}  // namespace tnbpa
