#pragma once

// Differential testing of the refinement engine against the oracle on random
// systems. Trials are independent; each owns its oracle and memo tables.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "tnbpa/decomposition_base.hpp"
#include "tnbpa/generator.hpp"
#include "tnbpa/normalization.hpp"
#include "tnbpa/oracle.hpp"
#include "tnbpa/refinement.hpp"
#include "tnbpa/verification.hpp"

namespace tnbpa {

struct DiffOptions {
  GenParams params;             // params.constants is the upper bound of a trial's size
  std::size_t trials = 100;
  unsigned k_max = 16;
  unsigned k_retry = 24;        // second chance for unconfirmed NotBisimilar verdicts
  std::size_t pairs = 20;       // half engine-equivalent, half equal-norm
  std::size_t pair_length = 3;
  std::size_t init_pairs = 200;
  std::size_t verify_samples = 10;
  std::size_t jobs = 1;
  unsigned engine_skip_steps = 0;  // deliberately broken engine when nonzero
};

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t constants = 0;
  bool realtime = false;
  std::size_t iterations = 0;
  std::size_t primes = 0;
  bool modes_agree = true;
  bool exhaustive_skipped = false;
  std::size_t init_law_violations = 0;
  std::size_t realtime_divergences = 0;
  std::size_t bisimilar_pairs = 0;
  std::size_t refuted = 0;           // engine Bisimilar, oracle refutes: unsound engine
  std::size_t not_bisimilar_pairs = 0;
  std::size_t confirmed = 0;         // at k_max
  std::size_t flagged = 0;           // unconfirmed at k_max
  std::size_t confirmed_on_retry = 0;
  std::size_t oracle_skipped = 0;
  VerificationReport verification;
  std::vector<nlohmann::ordered_json> findings;
  std::string error;  // internal error text, if the trial aborted

  bool ok() const {
    return error.empty() && modes_agree && init_law_violations == 0 && realtime_divergences == 0 && refuted == 0 &&
           confirmed_on_retry == flagged && verification.clean();
  }
};

struct DiffSummary {
  std::vector<TrialResult> trials;

  std::size_t total(std::size_t TrialResult::*field) const {
    std::size_t n = 0;
    for (const auto& t : trials) n += t.*field;
    return n;
  }
  std::size_t failed_trials() const {
    return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const TrialResult& t) { return !t.ok(); }));
  }
  double flag_rate() const {
    const auto nb = total(&TrialResult::not_bisimilar_pairs);
    return nb == 0 ? 0.0 : static_cast<double>(total(&TrialResult::flagged)) / static_cast<double>(nb);
  }
};

namespace detail {

inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Maps a branching_lpftest step number to the matching realtime_lpftest step;
// branching step 4 has no realtime counterpart.
inline int realtime_step(int step) {
  switch (step) {
    case 5: return 4;
    case 6: return 5;
    case 7: return 6;
    default: return step;
  }
}

inline std::size_t compare_realtime(const RefinementTrace& branching, const RefinementTrace& realtime) {
  std::size_t divergences = 0;
  if (branching.iterations.size() != realtime.iterations.size()) return 1;
  for (std::size_t i = 0; i < branching.iterations.size(); ++i) {
    const auto& a = branching.iterations[i].constants;
    const auto& b = realtime.iterations[i].constants;
    if (a.size() != b.size()) return divergences + 1;
    for (std::size_t c = 0; c < a.size(); ++c) {
      if (a[c].candidates.size() != b[c].candidates.size()) {
        ++divergences;
        continue;
      }
      for (std::size_t d = 0; d < a[c].candidates.size(); ++d) {
        const auto& x = a[c].candidates[d];
        const auto& y = b[c].candidates[d];
        if (!equal(x.delta, y.delta) || x.outcome.accepted != y.outcome.accepted ||
            realtime_step(x.outcome.step) != y.outcome.step)
          ++divergences;
      }
    }
  }
  return divergences;
}

}  // namespace detail

inline TrialResult run_trial(const DiffOptions& opts, std::size_t trial) {
  TrialResult r;
  r.trial = trial;
  r.seed = detail::trial_seed(opts.params.seed, trial);
  std::mt19937_64 rng(r.seed);
  GenParams params = opts.params;
  params.seed = r.seed;
  params.constants = detail::uniform(rng, std::min<std::size_t>(2, opts.params.constants), opts.params.constants);
  r.constants = params.constants;

  try {
    const BpaSystem sys = random_system(params);
    const StandardSystem s = standardize(sys);
    r.realtime = s.system.is_realtime();

    // Initial congruence relates exactly the processes of equal norm.
    const DecompositionBase init = initial_base(s);
    for (std::size_t i = 0; i < opts.init_pairs; ++i) {
      Process p = random_process(s.system, rng, 4);
      Process q = random_process(s.system, rng, 4);
      if (i % 2 == 0)
        if (auto same = random_process_with_norm(*s.norms, rng, s.norm(p), s.size())) q = *same;
      if (init.equivalent(p, q) != (s.norm(p) == s.norm(q))) ++r.init_law_violations;
    }

    EngineOptions engine;
    if (opts.engine_skip_steps != 0) {
      const LpfTestOptions broken{opts.engine_skip_steps};
      engine.test = [broken](const TestContext& ctx, ConstantId x, const NormedString& d) {
        return branching_lpftest(ctx, x, d, broken);
      };
    }
    const auto result = compute_bisimilarity_base(s, engine);
    const DecompositionBase& final_base = result.base;
    r.iterations = result.trace.iterations.size();
    r.primes = final_base.primes().size();

    EngineOptions exhaustive = engine;
    exhaustive.mode = CandidateMode::Exhaustive;
    try {
      r.modes_agree = base_equal(compute_bisimilarity_base(s, exhaustive).base, final_base);
      if (!r.modes_agree) r.findings.push_back({{"finding", "mode-mismatch"}});
    } catch (const GuardExceeded&) {
      r.exhaustive_skipped = true;
    }

    if (r.realtime && opts.engine_skip_steps == 0) {
      EngineOptions literal = engine;
      literal.test = [](const TestContext& ctx, ConstantId x, const NormedString& d) {
        return realtime_lpftest(ctx, x, d);
      };
      r.realtime_divergences = detail::compare_realtime(result.trace, compute_bisimilarity_base(s, literal).trace);
    }

    BranchingOracle oracle(s.system);
    r.verification = verify_base_generators(s, final_base, opts.k_max, opts.verify_samples, r.seed, oracle);

    for (std::size_t i = 0; i < opts.pairs; ++i) {
      Process p;
      Process q;
      if (i % 2 == 0) {
        std::tie(p, q) = random_equivalent_pair(final_base, rng, opts.pair_length);
      } else {
        p = random_process(s.system, rng, opts.pair_length);
        auto same = random_process_with_norm(*s.norms, rng, s.norm(p), s.size());
        q = same ? *same : p;
      }
      const bool engine_says = final_base.equivalent(p, q);
      auto pair_json = [&](const std::string& what) {
        return nlohmann::ordered_json{{"finding", what},
                                      {"left", format_process(s.system, p)},
                                      {"right", format_process(s.system, q)}};
      };
      try {
        if (engine_says) {
          ++r.bisimilar_pairs;
          if (auto d = oracle.find_distinction(p, q, opts.k_max)) {
            ++r.refuted;
            auto j = pair_json("bisimilar-refuted");
            j["distinction"] = distinction_to_json(s.system, *d);
            r.findings.push_back(std::move(j));
          }
        } else {
          ++r.not_bisimilar_pairs;
          auto d = oracle.find_distinction(p, q, opts.k_max);
          if (d && replay_distinction(s.system, *d)) {
            ++r.confirmed;
            continue;
          }
          ++r.flagged;
          auto j = pair_json("oracle bound too small");
          auto retry = oracle.find_distinction(p, q, opts.k_retry);
          if (retry && replay_distinction(s.system, *retry)) ++r.confirmed_on_retry;
          j["confirmed_at_retry"] = retry != nullptr;
          r.findings.push_back(std::move(j));
        }
      } catch (const GuardExceeded& e) {
        ++r.oracle_skipped;
        auto j = pair_json("oracle guard");
        j["message"] = e.what();
        r.findings.push_back(std::move(j));
      }
    }
    for (const auto& f : r.verification.failures) {
      nlohmann::ordered_json j{{"finding", "verification-" + f.kind},
                               {"left", format_process(s.system, f.left)},
                               {"right", format_process(s.system, f.right)}};
      r.findings.push_back(std::move(j));
    }
  } catch (const InternalError& e) {
    r.error = e.what();
  }
  return r;
}

// Runs the trials on up to opts.jobs threads; results are in trial order.
inline DiffSummary differential_run(const DiffOptions& opts,
                                    const std::function<void(const TrialResult&)>& on_trial = nullptr) {
  DiffSummary summary;
  summary.trials.resize(opts.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next++) < opts.trials;) summary.trials[t] = run_trial(opts, t);
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, opts.trials));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (on_trial)
    for (const auto& t : summary.trials) on_trial(t);
  return summary;
}

inline nlohmann::ordered_json trial_to_json(const TrialResult& t) {
  nlohmann::ordered_json j{{"trial", t.trial},
                           {"seed", t.seed},
                           {"constants", t.constants},
                           {"realtime", t.realtime},
                           {"iterations", t.iterations},
                           {"primes", t.primes},
                           {"modes_agree", t.modes_agree},
                           {"exhaustive_skipped", t.exhaustive_skipped},
                           {"init_law_violations", t.init_law_violations},
                           {"realtime_divergences", t.realtime_divergences},
                           {"bisimilar_pairs", t.bisimilar_pairs},
                           {"refuted", t.refuted},
                           {"not_bisimilar_pairs", t.not_bisimilar_pairs},
                           {"confirmed", t.confirmed},
                           {"flagged", t.flagged},
                           {"confirmed_on_retry", t.confirmed_on_retry},
                           {"oracle_skipped", t.oracle_skipped},
                           {"verification_failures", t.verification.failures.size()},
                           {"verification_skipped", t.verification.skipped},
                           {"ok", t.ok()}};
  if (!t.findings.empty()) j["findings"] = t.findings;
  if (!t.error.empty()) j["error"] = t.error;
  return j;
}

inline nlohmann::ordered_json summary_to_json(const DiffSummary& s) {
  return {{"summary", true},
          {"trials", s.trials.size()},
          {"failed_trials", s.failed_trials()},
          {"bisimilar_pairs", s.total(&TrialResult::bisimilar_pairs)},
          {"refuted", s.total(&TrialResult::refuted)},
          {"not_bisimilar_pairs", s.total(&TrialResult::not_bisimilar_pairs)},
          {"confirmed", s.total(&TrialResult::confirmed)},
          {"flagged", s.total(&TrialResult::flagged)},
          {"flag_rate", s.flag_rate()},
          {"confirmed_on_retry", s.total(&TrialResult::confirmed_on_retry)},
          {"oracle_skipped", s.total(&TrialResult::oracle_skipped)},
          {"mode_mismatches", static_cast<std::size_t>(std::count_if(s.trials.begin(), s.trials.end(),
                                                                     [](const TrialResult& t) { return !t.modes_agree; }))},
          {"init_law_violations", s.total(&TrialResult::init_law_violations)},
          {"realtime_divergences", s.total(&TrialResult::realtime_divergences)}};
}

}  // namespace tnbpa
