#pragma once

// Random totally normed systems for differential testing.
//
// Constants are built in rounds. Each receives a visible rule whose right-hand
// side uses only earlier constants, so every constant is normed when created;
// silent rules never erase. Clones copy an earlier constant's rules and yield
// bisimilar pairs that the engine must identify.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tnbpa/core_model.hpp"
#include "tnbpa/decomposition_base.hpp"
#include "tnbpa/error.hpp"
#include "tnbpa/normalization.hpp"

namespace tnbpa {

struct GenParams {
  std::size_t constants = 6;
  std::size_t max_rhs = 2;
  std::size_t actions = 2;          // visible alphabet size
  double silent_prob = 0.3;         // per extra rule
  std::uint64_t norm_cap = 5;       // bound on the norm of the first rule's path
  std::uint64_t seed = 1;
  std::size_t max_extra_rules = 2;  // per constant
  double clone_prob = 0.3;
  bool unit_norms = false;          // first rules all go to eps
};

namespace detail {

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace detail

inline BpaSystem random_system(const GenParams& params) {
  if (params.constants == 0 || params.actions == 0) throw Error("generator needs at least one constant and one action");
  std::mt19937_64 rng(params.seed);
  const std::size_t n = params.constants;

  std::vector<std::string> action_names{std::string(kSilentName)};
  for (std::size_t a = 0; a < params.actions; ++a) action_names.push_back(std::string(1, static_cast<char>('a' + a % 26)) + (a >= 26 ? std::to_string(a / 26) : ""));
  auto visible = [&] { return Action(static_cast<std::uint32_t>(detail::uniform(rng, 1, params.actions))); };

  std::vector<Rule> rules;
  std::vector<std::uint64_t> design_norm(n, 0);  // upper bound on the real norm
  auto random_word = [&](std::size_t len, std::size_t below) {
    Process w;
    for (std::size_t i = 0; i < len; ++i) w.push_back(static_cast<ConstantId>(detail::uniform(rng, 0, below - 1)));
    return w;
  };

  for (ConstantId c = 0; c < n; ++c) {
    if (c > 0 && detail::chance(rng, params.clone_prob)) {
      const auto original = static_cast<ConstantId>(detail::uniform(rng, 0, c - 1));
      const std::size_t count = rules.size();
      for (std::size_t r = 0; r < count; ++r)
        if (rules[r].lhs == original) rules.push_back(Rule{c, rules[r].action, rules[r].rhs});
      if (params.silent_prob > 0 && detail::chance(rng, 0.5)) rules.push_back(Rule{c, Action::silent(), Process{original}});
      design_norm[c] = design_norm[original];
      continue;
    }

    Process rhs;
    if (c > 0 && !params.unit_norms) {
      for (int attempt = 0; attempt < 8; ++attempt) {
        Process w = random_word(detail::uniform(rng, 0, params.max_rhs), c);
        std::uint64_t total = 1;
        for (auto d : w) total += design_norm[d];
        if (total <= params.norm_cap) {
          rhs = std::move(w);
          break;
        }
      }
    }
    design_norm[c] = 1;
    for (auto d : rhs) design_norm[c] += design_norm[d];
    rules.push_back(Rule{c, visible(), std::move(rhs)});
  }

  // Extra rules may mention any constant, including later ones.
  for (ConstantId c = 0; c < n; ++c) {
    const std::size_t extra = detail::uniform(rng, 0, params.max_extra_rules);
    for (std::size_t e = 0; e < extra; ++e) {
      if (params.silent_prob > 0 && detail::chance(rng, params.silent_prob)) {
        rules.push_back(Rule{c, Action::silent(), random_word(detail::uniform(rng, 1, std::max<std::size_t>(params.max_rhs, 1)), n)});
      } else {
        rules.push_back(Rule{c, visible(), random_word(detail::uniform(rng, 0, params.max_rhs), n)});
      }
    }
  }

  // Declaration order is shuffled so standardization has work to do.
  std::vector<ConstantId> declared(n);
  std::iota(declared.begin(), declared.end(), 0);
  std::shuffle(declared.begin(), declared.end(), rng);
  std::vector<ConstantId> position(n);
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) {
    position[declared[i]] = static_cast<ConstantId>(i);
    names[i] = "X" + std::to_string(declared[i] + 1);
  }
  for (auto& r : rules) {
    r.lhs = position[r.lhs];
    for (auto& d : r.rhs) d = position[d];
  }
  BpaSystem sys(names, action_names, rules);

  auto report = check_totally_normed(sys, compute_norms(sys));
  ensure(report.ok(), "generator produced a system that is not totally normed");
  return sys;
}

// Uniform word of length 1..max_len.
inline Process random_process(const BpaSystem& sys, std::mt19937_64& rng, std::size_t max_len) {
  Process p(detail::uniform(rng, 1, std::max<std::size_t>(max_len, 1)));
  for (auto& c : p) c = static_cast<ConstantId>(detail::uniform(rng, 0, sys.constant_count() - 1));
  return p;
}

// Random word of the given norm over the first constant_count constants;
// nullopt if none exists.
inline std::optional<Process> random_process_with_norm(const NormTable& norms, std::mt19937_64& rng, std::uint64_t target,
                                                       std::size_t constant_count) {
  // reachable[h]: some word has norm exactly h.
  std::vector<bool> reachable(target + 1, false);
  reachable[0] = true;
  for (std::uint64_t h = 1; h <= target; ++h)
    for (ConstantId c = 0; c < constant_count && !reachable[h]; ++c)
      if (norms[c].value() <= h && reachable[h - norms[c].value()]) reachable[h] = true;
  if (!reachable[target]) return std::nullopt;

  Process p;
  for (std::uint64_t left = target; left > 0;) {
    std::vector<ConstantId> fit;
    for (ConstantId c = 0; c < constant_count; ++c)
      if (norms[c].value() <= left && reachable[left - norms[c].value()]) fit.push_back(c);
    auto c = fit[detail::uniform(rng, 0, fit.size() - 1)];
    p.push_back(c);
    left -= norms[c].value();
  }
  return p;
}

// A uniformly chosen step at each position: any constant whose decomposition is
// a prefix of what remains. The result decomposes to `primes`.
inline Process random_factorization(const DecompositionBase& base, const Process& primes, std::mt19937_64& rng) {
  Process out;
  for (std::size_t at = 0; at < primes.size();) {
    std::vector<ConstantId> fit;
    for (ConstantId x = 0; x < base.size(); ++x) {
      const auto& alpha = base.decomposition(x).word();
      if (alpha.size() <= primes.size() - at &&
          std::equal(alpha.begin(), alpha.end(), primes.begin() + static_cast<std::ptrdiff_t>(at)))
        fit.push_back(x);
    }
    ensure(!fit.empty(), "word is not in prime form");
    const auto x = fit[detail::uniform(rng, 0, fit.size() - 1)];
    out.push_back(x);
    at += base.decomposition(x).length();
  }
  return out;
}

// A pair with equal decompositions under `base`; distinct whenever a few
// attempts can make it so.
inline std::pair<Process, Process> random_equivalent_pair(const DecompositionBase& base, std::mt19937_64& rng,
                                                          std::size_t max_len) {
  std::vector<ConstantId> composites;
  for (ConstantId x = 0; x < base.size(); ++x)
    if (!base.is_prime(x)) composites.push_back(x);
  Process p(detail::uniform(rng, 1, std::max<std::size_t>(max_len, 1)));
  for (auto& c : p) {
    if (!composites.empty() && detail::chance(rng, 0.5))
      c = composites[detail::uniform(rng, 0, composites.size() - 1)];
    else
      c = static_cast<ConstantId>(detail::uniform(rng, 0, base.size() - 1));
  }
  const Process primes = base.dcmp(p).word();
  Process q = random_factorization(base, primes, rng);
  for (int attempt = 0; attempt < 8 && q == p; ++attempt) q = random_factorization(base, primes, rng);
  return {p, q};
}

}  // namespace tnbpa
