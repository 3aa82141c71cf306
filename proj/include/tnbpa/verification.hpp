#pragma once

// Self-check of a decomposition base against the oracle.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tnbpa/decomposition_base.hpp"
#include "tnbpa/generator.hpp"
#include "tnbpa/normalization.hpp"
#include "tnbpa/oracle.hpp"
#include "tnbpa/refinement.hpp"

namespace tnbpa {

struct VerificationFailure {
  std::string kind;  // "equation", "structural" or "sample"
  Process left;
  Process right;
  std::string message;
  std::shared_ptr<const Distinction> certificate;  // null for structural failures
};

struct VerificationReport {
  std::size_t equations_checked = 0;
  std::size_t structural_checked = 0;
  std::size_t samples_checked = 0;
  std::size_t skipped = 0;  // queries abandoned at an oracle guard
  std::vector<VerificationFailure> failures;

  bool clean() const { return failures.empty(); }
};

// (i) no equation X = alpha_X is refuted up to k_max; (ii) for every prime X_i
// and decreasing X_i -l-> a, dcmp(a) is a word over primes of index < i, hence
// differs from X_i; (iii) sampled pairs with equal decompositions are not refuted.
inline VerificationReport verify_base_generators(const StandardSystem& s, const DecompositionBase& base, unsigned k_max,
                                                 std::size_t sample_budget, std::uint64_t seed,
                                                 BranchingOracle& oracle) {
  VerificationReport report;
  auto probe = [&](const std::string& kind, const Process& p, const Process& q) {
    try {
      if (auto d = oracle.find_distinction(p, q, k_max))
        report.failures.push_back({kind, p, q, "refuted by the oracle", d});
    } catch (const GuardExceeded&) {
      ++report.skipped;
    }
  };

  for (ConstantId x = 0; x < base.size(); ++x) {
    if (base.is_prime(x)) continue;
    ++report.equations_checked;
    probe("equation", Process{x}, base.decomposition(x).word());
  }

  for (ConstantId x = 0; x < base.size(); ++x) {
    if (!base.is_prime(x)) continue;
    for (auto r : s.system.rules_of(x)) {
      if (!s.is_decreasing(r)) continue;
      ++report.structural_checked;
      const Process& rhs = s.system.rule(r).rhs;
      const auto d = base.dcmp(rhs);
      bool below = std::all_of(d.word().begin(), d.word().end(), [&](ConstantId c) { return c < x; });
      if (!below || d.word() == Process{x})
        report.failures.push_back({"structural", Process{x}, rhs,
                                   "decreasing rule of a prime decomposes to " + format_string(s.system, d), nullptr});
    }
  }

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < sample_budget; ++i) {
    auto [p, q] = random_equivalent_pair(base, rng, 3);
    ++report.samples_checked;
    probe("sample", p, q);
  }
  return report;
}

inline VerificationReport verify_base_generators(const StandardSystem& s, const DecompositionBase& base, unsigned k_max,
                                                 std::size_t sample_budget, std::uint64_t seed = 1) {
  BranchingOracle oracle(s.system);
  return verify_base_generators(s, base, k_max, sample_budget, seed, oracle);
}

inline nlohmann::ordered_json report_to_json(const BpaSystem& sys, const VerificationReport& r) {
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const auto& f : r.failures) {
    nlohmann::ordered_json j{{"kind", f.kind},
                             {"left", format_process(sys, f.left)},
                             {"right", format_process(sys, f.right)},
                             {"message", f.message}};
    if (f.certificate) j["distinction"] = distinction_to_json(sys, *f.certificate);
    failures.push_back(std::move(j));
  }
  return {{"equations", r.equations_checked},
          {"structural", r.structural_checked},
          {"samples", r.samples_checked},
          {"skipped", r.skipped},
          {"failures", failures}};
}

}  // namespace tnbpa
