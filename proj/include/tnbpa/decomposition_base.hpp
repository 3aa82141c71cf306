#pragma once

// Decomposition bases (P, E): a prime set plus one equation X = alpha_X per
// composite, with alpha_X already in prime form. The generated congruence
// relates two processes iff their prime decompositions coincide.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tnbpa/core_model.hpp"
#include "tnbpa/error.hpp"
#include "tnbpa/normalization.hpp"
#include "tnbpa/normed_string.hpp"

namespace tnbpa {

class DecompositionBase {
 public:
  DecompositionBase() = default;

  // decomposition[c] is nullopt for primes, alpha_c otherwise.
  DecompositionBase(NormTablePtr norms, const std::vector<std::optional<NormedString>>& decomposition)
      : norms_(std::move(norms)) {
    prime_.reserve(decomposition.size());
    for (ConstantId c = 0; c < decomposition.size(); ++c) {
      prime_.push_back(!decomposition[c].has_value());
      decomposition_.push_back(decomposition[c] ? *decomposition[c] : NormedString(norms_, c));
    }
    validate();
  }

  std::size_t size() const { return prime_.size(); }
  const NormTablePtr& norms() const { return norms_; }
  bool is_prime(ConstantId c) const { return prime_.at(c); }

  std::vector<ConstantId> primes() const {
    std::vector<ConstantId> out;
    for (ConstantId c = 0; c < prime_.size(); ++c)
      if (prime_[c]) out.push_back(c);
    return out;
  }

  // alpha_c for composites, [c] for primes.
  const NormedString& decomposition(ConstantId c) const { return decomposition_.at(c); }

  NormedString dcmp(const Process& p) const {
    Process word;
    for (auto c : p) {
      const auto& d = decomposition_.at(c).word();
      word.insert(word.end(), d.begin(), d.end());
    }
    return NormedString(norms_, std::move(word));
  }

  NormedString dcmp(const NormedString& s) const { return dcmp(s.word()); }

  bool equivalent(const Process& a, const Process& b) const { return equal(dcmp(a), dcmp(b)); }

  // Leftmost prime factor.
  ConstantId lpf(ConstantId c) const { return decomposition_.at(c).front(); }

  friend bool base_equal(const DecompositionBase& a, const DecompositionBase& b) {
    return a.prime_ == b.prime_ && a.decomposition_ == b.decomposition_;
  }

  // Throws InternalError unless: X1 is prime, each equation is norm-preserving
  // and uses only primes of smaller index.
  void validate() const {
    ensure(norms_ != nullptr, "decomposition base without norm table");
    ensure(prime_.size() == norms_->size(), "decomposition base size mismatch");
    if (prime_.empty()) return;
    ensure(prime_[0], "X1 must be prime");
    for (ConstantId c = 0; c < prime_.size(); ++c) {
      const auto& alpha = decomposition_[c];
      ensure(alpha.norm() == norms_->at(c).value(), "equation is not norm-preserving");
      if (prime_[c]) continue;
      for (auto p : alpha.word()) {
        ensure(p < c, "equation uses a constant of larger index");
        ensure(prime_[p], "equation right-hand side is not in prime form");
      }
    }
  }

 private:
  NormTablePtr norms_;
  std::vector<bool> prime_;
  std::vector<NormedString> decomposition_;
};

// B' under construction: constants are settled strictly in index order, and
// dcmp may only look at settled constants.
class PartialBase {
 public:
  explicit PartialBase(NormTablePtr norms) : norms_(std::move(norms)) {}

  std::size_t settled() const { return decomposition_.size(); }
  bool is_prime(ConstantId c) const {
    ensure(c < settled(), "primality of an unsettled constant");
    return !decomposition_[c].has_value();
  }

  void settle_prime(ConstantId c) {
    ensure(c == settled(), "constants must be settled in index order");
    decomposition_.emplace_back(std::nullopt);
  }

  void settle_equation(ConstantId c, NormedString alpha) {
    ensure(c == settled(), "constants must be settled in index order");
    decomposition_.emplace_back(std::move(alpha));
  }

  NormedString dcmp(const Process& p) const {
    Process word;
    for (auto c : p) {
      if (c >= settled())
        throw InternalError("dcmp over the new base demanded for unsettled constant index " + std::to_string(c + 1));
      if (decomposition_[c]) {
        const auto& d = decomposition_[c]->word();
        word.insert(word.end(), d.begin(), d.end());
      } else {
        word.push_back(c);
      }
    }
    return NormedString(norms_, std::move(word));
  }

  NormedString dcmp(const NormedString& s) const { return dcmp(s.word()); }

  DecompositionBase finish() const {
    ensure(settled() == norms_->size(), "finishing a partially settled base");
    return DecompositionBase(norms_, decomposition_);
  }

 private:
  NormTablePtr norms_;
  std::vector<std::optional<NormedString>> decomposition_;
};

// P = {X1}; every other X_i = X1^norm(X_i). Relates exactly the processes of equal norm.
inline DecompositionBase initial_base(const StandardSystem& std_sys) {
  std::vector<std::optional<NormedString>> decomposition(std_sys.size());
  for (ConstantId c = 1; c < std_sys.size(); ++c) {
    decomposition[c] = NormedString(std_sys.norms, Process(std_sys.norm(c), ConstantId{0}));
  }
  return DecompositionBase(std_sys.norms, decomposition);
}

// One line per constant: "prime X" or "X = Y Z Z".
inline std::string format_base(const BpaSystem& sys, const DecompositionBase& base) {
  std::string out;
  for (ConstantId c = 0; c < base.size(); ++c) {
    if (base.is_prime(c))
      out += "prime " + sys.constant_name(c) + "\n";
    else
      out += sys.constant_name(c) + " = " + format_string(sys, base.decomposition(c)) + "\n";
  }
  return out;
}

inline nlohmann::ordered_json base_to_json(const BpaSystem& sys, const DecompositionBase& base) {
  nlohmann::ordered_json primes = nlohmann::ordered_json::array();
  nlohmann::ordered_json equations = nlohmann::ordered_json::object();
  for (ConstantId c = 0; c < base.size(); ++c) {
    if (base.is_prime(c)) {
      primes.push_back(sys.constant_name(c));
    } else {
      nlohmann::ordered_json rhs = nlohmann::ordered_json::array();
      for (auto p : base.decomposition(c).word()) rhs.push_back(sys.constant_name(p));
      equations[sys.constant_name(c)] = rhs;
    }
  }
  return {{"primes", primes}, {"equations", equations}};
}

}  // namespace tnbpa
