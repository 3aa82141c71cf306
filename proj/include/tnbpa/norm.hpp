#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tnbpa/core_model.hpp"
#include "tnbpa/error.hpp"

namespace tnbpa {

// Number of visible actions needed to terminate. Infinity is an explicit state,
// never a sentinel integer.
class Norm {
 public:
  constexpr Norm() = default;
  constexpr explicit Norm(std::uint64_t value) : value_(value), finite_(true) {}

  static constexpr Norm infinite() { return Norm(); }

  constexpr bool is_finite() const { return finite_; }

  std::uint64_t value() const {
    ensure(finite_, "value() of an infinite norm");
    return value_;
  }

  friend Norm operator+(Norm a, Norm b) {
    if (!a.finite_ || !b.finite_) return infinite();
    if (a.value_ > std::numeric_limits<std::uint64_t>::max() - b.value_)
      throw Error("norm exceeds 64-bit range");
    return Norm(a.value_ + b.value_);
  }

  friend constexpr bool operator==(Norm a, Norm b) {
    return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
  }

  friend constexpr std::strong_ordering operator<=>(Norm a, Norm b) {
    if (a.finite_ != b.finite_) return a.finite_ ? std::strong_ordering::less : std::strong_ordering::greater;
    if (!a.finite_) return std::strong_ordering::equal;
    return a.value_ <=> b.value_;
  }

  std::string to_string() const { return finite_ ? std::to_string(value_) : std::string("inf"); }

 private:
  std::uint64_t value_ = 0;
  bool finite_ = false;
};

using NormTable = std::vector<Norm>;

inline Norm norm_of(const NormTable& table, const Process& p) {
  Norm total(0);
  for (auto c : p) total = total + table.at(c);
  return total;
}

}  // namespace tnbpa
