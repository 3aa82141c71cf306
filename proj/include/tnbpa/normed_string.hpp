#pragma once

// Words over constants with constant-time total norm and norm-boundary splitting.
//
// Exact baseline: the word is stored explicitly with a prefix-sum index; split
// is a binary search. A compressed representation can replace it behind the
// same interface.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tnbpa/core_model.hpp"
#include "tnbpa/error.hpp"
#include "tnbpa/norm.hpp"

namespace tnbpa {

using NormTablePtr = std::shared_ptr<const NormTable>;

class NormedString {
 public:
  NormedString() = default;

  explicit NormedString(NormTablePtr table) : table_(std::move(table)), prefix_{0} {}

  NormedString(NormTablePtr table, Process word) : table_(std::move(table)), word_(std::move(word)) {
    ensure(table_ != nullptr, "NormedString without a norm table");
    rebuild_index();
  }

  NormedString(NormTablePtr table, ConstantId c) : NormedString(std::move(table), Process{c}) {}

  const Process& word() const { return word_; }
  std::size_t length() const { return word_.size(); }
  bool empty() const { return word_.empty(); }
  std::uint64_t norm() const { return prefix_.empty() ? 0 : prefix_.back(); }
  const NormTablePtr& table() const { return table_; }

  ConstantId front() const {
    ensure(!word_.empty(), "front() of the empty string");
    return word_.front();
  }

  friend NormedString concat(const NormedString& a, const NormedString& b) {
    if (a.table_ == nullptr) return b;
    if (b.table_ == nullptr) return a;
    if (a.table_ != b.table_) throw Error("concatenating strings built over different norm tables");
    NormedString out;
    out.table_ = a.table_;
    out.word_ = tnbpa::concat(a.word_, b.word_);
    out.prefix_ = a.prefix_.empty() ? std::vector<std::uint64_t>{0} : a.prefix_;
    const std::uint64_t base = a.norm();
    for (std::size_t i = 1; i < b.prefix_.size(); ++i) out.prefix_.push_back(base + b.prefix_[i]);
    return out;
  }

  // Splits into (prefix, suffix) with norm(suffix) == h. nullopt when no constant
  // boundary falls at that norm.
  std::optional<std::pair<NormedString, NormedString>> split_at_norm(std::uint64_t h) const {
    if (h > norm()) throw Error("split_at_norm: " + std::to_string(h) + " exceeds norm " + std::to_string(norm()));
    const std::uint64_t cut = norm() - h;
    const std::vector<std::uint64_t> zero{0};
    const auto& prefix = prefix_.empty() ? zero : prefix_;
    auto it = std::lower_bound(prefix.begin(), prefix.end(), cut);
    if (it == prefix.end() || *it != cut) return std::nullopt;
    auto index = static_cast<std::size_t>(it - prefix.begin());
    return std::make_pair(slice(0, index), slice(index, word_.size()));
  }

  // sffx(h; s): the suffix of norm exactly h, if a boundary exists there.
  std::optional<NormedString> suffix_with_norm(std::uint64_t h) const {
    auto parts = split_at_norm(h);
    if (!parts) return std::nullopt;
    return std::move(parts->second);
  }

  NormedString slice(std::size_t from, std::size_t to) const {
    return NormedString(table_, Process(word_.begin() + static_cast<std::ptrdiff_t>(from),
                                        word_.begin() + static_cast<std::ptrdiff_t>(to)));
  }

  friend bool equal(const NormedString& a, const NormedString& b) {
    if (a.norm() != b.norm() || a.word_.size() != b.word_.size()) return false;
    return a.word_ == b.word_;
  }

  friend bool operator==(const NormedString& a, const NormedString& b) { return equal(a, b); }

  friend auto operator<=>(const NormedString& a, const NormedString& b) { return a.word_ <=> b.word_; }

 private:
  void rebuild_index() {
    prefix_.assign(1, 0);
    prefix_.reserve(word_.size() + 1);
    for (auto c : word_) {
      const Norm n = table_->at(c);
      ensure(n.is_finite() && n.value() > 0, "normed string over a constant without positive finite norm");
      prefix_.push_back(prefix_.back() + n.value());
    }
  }

  NormTablePtr table_;
  Process word_;
  std::vector<std::uint64_t> prefix_;  // prefix_[i] = norm of the first i constants
};

inline std::string format_string(const BpaSystem& sys, const NormedString& s) {
  return format_process(sys, s.word());
}

}  // namespace tnbpa
