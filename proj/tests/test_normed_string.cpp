#include <catch_amalgamated.hpp>

#include <random>

#include "support.hpp"

using namespace tnbpa;
using namespace testing_support;

namespace {

NormTablePtr table(std::initializer_list<std::uint64_t> ns) {
  NormTable t;
  for (auto n : ns) t.emplace_back(n);
  return std::make_shared<const NormTable>(std::move(t));
}

// Suffix of norm h by scanning from the right.
std::optional<Process> naive_suffix(const NormTable& t, const Process& w, std::uint64_t h) {
  std::uint64_t acc = 0;
  for (std::size_t i = w.size(); i-- > 0 && acc < h;) {
    acc += t[w[i]].value();
    if (acc == h) return Process(w.begin() + static_cast<std::ptrdiff_t>(i), w.end());
  }
  if (h == 0) return Process{};
  return std::nullopt;
}

}  // namespace

TEST_CASE("norm and length") {
  auto t = table({1, 2, 3});
  NormedString s(t, Process{0, 2, 1, 1});
  CHECK(s.norm() == 8);
  CHECK(s.length() == 4);
  CHECK(s.front() == 0);
  CHECK(NormedString(t).norm() == 0);
  CHECK(NormedString(t).empty());
  CHECK_THROWS_AS(NormedString(t).front(), InternalError);
}

TEST_CASE("split at a norm boundary") {
  auto t = table({1, 2, 3});
  NormedString s(t, Process{2, 1, 0});  // norms 3 2 1
  auto at3 = s.split_at_norm(3);
  REQUIRE(at3.has_value());
  CHECK(at3->first.word() == Process{2});
  CHECK(at3->second.word() == Process{1, 0});
  CHECK_FALSE(s.split_at_norm(2).has_value());
  CHECK(s.split_at_norm(0)->second.empty());
  CHECK(s.split_at_norm(6)->first.empty());
  CHECK_THROWS_AS(s.split_at_norm(7), Error);
  CHECK(s.suffix_with_norm(1)->word() == Process{0});
  CHECK_FALSE(s.suffix_with_norm(4).has_value());
}

TEST_CASE("splitting agrees with a right-to-left scan") {
  std::mt19937_64 rng(3);
  auto t = table({1, 1, 2, 3, 5});
  for (int trial = 0; trial < 500; ++trial) {
    Process w(rng() % 7);
    for (auto& c : w) c = static_cast<ConstantId>(rng() % 5);
    NormedString s(t, w);
    for (std::uint64_t h = 0; h <= s.norm(); ++h) {
      auto fast = s.suffix_with_norm(h);
      auto slow = naive_suffix(*t, w, h);
      REQUIRE(fast.has_value() == slow.has_value());
      if (fast) {
        REQUIRE(fast->word() == *slow);
        REQUIRE(fast->norm() == h);
      }
    }
  }
}

TEST_CASE("concatenation adds norms") {
  std::mt19937_64 rng(9);
  auto t = table({1, 4, 2});
  for (int trial = 0; trial < 200; ++trial) {
    Process a(rng() % 5), b(rng() % 5);
    for (auto& c : a) c = static_cast<ConstantId>(rng() % 3);
    for (auto& c : b) c = static_cast<ConstantId>(rng() % 3);
    const NormedString sa(t, a), sb(t, b);
    const auto ab = concat(sa, sb);
    REQUIRE(ab.norm() == sa.norm() + sb.norm());
    REQUIRE(ab.word() == concat(a, b));
    REQUIRE(equal(ab, NormedString(t, concat(a, b))));
    if (!b.empty()) REQUIRE(ab.suffix_with_norm(sb.norm())->word() == b);
  }
  CHECK_THROWS_AS(concat(NormedString(t, Process{0}), NormedString(table({1}), Process{0})), Error);
  CHECK(concat(NormedString(), NormedString(t, Process{1})).norm() == 4);
}

TEST_CASE("equality and slicing") {
  auto t = table({1, 1});
  CHECK(NormedString(t, Process{0, 1}) == NormedString(t, Process{0, 1}));
  CHECK_FALSE(NormedString(t, Process{0, 1}) == NormedString(t, Process{1, 0}));
  CHECK(NormedString(t, Process{0, 1, 1}).slice(1, 3).word() == Process{1, 1});
}

TEST_CASE("constants without positive finite norm are rejected") {
  NormTable t{Norm(1), Norm::infinite(), Norm(0)};
  auto p = std::make_shared<const NormTable>(t);
  CHECK_THROWS_AS(NormedString(p, Process{1}), InternalError);
  CHECK_THROWS_AS(NormedString(p, Process{2}), InternalError);
  CHECK_NOTHROW(NormedString(p, Process{0}));
}
