#pragma once

// Fixtures and deliberately naive reference implementations used as independent
// oracles by the tests.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tnbpa/tnbpa.hpp"

namespace testing_support {

using namespace tnbpa;

inline std::string fixture_path(const std::string& name) { return std::string(TNBPA_SYSTEMS_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline BpaSystem fixture(const std::string& name) { return parse_system(read_fixture(name)); }

inline std::vector<std::string> names_of(const BpaSystem& sys) { return sys.constant_names(); }

// Norms by value iteration to a fixpoint; unnormed constants stay at "infinity".
inline std::vector<std::uint64_t> naive_norms(const BpaSystem& sys) {
  constexpr auto inf = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> n(sys.constant_count(), inf);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : sys.rules()) {
      std::uint64_t total = r.action.is_silent() ? 0 : 1;
      for (auto c : r.rhs) total = (n[c] == inf || total == inf) ? inf : total + n[c];
      if (total < n[r.lhs]) {
        n[r.lhs] = total;
        changed = true;
      }
    }
  }
  return n;
}

// Transitive reachability over unary silent rules that keep the norm.
inline std::vector<std::vector<bool>> naive_silent_reach(const BpaSystem& sys, const std::vector<std::uint64_t>& norms) {
  const auto n = sys.constant_count();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (ConstantId c = 0; c < n; ++c) reach[c][c] = true;
  for (const auto& r : sys.rules())
    if (r.action.is_silent() && r.rhs.size() == 1 && norms[r.lhs] == norms[r.rhs[0]]) reach[r.lhs][r.rhs[0]] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  return reach;
}

inline std::uint64_t naive_norm(const std::vector<std::uint64_t>& norms, const Process& p) {
  std::uint64_t t = 0;
  for (auto c : p) t += norms[c];
  return t;
}

// All processes reachable by silent steps whose norm equals the start's.
// Explores every silent step, then filters, so it does not rely on the
// decreasing classification.
inline std::set<Process> naive_silent_closure(const BpaSystem& sys, const Process& p, std::size_t max_len = 12) {
  const auto norms = naive_norms(sys);
  const auto target = naive_norm(norms, p);
  std::set<Process> seen{p};
  std::vector<Process> stack{p};
  while (!stack.empty()) {
    Process cur = stack.back();
    stack.pop_back();
    if (cur.empty()) continue;
    for (const auto& r : sys.rules()) {
      if (r.lhs != cur.front() || !r.action.is_silent()) continue;
      Process next = r.rhs;
      next.insert(next.end(), cur.begin() + 1, cur.end());
      if (next.size() > max_len || naive_norm(norms, next) != target) continue;
      if (seen.insert(next).second) stack.push_back(next);
    }
  }
  return seen;
}

// Level-k relatedness without memo or shortcuts; exponential, for tiny k only.
inline bool naive_related(const BpaSystem& sys, const Process& p, const Process& q, unsigned k) {
  const auto norms = naive_norms(sys);
  std::function<bool(const Process&, const Process&, unsigned)> rel = [&](const Process& a, const Process& b,
                                                                          unsigned level) -> bool {
    if (naive_norm(norms, a) != naive_norm(norms, b)) return false;
    if (level == 0) return true;
    auto one_side = [&](const Process& x, const Process& y) {
      for (const auto& t : transitions_of(sys, x)) {
        bool ok = t.action.is_silent() && rel(t.target, y, level - 1);
        for (const auto& mid : naive_silent_closure(sys, y)) {
          if (ok) break;
          for (const auto& u : transitions_of(sys, mid)) {
            if (u.action == t.action && rel(x, mid, level - 1) && rel(t.target, u.target, level - 1)) {
              ok = true;
              break;
            }
          }
        }
        if (!ok) return false;
      }
      return true;
    };
    return one_side(a, b) && one_side(b, a);
  };
  return rel(p, q, k);
}

// Generator settings used throughout the property tests.
inline GenParams small_params(std::uint64_t seed, std::size_t constants = 6) {
  GenParams g;
  g.constants = constants;
  g.seed = seed;
  return g;
}

}  // namespace testing_support
