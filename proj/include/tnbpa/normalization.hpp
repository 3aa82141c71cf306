#pragma once

// Norms, rule classification, silent-loop contraction and the standard
// norm-ordered form of a totally normed system.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "tnbpa/core_model.hpp"
#include "tnbpa/error.hpp"
#include "tnbpa/norm.hpp"

namespace tnbpa {

enum class RuleClass { Decreasing, Increasing };

// Least fixpoint of norm(X) = min over rules (cost(action) + norm(rhs)), with
// cost 0 for tau and 1 otherwise. Knuth's generalisation of Dijkstra over the
// rule hypergraph: a rule fires once every rhs occurrence is settled.
inline NormTable compute_norms(const BpaSystem& sys) {
  const std::size_t n = sys.constant_count();
  const auto& rules = sys.rules();
  std::vector<std::size_t> pending(rules.size());
  std::vector<Norm> partial(rules.size());
  std::vector<std::vector<std::size_t>> users(n);

  using Entry = std::pair<std::uint64_t, ConstantId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;

  for (std::size_t r = 0; r < rules.size(); ++r) {
    pending[r] = rules[r].rhs.size();
    partial[r] = Norm(rules[r].action.is_silent() ? 0 : 1);
    for (auto c : rules[r].rhs) users[c].push_back(r);
    if (pending[r] == 0) queue.emplace(partial[r].value(), rules[r].lhs);
  }

  NormTable norms(n, Norm::infinite());
  while (!queue.empty()) {
    auto [value, c] = queue.top();
    queue.pop();
    if (norms[c].is_finite()) continue;
    norms[c] = Norm(value);
    for (auto r : users[c]) {
      partial[r] = partial[r] + norms[c];
      if (--pending[r] == 0) queue.emplace(partial[r].value(), rules[r].lhs);
    }
  }
  return norms;
}

struct NormednessReport {
  std::vector<ConstantId> unnormed;
  std::vector<std::size_t> silent_erasures;  // rule indices of X -tau-> eps

  bool ok() const { return unnormed.empty() && silent_erasures.empty(); }

  std::string describe(const BpaSystem& sys) const {
    std::string out;
    for (auto c : unnormed) out += "constant " + sys.constant_name(c) + " cannot terminate\n";
    for (auto r : silent_erasures) out += "forbidden silent erasure: " + format_rule(sys, sys.rule(r)) + "\n";
    return out;
  }
};

inline NormednessReport check_totally_normed(const BpaSystem& sys, const NormTable& norms) {
  NormednessReport report;
  for (ConstantId c = 0; c < sys.constant_count(); ++c)
    if (!norms.at(c).is_finite()) report.unnormed.push_back(c);
  for (std::size_t r = 0; r < sys.rules().size(); ++r) {
    const auto& rule = sys.rule(r);
    if (rule.action.is_silent() && rule.rhs.empty()) report.silent_erasures.push_back(r);
  }
  return report;
}

inline RuleClass classify(const Rule& rule, const NormTable& norms) {
  const Norm lhs = norms.at(rule.lhs);
  const Norm rhs = norm_of(norms, rule.rhs);
  if (rule.action.is_silent()) return rhs == lhs ? RuleClass::Decreasing : RuleClass::Increasing;
  return rhs + Norm(1) == lhs ? RuleClass::Decreasing : RuleClass::Increasing;
}

// Every constant must own at least one decreasing rule (the one witnessing its norm).
inline std::vector<RuleClass> classify_rules(const BpaSystem& sys, const NormTable& norms) {
  std::vector<RuleClass> classes;
  classes.reserve(sys.rules().size());
  std::vector<bool> has_decreasing(sys.constant_count(), false);
  for (const auto& rule : sys.rules()) {
    ensure(norms.at(rule.lhs).is_finite(), "classify_rules on a constant with infinite norm");
    classes.push_back(classify(rule, norms));
    if (classes.back() == RuleClass::Decreasing) has_decreasing[rule.lhs] = true;
  }
  for (ConstantId c = 0; c < sys.constant_count(); ++c)
    ensure(has_decreasing[c], "constant " + sys.constant_name(c) + " has no decreasing rule");
  return classes;
}

namespace detail {

// Unary silent norm-preserving edges X -> Y, the only rules that can close a silent loop.
inline std::vector<std::vector<ConstantId>> silent_unary_graph(const BpaSystem& sys, const NormTable& norms) {
  std::vector<std::vector<ConstantId>> succ(sys.constant_count());
  for (const auto& rule : sys.rules())
    if (rule.action.is_silent() && rule.rhs.size() == 1 && classify(rule, norms) == RuleClass::Decreasing)
      succ[rule.lhs].push_back(rule.rhs.front());
  return succ;
}

// Tarjan's strongly connected components; returns a component id per vertex.
inline std::vector<std::size_t> strongly_connected(const std::vector<std::vector<ConstantId>>& succ) {
  const std::size_t n = succ.size();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<bool> on_stack(n, false);
  std::vector<ConstantId> stack;
  std::size_t counter = 0, components = 0;

  std::function<void(ConstantId)> visit = [&](ConstantId v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (auto w : succ[v]) {
      if (index[w] == kUnset) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      ConstantId w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = components;
      } while (w != v);
      ++components;
    }
  };
  for (ConstantId v = 0; v < n; ++v)
    if (index[v] == kUnset) visit(v);
  return comp;
}

inline BpaSystem substitute(const BpaSystem& sys, const std::vector<ConstantId>& new_id,
                            std::vector<std::string> new_names, bool drop_silent_self_loops) {
  std::vector<Rule> rules;
  for (const auto& rule : sys.rules()) {
    Rule r{new_id[rule.lhs], rule.action, {}};
    r.rhs.reserve(rule.rhs.size());
    for (auto c : rule.rhs) r.rhs.push_back(new_id[c]);
    if (drop_silent_self_loops && r.action.is_silent() && r.rhs.size() == 1 && r.rhs.front() == r.lhs) continue;
    rules.push_back(std::move(r));
  }
  return BpaSystem(std::move(new_names), sys.action_table(), std::move(rules));
}

}  // namespace detail

struct Contraction {
  BpaSystem system;
  // For each constant of the input, its id in the contracted system.
  std::vector<ConstantId> representative;
};

// Collapses every silent norm-preserving loop X => Y => X to the member declared first.
inline Contraction contract_loops(const BpaSystem& sys, const NormTable& norms) {
  const std::size_t n = sys.constant_count();
  auto comp = detail::strongly_connected(detail::silent_unary_graph(sys, norms));

  std::vector<ConstantId> leader(n);
  std::map<std::size_t, ConstantId> first_of_component;
  for (ConstantId c = 0; c < n; ++c) first_of_component.try_emplace(comp[c], c);
  for (ConstantId c = 0; c < n; ++c) leader[c] = first_of_component.at(comp[c]);

  std::vector<ConstantId> new_id(n);
  std::vector<std::string> names;
  for (ConstantId c = 0; c < n; ++c) {
    if (leader[c] == c) {
      new_id[c] = static_cast<ConstantId>(names.size());
      names.push_back(sys.constant_name(c));
    }
  }
  for (ConstantId c = 0; c < n; ++c) new_id[c] = new_id[leader[c]];
  return Contraction{detail::substitute(sys, new_id, std::move(names), true), std::move(new_id)};
}

// A contracted tnBPA system whose constant ids are the standard indices:
// id 0 is X1, norms are non-decreasing, and every decreasing rule of X_i only
// mentions constants of smaller index.
struct StandardSystem {
  BpaSystem system;
  std::shared_ptr<const NormTable> norms;
  std::vector<RuleClass> classes;         // per rule of `system`
  std::vector<std::size_t> origin;        // standard id -> declaration index in the input
  std::vector<ConstantId> from_input;     // input id -> standard id
  std::map<std::string, ConstantId> name_map;  // input name -> standard id

  std::size_t size() const { return system.constant_count(); }
  std::uint64_t norm(ConstantId c) const { return norms->at(c).value(); }
  std::uint64_t norm(const Process& p) const { return norm_of(*norms, p).value(); }
  bool is_decreasing(std::size_t rule) const { return classes.at(rule) == RuleClass::Decreasing; }

  // Process over input constants -> process over standard constants.
  Process translate(const Process& input) const {
    Process out;
    out.reserve(input.size());
    for (auto c : input) out.push_back(from_input.at(c));
    return out;
  }

  // Parses a process written with input names (contracted names resolve to their representative).
  Process parse(std::string_view text) const {
    detail::LineCursor cur(text, 1);
    Process p;
    bool saw_eps = false;
    for (;;) {
      cur.skip_space();
      if (cur.at_end()) break;
      auto col = cur.column();
      if (!detail::is_ident_start(cur.peek())) cur.fail("expected a constant name");
      std::string name(cur.take_while(detail::is_constant_char));
      if (name == kEmptyName) {
        saw_eps = true;
        continue;
      }
      auto it = name_map.find(name);
      if (it == name_map.end()) throw ParseError(1, col, "unknown constant '" + name + "'");
      p.push_back(it->second);
    }
    if (saw_eps && !p.empty()) throw ParseError(1, 1, "'eps' must stand alone");
    if (!saw_eps && p.empty()) throw ParseError(1, 1, "empty process; write 'eps'");
    return p;
  }
};

// Silent-decreasing depth: length of the longest chain X -tau-> Y -tau-> ... of
// unary silent norm-preserving rules. Requires an acyclic graph (after contraction).
inline std::vector<std::size_t> silent_depths(const BpaSystem& sys, const NormTable& norms) {
  auto succ = detail::silent_unary_graph(sys, norms);
  const std::size_t n = sys.constant_count();
  std::vector<int> state(n, 0);  // 0 new, 1 active, 2 done
  std::vector<std::size_t> depth(n, 0);
  std::function<void(ConstantId)> visit = [&](ConstantId v) {
    state[v] = 1;
    for (auto w : succ[v]) {
      if (state[w] == 1) throw InternalError("silent loop survived contraction at " + sys.constant_name(v));
      if (state[w] == 0) visit(w);
      depth[v] = std::max(depth[v], depth[w] + 1);
    }
    state[v] = 2;
  };
  for (ConstantId v = 0; v < n; ++v)
    if (state[v] == 0) visit(v);
  return depth;
}

inline void check_standard_form(const StandardSystem& std_sys) {
  const auto& sys = std_sys.system;
  for (ConstantId c = 0; c + 1 < sys.constant_count(); ++c)
    ensure(std_sys.norm(c) <= std_sys.norm(c + 1), "standard order is not norm-sorted");
  for (std::size_t r = 0; r < sys.rules().size(); ++r) {
    const auto& rule = sys.rule(r);
    ensure(!(rule.action.is_silent() && rule.rhs.empty()), "silent erasure in a standard system");
    if (!std_sys.is_decreasing(r)) continue;
    for (auto c : rule.rhs)
      ensure(c < rule.lhs, "decreasing rule " + format_rule(sys, rule) + " reaches a constant of index >= its own");
  }
}

inline StandardSystem standardize(const BpaSystem& input) {
  auto input_norms = compute_norms(input);
  auto report = check_totally_normed(input, input_norms);
  if (!report.ok()) throw NormednessError("system is not totally normed:\n" + report.describe(input));

  Contraction contracted = contract_loops(input, input_norms);
  const BpaSystem& sys = contracted.system;
  NormTable norms = compute_norms(sys);
  auto depth = silent_depths(sys, norms);

  // Contracted ids preserve declaration order, so the id doubles as the final tie-break.
  std::vector<ConstantId> order(sys.constant_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](ConstantId a, ConstantId b) {
    if (norms[a] != norms[b]) return norms[a] < norms[b];
    return depth[a] < depth[b];
  });

  std::vector<ConstantId> position(order.size());
  std::vector<std::string> names;
  NormTable sorted_norms;
  for (std::size_t i = 0; i < order.size(); ++i) {
    position[order[i]] = static_cast<ConstantId>(i);
    names.push_back(sys.constant_name(order[i]));
    sorted_norms.push_back(norms[order[i]]);
  }

  StandardSystem out{detail::substitute(sys, position, std::move(names), false),
                     std::make_shared<const NormTable>(std::move(sorted_norms)),
                     {},
                     {},
                     {},
                     {}};
  out.classes = classify_rules(out.system, *out.norms);

  std::vector<std::size_t> first_input(sys.constant_count(), 0);
  for (std::size_t c = input.constant_count(); c-- > 0;) first_input[contracted.representative[c]] = c;
  for (ConstantId i = 0; i < order.size(); ++i) out.origin.push_back(first_input[order[i]]);
  for (ConstantId c = 0; c < input.constant_count(); ++c) {
    out.from_input.push_back(position[contracted.representative[c]]);
    out.name_map.emplace(input.constant_name(c), out.from_input.back());
  }
  check_standard_form(out);
  return out;
}

}  // namespace tnbpa
