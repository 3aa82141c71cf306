#pragma once

// Independent ground truth for branching bisimilarity.
//
// Level 0 relates processes of equal norm; level k+1 keeps the pairs of level k
// whose every move is answered, per the branching clauses, by a reply related
// at level k. Bisimilarity is contained in every level, so failing any level is
// a sound refutation. Passing a level proves nothing.
//
// Defender replies only ever need norm-preserving silent prefixes: silent steps
// never lower the norm and every level relates equal norms only. Those prefixes
// are enumerated exactly.

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tnbpa/core_model.hpp"
#include "tnbpa/error.hpp"
#include "tnbpa/normalization.hpp"

namespace tnbpa {

struct ProcessHash {
  std::size_t operator()(const Process& p) const noexcept {
    std::size_t h = p.size();
    for (auto c : p) h ^= c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

struct ProcessPairHash {
  std::size_t operator()(const std::pair<Process, Process>& pq) const noexcept {
    ProcessHash h;
    return h(pq.first) * 31 + h(pq.second);
  }
};

// Processes reachable through silent norm-preserving steps, with BFS parents.
struct SilentClosure {
  std::vector<Process> states;                 // states[0] is the origin
  std::vector<std::optional<std::size_t>> parent;
};

inline SilentClosure silent_closure_dec(const BpaSystem& sys, const NormTable& norms, const Process& origin,
                                        std::size_t guard = 100000) {
  SilentClosure out;
  std::unordered_map<Process, std::size_t, ProcessHash> seen;
  out.states.push_back(origin);
  out.parent.push_back(std::nullopt);
  seen.emplace(origin, 0);
  for (std::size_t i = 0; i < out.states.size(); ++i) {
    const Process current = out.states[i];
    for (auto& t : transitions_of(sys, current)) {
      if (!t.action.is_silent() || classify(sys.rule(t.rule), norms) != RuleClass::Decreasing) continue;
      if (seen.count(t.target)) continue;
      if (out.states.size() >= guard) throw GuardExceeded("silent closure exceeds " + std::to_string(guard) + " states");
      seen.emplace(t.target, out.states.size());
      out.states.push_back(std::move(t.target));
      out.parent.push_back(i);
    }
  }
  return out;
}

// Machine-checkable refutation. A node without an attack is a norm mismatch.
// Otherwise the attacker plays `attack` on one side and every defender reply is
// listed with a refutation of the pair it would have to keep related.
struct Distinction {
  struct Attack {
    bool on_left = true;
    Action action;
    Process target;
  };
  struct Reply {
    bool stay = false;      // silent attack answered by not moving
    Process intermediate;   // defender state after its silent prefix (moves only)
    Process target;         // defender state after the matching step (moves only)
    std::shared_ptr<const Distinction> refutation;
  };

  Process left;
  Process right;
  std::optional<Attack> attack;
  std::vector<Reply> replies;
};

struct OracleLimits {
  std::size_t max_pairs = 3'000'000;
  std::size_t max_closure = 100'000;
};

class BranchingOracle {
 public:
  explicit BranchingOracle(const BpaSystem& sys, OracleLimits limits = {})
      : sys_(sys), norms_(compute_norms(sys)), limits_(limits) {
    auto report = check_totally_normed(sys_, norms_);
    if (!report.ok()) throw NormednessError("oracle needs a totally normed system:\n" + report.describe(sys_));
  }

  const BpaSystem& system() const { return sys_; }
  const NormTable& norms() const { return norms_; }
  std::uint64_t norm(const Process& p) const { return norm_of(norms_, p).value(); }
  std::size_t pairs_explored() const { return memo_.size(); }

  const std::vector<Process>& closure(const Process& p) {
    auto it = closures_.find(p);
    if (it != closures_.end()) return it->second;
    auto c = silent_closure_dec(sys_, norms_, p, limits_.max_closure);
    return closures_.emplace(p, std::move(c.states)).first->second;
  }

  // Do p and q survive k rounds?
  bool related(const Process& p, const Process& q, unsigned k) {
    if (p == q) return true;
    if (norm(p) != norm(q)) return false;
    if (k == 0) return true;

    auto key = p < q ? std::make_pair(p, q) : std::make_pair(q, p);
    auto found = memo_.find(key);
    if (found == memo_.end()) {
      if (memo_.size() >= limits_.max_pairs)
        throw GuardExceeded("oracle explored more than " + std::to_string(limits_.max_pairs) + " pairs");
      found = memo_.emplace(key, Levels{}).first;
    }
    Levels& levels = found->second;  // node-stable across rehashing
    if (k <= levels.max_true) return true;
    if (k >= levels.min_false) return false;

    // Levels are congruences: a related core extends to any common context.
    auto [core_p, core_q] = strip_common_context(p, q);
    if (core_p.size() != p.size() && related(core_p, core_q, k)) {
      levels.max_true = std::max(levels.max_true, k);
      return true;
    }

    for (unsigned level = levels.max_true + 1; level <= k; ++level) {
      if (!round_holds(p, q, level)) {
        levels.min_false = level;
        return false;
      }
      levels.max_true = level;
    }
    return true;
  }

  // Smallest level <= k_max at which p and q are separated, if any.
  std::optional<unsigned> refuting_level(const Process& p, const Process& q, unsigned k_max) {
    if (related(p, q, k_max)) return std::nullopt;
    if (norm(p) != norm(q)) return 0U;
    auto key = p < q ? std::make_pair(p, q) : std::make_pair(q, p);
    auto it = memo_.find(key);
    if (it != memo_.end() && it->second.min_false <= k_max) return it->second.min_false;
    // Refuted through the context shortcut never happens (it only proves), so
    // min_false is always recorded; fall back to a scan for safety.
    for (unsigned level = 1; level <= k_max; ++level)
      if (!related(p, q, level)) return level;
    return std::nullopt;
  }

  // A replayable Distinction when some level <= k_max separates p and q.
  std::shared_ptr<const Distinction> find_distinction(const Process& p, const Process& q, unsigned k_max) {
    auto level = refuting_level(p, q, k_max);
    if (!level) return nullptr;
    std::unordered_map<std::pair<Process, Process>, std::shared_ptr<const Distinction>, ProcessPairHash> built;
    return build(p, q, *level, built);
  }

 private:
  struct Levels {
    unsigned max_true = 0;
    unsigned min_false = ~0U;
  };

  static std::pair<Process, Process> strip_common_context(const Process& p, const Process& q) {
    std::size_t front = 0;
    while (front < p.size() && front < q.size() && p[front] == q[front]) ++front;
    std::size_t back = 0;
    while (back < p.size() - front && back < q.size() - front && p[p.size() - 1 - back] == q[q.size() - 1 - back])
      ++back;
    return {Process(p.begin() + static_cast<std::ptrdiff_t>(front), p.end() - static_cast<std::ptrdiff_t>(back)),
            Process(q.begin() + static_cast<std::ptrdiff_t>(front), q.end() - static_cast<std::ptrdiff_t>(back))};
  }

  struct Failure {
    bool on_left;
    Transition move;
  };

  // Attacker move on `a` (against defender `b`) with no reply surviving level-1.
  std::optional<Transition> winning_attack(const Process& a, const Process& b, unsigned level) {
    for (auto& move : transitions_of(sys_, a)) {
      if (!answered(a, b, move, level)) return move;
    }
    return std::nullopt;
  }

  bool answered(const Process& a, const Process& b, const Transition& move, unsigned level) {
    if (move.action.is_silent() && related(move.target, b, level - 1)) return true;
    const auto target_norm = norm(move.target);
    const std::vector<Process> prefix = closure(b);  // copy: closure() may rehash
    for (const auto& mid : prefix) {
      for (auto& reply : transitions_of(sys_, mid)) {
        if (reply.action != move.action || norm(reply.target) != target_norm) continue;
        if (related(a, mid, level - 1) && related(move.target, reply.target, level - 1)) return true;
      }
    }
    return false;
  }

  bool round_holds(const Process& p, const Process& q, unsigned level) {
    return !winning_attack(p, q, level) && !winning_attack(q, p, level);
  }

  using BuiltMap = std::unordered_map<std::pair<Process, Process>, std::shared_ptr<const Distinction>, ProcessPairHash>;

  std::shared_ptr<const Distinction> build(const Process& left, const Process& right, unsigned level, BuiltMap& built) {
    auto key = std::make_pair(left, right);
    if (auto it = built.find(key); it != built.end()) return it->second;

    auto node = std::make_shared<Distinction>();
    node->left = left;
    node->right = right;
    if (norm(left) == norm(right)) {
      ensure(level > 0, "distinction requested for pairs related at level 0");
      bool on_left = true;
      auto attack = winning_attack(left, right, level);
      if (!attack) {
        on_left = false;
        attack = winning_attack(right, left, level);
      }
      ensure(attack.has_value(), "no winning attack at a refuted level");
      const Process& a = on_left ? left : right;
      const Process& b = on_left ? right : left;
      node->attack = Distinction::Attack{on_left, attack->action, attack->target};

      auto oriented = [&](const Process& from_a, const Process& from_b) {
        return on_left ? std::make_pair(from_a, from_b) : std::make_pair(from_b, from_a);
      };
      auto refute = [&](const std::pair<Process, Process>& pair) {
        auto sub = refuting_level(pair.first, pair.second, level - 1);
        ensure(sub.has_value(), "reply pair unexpectedly related");
        return build(pair.first, pair.second, *sub, built);
      };

      if (attack->action.is_silent()) {
        node->replies.push_back(Distinction::Reply{true, {}, {}, refute(oriented(attack->target, b))});
      }
      const std::vector<Process> prefix = closure(b);
      for (const auto& mid : prefix) {
        for (auto& reply : transitions_of(sys_, mid)) {
          if (reply.action != attack->action) continue;
          bool duplicate = std::any_of(node->replies.begin(), node->replies.end(), [&](const Distinction::Reply& r) {
            return !r.stay && r.intermediate == mid && r.target == reply.target;
          });
          if (duplicate) continue;
          auto pair = related(a, mid, level - 1) ? oriented(attack->target, reply.target) : oriented(a, mid);
          node->replies.push_back(Distinction::Reply{false, mid, reply.target, refute(pair)});
        }
      }
    }
    built.emplace(key, node);
    return node;
  }

  const BpaSystem& sys_;
  NormTable norms_;
  OracleLimits limits_;
  std::unordered_map<std::pair<Process, Process>, Levels, ProcessPairHash> memo_;
  std::unordered_map<Process, std::vector<Process>, ProcessHash> closures_;
};

// Checks a Distinction against the transition semantics from scratch: the attack
// exists, every defender reply is listed, and each listed refutation is valid.
inline bool replay_distinction(const BpaSystem& sys, const Distinction& d, std::string* why = nullptr) {
  const NormTable norms = compute_norms(sys);
  std::unordered_set<const Distinction*> verified;
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  std::function<bool(const Distinction&)> check = [&](const Distinction& node) -> bool {
    if (verified.count(&node)) return true;
    const Norm nl = norm_of(norms, node.left);
    const Norm nr = norm_of(norms, node.right);
    if (!node.attack) {
      if (nl == nr) return fail("leaf without attack relates processes of equal norm");
      verified.insert(&node);
      return true;
    }
    const auto& atk = *node.attack;
    const Process& a = atk.on_left ? node.left : node.right;
    const Process& b = atk.on_left ? node.right : node.left;
    auto a_moves = transitions_of(sys, a);
    bool exists = std::any_of(a_moves.begin(), a_moves.end(), [&](const Transition& t) {
      return t.action == atk.action && t.target == atk.target;
    });
    if (!exists) return fail("attack is not a transition of " + format_process(sys, a));

    auto oriented = [&](const Process& from_a, const Process& from_b) {
      return atk.on_left ? std::make_pair(from_a, from_b) : std::make_pair(from_b, from_a);
    };
    auto covers = [&](const Distinction::Reply& r, const std::vector<std::pair<Process, Process>>& allowed) {
      if (!r.refutation) return false;
      auto got = std::make_pair(r.refutation->left, r.refutation->right);
      return std::find(allowed.begin(), allowed.end(), got) != allowed.end() && check(*r.refutation);
    };

    if (atk.action.is_silent()) {
      bool ok = std::any_of(node.replies.begin(), node.replies.end(), [&](const Distinction::Reply& r) {
        return r.stay && covers(r, {oriented(atk.target, b)});
      });
      if (!ok) return fail("silent attack: staying put is not refuted");
    }
    auto prefix = silent_closure_dec(sys, norms, b);
    for (const auto& mid : prefix.states) {
      for (const auto& reply : transitions_of(sys, mid)) {
        if (reply.action != atk.action) continue;
        std::vector<std::pair<Process, Process>> allowed{oriented(a, mid), oriented(atk.target, reply.target)};
        bool ok = std::any_of(node.replies.begin(), node.replies.end(), [&](const Distinction::Reply& r) {
          return !r.stay && r.intermediate == mid && r.target == reply.target && covers(r, allowed);
        });
        if (!ok) return fail("reply " + format_process(sys, mid) + " -> " + format_process(sys, reply.target) + " is not refuted");
      }
    }
    verified.insert(&node);
    return true;
  };
  return check(d);
}

inline nlohmann::ordered_json distinction_to_json(const BpaSystem& sys, const Distinction& d) {
  nlohmann::ordered_json j{{"left", format_process(sys, d.left)}, {"right", format_process(sys, d.right)}};
  if (!d.attack) {
    j["leaf"] = "norm-mismatch";
    return j;
  }
  j["attack"] = {{"side", d.attack->on_left ? "left" : "right"},
                 {"action", sys.action_name(d.attack->action)},
                 {"target", format_process(sys, d.attack->target)}};
  nlohmann::ordered_json replies = nlohmann::ordered_json::array();
  for (const auto& r : d.replies) {
    nlohmann::ordered_json rj;
    if (r.stay) {
      rj["reply"] = "stay";
    } else {
      rj["reply"] = "move";
      rj["via"] = format_process(sys, r.intermediate);
      rj["target"] = format_process(sys, r.target);
    }
    rj["refutation"] = distinction_to_json(sys, *r.refutation);
    replies.push_back(std::move(rj));
  }
  j["replies"] = std::move(replies);
  return j;
}

}  // namespace tnbpa
