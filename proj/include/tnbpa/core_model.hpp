#pragma once

// Syntax and operational semantics of Basic Process Algebra systems.
//
// Constants are interned to dense ids at construction time; every other
// module works in ids. Action id 0 is always the silent action "tau".

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tnbpa/error.hpp"

namespace tnbpa {

using ConstantId = std::uint32_t;

// A process is a word over constants; the empty word is the terminated process.
using Process = std::vector<ConstantId>;

inline constexpr std::string_view kSilentName = "tau";
inline constexpr std::string_view kEmptyName = "eps";

class Action {
 public:
  constexpr Action() = default;
  constexpr explicit Action(std::uint32_t id) : id_(id) {}

  static constexpr Action silent() { return Action(0); }

  constexpr bool is_silent() const { return id_ == 0; }
  constexpr std::uint32_t id() const { return id_; }

  friend constexpr auto operator<=>(Action, Action) = default;

 private:
  std::uint32_t id_ = 0;
};

struct Rule {
  ConstantId lhs = 0;
  Action action;
  Process rhs;

  friend bool operator==(const Rule&, const Rule&) = default;
};

inline Process concat(const Process& a, const Process& b) {
  Process out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

class BpaSystem {
 public:
  BpaSystem() : action_names_{std::string(kSilentName)} {}

  // action_names[0] must be "tau". Rules are deduplicated keeping first occurrence.
  BpaSystem(std::vector<std::string> constant_names, std::vector<std::string> action_names,
            std::vector<Rule> rules)
      : constant_names_(std::move(constant_names)), action_names_(std::move(action_names)) {
    if (action_names_.empty() || action_names_.front() != kSilentName)
      throw Error("action table must start with the silent action");
    for (std::size_t i = 0; i < constant_names_.size(); ++i) {
      const auto& name = constant_names_[i];
      if (name == kSilentName || name == kEmptyName)
        throw Error("'" + name + "' is reserved and cannot name a constant");
      if (!constant_index_.emplace(name, static_cast<ConstantId>(i)).second)
        throw Error("constant '" + name + "' declared twice");
    }
    for (auto& rule : rules) {
      check_constant(rule.lhs);
      for (auto c : rule.rhs) check_constant(c);
      if (rule.action.id() >= action_names_.size()) throw Error("rule uses an unknown action id");
      if (std::find(rules_.begin(), rules_.end(), rule) == rules_.end()) rules_.push_back(std::move(rule));
    }
    rules_by_lhs_.assign(constant_names_.size(), {});
    for (std::size_t r = 0; r < rules_.size(); ++r) rules_by_lhs_[rules_[r].lhs].push_back(r);
  }

  std::size_t constant_count() const { return constant_names_.size(); }
  const std::vector<std::string>& constant_names() const { return constant_names_; }
  const std::string& constant_name(ConstantId c) const { return constant_names_.at(c); }

  std::optional<ConstantId> find_constant(std::string_view name) const {
    auto it = constant_index_.find(std::string(name));
    if (it == constant_index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<std::string>& action_table() const { return action_names_; }
  const std::string& action_name(Action a) const { return action_names_.at(a.id()); }

  std::optional<Action> find_action(std::string_view name) const {
    for (std::size_t i = 0; i < action_names_.size(); ++i)
      if (action_names_[i] == name) return Action(static_cast<std::uint32_t>(i));
    return std::nullopt;
  }

  // Actions that occur in at least one rule.
  std::vector<Action> actions() const {
    std::vector<Action> out;
    for (const auto& r : rules_)
      if (std::find(out.begin(), out.end(), r.action) == out.end()) out.push_back(r.action);
    std::sort(out.begin(), out.end());
    return out;
  }

  bool is_realtime() const {
    return std::none_of(rules_.begin(), rules_.end(), [](const Rule& r) { return r.action.is_silent(); });
  }

  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& rule(std::size_t index) const { return rules_.at(index); }

  // Indices into rules() whose left-hand side is c, in rule order.
  std::span<const std::size_t> rules_of(ConstantId c) const { return rules_by_lhs_.at(c); }

  // Structural equality modulo action numbering.
  friend bool operator==(const BpaSystem& a, const BpaSystem& b) {
    if (a.constant_names_ != b.constant_names_ || a.rules_.size() != b.rules_.size()) return false;
    for (std::size_t i = 0; i < a.rules_.size(); ++i) {
      const auto& x = a.rules_[i];
      const auto& y = b.rules_[i];
      if (x.lhs != y.lhs || x.rhs != y.rhs || a.action_name(x.action) != b.action_name(y.action)) return false;
    }
    return true;
  }

 private:
  void check_constant(ConstantId c) const {
    if (c >= constant_names_.size()) throw Error("rule refers to an undeclared constant id");
  }

  std::vector<std::string> constant_names_;
  std::vector<std::string> action_names_;
  std::vector<Rule> rules_;
  std::vector<std::vector<std::size_t>> rules_by_lhs_;
  std::unordered_map<std::string, ConstantId> constant_index_;
};

// Incremental construction by name, used by the parser, the generator and tests.
class SystemBuilder {
 public:
  ConstantId add_constant(std::string name) {
    names_.push_back(std::move(name));
    return static_cast<ConstantId>(names_.size() - 1);
  }

  Action intern_action(std::string_view name) {
    for (std::size_t i = 0; i < actions_.size(); ++i)
      if (actions_[i] == name) return Action(static_cast<std::uint32_t>(i));
    actions_.emplace_back(name);
    return Action(static_cast<std::uint32_t>(actions_.size() - 1));
  }

  SystemBuilder& add_rule(ConstantId lhs, std::string_view action, Process rhs) {
    rules_.push_back(Rule{lhs, intern_action(action), std::move(rhs)});
    return *this;
  }

  BpaSystem build() const { return BpaSystem(names_, actions_, rules_); }

 private:
  std::vector<std::string> names_;
  std::vector<std::string> actions_{std::string(kSilentName)};
  std::vector<Rule> rules_;
};

namespace detail {

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_constant_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}
inline bool is_action_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Cursor over a single line with 1-based column reporting.
class LineCursor {
 public:
  LineCursor(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

  void skip_space() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= line_.size(); }
  char peek() const { return at_end() ? '\0' : line_[pos_]; }
  std::size_t column() const { return pos_ + 1; }
  std::size_t line() const { return line_no_; }

  bool consume(std::string_view token) {
    if (line_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  std::string_view take_while(bool (*pred)(char)) {
    std::size_t start = pos_;
    while (pos_ < line_.size() && pred(line_[pos_])) ++pos_;
    return line_.substr(start, pos_ - start);
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_no_, column(), what); }

 private:
  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

inline std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

}  // namespace detail

// Parses the line-oriented system format:
//   constants: X X' Y
//   X -a-> X Y
//   X' -tau-> eps
inline BpaSystem parse_system(std::string_view text) {
  std::vector<std::string> names;
  std::unordered_map<std::string, ConstantId> index;
  SystemBuilder builder;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    detail::LineCursor cur(detail::strip_comment(raw), line_no);
    cur.skip_space();
    if (cur.at_end()) {
      if (end == text.size()) break;
      continue;
    }

    if (cur.consume("constants:")) {
      for (;;) {
        cur.skip_space();
        if (cur.at_end()) break;
        auto col = cur.column();
        if (!detail::is_ident_start(cur.peek())) cur.fail("expected a constant name");
        std::string name(cur.take_while(detail::is_constant_char));
        if (name == kSilentName || name == kEmptyName)
          throw ParseError(line_no, col, "'" + name + "' is reserved and cannot name a constant");
        if (index.count(name)) throw ParseError(line_no, col, "constant '" + name + "' declared twice");
        index.emplace(name, builder.add_constant(name));
        names.push_back(name);
      }
    } else {
      auto resolve = [&](std::string_view name, std::size_t col) -> ConstantId {
        auto it = index.find(std::string(name));
        if (it == index.end()) throw ParseError(line_no, col, "undeclared constant '" + std::string(name) + "'");
        return it->second;
      };
      auto lhs_col = cur.column();
      if (!detail::is_ident_start(cur.peek())) cur.fail("expected a rule or a constants declaration");
      ConstantId lhs = resolve(cur.take_while(detail::is_constant_char), lhs_col);
      cur.skip_space();
      if (!cur.consume("-")) cur.fail("expected '-<action>->'");
      if (!detail::is_ident_start(cur.peek())) cur.fail("expected an action name");
      std::string_view action = cur.take_while(detail::is_action_char);
      if (!cur.consume("->")) cur.fail("expected '->' after action name");
      Process rhs;
      bool saw_eps = false;
      for (;;) {
        cur.skip_space();
        if (cur.at_end()) break;
        auto col = cur.column();
        if (!detail::is_ident_start(cur.peek())) cur.fail("expected a constant name or 'eps'");
        std::string_view name = cur.take_while(detail::is_constant_char);
        if (name == kEmptyName) {
          if (saw_eps || !rhs.empty()) throw ParseError(line_no, col, "'eps' must stand alone");
          saw_eps = true;
          continue;
        }
        if (saw_eps) throw ParseError(line_no, col, "'eps' must stand alone");
        rhs.push_back(resolve(name, col));
      }
      if (!saw_eps && rhs.empty()) cur.fail("empty right-hand side; write 'eps'");
      builder.add_rule(lhs, action, std::move(rhs));
    }
    if (end == text.size()) break;
  }
  return builder.build();
}

inline std::string format_process(const BpaSystem& sys, const Process& p) {
  if (p.empty()) return std::string(kEmptyName);
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ' ';
    out += sys.constant_name(p[i]);
  }
  return out;
}

inline std::string format_rule(const BpaSystem& sys, const Rule& r) {
  return sys.constant_name(r.lhs) + " -" + sys.action_name(r.action) + "-> " + format_process(sys, r.rhs);
}

inline std::string serialize_system(const BpaSystem& sys) {
  std::string out = "constants:";
  for (const auto& n : sys.constant_names()) out += " " + n;
  out += '\n';
  for (const auto& r : sys.rules()) out += format_rule(sys, r) + '\n';
  return out;
}

// Whitespace-separated constant names, or the literal "eps".
inline Process parse_process(std::string_view text, const BpaSystem& sys) {
  detail::LineCursor cur(text, 1);
  Process p;
  bool saw_eps = false;
  for (;;) {
    cur.skip_space();
    if (cur.at_end()) break;
    auto col = cur.column();
    if (!detail::is_ident_start(cur.peek())) cur.fail("expected a constant name");
    std::string_view name = cur.take_while(detail::is_constant_char);
    if (name == kEmptyName) {
      saw_eps = true;
      continue;
    }
    auto id = sys.find_constant(name);
    if (!id) throw ParseError(1, col, "unknown constant '" + std::string(name) + "'");
    p.push_back(*id);
  }
  if (saw_eps && !p.empty()) throw ParseError(1, 1, "'eps' must stand alone");
  if (!saw_eps && p.empty()) throw ParseError(1, 1, "empty process; write 'eps'");
  return p;
}

struct Transition {
  Action action;
  Process target;
  std::size_t rule = 0;  // index into BpaSystem::rules()

  friend bool operator==(const Transition&, const Transition&) = default;
};

// One-step successors of p: the head constant rewrites, the tail is carried along.
inline std::vector<Transition> transitions_of(const BpaSystem& sys, const Process& p) {
  std::vector<Transition> out;
  if (p.empty()) return out;
  for (auto r : sys.rules_of(p.front())) {
    const Rule& rule = sys.rule(r);
    Process target;
    target.reserve(rule.rhs.size() + p.size() - 1);
    target.insert(target.end(), rule.rhs.begin(), rule.rhs.end());
    target.insert(target.end(), p.begin() + 1, p.end());
    out.push_back(Transition{rule.action, std::move(target), r});
  }
  return out;
}

}  // namespace tnbpa
