// Command-line front end. Exit codes: 0 bisimilar/success, 1 not bisimilar or
// refutation found, 2 input error, 3 internal error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tnbpa/tnbpa.hpp"

namespace {

using namespace tnbpa;
using Json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kRefuted = 1, kInputError = 2, kInternalError = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

StandardSystem load(const std::string& path) {
  try {
    return standardize(parse_system(read_file(path)));
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.column(), path + ": " + e.what());
  }
}

CandidateMode parse_mode(const std::string& mode) {
  return mode == "exhaustive" ? CandidateMode::Exhaustive : CandidateMode::Pruned;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

struct CheckArgs {
  std::string file, left, right, mode = "pruned", trace;
  std::size_t max_exhaustive = 100000;
  unsigned k = 16;
  bool verify = false, json = false;
};

int cmd_check(const CheckArgs& a) {
  const StandardSystem s = load(a.file);
  const Process p = s.parse(a.left);
  const Process q = s.parse(a.right);
  EngineOptions opts;
  opts.mode = parse_mode(a.mode);
  opts.max_exhaustive = a.max_exhaustive;
  const auto result = compute_bisimilarity_base(s, opts);
  const Verdict v = check_equivalence(result.base, p, q);
  if (!a.trace.empty()) write_json_file(a.trace, trace_to_json(s, result.trace));

  Json out{{"left", a.left}, {"right", a.right}, {"verdict", to_string(v.kind)}};
  int code = v.kind == VerdictKind::Bisimilar ? kOk : kRefuted;
  std::string notes;
  if (a.verify) {
    BranchingOracle oracle(s.system);
    auto report = verify_base_generators(s, result.base, a.k, 20, 1, oracle);
    out["verification"] = report_to_json(s.system, report);
    auto d = oracle.find_distinction(p, q, a.k);
    if (d) out["distinction"] = distinction_to_json(s.system, *d);
    if (!report.clean()) {
      notes += "verification: " + std::to_string(report.failures.size()) + " failure(s)\n";
      code = kInternalError;
    }
    if (v.kind == VerdictKind::Bisimilar && d) {
      notes += "oracle refutes the bisimilar verdict\n";
      code = kInternalError;
    } else if (v.kind == VerdictKind::NotBisimilar) {
      notes += d ? "oracle: distinction confirmed\n" : "oracle: no distinction found up to k=" + std::to_string(a.k) + "\n";
    } else {
      notes += "oracle: no distinction found up to k=" + std::to_string(a.k) + "\n";
    }
  }
  if (a.json) {
    std::cout << out.dump() << '\n';
  } else {
    std::cout << (v.kind == VerdictKind::Bisimilar ? "bisimilar" : "not bisimilar") << '\n' << notes;
  }
  return code;
}

int cmd_base(const std::string& file, const std::string& mode, bool iterations, bool json) {
  const StandardSystem s = load(file);
  EngineOptions opts;
  opts.mode = parse_mode(mode);
  const auto result = compute_bisimilarity_base(s, opts);
  if (json) {
    Json j = base_to_json(s.system, result.base);
    if (iterations) j["trace"] = trace_to_json(s, result.trace);
    std::cout << j.dump() << '\n';
    return kOk;
  }
  if (iterations) {
    for (std::size_t i = 0; i < result.trace.iterations.size(); ++i) {
      std::cout << "# iteration " << i + 1 << '\n' << format_base(s.system, result.trace.iterations[i].after);
    }
    std::cout << "# final\n";
  }
  std::cout << format_base(s.system, result.base);
  return kOk;
}

int cmd_norms(const std::string& file, bool json) {
  const BpaSystem sys = parse_system(read_file(file));
  const NormTable norms = compute_norms(sys);
  Json j = Json::object();
  for (ConstantId c = 0; c < sys.constant_count(); ++c) {
    if (json)
      j[sys.constant_name(c)] = norms[c].is_finite() ? Json(norms[c].value()) : Json("inf");
    else
      std::cout << sys.constant_name(c) << ' ' << norms[c].to_string() << '\n';
  }
  if (json) std::cout << j.dump() << '\n';
  return kOk;
}

int cmd_standardize(const std::string& file) {
  const BpaSystem input = parse_system(read_file(file));
  const StandardSystem s = standardize(input);
  std::cout << "# index constant norm merged\n";
  for (ConstantId c = 0; c < s.size(); ++c) {
    std::string merged;
    for (ConstantId i = 0; i < input.constant_count(); ++i)
      if (s.from_input[i] == c && input.constant_name(i) != s.system.constant_name(c)) merged += " " + input.constant_name(i);
    std::cout << "# " << c + 1 << ' ' << s.system.constant_name(c) << ' ' << s.norm(c) << merged << '\n';
  }
  std::cout << serialize_system(s.system);
  return kOk;
}

int cmd_oracle(const std::string& file, const std::string& left, const std::string& right, unsigned k, bool json) {
  const BpaSystem sys = parse_system(read_file(file));
  const Process p = parse_process(left, sys);
  const Process q = parse_process(right, sys);
  BranchingOracle oracle(sys);
  auto d = oracle.find_distinction(p, q, k);
  if (!d) {
    if (json)
      std::cout << Json{{"result", "none-found"}, {"k", k}}.dump() << '\n';
    else
      std::cout << "no distinction found up to k=" << k << '\n';
    return kOk;
  }
  ensure(replay_distinction(sys, *d), "distinction failed replay");
  std::cout << distinction_to_json(sys, *d).dump(json ? -1 : 2) << '\n';
  return kRefuted;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branching bisimilarity for totally normed BPA"};
  app.require_subcommand(1);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "decide whether two processes are branching bisimilar");
  c->add_option("file", check.file, "system file")->required();
  c->add_option("--left", check.left, "left process")->required();
  c->add_option("--right", check.right, "right process")->required();
  c->add_flag("--verify", check.verify, "cross-check the base and verdict with the oracle");
  c->add_option("--trace", check.trace, "write the refinement trace as JSON");
  c->add_option("--mode", check.mode, "candidate mode")->check(CLI::IsMember({"pruned", "exhaustive"}));
  c->add_option("--max-exhaustive", check.max_exhaustive, "candidate guard for exhaustive mode");
  c->add_option("--k", check.k, "oracle round bound");
  c->add_flag("--json", check.json, "machine-readable output");

  std::string base_file, base_mode = "pruned";
  bool base_iterations = false, base_json = false;
  auto* b = app.add_subcommand("base", "print the final decomposition base");
  b->add_option("file", base_file, "system file")->required();
  b->add_option("--mode", base_mode, "candidate mode")->check(CLI::IsMember({"pruned", "exhaustive"}));
  b->add_flag("--iterations", base_iterations, "print the base after every round");
  b->add_flag("--json", base_json, "machine-readable output");

  std::string norms_file;
  bool norms_json = false;
  auto* n = app.add_subcommand("norms", "print the norm of every constant");
  n->add_option("file", norms_file, "system file")->required();
  n->add_flag("--json", norms_json, "machine-readable output");

  std::string std_file;
  auto* st = app.add_subcommand("standardize", "print the standardized system");
  st->add_option("file", std_file, "system file")->required();

  GenParams gen;
  auto* g = app.add_subcommand("gen", "emit a random totally normed system");
  g->add_option("--constants", gen.constants, "number of constants");
  g->add_option("--seed", gen.seed, "random seed");
  g->add_option("--max-rhs", gen.max_rhs, "longest right-hand side");
  g->add_option("--actions", gen.actions, "visible alphabet size");
  g->add_option("--silent-prob", gen.silent_prob, "probability that an extra rule is silent");
  g->add_option("--norm-cap", gen.norm_cap, "norm bound for the first rule of each constant");
  g->add_option("--extra-rules", gen.max_extra_rules, "extra rules per constant");
  g->add_option("--clone-prob", gen.clone_prob, "probability that a constant copies an earlier one");
  g->add_flag("--unit-norms", gen.unit_norms, "every constant has norm 1");

  std::string oracle_file, oracle_left, oracle_right;
  unsigned oracle_k = 16;
  bool oracle_json = false;
  auto* o = app.add_subcommand("oracle", "search for a distinction between two processes");
  o->add_option("file", oracle_file, "system file")->required();
  o->add_option("left", oracle_left, "left process")->required();
  o->add_option("right", oracle_right, "right process")->required();
  o->add_option("--k", oracle_k, "round bound");
  o->add_flag("--json", oracle_json, "compact output");

  DiffOptions fuzz;
  fuzz.params.constants = 8;
  auto* f = app.add_subcommand("fuzz", "differential test of the engine against the oracle");
  f->add_option("--trials", fuzz.trials, "number of random systems");
  f->add_option("--k", fuzz.k_max, "oracle round bound");
  f->add_option("--seed", fuzz.params.seed, "random seed");
  f->add_option("--jobs", fuzz.jobs, "worker threads");
  f->add_option("--constants", fuzz.params.constants, "largest system size");
  f->add_option("--silent-prob", fuzz.params.silent_prob, "probability that an extra rule is silent");
  f->add_option("--norm-cap", fuzz.params.norm_cap, "norm bound for the first rule of each constant");
  f->add_option("--pairs", fuzz.pairs, "process pairs per system");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (*c) return cmd_check(check);
    if (*b) return cmd_base(base_file, base_mode, base_iterations, base_json);
    if (*n) return cmd_norms(norms_file, norms_json);
    if (*st) return cmd_standardize(std_file);
    if (*g) {
      std::cout << serialize_system(random_system(gen));
      return kOk;
    }
    if (*o) return cmd_oracle(oracle_file, oracle_left, oracle_right, oracle_k, oracle_json);
    if (*f) {
      fuzz.k_retry = std::max(fuzz.k_retry, fuzz.k_max);
      auto summary = differential_run(fuzz, [](const TrialResult& t) { std::cout << trial_to_json(t).dump() << '\n'; });
      std::cout << summary_to_json(summary).dump() << '\n';
      return summary.failed_trials() == 0 ? kOk : kRefuted;
    }
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalError;
  } catch (const GuardExceeded& e) {
    std::cerr << "guard exceeded: " << e.what() << '\n';
    return kInternalError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInternalError;
}
