#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "support.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(TNBPA_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string sys(const std::string& name) { return "'" + testing_support::fixture_path(name) + "'"; }

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("tnbpa_cli_" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("check verdicts and exit codes") {
  CHECK(run("check " + sys("ex1.bpa") + " --left X --right Y").code == 1);
  CHECK(run("check " + sys("ex1.bpa") + " --left \"X'\" --right \"Y'\"").code == 0);
  CHECK(run("check " + sys("ex1.bpa") + " --left X --right X").code == 0);
  CHECK(run("check " + sys("sys-b.bpa") + " --left 'A Y' --right 'B Y'").code == 0);

  const auto r = run("check " + sys("ex1.bpa") + " --left X --right Y --verify");
  CHECK(r.code == 1);
  CHECK(r.out == "not bisimilar\noracle: distinction confirmed\n");

  const auto j = run("check " + sys("ex1.bpa") + " --left \"X'\" --right \"Y'\" --verify --json");
  CHECK(j.code == 0);
  const auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed["verdict"] == "bisimilar");
  CHECK(parsed["verification"]["failures"].empty());

  CHECK(run("check " + sys("ex1.bpa") + " --left X --right Y --mode exhaustive").code == 1);
}

TEST_CASE("check writes the trace") {
  const auto path = temp_file("trace.json", "");
  CHECK(run("check " + sys("sys-b.bpa") + " --left A --right B --trace '" + path + "'").code == 0);
  std::ifstream in(path);
  const auto trace = nlohmann::json::parse(in);
  CHECK(trace["iterations"].size() == 2);
}

TEST_CASE("base output") {
  auto r = run("base " + sys("ex1.bpa"));
  CHECK(r.code == 0);
  CHECK(r.out == "prime X'\nY' = X'\nprime X\nprime Y\n");
  CHECK(run("base " + sys("single.bpa")).out == "prime X1\n");
  CHECK(run("base " + sys("sys-b.bpa")).out == "prime B\nprime Y\nA = B\nX = B Y\n");
  r = run("base " + sys("sys-b.bpa") + " --iterations");
  CHECK(r.out ==
        "# iteration 1\nprime B\nprime Y\nA = B\nX = B Y\n"
        "# iteration 2\nprime B\nprime Y\nA = B\nX = B Y\n"
        "# final\nprime B\nprime Y\nA = B\nX = B Y\n");
  CHECK(run("base " + sys("sys-b.bpa") + " --json").out ==
        "{\"primes\":[\"B\",\"Y\"],\"equations\":{\"A\":[\"B\"],\"X\":[\"B\",\"Y\"]}}\n");
}

TEST_CASE("norms and standardize") {
  CHECK(run("norms " + sys("ex1.bpa")).out == "X 1\nX' 1\nY 1\nY' 1\n");
  CHECK(run("norms " + sys("sys-b.bpa") + " --json").out == "{\"A\":1,\"B\":1,\"X\":2,\"Y\":1}\n");
  const auto r = run("standardize " + sys("tau-cycle.bpa"));
  CHECK(r.code == 0);
  CHECK(r.out ==
        "# index constant norm merged\n# 1 S 1\n# 2 P 1 Q R\n"
        "constants: S P\nP -a-> eps\nP -b-> S\nS -c-> eps\n");
}

TEST_CASE("gen is deterministic and round-trips") {
  const auto a = run("gen --constants 7 --seed 7");
  const auto b = run("gen --constants 7 --seed 7");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto path = temp_file("gen.bpa", a.out);
  CHECK(run("base '" + path + "'").code == 0);
  CHECK(run("gen --constants 5 --seed 1 --silent-prob 0").out.find("tau") == std::string::npos);
}

TEST_CASE("oracle output") {
  auto r = run("oracle " + sys("ex1.bpa") + " X Y --k 4 --json");
  CHECK(r.code == 1);
  CHECK(nlohmann::json::parse(r.out)["attack"]["side"] == "left");
  r = run("oracle " + sys("sys-b.bpa") + " A B --k 16");
  CHECK(r.code == 0);
  CHECK(r.out == "no distinction found up to k=16\n");
}

TEST_CASE("fuzz emits JSON lines") {
  const auto r = run("fuzz --trials 5 --seed 3");
  CHECK(r.code == 0);
  std::size_t lines = 0;
  std::string last;
  for (std::size_t at = 0, nl; (nl = r.out.find('\n', at)) != std::string::npos; at = nl + 1) {
    last = r.out.substr(at, nl - at);
    CHECK(nlohmann::json::accept(last));
    ++lines;
  }
  CHECK(lines == 6);
  CHECK(nlohmann::json::parse(last)["summary"] == true);
  CHECK(run("fuzz --trials 5 --seed 3").out == r.out);
}

TEST_CASE("input errors exit with code 2") {
  CHECK(run("base /nonexistent/file.bpa").code == 2);
  CHECK(run("base '" + temp_file("bad.bpa", "constants: X\nX -a-> Q\n") + "'").code == 2);
  CHECK(run("base '" + temp_file("unnormed.bpa", "constants: X\nX -a-> X\n") + "'").code == 2);
  CHECK(run("base '" + temp_file("erasing.bpa", "constants: X\nX -a-> eps\nX -tau-> eps\n") + "'").code == 2);
  CHECK(run("check " + sys("ex1.bpa") + " --left X --right Q").code == 2);
  CHECK(run("check " + sys("ex1.bpa") + " --left X").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("base " + sys("ex1.bpa") + " --mode fast").code == 2);
}
