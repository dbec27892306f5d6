#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>

#include <json.hpp>

#include "morphounify/avm.hpp"
#include "morphounify/grammar.hpp"
#include "morphounify/reader.hpp"

using namespace morphounify;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

// runs the CLI via the shell and captures stdout (stderr only when the
// command string redirects it)
RunResult run(const std::string& args) {
  std::string cmd = std::string(MORPHO_CLI_PATH) + " " + args;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  RunResult r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0)
    r.out.append(buf, n);
  int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string with_data(const std::string& rest) {
  std::string d(MORPHO_DATA_DIR);
  return "--grammar " + d + "/demo.grammar --rules " + d + "/demo.rules --morphs " + d +
         "/demo.morphs --lexemes " + d + "/demo.lexemes " + rest;
}

} // namespace

TEST_CASE("analyze prints an attribute-value matrix and exits 0") {
  auto r = run(with_data("analyze rät"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("phon \"rät\"") != std::string::npos);
  CHECK(r.out.find("mstring \"rAt+t\"") != std::string::npos);
  CHECK(r.out.find("verb_form") != std::string::npos);
  CHECK(r.out.find("advise_rel") != std::string::npos);
}

TEST_CASE("analyze distinguishes no-result from bad input") {
  CHECK(run(with_data("analyze ratet 2>/dev/null")).exit_code == 1);
  CHECK(run(with_data("analyze sag 2>/dev/null")).exit_code == 1);
  // characters outside the declared alphabet make the request itself invalid
  CHECK(run(with_data("analyze xyz 2>/dev/null")).exit_code == 2);
}

TEST_CASE("generate lists surfaces one per line in sorted order") {
  auto r = run(with_data("generate person=3 tense=pres"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == "badet\nrät\nsagt\n");

  auto one = run(with_data("generate stem=rat person=3 tense=pres"));
  CHECK(one.exit_code == 0);
  CHECK(one.out == "rät\n");
}

TEST_CASE("generate reports a still-delayed morphology constraint") {
  auto r = run(with_data("generate stem=xyz 2>&1"));
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("morphology constraint still delayed") != std::string::npos);
}

TEST_CASE("check validates the shipped description") {
  auto r = run(with_data("check"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == "ok\n");
}

TEST_CASE("usage and load problems exit with code 2") {
  CHECK(run(with_data("generate stem 2>/dev/null")).exit_code == 2);
  CHECK(run(with_data("frobnicate 2>/dev/null")).exit_code == 2);
  CHECK(run(with_data("--format yaml check 2>/dev/null")).exit_code == 2);
  CHECK(run(with_data("2>/dev/null")).exit_code == 2); // missing subcommand
  std::string d(MORPHO_DATA_DIR);
  CHECK(run("--grammar /nonexistent --rules " + d + "/demo.rules --morphs " + d +
            "/demo.morphs --lexemes " + d + "/demo.lexemes check 2>/dev/null")
            .exit_code == 2);
  CHECK(run(with_data("generate person=1 person=3 2>/dev/null")).exit_code == 2);
}

TEST_CASE("repeated invocations produce byte-identical output") {
  for (const char* cmd : {"analyze badet", "--format json analyze rät",
                          "generate person=3 tense=pres", "--trace analyze sagt"}) {
    auto a = run(with_data(cmd) + " 2>/dev/null");
    auto b = run(with_data(cmd) + " 2>/dev/null");
    CHECK(a.exit_code == b.exit_code);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("json output rebuilds into an isomorphic structure") {
  auto r = run(with_data("--format json analyze badet"));
  REQUIRE(r.exit_code == 0);
  nlohmann::json arr = nlohmann::json::parse(r.out);
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 1);

  std::string d(MORPHO_DATA_DIR);
  Session ses(read_file(d + "/demo.grammar"), read_file(d + "/demo.rules"),
              read_file(d + "/demo.morphs"), read_file(d + "/demo.lexemes"));
  auto fresh = analyze_word(ses, U"badet");
  REQUIRE(fresh.words.size() == 1);
  NodeId rebuilt = json_to_fs(*fresh.store, arr[0]);
  CHECK(fresh.store->iso(fresh.words[0], rebuilt));
}
