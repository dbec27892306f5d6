/* morphounify command line driver */

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "morphounify/avm.hpp"
#include "morphounify/chars.hpp"
#include "morphounify/errors.hpp"
#include "morphounify/grammar.hpp"
#include "morphounify/reader.hpp"

namespace {

using namespace morphounify;

// exit codes: 0 at least one result, 1 none, 2 load or usage error
constexpr int kOk = 0;
constexpr int kNoResult = 1;
constexpr int kError = 2;

std::vector<std::pair<std::string, std::string>>
parse_assignments(const std::vector<std::string>& args) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& a : args) {
    size_t eq = a.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == a.size())
      throw LoadError("malformed assignment '" + a + "' (expected KEY=VALUE)");
    out.emplace_back(a.substr(0, eq), a.substr(eq + 1));
  }
  return out;
}

int run_analyze(const Session& ses, const std::string& word, const std::string& format,
                const TraceFn& trace) {
  std::u32string surface = normalize_input(utf8_to_u32(word));
  AnalysisOutput out = analyze_word(ses, surface, trace);
  for (const std::string& w : out.warnings)
    std::cerr << "warning: " << w << "\n";
  if (out.words.empty()) {
    std::cerr << "no analyses for \"" << word << "\"\n";
    return kNoResult;
  }
  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (NodeId n : out.words)
      arr.push_back(fs_to_json(*out.store, n));
    std::cout << arr.dump(2) << "\n";
  } else {
    bool first = true;
    for (NodeId n : out.words) {
      if (!first)
        std::cout << "\n";
      first = false;
      std::cout << avm_to_string(*out.store, n) << "\n";
    }
  }
  return kOk;
}

int run_generate(const Session& ses, const std::vector<std::string>& args,
                 const std::string& format, const TraceFn& trace) {
  GenerationOutput out = generate_word(ses, parse_assignments(args), trace);
  for (const std::string& w : out.warnings)
    std::cerr << "warning: " << w << "\n";
  if (out.surfaces.empty()) {
    std::cerr << (out.delayed ? "morphology constraint still delayed\n"
                              : "no surface forms\n");
    return kNoResult;
  }
  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const std::u32string& s : out.surfaces)
      arr.push_back(u32_to_utf8(s));
    std::cout << arr.dump(2) << "\n";
  } else {
    for (const std::u32string& s : out.surfaces)
      std::cout << u32_to_utf8(s) << "\n";
  }
  return kOk;
}

int run_check(const Session& ses) {
  CheckReport rep = check_session(ses);
  if (rep.clean()) {
    std::cout << "ok\n";
    return kOk;
  }
  for (const std::string& e : rep.errors)
    std::cout << e << "\n";
  return kNoResult;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"bidirectional morphological analysis within a typed feature grammar"};
  app.require_subcommand(1);

  std::string grammar_path, rules_path, morphs_path, lexemes_path;
  std::string format = "avm";
  bool trace_on = false;
  app.add_option("--grammar", grammar_path, "type hierarchy and constraints")
      ->required();
  app.add_option("--rules", rules_path, "two-level rule file")->required();
  app.add_option("--morphs", morphs_path, "morph lexicon")->required();
  app.add_option("--lexemes", lexemes_path, "lexeme lexicon")->required();
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"avm", "json"}))
      ->capture_default_str();
  app.add_flag("--trace", trace_on, "log constraint activity to stderr");

  std::string word;
  CLI::App* analyze = app.add_subcommand("analyze", "parse a surface word");
  analyze->add_option("word", word, "surface form")->required();

  std::vector<std::string> assignments;
  CLI::App* generate =
      app.add_subcommand("generate", "realize surface forms from KEY=VALUE goals");
  generate->add_option("assignments", assignments, "e.g. stem=rat person=3");

  CLI::App* check = app.add_subcommand("check", "validate the loaded description");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    Session ses(read_file(grammar_path), read_file(rules_path), read_file(morphs_path),
                read_file(lexemes_path));
    TraceFn trace;
    if (trace_on)
      trace = [](const std::string& line) { std::cerr << "trace: " << line << "\n"; };
    if (analyze->parsed())
      return run_analyze(ses, word, format, trace);
    if (generate->parsed())
      return run_generate(ses, assignments, format, trace);
    if (check->parsed())
      return run_check(ses);
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  } catch (const EngineError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
