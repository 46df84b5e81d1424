#include <algorithm>
#include <stdlib.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "treemin/ddmin.hpp"
#include "treemin/fragments.hpp"
#include "treemin/lexer.hpp"
#include "treemin/oracle.hpp"
#include "treemin/parser.hpp"
#include "treemin/report.hpp"
#include "treemin/tree_io.hpp"

namespace fs = std::filesystem;
using namespace treemin;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNotInteresting = 3;
constexpr int kExitGrammar = 4;
constexpr int kExitIterationCap = 5;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Interestingness scripts call back into this executable through $TREEMIN.
void export_self_path() {
  if (std::getenv("TREEMIN")) return;
  std::error_code ec;
  fs::path self = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) setenv("TREEMIN", self.c_str(), 1);
}

int parse_command(const std::string& grammar_path, const std::optional<std::string>& start,
                  const std::string& input, const std::string& emit_tree, bool print) {
  auto grammar = std::make_shared<const Grammar>(load_grammar_file(grammar_path, start));
  std::string text = read_file(input);
  auto tokens = tokenize(*grammar, text);
  std::shared_ptr<const MinimalFragmentTable> fragments;
  if (!emit_tree.empty()) fragments = std::make_shared<const MinimalFragmentTable>(minimal_fragment_table(*grammar));
  ParseTree tree = parse(grammar, tokens, fragments);
  auto same_token = [](const Token& a, const Token& b) { return a.type == b.type && a.text == b.text; };
  auto again = tokenize(*grammar, serialize(tree));
  if (!std::equal(again.begin(), again.end(), tokens.begin(), tokens.end(), same_token)) {
    std::cerr << "round trip changed the token sequence\n";
    return kExitGrammar;
  }
  if (!emit_tree.empty()) write_tree_file(tree, emit_tree);
  if (print) std::cout << serialize(tree) << '\n';
  return 0;
}

int ddmin_lines(const std::string& command, const std::string& input, const std::string& out, double timeout) {
  std::string text = read_file(input);
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);

  OracleConfig config;
  config.command = resolve_program(split_command(command), fs::current_path().string());
  config.timeout_seconds = timeout;
  config.candidate_name = fs::path(input).filename().string();
  CommandOracle oracle(config);
  CachedOracle cached([&](const std::string& t) { return oracle.evaluate(t); });
  auto join = [](const std::vector<std::string>& ls) {
    std::string s;
    for (const auto& l : ls) s += l + "\n";
    return s;
  };
  std::vector<std::size_t> indices(lines.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  std::function<Outcome(const std::vector<std::size_t>&)> test = [&](const std::vector<std::size_t>& keep) {
    std::vector<std::string> subset;
    for (std::size_t i : keep) subset.push_back(lines[i]);
    return cached(join(subset));
  };
  DdminHooks hooks;
  hooks.on_degenerate = [] { spdlog::warn("input does not fail; returning it unchanged"); };
  auto result = ddmin(indices, test, hooks);
  std::vector<std::string> kept;
  for (std::size_t i : result) kept.push_back(lines[i]);
  std::ofstream(out.empty() ? input + ".reduced" : out) << join(kept);
  std::cerr << kept.size() << " of " << lines.size() << " lines kept, " << cached.steps().invocations
            << " test invocations\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  export_self_path();
  spdlog::set_pattern("%^%l%$: %v");

  CLI::App app{"Grammar-aware test case reducer"};
  app.require_subcommand(1);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "Log every reduction stage");
  app.add_flag("-q,--quiet", quiet, "Only log errors");

  ReduceOptions ro;
  std::string start;
  auto* reduce = app.add_subcommand("reduce", "Reduce an input while the test keeps reporting it interesting");
  reduce->add_option("--grammar", ro.grammar_path, "Grammar file")->required();
  reduce->add_option("--start", start, "Start rule (overrides the grammar's start directive)");
  reduce->add_option("--test", ro.test_command, "Test command; {} is replaced by the candidate path")->required();
  reduce->add_option("--algorithm", ro.algorithm, "hdd | hoist | hddh | hoist+hdd | hoist+hddh")
      ->capture_default_str();
  reduce->add_flag("!--no-squeeze", ro.squeeze, "Do not squeeze single-child chains");
  reduce->add_flag("!--no-flatten", ro.flatten, "Do not flatten recursive lists");
  reduce->add_option("--max-iterations", ro.max_iterations, "Fixed-point iteration cap")->capture_default_str();
  reduce->add_option("--timeout", ro.timeout_seconds, "Test timeout in seconds")->capture_default_str();
  reduce->add_option("--candidate-name", ro.candidate_name, "Candidate file name (default: input file name)");
  reduce->add_option("--workdir", ro.workdir, "Directory the test runs in (default: a temporary directory)");
  reduce->add_option("--out", ro.out_path, "Reduced output file (default: INPUT.reduced)");
  reduce->add_option("--report", ro.report_path, "JSON report file");
  reduce->add_option("--emit-tree", ro.emit_tree, "Write the reduced tree as JSON");
  reduce->add_option("--tree-in", ro.tree_in, "Read the input tree from a JSON file instead of parsing");
  reduce->add_option("--log", ro.log_path, "Append test command output here");
  reduce->add_flag("--timings", ro.timings, "Include wall-clock times in the report");
  reduce->add_option("input", ro.input_path, "Input file");

  std::string parse_grammar, parse_start, parse_input, parse_tree;
  bool parse_print = false;
  auto* parse_cmd = app.add_subcommand("parse", "Parse an input and check that it round-trips");
  parse_cmd->add_option("--grammar", parse_grammar, "Grammar file")->required();
  parse_cmd->add_option("--start", parse_start, "Start rule");
  parse_cmd->add_option("--emit-tree", parse_tree, "Write the parse tree as JSON");
  parse_cmd->add_flag("--print", parse_print, "Print the serialized tree");
  parse_cmd->add_option("input", parse_input, "Input file")->required();

  std::string manifest, table_out;
  auto* bench = app.add_subcommand("bench", "Run every case of a corpus manifest and tabulate sizes and steps");
  bench->add_option("--manifest", manifest, "Manifest JSON file")->required();
  bench->add_option("--out-table", table_out, "CSV output (default: stdout)");

  std::string lines_test, lines_input, lines_out;
  double lines_timeout = 60;
  auto* lines = app.add_subcommand("ddmin-lines", "Line-based delta debugging of a file");
  lines->group("");
  lines->add_option("--test", lines_test, "Test command")->required();
  lines->add_option("--timeout", lines_timeout, "Test timeout in seconds");
  lines->add_option("--out", lines_out, "Output file");
  lines->add_option("input", lines_input, "Input file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kExitUsage;
  }
  spdlog::set_level(quiet ? spdlog::level::err : verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    if (*reduce) {
      if (!start.empty()) ro.start = start;
      ro.command_base_dir = fs::current_path().string();
      if (ro.log_path.empty()) {
        ro.log_path = (ro.out_path.empty() ? (ro.input_path.empty() ? ro.tree_in : ro.input_path) + ".reduced"
                                           : ro.out_path) +
                      ".log";
      }
      ReductionReport report = run_reduce(ro);
      std::cout << report.output_path << ": " << report.input_size << " -> " << report.final_size
                << " non-whitespace characters, " << report.total_invocations << " test invocations\n";
      return 0;
    }
    if (*parse_cmd) {
      return parse_command(parse_grammar, parse_start.empty() ? std::nullopt : std::optional(parse_start),
                           parse_input, parse_tree, parse_print);
    }
    if (*bench) {
      std::string table = run_bench(manifest);
      if (table_out.empty()) {
        std::cout << table;
      } else {
        std::ofstream(table_out) << table;
      }
      return 0;
    }
    if (*lines) return ddmin_lines(lines_test, lines_input, lines_out, lines_timeout);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InitialTestError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotInteresting;
  } catch (const IterationCapError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIterationCap;
  } catch (const GrammarError& e) {
    std::cerr << "grammar error: " << e.what() << '\n';
    return kExitGrammar;
  } catch (const LexError& e) {
    std::cerr << e.what() << '\n';
    return kExitGrammar;
  } catch (const ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitGrammar;
  } catch (const NonProductiveError& e) {
    std::cerr << "grammar error: " << e.what() << '\n';
    return kExitGrammar;
  } catch (const TreeError& e) {
    std::cerr << "tree error: " << e.what() << '\n';
    return kExitGrammar;
  } catch (const OracleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
