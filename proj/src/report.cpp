#include "treemin/report.hpp"

#include <stdlib.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "treemin/fragments.hpp"
#include "treemin/grammar.hpp"
#include "treemin/parser.hpp"
#include "treemin/preprocess.hpp"
#include "treemin/tree_io.hpp"

namespace treemin {

namespace fs = std::filesystem;

InitialTestError::InitialTestError(Outcome outcome)
    : std::runtime_error("the unreduced input is not interesting (test result " + std::string(to_string(outcome)) +
                         ")"),
      outcome_(outcome) {}

nlohmann::json ReductionReport::to_json(bool timings) const {
  nlohmann::json j;
  j["input"] = input_path;
  j["grammar"] = grammar_path;
  j["pipeline"] = pipeline;
  j["input_size"] = input_size;
  j["initial_invocations"] = initial_invocations;
  nlohmann::json stage_list = nlohmann::json::array();
  for (const auto& s : stages) {
    nlohmann::json st;
    st["stage"] = s.name;
    st["iterations"] = s.iterations;
    st["size"] = s.size;
    st["invocations"] = s.invocations;
    st["hits"] = s.hits;
    if (timings) st["wall_seconds"] = s.wall_seconds;
    stage_list.push_back(std::move(st));
  }
  j["stages"] = std::move(stage_list);
  j["output"] = output_path;
  j["final_size"] = final_size;
  j["total_invocations"] = total_invocations;
  j["total_hits"] = total_hits;
  j["recheck"] = std::string(to_string(recheck));
  return j;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

}  // namespace

ReductionReport run_reduce(const ReduceOptions& options, const Diagnostics& diagnostics) {
  if (options.grammar_path.empty()) throw UsageError("--grammar is required");
  if (options.test_command.empty()) throw UsageError("--test is required");
  if (options.input_path.empty() && options.tree_in.empty()) throw UsageError("an input file is required");
  if (options.max_iterations == 0) throw UsageError("--max-iterations must be at least 1");
  if (!(options.timeout_seconds > 0)) throw UsageError("--timeout must be positive");
  Pipeline pipeline;
  try {
    pipeline = parse_pipeline(options.algorithm);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  auto grammar = std::make_shared<const Grammar>(load_grammar_file(options.grammar_path, options.start));
  auto fragments = std::make_shared<const MinimalFragmentTable>(minimal_fragment_table(*grammar));

  const std::string source = options.input_path.empty() ? options.tree_in : options.input_path;
  ParseTree tree = options.tree_in.empty() ? parse_text(grammar, read_file(options.input_path), fragments)
                                           : read_tree_file(options.tree_in, grammar, fragments);
  preprocess(tree, PreprocessOptions{options.squeeze, options.flatten});

  OracleConfig config;
  config.command = resolve_program(split_command(options.test_command), options.command_base_dir);
  config.timeout_seconds = options.timeout_seconds;
  config.workdir = options.workdir;
  config.candidate_name =
      options.candidate_name.empty() ? fs::path(source).filename().string() : options.candidate_name;
  config.log_path = options.log_path;
  CommandOracle command(config);
  CachedOracle oracle([&command](const std::string& text) { return command.evaluate(text); });

  ReductionReport report;
  report.input_path = source;
  report.grammar_path = options.grammar_path;
  report.pipeline = to_string(pipeline);
  const std::string initial = serialize(tree);
  report.input_size = nonws_size(initial);

  Outcome first = oracle(initial);
  report.initial_invocations = oracle.steps().invocations;
  if (first != Outcome::Fail) throw InitialTestError(first);

  PipelineResult result = run_pipeline(pipeline, tree, oracle, options.max_iterations, diagnostics);
  report.stages = result.stages;
  report.total_invocations = oracle.steps().invocations;
  report.total_hits = oracle.steps().hits;

  report.output_path = options.out_path.empty() ? source + ".reduced" : options.out_path;
  report.output_text = result.output + "\n";
  write_file(report.output_path, report.output_text);
  report.final_size = nonws_size(read_file(report.output_path));

  report.recheck = command.evaluate(read_file(report.output_path));
  if (report.recheck != Outcome::Fail) {
    spdlog::warn("reduced output re-tested as {}; the test may be nondeterministic", to_string(report.recheck));
  }
  if (!options.emit_tree.empty()) write_tree_file(tree, options.emit_tree);
  if (!options.report_path.empty()) write_file(options.report_path, report.to_json(options.timings).dump(2) + "\n");
  return report;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

struct CaseRow {
  std::string name;
  std::optional<std::size_t> input_size;
  std::map<std::string, std::pair<std::size_t, std::size_t>> results;  // pipeline -> (size, steps)
  std::string status = "ok";
};

class TempDir {
public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "treemin-bench-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("cannot create temporary directory");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

std::string resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return (path.is_relative() ? base / path : path).lexically_normal().string();
}

}  // namespace

std::string run_bench(const std::string& manifest_path) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed manifest '" + manifest_path + "': " + e.what());
  }
  const fs::path base = fs::absolute(manifest_path).parent_path();
  const nlohmann::json cases = manifest.value("cases", nlohmann::json::array());

  std::vector<std::string> columns;
  std::vector<CaseRow> rows;
  TempDir scratch;

  for (std::size_t index = 0; index < cases.size(); ++index) {
    const auto& c = cases[index];
    CaseRow row;
    row.name = c.value("name", "case" + std::to_string(index + 1));
    std::vector<std::string> pipelines = c.value("pipelines", std::vector<std::string>{"hdd"});
    for (const std::string& entry : pipelines) {
      std::string name;
      try {
        name = to_string(parse_pipeline(entry));
      } catch (const std::exception& e) {
        name = entry;
      }
      if (std::find(columns.begin(), columns.end(), name) == columns.end()) columns.push_back(name);
      if (row.status != "ok") continue;
      try {
        ReduceOptions o;
        o.grammar_path = resolve(base, c.at("grammar").get<std::string>());
        if (c.contains("start")) o.start = c.at("start").get<std::string>();
        o.test_command = c.at("test").get<std::string>();
        o.command_base_dir = base.string();
        o.algorithm = entry;
        o.input_path = resolve(base, c.at("input").get<std::string>());
        o.timeout_seconds = c.value("timeout", 60.0);
        o.max_iterations = c.value("max_iterations", std::size_t{100});
        o.out_path = (fs::path(scratch.path()) / (row.name + "." + std::to_string(index) + ".out")).string();
        ReductionReport r = run_reduce(o);
        row.input_size = r.input_size;
        row.results[name] = {r.final_size, r.total_invocations};
      } catch (const std::exception& e) {
        spdlog::error("{} ({}): {}", row.name, name, e.what());
        row.status = std::string("error: ") + e.what();
      }
    }
    rows.push_back(std::move(row));
  }

  std::ostringstream table;
  table << "test,input";
  for (const auto& col : columns) table << ',' << csv_field(col);
  for (const auto& col : columns) table << ',' << csv_field("steps " + col);
  table << ",status\n";
  for (const auto& row : rows) {
    table << csv_field(row.name) << ',' << (row.input_size ? std::to_string(*row.input_size) : "");
    for (const auto& col : columns) {
      auto it = row.results.find(col);
      table << ',' << (it == row.results.end() ? "" : std::to_string(it->second.first));
    }
    for (const auto& col : columns) {
      auto it = row.results.find(col);
      table << ',' << (it == row.results.end() ? "" : std::to_string(it->second.second));
    }
    table << ',' << csv_field(row.status) << '\n';
  }
  return table.str();
}

}  // namespace treemin
