#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "faithcheck/dataset.hpp"
#include "faithcheck/evaluate.hpp"
#include "faithcheck/extract.hpp"
#include "faithcheck/mock_server.hpp"
#include "faithcheck/prompt.hpp"
#include "faithcheck/report.hpp"

namespace fc = faithcheck;
using nlohmann::json;

namespace {

struct RunOpts {
  std::string task;
  std::string data;
  std::vector<std::string> explanations = {"counterfactual", "feature-attribution", "redaction"};
  std::string endpoint;
  std::string model = "model";
  std::string protocol = "chat-completions";
  std::string system_prompt;
  std::string api_key;
  int parallelism = 50;
  std::string cache_dir;
  std::string out_dir = "out";
  int subset = 0;
  std::string variations = "default";
  int samples = 1;
  fc::GenerationParams gen;
};

int do_run(const RunOpts& o) {
  fc::TaskKind task = fc::task_from_string(o.task);
  auto data = fc::load_dataset_file(o.data, task);
  if (data.empty()) throw std::runtime_error("dataset is empty: " + o.data);
  if (o.subset > 0 && static_cast<size_t>(o.subset) < data.size()) data.resize(o.subset);
  if (task == fc::TaskKind::qa_multichoice)
    fc::ensure_options(data, static_cast<std::uint64_t>(o.gen.seed));

  fc::ModelProfile profile;
  profile.endpoint = o.endpoint;
  profile.model_name = o.model;
  profile.protocol = fc::wire_protocol_from_string(o.protocol);
  if (!o.system_prompt.empty()) profile.system_prompt = o.system_prompt;
  profile.api_key = o.api_key;

  std::filesystem::create_directories(o.out_dir);
  fc::ResponseCache cache{o.cache_dir.empty() ? o.out_dir + "/cache" : o.cache_dir};
  fc::InferenceClient client{profile, {}, &cache};

  fc::EvalSettings settings;
  settings.task = task;
  settings.model = o.model;
  settings.gen = o.gen;
  settings.parallelism = o.parallelism;
  settings.samples = o.samples;

  std::vector<std::string> kinds;
  for (const auto& k : o.explanations)
    if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);

  std::vector<fc::VerdictRecord> records;
  for (const auto& name : kinds) {
    auto kind = fc::explanation_kind_from_string(name);
    auto configs = fc::config_sweep(kind, o.variations == "all");
    auto part = fc::evaluate_batch(client, settings, data, kind, configs);
    records.insert(records.end(), part.begin(), part.end());
  }

  fc::write_artifacts(o.out_dir, records, true);
  std::cout << fc::summary_table(fc::aggregate_records(records));
  std::cout << "\n" << records.size() << " records -> " << o.out_dir << "/records.jsonl\n";

  bool all_errors = !records.empty();
  for (const auto& r : records)
    if (r.skip_reason != fc::kSkipInferenceError) { all_errors = false; break; }
  if (all_errors) {
    std::cerr << "error: every request failed; endpoint " << o.endpoint << " unreachable?\n";
    if (!records.empty()) std::cerr << "  first error: " << records.front().error << "\n";
    return 2;
  }
  return 0;
}

int do_report(const std::string& records_path, const std::string& out_dir) {
  auto records = fc::read_records_jsonl(records_path);
  std::filesystem::create_directories(out_dir);
  fc::write_artifacts(out_dir, records, false);
  std::cout << fc::summary_table(fc::aggregate_records(records));
  return 0;
}

int do_parse(const std::string& what, const std::string& task_name,
             const std::vector<std::string>& options) {
  std::ostringstream buf;
  buf << std::cin.rdbuf();
  const std::string text = buf.str();

  json out;
  if (what == "label") {
    fc::TaskKind task = fc::task_from_string(task_name);
    if (task == fc::TaskKind::qa_multichoice && options.empty())
      throw std::runtime_error("--options is required when parsing qa-multichoice labels");
    fc::Observation obs;
    obs.options = options;
    auto r = fc::extract_label(text, task, obs);
    out["status"] = fc::to_string(r.status);
    if (r.status == fc::ExtractStatus::parsed) out["label"] = r.label;
  } else if (what == "paragraph") {
    auto r = fc::extract_paragraph(text);
    out["status"] = fc::to_string(r.status);
    if (r.status == fc::ExtractStatus::parsed) out["paragraph"] = r.paragraph;
  } else {
    auto r = fc::extract_word_list(text);
    out["status"] = fc::to_string(r.status);
    if (r.status == fc::ExtractStatus::parsed) out["words"] = r.words;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int do_dump_templates() {
  json out = json::array();
  for (const auto& t : fc::dump_templates()) {
    json row;
    row["task"] = fc::to_string(t.task);
    row["kind"] = t.kind;
    row["persona"] = fc::to_string(t.config.persona);
    row["mask"] = fc::to_string(t.config.mask);
    row["target"] = fc::to_string(t.config.target);
    row["prompt"] = t.prompt;
    out.push_back(std::move(row));
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int do_mock_serve(int port, const std::string& script_path) {
  fc::MockScript script;
  if (!script_path.empty()) script = fc::MockScript::from_file(script_path);
  fc::MockServer server{std::move(script)};
  server.start(port);
  std::cout << "mock model listening on " << server.endpoint() << " (ctrl-c to stop)\n";
  for (;;) std::this_thread::sleep_for(std::chrono::seconds(3600));
}

std::string trimmed(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Expands `--config FILE` into explicit options so that key=value lines act as
// defaults. Explicit command-line flags always win.
void expand_config(std::vector<std::string>& args) {
  std::string path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) return;  // the --config validator reports the missing file

  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };

  std::string line;
  while (std::getline(in, line)) {
    line = trimmed(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = trimmed(line.substr(0, eq));
    std::string value = trimmed(line.substr(eq + 1));
    while (!key.empty() && key[0] == '-') key.erase(key.begin());
    if (key.empty() || key == "config") continue;
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    args.push_back(flag);
    args.push_back(value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"faithcheck: self-consistency faithfulness checks for chat-model explanations"};
  app.require_subcommand(1);

  RunOpts ro;
  auto* run = app.add_subcommand("run", "evaluate a dataset against an endpoint");
  std::string config_path;
  run->add_option("--config", config_path, "read options from a key=value file (flags win)")
      ->check(CLI::ExistingFile);
  run->add_option("--task", ro.task, "task kind")
      ->required()
      ->check(CLI::IsMember({"sentiment", "qa-multichoice", "nli"}));
  run->add_option("--data", ro.data, "dataset file, one json object per line")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--explanations", ro.explanations, "explanation kinds to evaluate")
      ->delimiter(',')
      ->check(CLI::IsMember({"counterfactual", "feature-attribution", "redaction"}));
  run->add_option("--endpoint", ro.endpoint, "inference endpoint base url")->required();
  run->add_option("--model", ro.model, "model name sent with every request");
  run->add_option("--protocol", ro.protocol, "wire protocol")
      ->check(CLI::IsMember({"chat-completions", "raw-generate"}));
  run->add_option("--system-prompt", ro.system_prompt, "system prompt (omitted when empty)");
  run->add_option("--api-key", ro.api_key, "bearer token for the endpoint")
      ->envname("FAITHCHECK_API_KEY");
  run->add_option("--parallelism", ro.parallelism, "max requests in flight")
      ->check(CLI::PositiveNumber);
  run->add_option("--cache-dir", ro.cache_dir, "response cache directory (default <out-dir>/cache)");
  run->add_option("--out-dir", ro.out_dir, "artifact directory");
  run->add_option("--subset", ro.subset, "evaluate only the first N observations")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--variations", ro.variations, "prompt configurations per kind")
      ->check(CLI::IsMember({"default", "all"}));
  run->add_option("--samples", ro.samples, "repeated samples per observation (seed offset)")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", ro.gen.seed, "generation seed");
  run->add_option("--temperature", ro.gen.temperature, "sampling temperature");
  run->add_option("--top-p", ro.gen.top_p, "nucleus sampling mass");
  run->add_option("--top-k", ro.gen.top_k, "top-k cutoff");
  run->add_option("--repetition-penalty", ro.gen.repetition_penalty, "repetition penalty");
  run->add_option("--max-new-tokens", ro.gen.max_new_tokens, "completion length limit");

  std::string records_path, report_out = "out";
  auto* report = app.add_subcommand("report", "recompute aggregates from a records file");
  report->add_option("--records", records_path, "records.jsonl from a previous run")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--out-dir", report_out, "artifact directory");

  std::string what = "label", parse_task = "sentiment";
  std::vector<std::string> parse_options;
  auto* parse = app.add_subcommand("parse", "run the response parsers over stdin");
  parse->add_option("--what", what, "which parser to run")
      ->check(CLI::IsMember({"label", "paragraph", "words"}));
  parse->add_option("--task", parse_task, "task kind (label parsing)")
      ->check(CLI::IsMember({"sentiment", "qa-multichoice", "nli"}));
  parse->add_option("--options", parse_options, "qa option texts, in display order")
      ->delimiter(',');

  auto* dump = app.add_subcommand("dump-templates", "print the full prompt catalog as json");

  int mock_port = 8085;
  std::string script_path;
  auto* mock = app.add_subcommand("mock-serve", "serve scripted responses for local runs");
  mock->add_option("--port", mock_port, "listen port")->check(CLI::NonNegativeNumber);
  mock->add_option("--script", script_path, "response script json")->check(CLI::ExistingFile);

  std::vector<std::string> args(argv + 1, argv + argc);
  expand_config(args);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) return do_run(ro);
    if (report->parsed()) return do_report(records_path, report_out);
    if (parse->parsed()) return do_parse(what, parse_task, parse_options);
    if (dump->parsed()) return do_dump_templates();
    if (mock->parsed()) return do_mock_serve(mock_port, script_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
