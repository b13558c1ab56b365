#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "faithcheck/dataset.hpp"
#include "faithcheck/mock_server.hpp"

using namespace faithcheck;
using nlohmann::json;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

CmdResult run_cmd(const std::string& cmd) {
  CmdResult result;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof(buf), pipe)) result.output.append(buf, n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

const std::string kBin = FAITHCHECK_BIN;

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("faithcheck-cli-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::string write_dataset(const TempDir& tmp, int n) {
  auto path = (tmp.path / "data.jsonl").string();
  std::ofstream out(path);
  for (const auto& obs : keyword_dataset(n))
    out << observation_to_json(obs, TaskKind::sentiment).dump() << "\n";
  return path;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("cli: configuration errors exit nonzero with a message") {
  CHECK(run_cmd(kBin).exit_code != 0);

  auto missing = run_cmd(kBin + " run --task sentiment");
  CHECK(missing.exit_code != 0);
  CHECK(missing.output.find("--data") != std::string::npos);

  TempDir tmp;
  auto data = write_dataset(tmp, 2);
  auto bad_task = run_cmd(kBin + " run --task poetry --data " + data + " --endpoint http://x");
  CHECK(bad_task.exit_code != 0);
  CHECK(bad_task.output.find("poetry") != std::string::npos);

  auto bad_file = run_cmd(kBin + " run --task sentiment --data /no/such.jsonl --endpoint http://x");
  CHECK(bad_file.exit_code != 0);

  auto bad_proto = run_cmd(kBin + " run --task sentiment --data " + data +
                           " --endpoint http://x --protocol smoke-signals");
  CHECK(bad_proto.exit_code != 0);
}

TEST_CASE("cli: help screens") {
  auto top = run_cmd(kBin + " --help");
  CHECK(top.exit_code == 0);
  for (const char* sub : {"run", "report", "parse", "dump-templates", "mock-serve"})
    CHECK(top.output.find(sub) != std::string::npos);
  CHECK(run_cmd(kBin + " run --help").exit_code == 0);
}

TEST_CASE("cli: parse subcommand reads stdin and emits json") {
  auto label = run_cmd("printf 'Negative.' | " + kBin + " parse --what label --task sentiment");
  CHECK(label.exit_code == 0);
  auto j = json::parse(label.output);
  CHECK(j.at("status") == "parsed");
  CHECK(j.at("label") == "negative");

  auto words = run_cmd("printf '1. bad\\n2. dull' | " + kBin + " parse --what words");
  CHECK(json::parse(words.output).at("words") == json::array({"bad", "dull"}));

  auto para = run_cmd("printf 'Sure:\\n\\nEdited text.' | " + kBin + " parse --what paragraph");
  CHECK(json::parse(para.output).at("paragraph") == "Edited text.");

  // qa labels need the option menu
  auto qa_missing = run_cmd("printf 'b)' | " + kBin + " parse --what label --task qa-multichoice");
  CHECK(qa_missing.exit_code != 0);
  auto qa = run_cmd("printf 'b) office' | " + kBin +
                    " parse --what label --task qa-multichoice --options hallway,office");
  CHECK(json::parse(qa.output).at("label") == "office");
}

TEST_CASE("cli: dump-templates emits the full catalog") {
  auto r = run_cmd(kBin + " dump-templates");
  CHECK(r.exit_code == 0);
  auto j = json::parse(r.output);
  CHECK(j.size() == 72);
  int sentiment = 0;
  for (const auto& t : j) {
    CHECK(t.at("prompt").get<std::string>().find("Paragraph:") != std::string::npos);
    if (t.at("task") == "sentiment") ++sentiment;
  }
  CHECK(sentiment == 24);
}

TEST_CASE("cli: full run produces artifacts, a warm re-run reproduces them byte for byte") {
  MockServer server(faithful_bot());
  server.start();
  TempDir tmp;
  auto data = write_dataset(tmp, 6);
  auto out_dir = (tmp.path / "out").string();

  const std::string cmd = kBin + " run --task sentiment --data " + data + " --endpoint " +
                          server.endpoint() + " --model bot --out-dir " + out_dir +
                          " --parallelism 8";
  auto first = run_cmd(cmd);
  CHECK(first.exit_code == 0);
  CHECK(first.output.find("faithfulness") != std::string::npos);
  CHECK(first.output.find("1.000") != std::string::npos);
  for (const char* name : {"records.jsonl", "aggregate.json", "aggregate.csv", "plot_data.csv"})
    CHECK(std::filesystem::exists(tmp.path / "out" / name));
  CHECK(server.request_count() > 0);

  // warm cache: identical artifacts, zero network traffic
  std::map<std::string, std::string> before;
  for (const char* name : {"records.jsonl", "aggregate.json", "aggregate.csv", "plot_data.csv"})
    before[name] = slurp(tmp.path / "out" / name);
  server.reset_stats();
  auto second = run_cmd(cmd);
  CHECK(second.exit_code == 0);
  CHECK(server.request_count() == 0);
  for (const auto& [name, content] : before) CHECK(slurp(tmp.path / "out" / name) == content);
  server.stop();
}

TEST_CASE("cli: report recomputes the aggregates from records alone") {
  MockServer server(faithful_bot());
  server.start();
  TempDir tmp;
  auto data = write_dataset(tmp, 4);
  auto out_dir = (tmp.path / "out").string();
  auto run = run_cmd(kBin + " run --task sentiment --data " + data + " --endpoint " +
                     server.endpoint() + " --model bot --out-dir " + out_dir +
                     " --explanations counterfactual --parallelism 4");
  REQUIRE(run.exit_code == 0);
  server.stop();

  auto rep_dir = (tmp.path / "rep").string();
  auto rep = run_cmd(kBin + " report --records " + out_dir + "/records.jsonl --out-dir " +
                     rep_dir);
  CHECK(rep.exit_code == 0);
  CHECK(slurp(tmp.path / "rep" / "aggregate.csv") == slurp(tmp.path / "out" / "aggregate.csv"));
  CHECK(slurp(tmp.path / "rep" / "plot_data.csv") == slurp(tmp.path / "out" / "plot_data.csv"));
  CHECK_FALSE(std::filesystem::exists(tmp.path / "rep" / "records.jsonl"));

  auto bad = run_cmd(kBin + " report --records /no/records.jsonl");
  CHECK(bad.exit_code != 0);
}

TEST_CASE("cli: config file drives a run, flags win over the file") {
  MockServer server(faithful_bot());
  server.start();
  TempDir tmp;
  auto data = write_dataset(tmp, 2);
  auto cfg_path = (tmp.path / "run.cfg").string();
  {
    std::ofstream cfg(cfg_path);
    cfg << "task=sentiment\n";
    cfg << "data=" << data << "\n";
    cfg << "endpoint=" << server.endpoint() << "\n";
    cfg << "model=from-config\n";
    cfg << "explanations=counterfactual\n";
    cfg << "out-dir=" << (tmp.path / "cfg-out").string() << "\n";
    cfg << "parallelism=2\n";
  }
  auto r = run_cmd(kBin + " run --config " + cfg_path + " --model overridden");
  CHECK(r.exit_code == 0);
  REQUIRE(std::filesystem::exists(tmp.path / "cfg-out" / "records.jsonl"));
  std::ifstream recs(tmp.path / "cfg-out" / "records.jsonl");
  std::string line;
  REQUIRE(std::getline(recs, line));
  CHECK(json::parse(line).at("model") == "overridden");
  server.stop();
}

TEST_CASE("cli: variations sweep emits six configurations per kind") {
  MockServer server(faithful_bot());
  server.start();
  TempDir tmp;
  auto data = write_dataset(tmp, 2);
  auto out_dir = (tmp.path / "sweep").string();
  auto r = run_cmd(kBin + " run --task sentiment --data " + data + " --endpoint " +
                   server.endpoint() + " --model bot --out-dir " + out_dir +
                   " --explanations redaction --variations all --parallelism 8");
  CHECK(r.exit_code == 0);
  std::ifstream agg(tmp.path / "sweep" / "aggregate.json");
  auto j = json::parse(agg);
  CHECK(j.at("groups").size() == 6);
  std::set<std::string> labels;
  for (const auto& g : j.at("groups")) labels.insert(g.at("config").get<std::string>());
  CHECK(labels.count("objective-redacted") == 1);
  CHECK(labels.count("human-removed") == 1);
  CHECK(labels.count("you-redacted") == 1);
  server.stop();
}

TEST_CASE("cli: an unreachable endpoint fails the run") {
  TempDir tmp;
  auto data = write_dataset(tmp, 2);
  auto r = run_cmd(kBin + " run --task sentiment --data " + data +
                   " --endpoint http://127.0.0.1:9 --model bot --out-dir " +
                   (tmp.path / "dead").string() +
                   " --explanations counterfactual --parallelism 2");
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("unreachable") != std::string::npos);
}
