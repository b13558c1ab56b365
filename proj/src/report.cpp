#include "faithcheck/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <tuple>

namespace faithcheck {

using nlohmann::json;

namespace {

const char* kSkipReasons[] = {
    kSkipIncorrect,           kSkipClassifyUnparseable, kSkipExplanationRefused,
    kSkipExplanationUnparseable, kSkipRecheckUnparseable,  kSkipInferenceError,
};

std::string format_value(const RatioStat& r) {
  if (!r.defined()) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", r.value());
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::vector<AggregateRow> aggregate_records(const std::vector<VerdictRecord>& records) {
  using Key = std::tuple<int, std::string, int, int, int, int>;
  std::map<Key, AggregateRow> groups;
  for (const auto& r : records) {
    Key key{static_cast<int>(r.task), r.model,          static_cast<int>(r.kind),
            static_cast<int>(r.config.persona), static_cast<int>(r.config.mask),
            static_cast<int>(r.config.target)};
    auto [it, fresh] = groups.try_emplace(key);
    AggregateRow& row = it->second;
    if (fresh) {
      row.task = r.task;
      row.model = r.model;
      row.kind = r.kind;
      row.config = r.config;
      for (const char* reason : kSkipReasons) row.skips[reason] = 0;
    }
    ++row.records;
    if (r.classification_correct) ++row.correct;
    switch (r.verdict) {
      case Verdict::faithful: ++row.faithful; break;
      case Verdict::not_faithful: ++row.not_faithful; break;
      case Verdict::skipped: ++row.skips[r.skip_reason.empty() ? "other" : r.skip_reason]; break;
    }
  }
  std::vector<AggregateRow> rows;
  rows.reserve(groups.size());
  for (auto& [key, row] : groups) rows.push_back(std::move(row));
  return rows;
}

json aggregate_to_json(const std::vector<AggregateRow>& rows) {
  json groups = json::array();
  for (const auto& row : rows) {
    json g;
    g["task"] = to_string(row.task);
    g["model"] = row.model;
    g["kind"] = to_string(row.kind);
    g["config"] = row.label();
    g["persona"] = to_string(row.config.persona);
    g["mask"] = to_string(row.config.mask);
    g["target"] = to_string(row.config.target);
    g["records"] = row.records;
    g["correct"] = row.correct;
    g["faithful"] = row.faithful;
    g["not_faithful"] = row.not_faithful;
    auto ratio = [](const RatioStat& r) -> json {
      if (!r.defined()) return nullptr;
      return json{{"numerator", r.numerator}, {"denominator", r.denominator}, {"value", r.value()}};
    };
    g["accuracy"] = ratio(row.accuracy());
    g["faithfulness"] = ratio(row.faithfulness());
    g["skips"] = row.skips;
    groups.push_back(std::move(g));
  }
  return json{{"groups", groups}};
}

std::string aggregate_to_csv(const std::vector<AggregateRow>& rows) {
  std::string out =
      "task,model,kind,config,records,correct,accuracy,eligible,faithful,not_faithful,"
      "faithfulness";
  for (const char* reason : kSkipReasons) out += std::string(",skip_") + reason;
  out += "\n";
  for (const auto& row : rows) {
    out += csv_field(to_string(row.task)) + "," + csv_field(row.model) + "," +
           csv_field(to_string(row.kind)) + "," + csv_field(row.label()) + "," +
           std::to_string(row.records) + "," + std::to_string(row.correct) + "," +
           format_value(row.accuracy()) + "," +
           std::to_string(row.faithfulness().denominator) + "," + std::to_string(row.faithful) +
           "," + std::to_string(row.not_faithful) + "," + format_value(row.faithfulness());
    for (const char* reason : kSkipReasons) {
      auto it = row.skips.find(reason);
      out += "," + std::to_string(it == row.skips.end() ? 0 : it->second);
    }
    out += "\n";
  }
  return out;
}

std::string plot_data_csv(const std::vector<AggregateRow>& rows) {
  std::string out = "metric,task,model,kind,config,numerator,denominator,value\n";
  auto line = [&](const char* metric, const AggregateRow& row, const RatioStat& r) {
    out += std::string(metric) + "," + csv_field(to_string(row.task)) + "," +
           csv_field(row.model) + "," + csv_field(to_string(row.kind)) + "," +
           csv_field(row.label()) + "," + std::to_string(r.numerator) + "," +
           std::to_string(r.denominator) + "," + format_value(r) + "\n";
  };
  for (const auto& row : rows) {
    line("accuracy", row, row.accuracy());
    line("faithfulness", row, row.faithfulness());
  }
  return out;
}

std::string summary_table(const std::vector<AggregateRow>& rows) {
  auto ratio_cell = [](const RatioStat& r) {
    char buf[64];
    if (r.defined())
      std::snprintf(buf, sizeof(buf), "%.3f (%lld/%lld)", r.value(), r.numerator, r.denominator);
    else
      std::snprintf(buf, sizeof(buf), "-     (%lld/%lld)", r.numerator, r.denominator);
    return std::string(buf);
  };
  std::string out;
  char header[160];
  std::snprintf(header, sizeof(header), "%-20s %-20s %6s %-16s %-16s %s\n", "kind", "config",
                "n", "accuracy", "faithfulness", "skipped");
  out += header;
  for (const auto& row : rows) {
    long long skipped = 0;
    for (const auto& [_, n] : row.skips) skipped += n;
    char line[256];
    std::snprintf(line, sizeof(line), "%-20s %-20s %6lld %-16s %-16s %lld\n",
                  to_string(row.kind).c_str(), row.label().c_str(), row.records,
                  ratio_cell(row.accuracy()).c_str(), ratio_cell(row.faithfulness()).c_str(),
                  skipped);
    out += line;
  }
  return out;
}

void write_records_jsonl(const std::string& path, const std::vector<VerdictRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& r : records) out << record_to_json(r).dump() << "\n";
}

std::vector<VerdictRecord> read_records_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open records file: " + path);
  std::vector<VerdictRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_artifacts(const std::string& out_dir, const std::vector<VerdictRecord>& records,
                     bool include_records) {
  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);
  if (include_records) write_records_jsonl((dir / "records.jsonl").string(), records);
  const auto rows = aggregate_records(records);
  {
    std::ofstream out(dir / "aggregate.json");
    out << aggregate_to_json(rows).dump(1) << "\n";
  }
  {
    std::ofstream out(dir / "aggregate.csv");
    out << aggregate_to_csv(rows);
  }
  {
    std::ofstream out(dir / "plot_data.csv");
    out << plot_data_csv(rows);
  }
}

}  // namespace faithcheck
