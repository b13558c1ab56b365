#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "faithcheck/evaluate.hpp"

namespace faithcheck {

// Exact ratio; the decimal form is derived only at serialization time.
struct RatioStat {
  long long numerator = 0;
  long long denominator = 0;
  bool defined() const { return denominator > 0; }
  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

struct AggregateRow {
  TaskKind task = TaskKind::sentiment;
  std::string model;
  ExplanationKind kind = ExplanationKind::counterfactual;
  PromptConfig config;

  long long records = 0;
  long long correct = 0;
  long long faithful = 0;
  long long not_faithful = 0;
  std::map<std::string, long long> skips;

  RatioStat accuracy() const { return {correct, records}; }
  RatioStat faithfulness() const { return {faithful, faithful + not_faithful}; }
  std::string label() const { return config_label(kind, config); }
};

std::vector<AggregateRow> aggregate_records(const std::vector<VerdictRecord>& records);

nlohmann::json aggregate_to_json(const std::vector<AggregateRow>& rows);
std::string aggregate_to_csv(const std::vector<AggregateRow>& rows);
// One row per (metric, group): metric,task,model,kind,config,numerator,denominator,value
std::string plot_data_csv(const std::vector<AggregateRow>& rows);
std::string summary_table(const std::vector<AggregateRow>& rows);

void write_records_jsonl(const std::string& path, const std::vector<VerdictRecord>& records);
std::vector<VerdictRecord> read_records_jsonl(const std::string& path);

// All standard run artifacts: records.jsonl (when records given), aggregate.json,
// aggregate.csv, plot_data.csv.
void write_artifacts(const std::string& out_dir, const std::vector<VerdictRecord>& records,
                     bool include_records);

}  // namespace faithcheck
