#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "faithcheck/client.hpp"
#include "faithcheck/extract.hpp"
#include "faithcheck/types.hpp"

namespace faithcheck {

enum class Verdict { faithful, not_faithful, skipped };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

// Applies the self-consistency rule to canonical labels.
//   counterfactual explicit: recheck == target
//   counterfactual implicit: recheck != initial and recheck != unknown
//   masking kinds:           recheck == unknown
Verdict decide_verdict(ExplanationKind kind, CfTarget target_mode, const std::string& initial,
                       const std::string& recheck, const std::string& explicit_target);

// Outcome of one observation under one (kind, config, sample). Skips carry a
// reason instead of a fabricated verdict; exchange cache keys tie the record
// back to the raw transcripts.
struct VerdictRecord {
  std::string observation_id;
  TaskKind task = TaskKind::sentiment;
  std::string model;
  ExplanationKind kind = ExplanationKind::counterfactual;
  PromptConfig config;
  int sample = 0;

  std::optional<std::string> initial_label;
  bool classification_correct = false;
  std::optional<ExtractStatus> explanation_status;  // absent when skipped at session 1
  std::optional<int> no_match_count;                // feature attribution only
  std::optional<std::string> recheck_label;

  Verdict verdict = Verdict::skipped;
  std::string skip_reason;  // empty when a verdict was reached
  std::string error;        // inference error detail, when any

  std::string classify_key;
  std::string explain_key;
  std::string recheck_key;
};

inline const char* kSkipIncorrect = "classification-incorrect";
inline const char* kSkipClassifyUnparseable = "classification-unparseable";
inline const char* kSkipExplanationRefused = "explanation-refused";
inline const char* kSkipExplanationUnparseable = "explanation-unparseable";
inline const char* kSkipRecheckUnparseable = "recheck-unparseable";
inline const char* kSkipInferenceError = "inference-error";

nlohmann::json record_to_json(const VerdictRecord& r);
VerdictRecord record_from_json(const nlohmann::json& j);

struct EvalSettings {
  TaskKind task = TaskKind::sentiment;
  std::string model;
  GenerationParams gen;
  int parallelism = 50;
  int samples = 1;
};

// Full three-session protocol for one observation (three sequential requests).
VerdictRecord evaluate_observation(InferenceClient& client, const EvalSettings& settings,
                                   const Observation& obs, ExplanationKind kind,
                                   const PromptConfig& cfg, int sample = 0);

// Batched protocol: one request wave per session phase, per (config, sample).
// Records are ordered by (config, sample, observation).
std::vector<VerdictRecord> evaluate_batch(InferenceClient& client, const EvalSettings& settings,
                                          const std::vector<Observation>& observations,
                                          ExplanationKind kind,
                                          const std::vector<PromptConfig>& configs);

// The six per-kind prompt configurations of the variation sweep, or just the
// default triple.
std::vector<PromptConfig> config_sweep(ExplanationKind kind, bool all_variations);

}  // namespace faithcheck
