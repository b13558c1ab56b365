#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace faithcheck {

enum class TaskKind { sentiment, qa_multichoice, nli };
enum class Persona { objective, human, you };
enum class MaskStyle { redacted, removed, none };
enum class CfTarget { explicit_target, implicit };
enum class ExplanationKind { counterfactual, feature_attribution, redaction };

// The label every task falls back to when the model can not answer.
inline const std::string kUnknownLabel = "unknown";

// One dataset row. `paragraph` holds the text/story/premise depending on the task;
// `question` and `options` are qa-only, `statement` is nli-only.
struct Observation {
  std::string id;
  std::string paragraph;
  std::string question;
  std::vector<std::string> options;
  std::string statement;
  std::string label;
};

// Prompt variation axes. The default triple matches the main experiment
// (objective persona, [REDACTED] mask, explicit counterfactual target).
struct PromptConfig {
  Persona persona = Persona::objective;
  MaskStyle mask = MaskStyle::redacted;
  CfTarget target = CfTarget::explicit_target;
};

std::string to_string(TaskKind t);
std::string to_string(Persona p);
std::string to_string(MaskStyle m);
std::string to_string(CfTarget t);
std::string to_string(ExplanationKind k);

TaskKind task_from_string(const std::string& s);
Persona persona_from_string(const std::string& s);
MaskStyle mask_from_string(const std::string& s);
CfTarget cf_target_from_string(const std::string& s);
ExplanationKind explanation_kind_from_string(const std::string& s);

// Surface form inserted into paragraphs, e.g. "[REDACTED]". Empty for none.
std::string mask_token(MaskStyle m);

// Grouping label used in reports: persona plus the axis that varies for the kind,
// e.g. "objective-explicit" (counterfactual) or "human-removed" (masking kinds).
std::string config_label(ExplanationKind kind, const PromptConfig& cfg);

}  // namespace faithcheck
