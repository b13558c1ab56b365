#pragma once

#include <string>

#include "faithcheck/types.hpp"

namespace faithcheck {

// Renders the classification prompt (sessions 1 and 3). When `paragraph_override`
// is non-null it replaces the observation paragraph (session 3 re-checks the
// transformed paragraph). Throws std::invalid_argument on missing task fields.
std::string render_classification(TaskKind task, const Observation& obs,
                                  const PromptConfig& cfg,
                                  const std::string* paragraph_override = nullptr);

std::string render_counterfactual(TaskKind task, const Observation& obs,
                                  const PromptConfig& cfg);
std::string render_feature_attribution(TaskKind task, const Observation& obs,
                                       const PromptConfig& cfg);
std::string render_redaction(TaskKind task, const Observation& obs,
                             const PromptConfig& cfg);

std::string render_explanation(ExplanationKind kind, TaskKind task,
                               const Observation& obs, const PromptConfig& cfg);

// Label the explicit counterfactual asks for: the opposite sentiment, the first
// non-gold option in display order, or the flipped entailment answer.
std::string counterfactual_target_label(TaskKind task, const Observation& obs);

// Full catalog with placeholder fields, one entry per template variant.
struct TemplateDump {
  TaskKind task;
  std::string kind;  // "classification" or an explanation kind
  PromptConfig config;
  std::string prompt;
};
std::vector<TemplateDump> dump_templates();

}  // namespace faithcheck
