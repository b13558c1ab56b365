#include "faithcheck/types.hpp"

namespace faithcheck {

std::string to_string(TaskKind t) {
  switch (t) {
    case TaskKind::sentiment: return "sentiment";
    case TaskKind::qa_multichoice: return "qa-multichoice";
    case TaskKind::nli: return "nli";
  }
  throw std::logic_error("bad TaskKind");
}

std::string to_string(Persona p) {
  switch (p) {
    case Persona::objective: return "objective";
    case Persona::human: return "human";
    case Persona::you: return "you";
  }
  throw std::logic_error("bad Persona");
}

std::string to_string(MaskStyle m) {
  switch (m) {
    case MaskStyle::redacted: return "redacted";
    case MaskStyle::removed: return "removed";
    case MaskStyle::none: return "none";
  }
  throw std::logic_error("bad MaskStyle");
}

std::string to_string(CfTarget t) {
  switch (t) {
    case CfTarget::explicit_target: return "explicit";
    case CfTarget::implicit: return "implicit";
  }
  throw std::logic_error("bad CfTarget");
}

std::string to_string(ExplanationKind k) {
  switch (k) {
    case ExplanationKind::counterfactual: return "counterfactual";
    case ExplanationKind::feature_attribution: return "feature-attribution";
    case ExplanationKind::redaction: return "redaction";
  }
  throw std::logic_error("bad ExplanationKind");
}

TaskKind task_from_string(const std::string& s) {
  if (s == "sentiment") return TaskKind::sentiment;
  if (s == "qa-multichoice") return TaskKind::qa_multichoice;
  if (s == "nli") return TaskKind::nli;
  throw std::invalid_argument("unknown task: " + s);
}

Persona persona_from_string(const std::string& s) {
  if (s == "objective") return Persona::objective;
  if (s == "human") return Persona::human;
  if (s == "you") return Persona::you;
  throw std::invalid_argument("unknown persona: " + s);
}

MaskStyle mask_from_string(const std::string& s) {
  if (s == "redacted") return MaskStyle::redacted;
  if (s == "removed") return MaskStyle::removed;
  if (s == "none") return MaskStyle::none;
  throw std::invalid_argument("unknown mask style: " + s);
}

CfTarget cf_target_from_string(const std::string& s) {
  if (s == "explicit") return CfTarget::explicit_target;
  if (s == "implicit") return CfTarget::implicit;
  throw std::invalid_argument("unknown counterfactual target: " + s);
}

ExplanationKind explanation_kind_from_string(const std::string& s) {
  if (s == "counterfactual") return ExplanationKind::counterfactual;
  if (s == "feature-attribution") return ExplanationKind::feature_attribution;
  if (s == "redaction") return ExplanationKind::redaction;
  throw std::invalid_argument("unknown explanation kind: " + s);
}

std::string mask_token(MaskStyle m) {
  switch (m) {
    case MaskStyle::redacted: return "[REDACTED]";
    case MaskStyle::removed: return "[REMOVED]";
    case MaskStyle::none: return "";
  }
  throw std::logic_error("bad MaskStyle");
}

std::string config_label(ExplanationKind kind, const PromptConfig& cfg) {
  if (kind == ExplanationKind::counterfactual)
    return to_string(cfg.persona) + "-" + to_string(cfg.target);
  return to_string(cfg.persona) + "-" + to_string(cfg.mask);
}

}  // namespace faithcheck
