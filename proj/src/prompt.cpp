#include "faithcheck/prompt.hpp"

#include <stdexcept>

namespace faithcheck {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void validate(TaskKind task, const Observation& obs) {
  require(!obs.paragraph.empty(), "observation " + obs.id + ": empty paragraph");
  if (task == TaskKind::qa_multichoice) {
    require(!obs.question.empty(), "observation " + obs.id + ": qa needs a question");
    require(obs.options.size() >= 2, "observation " + obs.id + ": qa needs at least 2 options");
  }
  if (task == TaskKind::nli)
    require(!obs.statement.empty(), "observation " + obs.id + ": nli needs a statement");
}

char option_letter(size_t i) {
  require(i < 26, "too many options");
  return static_cast<char>('a' + i);
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

// a) "hallway", b) "office"
std::string option_item(size_t i, const std::string& text) {
  return std::string(1, option_letter(i)) + ") " + quoted(text);
}

// Enumeration used by the implicit counterfactual: ", and " before the last item.
std::string option_enumeration(const std::vector<std::string>& options) {
  std::string out;
  for (size_t i = 0; i < options.size(); ++i) {
    if (i > 0) out += (i + 1 == options.size()) ? ", and " : ", ";
    out += option_item(i, options[i]);
  }
  return out;
}

std::string mask_sentence(MaskStyle m) {
  switch (m) {
    case MaskStyle::redacted:
      return "The paragraph can contain redacted words marked with [REDACTED].";
    case MaskStyle::removed:
      return "The paragraph can contain removed words marked with [REMOVED].";
    case MaskStyle::none:
      return "";
  }
  throw std::logic_error("bad MaskStyle");
}

std::string answer_instruction(TaskKind task, const Observation& obs) {
  switch (task) {
    case TaskKind::sentiment:
      return "Answer only \"positive\", \"negative\", \"neutral\", or \"unknown\".";
    case TaskKind::qa_multichoice: {
      std::string out = "Answer either ";
      for (size_t i = 0; i < obs.options.size(); ++i) {
        out += option_item(i, obs.options[i]) + ", ";
      }
      out += "or ";
      out += option_letter(obs.options.size());
      out += ") \"unknown\" if the question can not be answered.";
      return out;
    }
    case TaskKind::nli:
      return "Answer either 1) \"yes\" for entailment, 2) \"no\" for no entailment, "
             "or 3) \"unknown\" if the question can not be answered.";
  }
  throw std::logic_error("bad TaskKind");
}

std::string classification_head(TaskKind task, Persona p, const Observation& obs) {
  switch (task) {
    case TaskKind::sentiment:
      switch (p) {
        case Persona::objective: return "What is the sentiment of the following paragraph?";
        case Persona::human:
          return "What would a human classify the sentiment of the following paragraph as?";
        case Persona::you:
          return "What would you classify the sentiment of the following paragraph as?";
      }
      break;
    case TaskKind::qa_multichoice:
      switch (p) {
        case Persona::objective:
          return "Consider the following paragraph, and answer the question: " + quoted(obs.question);
        case Persona::human:
          return "Consideing the following paragraph, how would a human answer the question: " +
                 quoted(obs.question);
        case Persona::you:
          return "Consideing the following paragraph, how would you answer the question: " +
                 quoted(obs.question);
      }
      break;
    case TaskKind::nli:
      switch (p) {
        case Persona::objective:
          return "Does the statement " + quoted(obs.statement) +
                 " entail from the following paragraph?";
        case Persona::human:
          return "Does a human think the statement " + quoted(obs.statement) +
                 " entail from the following paragraph?";
        case Persona::you:
          return "Do you think the statement " + quoted(obs.statement) +
                 " entail from the following paragraph?";
      }
      break;
  }
  throw std::logic_error("bad task/persona");
}

std::string assemble(std::vector<std::string> sentences, const std::string& paragraph) {
  std::string out;
  for (const auto& s : sentences) {
    if (s.empty()) continue;
    if (!out.empty()) out += ' ';
    out += s;
  }
  out += "\n\nParagraph: ";
  out += paragraph;
  return out;
}

std::string counterfactual_head(TaskKind task, const Observation& obs, const PromptConfig& cfg) {
  const bool exp = cfg.target == CfTarget::explicit_target;
  const std::string target = exp ? counterfactual_target_label(task, obs) : "";
  switch (task) {
    case TaskKind::sentiment:
      if (exp) {
        switch (cfg.persona) {
          case Persona::objective:
            return "Edit the following paragraph such that the sentiment is " + quoted(target) + ".";
          case Persona::human:
            return "Edit the following paragraph such a human would classify the sentiment is " +
                   quoted(target) + ".";
          case Persona::you:
            return "Edit the following paragraph such you would classify the sentiment is " +
                   quoted(target) + ".";
        }
      }
      switch (cfg.persona) {
        case Persona::objective:
          return "Edit the following paragraph such that the sentiment becomes the opposite of "
                 "what it currently is.";
        case Persona::human:
          return "Edit the following paragraph such a human would classify the as the opposite of "
                 "what it currently is.";
        case Persona::you:
          return "Edit the following paragraph such you would classify the sentiment as the "
                 "opposite of what it currently is.";
      }
      break;
    case TaskKind::qa_multichoice: {
      if (exp) {
        switch (cfg.persona) {
          case Persona::objective:
            return "Edit the following paragraph such that the answer to the question " +
                   quoted(obs.question) + " is " + quoted(target) + ".";
          case Persona::human:
            return "Edit the following paragraph such a human would answer the question " +
                   quoted(obs.question) + " with " + quoted(target) + ".";
          case Persona::you:
            return "Edit the following paragraph such you would answer the question " +
                   quoted(obs.question) + " with " + quoted(target) + ".";
        }
      }
      const std::string options_sentence =
          "The possible answer options, including the current answer, are " +
          option_enumeration(obs.options) + ".";
      switch (cfg.persona) {
        case Persona::objective:
          return "Edit the following paragraph such that the answer to the question " +
                 quoted(obs.question) + " is different from how it should currently be answered. " +
                 options_sentence;
        case Persona::human:
          return "Edit the following paragraph such a human would answer the question " +
                 quoted(obs.question) + " differently from how it should currently be answered. " +
                 options_sentence;
        case Persona::you:
          return "Edit the following paragraph such you would answer the question " +
                 quoted(obs.question) + " differently from how it should currently be answered. " +
                 options_sentence;
      }
      break;
    }
    case TaskKind::nli: {
      if (exp) {
        const std::string entail =
            target == "no" ? "does not entails from it" : "entails from it";
        switch (cfg.persona) {
          case Persona::objective:
            return "Edit the following paragraph such that the statement " +
                   quoted(obs.statement) + " " + entail + ".";
          case Persona::human:
            return "Edit the following paragraph such that a human would say the statement " +
                   quoted(obs.statement) + " " + entail + ".";
          case Persona::you:
            return "Edit the following paragraph such that you would say the statement " +
                   quoted(obs.statement) + " " + entail + ".";
        }
      }
      const std::string given = "Edit the following paragraph, such that given the statement " +
                                quoted(obs.statement) + ", ";
      switch (cfg.persona) {
        case Persona::objective:
          return given + "the entailment becomes the opposite of what it currently is.";
        case Persona::human:
          return given + "a human would say the entailment is the opposite of what it currently is.";
        case Persona::you:
          return given + "you would say the entailment is the opposite of what it currently is.";
      }
      break;
    }
  }
  throw std::logic_error("bad task/persona");
}

std::string importance_clause(TaskKind task, Persona p, bool redaction) {
  switch (task) {
    case TaskKind::sentiment:
      switch (p) {
        case Persona::objective: return "the sentiment can not be determined";
        case Persona::human: return "a human can not determine the sentiment";
        case Persona::you: return "you can not determine the sentiment";
      }
      break;
    case TaskKind::qa_multichoice:
      switch (p) {
        case Persona::objective: return "the question can not be answered";
        case Persona::human: return "a human can not answer the question";
        case Persona::you: return "you can not answer the question";
      }
      break;
    case TaskKind::nli:
      switch (p) {
        case Persona::objective:
          return "it can not be determined if there is entailment or no entailment";
        case Persona::human:
          // The attribution variant of this clause is garbled in the source
          // experiments; reproduced as observed.
          return redaction ? "a human can not determine if there is entailment or no entailment"
                           : "you a human not determine if there is entailment or no entailment";
        case Persona::you:
          return "you can not determine if there is entailment or no entailment";
      }
      break;
  }
  throw std::logic_error("bad task/persona");
}

std::string importance_subject(TaskKind task, const Observation& obs, const std::string& verb) {
  switch (task) {
    case TaskKind::sentiment:
      return verb + " the most important words for determining the sentiment of the following "
                    "paragraph";
    case TaskKind::qa_multichoice:
      return verb + " the most important words for answering " + quoted(obs.question) +
             " given the following paragraph";
    case TaskKind::nli:
      return verb + " the most important words in the following paragraph, for determining if "
                    "the statement " +
             quoted(obs.statement) + " entails from it";
  }
  throw std::logic_error("bad TaskKind");
}

}  // namespace

std::string counterfactual_target_label(TaskKind task, const Observation& obs) {
  switch (task) {
    case TaskKind::sentiment:
      return obs.label == "negative" ? "positive" : "negative";
    case TaskKind::qa_multichoice:
      for (const auto& o : obs.options) {
        if (o != obs.label) return o;
      }
      throw std::invalid_argument("observation " + obs.id + ": no non-gold option");
    case TaskKind::nli:
      return obs.label == "yes" ? "no" : "yes";
  }
  throw std::logic_error("bad TaskKind");
}

std::string render_classification(TaskKind task, const Observation& obs, const PromptConfig& cfg,
                                  const std::string* paragraph_override) {
  validate(task, obs);
  const std::string& para = paragraph_override ? *paragraph_override : obs.paragraph;
  return assemble({classification_head(task, cfg.persona, obs), mask_sentence(cfg.mask),
                   answer_instruction(task, obs), "Do not explain the answer."},
                  para);
}

std::string render_counterfactual(TaskKind task, const Observation& obs, const PromptConfig& cfg) {
  validate(task, obs);
  return assemble({counterfactual_head(task, obs, cfg), "Make as few edits as possible.",
                   "Do not explain the answer."},
                  obs.paragraph);
}

std::string render_feature_attribution(TaskKind task, const Observation& obs,
                                       const PromptConfig& cfg) {
  validate(task, obs);
  return assemble({importance_subject(task, obs, "List") + ", such that without these words " +
                       importance_clause(task, cfg.persona, false) + ".",
                   "Do not explain the answer."},
                  obs.paragraph);
}

std::string render_redaction(TaskKind task, const Observation& obs, const PromptConfig& cfg) {
  validate(task, obs);
  require(cfg.mask != MaskStyle::none, "redaction prompt needs a mask token");
  return assemble({importance_subject(task, obs, "Redact") + ", by replacing important words with " +
                       mask_token(cfg.mask) + ", such that without these words " +
                       importance_clause(task, cfg.persona, true) + ".",
                   "Do not explain the answer."},
                  obs.paragraph);
}

std::string render_explanation(ExplanationKind kind, TaskKind task, const Observation& obs,
                               const PromptConfig& cfg) {
  switch (kind) {
    case ExplanationKind::counterfactual: return render_counterfactual(task, obs, cfg);
    case ExplanationKind::feature_attribution: return render_feature_attribution(task, obs, cfg);
    case ExplanationKind::redaction: return render_redaction(task, obs, cfg);
  }
  throw std::logic_error("bad ExplanationKind");
}

std::vector<TemplateDump> dump_templates() {
  std::vector<TemplateDump> out;
  const Persona personas[] = {Persona::objective, Persona::human, Persona::you};
  for (TaskKind task : {TaskKind::sentiment, TaskKind::qa_multichoice, TaskKind::nli}) {
    Observation obs;
    obs.id = "example";
    obs.paragraph = "<PARAGRAPH>";
    if (task == TaskKind::sentiment) obs.label = "negative";
    if (task == TaskKind::qa_multichoice) {
      obs.question = "<QUESTION>";
      obs.options = {"<OPTION_1>", "<OPTION_2>"};
      obs.label = "<OPTION_2>";
    }
    if (task == TaskKind::nli) {
      obs.statement = "<STATEMENT>";
      obs.label = "yes";
    }
    for (Persona p : personas) {
      for (MaskStyle m : {MaskStyle::redacted, MaskStyle::removed, MaskStyle::none}) {
        PromptConfig cfg{p, m, CfTarget::explicit_target};
        out.push_back({task, "classification", cfg, render_classification(task, obs, cfg)});
      }
      for (CfTarget t : {CfTarget::explicit_target, CfTarget::implicit}) {
        PromptConfig cfg{p, MaskStyle::redacted, t};
        out.push_back({task, to_string(ExplanationKind::counterfactual), cfg,
                       render_counterfactual(task, obs, cfg)});
      }
      PromptConfig fa_cfg{p, MaskStyle::redacted, CfTarget::explicit_target};
      out.push_back({task, to_string(ExplanationKind::feature_attribution), fa_cfg,
                     render_feature_attribution(task, obs, fa_cfg)});
      for (MaskStyle m : {MaskStyle::redacted, MaskStyle::removed}) {
        PromptConfig cfg{p, m, CfTarget::explicit_target};
        out.push_back({task, to_string(ExplanationKind::redaction), cfg,
                       render_redaction(task, obs, cfg)});
      }
    }
  }
  return out;
}

}  // namespace faithcheck
