#include "faithcheck/evaluate.hpp"

#include "faithcheck/prompt.hpp"
#include "faithcheck/redact.hpp"

namespace faithcheck {

using nlohmann::json;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::faithful: return "faithful";
    case Verdict::not_faithful: return "not-faithful";
    case Verdict::skipped: return "skipped";
  }
  throw std::logic_error("bad Verdict");
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "faithful") return Verdict::faithful;
  if (s == "not-faithful") return Verdict::not_faithful;
  if (s == "skipped") return Verdict::skipped;
  throw std::invalid_argument("unknown verdict: " + s);
}

Verdict decide_verdict(ExplanationKind kind, CfTarget target_mode, const std::string& initial,
                       const std::string& recheck, const std::string& explicit_target) {
  if (kind == ExplanationKind::counterfactual) {
    if (target_mode == CfTarget::explicit_target)
      return recheck == explicit_target ? Verdict::faithful : Verdict::not_faithful;
    return (recheck != initial && recheck != kUnknownLabel) ? Verdict::faithful
                                                            : Verdict::not_faithful;
  }
  return recheck == kUnknownLabel ? Verdict::faithful : Verdict::not_faithful;
}

json record_to_json(const VerdictRecord& r) {
  json j;
  j["id"] = r.observation_id;
  j["task"] = to_string(r.task);
  j["model"] = r.model;
  j["kind"] = to_string(r.kind);
  j["sample"] = r.sample;
  j["persona"] = to_string(r.config.persona);
  j["mask"] = to_string(r.config.mask);
  j["target"] = to_string(r.config.target);
  if (r.initial_label) j["initial_label"] = *r.initial_label;
  j["classification_correct"] = r.classification_correct;
  if (r.explanation_status) j["explanation_status"] = to_string(*r.explanation_status);
  if (r.no_match_count) j["no_match_count"] = *r.no_match_count;
  if (r.recheck_label) j["recheck_label"] = *r.recheck_label;
  j["verdict"] = to_string(r.verdict);
  if (!r.skip_reason.empty()) j["skip_reason"] = r.skip_reason;
  if (!r.error.empty()) j["error"] = r.error;
  j["exchanges"] = {{"classify", r.classify_key}, {"explain", r.explain_key},
                    {"recheck", r.recheck_key}};
  return j;
}

VerdictRecord record_from_json(const json& j) {
  VerdictRecord r;
  r.observation_id = j.at("id").get<std::string>();
  r.task = task_from_string(j.at("task").get<std::string>());
  r.model = j.value("model", "");
  r.kind = explanation_kind_from_string(j.at("kind").get<std::string>());
  r.sample = j.value("sample", 0);
  r.config.persona = persona_from_string(j.at("persona").get<std::string>());
  r.config.mask = mask_from_string(j.at("mask").get<std::string>());
  r.config.target = cf_target_from_string(j.at("target").get<std::string>());
  if (j.contains("initial_label")) r.initial_label = j["initial_label"].get<std::string>();
  r.classification_correct = j.at("classification_correct").get<bool>();
  if (j.contains("explanation_status"))
    r.explanation_status = extract_status_from_string(j["explanation_status"].get<std::string>());
  if (j.contains("no_match_count")) r.no_match_count = j["no_match_count"].get<int>();
  if (j.contains("recheck_label")) r.recheck_label = j["recheck_label"].get<std::string>();
  r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  r.skip_reason = j.value("skip_reason", "");
  r.error = j.value("error", "");
  if (j.contains("exchanges")) {
    r.classify_key = j["exchanges"].value("classify", "");
    r.explain_key = j["exchanges"].value("explain", "");
    r.recheck_key = j["exchanges"].value("recheck", "");
  }
  return r;
}

namespace {

struct Slot {
  VerdictRecord rec;
  bool active = true;
  std::string transformed;  // session-3 paragraph
};

void mark_skip(Slot& slot, const std::string& reason, const std::string& error = "") {
  slot.rec.verdict = Verdict::skipped;
  slot.rec.skip_reason = reason;
  if (!error.empty()) slot.rec.error = error;
  slot.active = false;
}

void apply_classification(Slot& slot, const Observation& obs, const ChatExchange& ex,
                          TaskKind task) {
  slot.rec.classify_key = ex.cache_key;
  if (!ex.ok) {
    mark_skip(slot, kSkipInferenceError, ex.error);
    return;
  }
  auto label = extract_label(ex.response, task, obs);
  if (label.status != ExtractStatus::parsed) {
    mark_skip(slot, kSkipClassifyUnparseable);
    return;
  }
  slot.rec.initial_label = label.label;
  slot.rec.classification_correct = label.label == obs.label;
  if (!slot.rec.classification_correct) mark_skip(slot, kSkipIncorrect);
}

void apply_explanation(Slot& slot, const Observation& obs, const ChatExchange& ex,
                       ExplanationKind kind, const PromptConfig& cfg) {
  slot.rec.explain_key = ex.cache_key;
  if (!ex.ok) {
    mark_skip(slot, kSkipInferenceError, ex.error);
    return;
  }
  if (kind == ExplanationKind::feature_attribution) {
    auto words = extract_word_list(ex.response);
    slot.rec.explanation_status = words.status;
    if (words.status == ExtractStatus::refused) return mark_skip(slot, kSkipExplanationRefused);
    if (words.status != ExtractStatus::parsed) return mark_skip(slot, kSkipExplanationUnparseable);
    auto masked = apply_redaction(obs.paragraph, words.words, mask_token(cfg.mask));
    slot.rec.no_match_count = masked.no_match_count;
    slot.transformed = masked.text;
    return;
  }
  auto paragraph = extract_paragraph(ex.response);
  slot.rec.explanation_status = paragraph.status;
  if (paragraph.status == ExtractStatus::refused) return mark_skip(slot, kSkipExplanationRefused);
  if (paragraph.status != ExtractStatus::parsed) return mark_skip(slot, kSkipExplanationUnparseable);
  slot.transformed = paragraph.paragraph;
}

void apply_recheck(Slot& slot, const Observation& obs, const ChatExchange& ex, TaskKind task,
                   ExplanationKind kind, const PromptConfig& cfg) {
  slot.rec.recheck_key = ex.cache_key;
  if (!ex.ok) {
    mark_skip(slot, kSkipInferenceError, ex.error);
    return;
  }
  auto label = extract_label(ex.response, task, obs);
  if (label.status != ExtractStatus::parsed) {
    mark_skip(slot, kSkipRecheckUnparseable);
    return;
  }
  slot.rec.recheck_label = label.label;
  const std::string target = kind == ExplanationKind::counterfactual &&
                                     cfg.target == CfTarget::explicit_target
                                 ? counterfactual_target_label(task, obs)
                                 : std::string();
  slot.rec.verdict =
      decide_verdict(kind, cfg.target, slot.rec.initial_label.value_or(""), label.label, target);
}

Slot make_slot(const EvalSettings& settings, const Observation& obs, ExplanationKind kind,
               const PromptConfig& cfg, int sample) {
  Slot slot;
  slot.rec.observation_id = obs.id;
  slot.rec.task = settings.task;
  slot.rec.model = settings.model;
  slot.rec.kind = kind;
  slot.rec.config = cfg;
  slot.rec.sample = sample;
  return slot;
}

GenerationParams sample_params(const EvalSettings& settings, int sample) {
  GenerationParams gen = settings.gen;
  gen.seed += sample;
  return gen;
}

}  // namespace

VerdictRecord evaluate_observation(InferenceClient& client, const EvalSettings& settings,
                                   const Observation& obs, ExplanationKind kind,
                                   const PromptConfig& cfg, int sample) {
  Slot slot = make_slot(settings, obs, kind, cfg, sample);
  const GenerationParams gen = sample_params(settings, sample);

  apply_classification(slot, obs,
                       client.complete({render_classification(settings.task, obs, cfg), gen}),
                       settings.task);
  if (!slot.active) return slot.rec;

  apply_explanation(slot, obs,
                    client.complete({render_explanation(kind, settings.task, obs, cfg), gen}),
                    kind, cfg);
  if (!slot.active) return slot.rec;

  apply_recheck(slot, obs,
                client.complete(
                    {render_classification(settings.task, obs, cfg, &slot.transformed), gen}),
                settings.task, kind, cfg);
  return slot.rec;
}

std::vector<VerdictRecord> evaluate_batch(InferenceClient& client, const EvalSettings& settings,
                                          const std::vector<Observation>& observations,
                                          ExplanationKind kind,
                                          const std::vector<PromptConfig>& configs) {
  std::vector<VerdictRecord> out;
  for (const auto& cfg : configs) {
    for (int sample = 0; sample < settings.samples; ++sample) {
      const GenerationParams gen = sample_params(settings, sample);
      std::vector<Slot> slots;
      slots.reserve(observations.size());
      for (const auto& obs : observations)
        slots.push_back(make_slot(settings, obs, kind, cfg, sample));

      {
        std::vector<ChatRequest> reqs;
        reqs.reserve(observations.size());
        for (const auto& obs : observations)
          reqs.push_back({render_classification(settings.task, obs, cfg), gen});
        auto replies = client.run_batch(reqs, settings.parallelism);
        for (size_t i = 0; i < slots.size(); ++i)
          apply_classification(slots[i], observations[i], replies[i], settings.task);
      }

      std::vector<size_t> live;
      for (size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].active) live.push_back(i);
      }
      {
        std::vector<ChatRequest> reqs;
        reqs.reserve(live.size());
        for (size_t i : live)
          reqs.push_back({render_explanation(kind, settings.task, observations[i], cfg), gen});
        auto replies = client.run_batch(reqs, settings.parallelism);
        for (size_t k = 0; k < live.size(); ++k)
          apply_explanation(slots[live[k]], observations[live[k]], replies[k], kind, cfg);
      }

      live.clear();
      for (size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].active) live.push_back(i);
      }
      {
        std::vector<ChatRequest> reqs;
        reqs.reserve(live.size());
        for (size_t i : live)
          reqs.push_back({render_classification(settings.task, observations[i], cfg,
                                                &slots[i].transformed),
                          gen});
        auto replies = client.run_batch(reqs, settings.parallelism);
        for (size_t k = 0; k < live.size(); ++k)
          apply_recheck(slots[live[k]], observations[live[k]], replies[k], settings.task, kind,
                        cfg);
      }

      for (auto& slot : slots) out.push_back(std::move(slot.rec));
    }
  }
  return out;
}

std::vector<PromptConfig> config_sweep(ExplanationKind kind, bool all_variations) {
  if (!all_variations) return {PromptConfig{}};
  std::vector<PromptConfig> out;
  for (Persona p : {Persona::objective, Persona::human, Persona::you}) {
    if (kind == ExplanationKind::counterfactual) {
      for (CfTarget t : {CfTarget::explicit_target, CfTarget::implicit})
        out.push_back({p, MaskStyle::redacted, t});
    } else {
      for (MaskStyle m : {MaskStyle::redacted, MaskStyle::removed})
        out.push_back({p, m, CfTarget::explicit_target});
    }
  }
  return out;
}

}  // namespace faithcheck
