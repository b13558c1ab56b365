#include "faithcheck/mock_server.hpp"
#include "faithcheck/text.hpp"

namespace faithcheck {
namespace {

const std::string kPositiveWord = "good";
const std::string kNegativeWord = "bad";

std::string paragraph_of(const std::string& prompt) {
  auto at = prompt.find("\n\nParagraph: ");
  if (at == std::string::npos) return "";
  return prompt.substr(at + 13);
}

enum class BotPromptKind { classify, counterfactual, attribution, redaction };

BotPromptKind bot_prompt_kind(const std::string& prompt) {
  if (prompt.rfind("Edit the following paragraph", 0) == 0) return BotPromptKind::counterfactual;
  if (prompt.rfind("List the most important words", 0) == 0) return BotPromptKind::attribution;
  if (prompt.rfind("Redact the most important words", 0) == 0) return BotPromptKind::redaction;
  return BotPromptKind::classify;
}

std::string replace_word(std::string text, const std::string& from, const std::string& to) {
  std::string out;
  size_t i = 0;
  while (i < text.size()) {
    bool left_ok = i == 0 || !is_word_char(text[i - 1]);
    if (left_ok && starts_with_ci(std::string_view(text).substr(i), from)) {
      size_t end = i + from.size();
      if (end == text.size() || !is_word_char(text[end])) {
        out += to;
        i = end;
        continue;
      }
    }
    out += text[i];
    ++i;
  }
  return out;
}

std::string find_keyword(const std::string& paragraph) {
  if (contains_word_ci(paragraph, kPositiveWord)) return kPositiveWord;
  if (contains_word_ci(paragraph, kNegativeWord)) return kNegativeWord;
  return "";
}

enum class BotMode { faithful, stubborn, oblivious };

std::optional<std::string> keyword_bot(const std::string& prompt, BotMode mode) {
  const std::string paragraph = paragraph_of(prompt);
  switch (bot_prompt_kind(prompt)) {
    case BotPromptKind::classify: {
      if (mode == BotMode::stubborn) return "negative";
      const std::string kw = find_keyword(paragraph);
      if (kw == kPositiveWord) return "positive";
      if (kw == kNegativeWord) return "negative";
      return mode == BotMode::oblivious ? "negative" : "unknown";
    }
    case BotPromptKind::counterfactual: {
      std::string flipped = replace_word(paragraph, kPositiveWord, "TMP_SWAP");
      flipped = replace_word(flipped, kNegativeWord, kPositiveWord);
      flipped = replace_word(flipped, "TMP_SWAP", kNegativeWord);
      return "Sure! Here's a revised version of the paragraph:\n\n" + flipped;
    }
    case BotPromptKind::attribution: {
      const std::string kw = find_keyword(paragraph);
      return "Sure! Here are the most important words:\n\n1. " + (kw.empty() ? "nothing" : kw);
    }
    case BotPromptKind::redaction: {
      const std::string mask =
          prompt.find("[REMOVED]") != std::string::npos ? "[REMOVED]" : "[REDACTED]";
      std::string masked = replace_word(paragraph, kPositiveWord, mask);
      masked = replace_word(masked, kNegativeWord, mask);
      return "Sure! Here's the redacted paragraph:\n\n" + masked;
    }
  }
  return std::nullopt;
}

MockScript bot_script(BotMode mode) {
  MockScript script;
  script.responder = [mode](const std::string& prompt) { return keyword_bot(prompt, mode); };
  return script;
}

}  // namespace

MockScript faithful_bot() { return bot_script(BotMode::faithful); }
MockScript stubborn_bot() { return bot_script(BotMode::stubborn); }
MockScript oblivious_bot() { return bot_script(BotMode::oblivious); }

std::vector<Observation> keyword_dataset(int n) {
  std::vector<Observation> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Observation obs;
    const bool negative = i % 2 == 0;
    char id[16];
    std::snprintf(id, sizeof(id), "obs-%03d", i);
    obs.id = id;
    obs.paragraph = "Review " + std::to_string(i) + ": the film was " +
                    (negative ? kNegativeWord : kPositiveWord) + " and scene " +
                    std::to_string(i) + " ran long.";
    obs.label = negative ? "negative" : "positive";
    out.push_back(std::move(obs));
  }
  return out;
}

}  // namespace faithcheck
