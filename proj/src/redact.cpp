#include "faithcheck/redact.hpp"

#include <algorithm>

#include "faithcheck/text.hpp"

namespace faithcheck {
namespace {

struct Token {
  std::string lower;
  size_t begin;
  size_t end;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> toks;
  size_t i = 0;
  while (i < s.size()) {
    if (!is_word_char(s[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < s.size() && is_word_char(s[j])) ++j;
    toks.push_back({to_lower(std::string_view(s).substr(i, j - i)), i, j});
    i = j;
  }
  return toks;
}

std::vector<std::string> item_tokens(const std::string& item) {
  std::vector<std::string> seq;
  for (const auto& t : tokenize(item)) seq.push_back(t.lower);
  return seq;
}

}  // namespace

RedactionResult apply_redaction(const std::string& paragraph,
                                const std::vector<std::string>& items,
                                const std::string& mask) {
  struct Pattern {
    std::vector<std::string> seq;
    bool matched = false;
  };
  std::vector<Pattern> patterns;
  std::vector<std::string> seen;
  for (const auto& item : items) {
    auto seq = item_tokens(item);
    if (seq.empty()) continue;
    std::string key = join(seq, " ");
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    patterns.push_back({std::move(seq), false});
  }
  std::stable_sort(patterns.begin(), patterns.end(),
                   [](const Pattern& a, const Pattern& b) { return a.seq.size() > b.seq.size(); });

  const auto toks = tokenize(paragraph);
  std::vector<bool> covered(toks.size(), false);
  std::vector<std::pair<size_t, size_t>> spans;

  for (auto& p : patterns) {
    const size_t n = p.seq.size();
    if (n > toks.size()) continue;
    size_t i = 0;
    while (i + n <= toks.size()) {
      bool blocked = false;
      for (size_t j = i; j < i + n; ++j) {
        if (covered[j]) {
          blocked = true;
          break;
        }
      }
      bool hit = !blocked;
      if (hit) {
        for (size_t j = 0; j < n; ++j) {
          if (toks[i + j].lower != p.seq[j]) {
            hit = false;
            break;
          }
        }
      }
      if (hit) {
        for (size_t j = i; j < i + n; ++j) covered[j] = true;
        spans.emplace_back(toks[i].begin, toks[i + n - 1].end);
        p.matched = true;
        i += n;
      } else {
        ++i;
      }
    }
  }

  std::sort(spans.begin(), spans.end());
  RedactionResult result;
  size_t pos = 0;
  for (const auto& [b, e] : spans) {
    result.text.append(paragraph, pos, b - pos);
    result.text += mask;
    pos = e;
  }
  result.text.append(paragraph, pos, paragraph.size() - pos);
  for (const auto& p : patterns) {
    if (!p.matched) ++result.no_match_count;
  }
  return result;
}

}  // namespace faithcheck
