#include "faithcheck/extract.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "faithcheck/text.hpp"

namespace faithcheck {
namespace {

const char* kRefusalPhrases[] = {"as an ai", "i cannot", "i can't"};

bool looks_refusal(std::string_view s) {
  for (const char* p : kRefusalPhrases) {
    if (contains_ci(s, p)) return true;
  }
  return false;
}

bool starts_refusal(std::string_view s) {
  for (const char* p : kRefusalPhrases) {
    if (starts_with_ci(s, p)) return true;
  }
  return false;
}

size_t find_word_ci(std::string_view haystack, std::string_view word) {
  if (word.empty()) return std::string_view::npos;
  for (size_t i = 0; i + word.size() <= haystack.size(); ++i) {
    if (!starts_with_ci(haystack.substr(i), word)) continue;
    bool left_ok = i == 0 || !is_word_char(haystack[i - 1]);
    size_t end = i + word.size();
    bool right_ok = end == haystack.size() || !is_word_char(haystack[end]);
    if (left_ok && right_ok) return i;
  }
  return std::string_view::npos;
}

// Candidate labels for the marker/word tiers: display text plus canonical value.
struct Candidate {
  std::string text;
  std::string value;
};

std::vector<Candidate> option_candidates(TaskKind task, const Observation& obs) {
  std::vector<Candidate> c;
  if (task == TaskKind::qa_multichoice) {
    for (const auto& o : obs.options) c.push_back({o, o});
  } else {
    c.push_back({"yes", "yes"});
    c.push_back({"no", "no"});
  }
  c.push_back({kUnknownLabel, kUnknownLabel});
  // longest display text first so e.g. "post office" beats "office"
  std::stable_sort(c.begin(), c.end(),
                   [](const Candidate& a, const Candidate& b) { return a.text.size() > b.text.size(); });
  return c;
}

// Value of the marker symbol itself: option letter / answer numeral.
std::optional<std::string> marker_value(char sym, TaskKind task, const Observation& obs) {
  if (task == TaskKind::qa_multichoice) {
    char low = static_cast<char>(std::tolower(static_cast<unsigned char>(sym)));
    if (low < 'a' || low > 'z') return std::nullopt;
    size_t idx = static_cast<size_t>(low - 'a');
    if (idx < obs.options.size()) return obs.options[idx];
    if (idx == obs.options.size()) return kUnknownLabel;
    return std::nullopt;
  }
  switch (sym) {
    case '1': return "yes";
    case '2': return "no";
    case '3': return kUnknownLabel;
    default: return std::nullopt;
  }
}

// A label word directly after a marker ("b) Office") overrides the letter.
std::optional<std::string> word_after(std::string_view s, size_t pos,
                                      const std::vector<Candidate>& candidates) {
  while (pos < s.size() && (std::isspace(static_cast<unsigned char>(s[pos])) || s[pos] == '"' ||
                            s[pos] == '\'' || s[pos] == ':'))
    ++pos;
  for (const auto& c : candidates) {
    if (!starts_with_ci(s.substr(pos), c.text)) continue;
    size_t end = pos + c.text.size();
    if (end == s.size() || !is_word_char(s[end])) return c.value;
  }
  return std::nullopt;
}

LabelExtraction label_fail(const std::string& response) {
  if (looks_refusal(response)) return {ExtractStatus::refused, ""};
  return {ExtractStatus::unparseable, ""};
}

LabelExtraction extract_sentiment_label(const std::string& response) {
  const char* words[] = {"positive", "negative", "neutral", "unknown"};
  size_t best = std::string::npos;
  std::string label;
  for (const char* w : words) {
    size_t at = find_word_ci(response, w);
    if (at != std::string::npos && at < best) {
      best = at;
      label = w;
    }
  }
  if (best == std::string::npos) return label_fail(response);
  return {ExtractStatus::parsed, label};
}

LabelExtraction extract_option_label(const std::string& response, TaskKind task,
                                     const Observation& obs) {
  const auto candidates = option_candidates(task, obs);
  std::optional<std::string> last_marker;
  size_t i = 0;
  while (i < response.size()) {
    // "(x)" form
    if (response[i] == '(' && i + 2 < response.size() && response[i + 2] == ')') {
      if (auto v = marker_value(response[i + 1], task, obs)) {
        auto w = word_after(response, i + 3, candidates);
        last_marker = w ? *w : *v;
        i += 3;
        continue;
      }
    }
    // "x)" form, left-bounded
    if (i + 1 < response.size() && response[i + 1] == ')' &&
        (i == 0 || !is_word_char(response[i - 1]))) {
      if (auto v = marker_value(response[i], task, obs)) {
        auto w = word_after(response, i + 2, candidates);
        last_marker = w ? *w : *v;
        i += 2;
        continue;
      }
    }
    ++i;
  }
  if (last_marker) return {ExtractStatus::parsed, *last_marker};

  // no markers: bare label words must agree
  std::vector<std::string> found;
  for (const auto& c : candidates) {
    if (find_word_ci(response, c.text) == std::string::npos) continue;
    if (std::find(found.begin(), found.end(), c.value) == found.end()) found.push_back(c.value);
  }
  if (found.size() == 1) return {ExtractStatus::parsed, found[0]};
  if (found.size() > 1) return {ExtractStatus::unparseable, ""};
  return label_fail(response);
}

std::string cleanup_item(std::string item) {
  auto is_quote = [](char c) { return c == '"' || c == '\''; };
  auto is_tail_punct = [](char c) {
    return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
  };
  std::string prev;
  do {
    prev = item;
    item = trim(item);
    while (!item.empty() && is_quote(item.front())) item.erase(item.begin());
    while (!item.empty() && (is_quote(item.back()) || is_tail_punct(item.back()))) item.pop_back();
  } while (item != prev);
  return item;
}

// "* word", "- word", "1. word", "2) word"
std::optional<std::string> list_item(const std::string& line) {
  size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  size_t mark_end = std::string::npos;
  if (i < line.size() && (line[i] == '*' || line[i] == '-')) {
    mark_end = i + 1;
  } else if (line.compare(i, 3, "•") == 0) {
    mark_end = i + 3;
  } else if (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
    size_t j = i;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
    if (j < line.size() && (line[j] == '.' || line[j] == ')')) mark_end = j + 1;
  }
  if (mark_end == std::string::npos || mark_end >= line.size()) return std::nullopt;
  if (!std::isspace(static_cast<unsigned char>(line[mark_end]))) return std::nullopt;
  std::string rest = cleanup_item(line.substr(mark_end));
  if (rest.empty()) return std::nullopt;
  return rest;
}

}  // namespace

std::string to_string(ExtractStatus s) {
  switch (s) {
    case ExtractStatus::parsed: return "parsed";
    case ExtractStatus::unparseable: return "unparseable";
    case ExtractStatus::refused: return "refused";
  }
  throw std::logic_error("bad ExtractStatus");
}

ExtractStatus extract_status_from_string(const std::string& s) {
  if (s == "parsed") return ExtractStatus::parsed;
  if (s == "unparseable") return ExtractStatus::unparseable;
  if (s == "refused") return ExtractStatus::refused;
  throw std::invalid_argument("unknown extract status: " + s);
}

LabelExtraction extract_label(const std::string& response, TaskKind task, const Observation& obs) {
  if (trim(response).empty()) return {ExtractStatus::unparseable, ""};
  if (task == TaskKind::sentiment) return extract_sentiment_label(response);
  return extract_option_label(response, task, obs);
}

ParagraphExtraction extract_paragraph(const std::string& response) {
  auto blocks = split_blocks(response);
  if (blocks.empty()) return {ExtractStatus::unparseable, ""};

  static const std::string kMarker = "Paragraph:";
  for (const auto& b : blocks) {
    if (b.compare(0, kMarker.size(), kMarker) != 0) continue;
    std::string rest = trim(b.substr(kMarker.size()));
    if (!rest.empty()) return {ExtractStatus::parsed, rest};
  }

  size_t i = 0;
  while (i < blocks.size() && blocks[i].back() == ':') ++i;
  if (i == blocks.size()) i = 0;
  if (i == 0 && starts_refusal(blocks[0])) return {ExtractStatus::refused, ""};
  return {ExtractStatus::parsed, blocks[i]};
}

WordListExtraction extract_word_list(const std::string& response) {
  std::vector<std::string> items;
  for (const auto& line : split_lines(response)) {
    if (auto item = list_item(line)) items.push_back(*item);
  }

  if (items.empty()) {
    size_t colon = response.find(':');
    std::string seg = colon == std::string::npos ? response : response.substr(colon + 1);
    size_t pos = 0;
    while (true) {
      size_t open = seg.find('"', pos);
      if (open == std::string::npos) break;
      size_t close = seg.find('"', open + 1);
      if (close == std::string::npos) break;
      std::string w = cleanup_item(seg.substr(open + 1, close - open - 1));
      if (!w.empty() && w.find('\n') == std::string::npos) items.push_back(w);
      pos = close + 1;
    }
    if (items.empty() && colon != std::string::npos && seg.find(',') != std::string::npos) {
      size_t start = 0;
      while (start <= seg.size()) {
        size_t comma = seg.find(',', start);
        std::string piece = comma == std::string::npos ? seg.substr(start)
                                                       : seg.substr(start, comma - start);
        std::string w = cleanup_item(piece);
        if (!w.empty() && w.find('\n') == std::string::npos) items.push_back(w);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
  }

  std::vector<std::string> out;
  std::vector<std::string> seen;
  for (auto& w : items) {
    std::string low = to_lower(w);
    if (std::find(seen.begin(), seen.end(), low) != seen.end()) continue;
    seen.push_back(low);
    out.push_back(w);
  }
  if (out.empty()) {
    if (looks_refusal(response)) return {ExtractStatus::refused, {}};
    return {ExtractStatus::unparseable, {}};
  }
  return {ExtractStatus::parsed, out};
}

}  // namespace faithcheck
