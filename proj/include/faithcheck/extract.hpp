#pragma once

#include <string>
#include <vector>

#include "faithcheck/types.hpp"

namespace faithcheck {

enum class ExtractStatus { parsed, unparseable, refused };

std::string to_string(ExtractStatus s);
ExtractStatus extract_status_from_string(const std::string& s);

struct LabelExtraction {
  ExtractStatus status = ExtractStatus::unparseable;
  std::string label;  // canonical: lowercase word, option text verbatim, or "unknown"
};

struct ParagraphExtraction {
  ExtractStatus status = ExtractStatus::unparseable;
  std::string paragraph;
};

struct WordListExtraction {
  ExtractStatus status = ExtractStatus::unparseable;
  std::vector<std::string> words;
};

// Pulls the predicted label out of a free-form response. Sentiment answers are
// plain words; qa and nli answers use "x)" / "(x)" option markers, where a label
// word right after the marker overrides the letter. The last marker wins. Without
// markers, bare label words must agree unanimously.
LabelExtraction extract_label(const std::string& response, TaskKind task,
                              const Observation& obs);

// Pulls the edited/redacted paragraph: the first content block after any
// preamble lines ending in ':', with a leading "Paragraph: " marker stripped.
ParagraphExtraction extract_paragraph(const std::string& response);

// Pulls an important-word list: numbered or bulleted lines, or an inline list of
// quoted tokens. Items are cleaned and deduplicated case-insensitively.
WordListExtraction extract_word_list(const std::string& response);

}  // namespace faithcheck
