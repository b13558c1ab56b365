#pragma once

#include <string>
#include <vector>

#include "faithcheck/types.hpp"

namespace faithcheck {

struct RedactionResult {
  std::string text;
  int no_match_count = 0;  // items that never matched (after case-insensitive dedupe)
};

// Replaces every occurrence of each item with the mask token. Items are matched
// as case-insensitive sequences of alphanumeric token runs, longest item first,
// so "storage capacity" masks as a unit and "rival(s)" does not touch "rivals".
// Punctuation and spacing outside the matched token span are preserved.
RedactionResult apply_redaction(const std::string& paragraph,
                                const std::vector<std::string>& items,
                                const std::string& mask);

}  // namespace faithcheck
