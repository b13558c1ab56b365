#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "faithcheck/types.hpp"

namespace faithcheck {

// Parses one dataset row. Field names by task:
//   sentiment       {id, text, label}            label in {positive, negative}
//   qa-multichoice  {id, paragraph|story, question, label, options?}
//   nli             {id, sentence1, sentence2, label}   label in {yes, no}
// `where` prefixes error messages, e.g. "line 3".
Observation parse_observation(const nlohmann::json& row, TaskKind task,
                              const std::string& where);

nlohmann::json observation_to_json(const Observation& obs, TaskKind task);

// JSON-lines loaders; blank lines are ignored. Throws std::runtime_error with the
// offending line number on malformed rows.
std::vector<Observation> load_dataset(std::istream& in, TaskKind task);
std::vector<Observation> load_dataset_file(const std::string& path, TaskKind task);

// Builds the two-option display set for a qa observation without options: gold
// plus one distractor drawn from the split's other answers, in seeded order.
// Pure function of (id, gold, pool, seed); pool order matters.
std::vector<std::string> build_option_set(const std::string& id, const std::string& gold,
                                          const std::vector<std::string>& pool,
                                          std::uint64_t seed);

// Fills in missing option sets across a qa split (pool = distinct labels in file
// order). No-op for rows that already carry options.
void ensure_options(std::vector<Observation>& data, std::uint64_t seed);

}  // namespace faithcheck
