#include "faithcheck/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace faithcheck {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::runtime_error(where + ": " + what);
}

std::string need_string(const json& row, const char* field, const std::string& where) {
  if (!row.contains(field)) fail(where, std::string("missing field \"") + field + "\"");
  const auto& v = row.at(field);
  if (!v.is_string()) fail(where, std::string("field \"") + field + "\" must be a string");
  return v.get<std::string>();
}

std::string read_id(const json& row, const std::string& where) {
  if (!row.contains("id")) fail(where, "missing field \"id\"");
  const auto& v = row.at("id");
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  fail(where, "field \"id\" must be a string or integer");
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Observation parse_observation(const json& row, TaskKind task, const std::string& where) {
  if (!row.is_object()) fail(where, "row must be a JSON object");
  Observation obs;
  obs.id = read_id(row, where);
  switch (task) {
    case TaskKind::sentiment: {
      obs.paragraph = need_string(row, "text", where);
      obs.label = need_string(row, "label", where);
      if (obs.label != "positive" && obs.label != "negative")
        fail(where, "invalid sentiment label \"" + obs.label + "\" (want positive|negative)");
      break;
    }
    case TaskKind::qa_multichoice: {
      if (row.contains("paragraph"))
        obs.paragraph = need_string(row, "paragraph", where);
      else if (row.contains("story"))
        obs.paragraph = need_string(row, "story", where);
      else
        fail(where, "missing field \"paragraph\"");
      obs.question = need_string(row, "question", where);
      obs.label = need_string(row, "label", where);
      if (row.contains("options")) {
        const auto& opts = row.at("options");
        if (!opts.is_array()) fail(where, "field \"options\" must be an array");
        for (const auto& o : opts) {
          if (!o.is_string()) fail(where, "options must be strings");
          obs.options.push_back(o.get<std::string>());
        }
        if (obs.options.size() < 2) fail(where, "need at least 2 options");
        for (size_t i = 0; i < obs.options.size(); ++i) {
          for (size_t j = i + 1; j < obs.options.size(); ++j) {
            if (obs.options[i] == obs.options[j])
              fail(where, "duplicate option \"" + obs.options[i] + "\"");
          }
        }
        if (std::find(obs.options.begin(), obs.options.end(), obs.label) == obs.options.end())
          fail(where, "label \"" + obs.label + "\" not among options");
      }
      break;
    }
    case TaskKind::nli: {
      obs.paragraph = need_string(row, "sentence1", where);
      obs.statement = need_string(row, "sentence2", where);
      obs.label = need_string(row, "label", where);
      if (obs.label != "yes" && obs.label != "no")
        fail(where, "invalid nli label \"" + obs.label + "\" (want yes|no)");
      break;
    }
  }
  if (obs.paragraph.empty()) fail(where, "empty paragraph");
  return obs;
}

json observation_to_json(const Observation& obs, TaskKind task) {
  json row;
  row["id"] = obs.id;
  switch (task) {
    case TaskKind::sentiment:
      row["text"] = obs.paragraph;
      break;
    case TaskKind::qa_multichoice:
      row["paragraph"] = obs.paragraph;
      row["question"] = obs.question;
      if (!obs.options.empty()) row["options"] = obs.options;
      break;
    case TaskKind::nli:
      row["sentence1"] = obs.paragraph;
      row["sentence2"] = obs.statement;
      break;
  }
  row["label"] = obs.label;
  return row;
}

std::vector<Observation> load_dataset(std::istream& in, TaskKind task) {
  std::vector<Observation> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
    if (blank) continue;
    const std::string where = "line " + std::to_string(lineno);
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(where, std::string("invalid JSON: ") + e.what());
    }
    out.push_back(parse_observation(row, task, where));
  }
  return out;
}

std::vector<Observation> load_dataset_file(const std::string& path, TaskKind task) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  try {
    return load_dataset(in, task);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::vector<std::string> build_option_set(const std::string& id, const std::string& gold,
                                          const std::vector<std::string>& pool,
                                          std::uint64_t seed) {
  std::vector<std::string> distractors;
  for (const auto& p : pool) {
    if (p == gold) continue;
    if (std::find(distractors.begin(), distractors.end(), p) == distractors.end())
      distractors.push_back(p);
  }
  if (distractors.empty())
    throw std::runtime_error("no distractor candidates for observation " + id);
  std::uint64_t state = fnv1a64(id) ^ seed;
  const std::string& distractor = distractors[splitmix64(state) % distractors.size()];
  bool gold_first = splitmix64(state) % 2 == 0;
  if (gold_first) return {gold, distractor};
  return {distractor, gold};
}

void ensure_options(std::vector<Observation>& data, std::uint64_t seed) {
  std::vector<std::string> pool;
  for (const auto& obs : data) {
    if (std::find(pool.begin(), pool.end(), obs.label) == pool.end()) pool.push_back(obs.label);
  }
  for (auto& obs : data) {
    if (obs.options.empty()) obs.options = build_option_set(obs.id, obs.label, pool, seed);
  }
}

}  // namespace faithcheck
