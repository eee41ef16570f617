#pragma once

// Corpus persistence, format "corpv1": line-delimited JSON. Line 1 is a
// header {format, name, schema, count}; each following line is one document.
// Doubles are written in shortest round-trip form, so load(save(c)) == c.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "formgraph/data/corpus.hpp"
#include "formgraph/data/synthetic.hpp"
#include "formgraph/error.hpp"

namespace formgraph {

inline constexpr const char* kCorpusFormat = "corpv1";

inline nlohmann::json document_to_json(const Document& d) {
  nlohmann::json toks = nlohmann::json::array();
  for (const auto& t : d.tokens)
    toks.push_back({{"i", t.index}, {"t", t.text}, {"b", {t.box.x0, t.box.y0, t.box.x1, t.box.y1}}});
  nlohmann::json j{{"id", d.id}, {"w", d.page_width}, {"h", d.page_height}, {"tokens", toks}};
  if (d.labels) j["labels"] = *d.labels;
  if (d.entities) {
    nlohmann::json es = nlohmann::json::array();
    for (const auto& e : *d.entities) es.push_back({{"label", e.label}, {"tokens", e.tokens}});
    j["entities"] = es;
  }
  return j;
}

inline Document document_from_json(const nlohmann::json& j) {
  Document d;
  d.id = j.at("id").get<std::string>();
  d.page_width = j.at("w").get<double>();
  d.page_height = j.at("h").get<double>();
  for (const auto& t : j.at("tokens")) {
    const auto& b = t.at("b");
    if (!b.is_array() || b.size() != 4) throw DataError("token box must have 4 numbers");
    d.tokens.push_back({t.at("i").get<std::size_t>(), t.at("t").get<std::string>(),
                        {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()}});
  }
  if (j.contains("labels")) d.labels = j.at("labels").get<std::vector<int>>();
  if (j.contains("entities")) {
    std::vector<Entity> es;
    for (const auto& e : j.at("entities"))
      es.push_back({e.at("label").get<int>(), e.at("tokens").get<std::vector<std::size_t>>()});
    d.entities = std::move(es);
  }
  return d;
}

// `echo` (if not null) is stored in the header as the producing config.
inline void save_corpus(const Corpus& c, std::ostream& os, const nlohmann::json& echo = nullptr) {
  nlohmann::json header{{"format", kCorpusFormat},
                        {"name", c.name},
                        {"schema", {{"names", c.schema.names}, {"background", c.schema.background}}},
                        {"count", c.docs.size()}};
  if (!echo.is_null()) header["echo"] = echo;
  os << header.dump() << '\n';
  for (const auto& d : c.docs) os << document_to_json(d).dump() << '\n';
}

inline void save_corpus(const Corpus& c, const std::string& path,
                        const nlohmann::json& echo = nullptr) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write corpus file '" + path + "'");
  save_corpus(c, os, echo);
  if (!os) throw DataError("write failed for '" + path + "'");
}

inline Corpus load_corpus(std::istream& is, const std::string& what = "<stream>") {
  std::string line;
  if (!std::getline(is, line)) throw DataError(what + ": empty corpus file");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(what + ": bad header: " + e.what());
  }
  const std::string fmt = header.value("format", std::string());
  if (fmt != kCorpusFormat)
    throw VersionMismatch(what + ": corpus format '" + fmt + "', this build reads '" +
                          kCorpusFormat + "'");
  Corpus c;
  c.name = header.at("name").get<std::string>();
  c.schema.names = header.at("schema").at("names").get<std::vector<std::string>>();
  c.schema.background = header.at("schema").at("background").get<int>();
  const auto count = header.at("count").get<std::size_t>();
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      c.docs.push_back(document_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(what + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (c.docs.size() != count)
    throw DataError(what + ": header promises " + std::to_string(count) + " documents, found " +
                    std::to_string(c.docs.size()));
  return c;
}

inline Corpus load_corpus(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw MissingFile("cannot open corpus file '" + path + "'");
  return load_corpus(is, path);
}

// Synthetic generator spec file, format "synthv1" (JSON object). Missing
// keys keep their defaults.
inline SyntheticFormSpec synthetic_spec_from_json(const nlohmann::json& j) {
  const std::string fmt = j.value("format", std::string(kSyntheticSpecVersion));
  if (fmt != kSyntheticSpecVersion)
    throw VersionMismatch("generator spec format '" + fmt + "', this build reads '" +
                          kSyntheticSpecVersion + "'");
  SyntheticFormSpec s;
  s.page_width = j.value("page_width", s.page_width);
  s.page_height = j.value("page_height", s.page_height);
  if (j.contains("column_weights")) {
    const auto w = j.at("column_weights").get<std::vector<double>>();
    if (w.size() != 3) throw UsageError("column_weights needs 3 entries");
    s.column_weights = {w[0], w[1], w[2]};
  }
  s.min_fields = j.value("min_fields", s.min_fields);
  s.max_fields = j.value("max_fields", s.max_fields);
  s.key_above_prob = j.value("key_above_prob", s.key_above_prob);
  s.aligned_values_prob = j.value("aligned_values_prob", s.aligned_values_prob);
  s.block_order_prob = j.value("block_order_prob", s.block_order_prob);
  s.jitter_px = j.value("jitter_px", s.jitter_px);
  s.min_note_lines = j.value("min_note_lines", s.min_note_lines);
  s.max_note_lines = j.value("max_note_lines", s.max_note_lines);
  s.seed = j.value("seed", s.seed);
  validate_spec(s);
  return s;
}

inline nlohmann::json to_json(const SyntheticFormSpec& s) {
  return {{"format", kSyntheticSpecVersion},
          {"page_width", s.page_width},
          {"page_height", s.page_height},
          {"column_weights", {s.column_weights[0], s.column_weights[1], s.column_weights[2]}},
          {"min_fields", s.min_fields},
          {"max_fields", s.max_fields},
          {"key_above_prob", s.key_above_prob},
          {"aligned_values_prob", s.aligned_values_prob},
          {"block_order_prob", s.block_order_prob},
          {"jitter_px", s.jitter_px},
          {"min_note_lines", s.min_note_lines},
          {"max_note_lines", s.max_note_lines},
          {"seed", s.seed}};
}

}  // namespace formgraph
