#pragma once

// FUNSD loader. Expects the published layout:
//   <root>/training_data/annotations/*.json   <root>/training_data/images/*.png
//   <root>/testing_data/annotations/*.json    <root>/testing_data/images/*.png
// Each annotation has a "form" list of entities {id, label, words[{text, box}]}.
//
// The annotations group words by entity instead of giving an OCR stream, so a
// page-global reading order is rebuilt with row_band_order.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "formgraph/data/corpus.hpp"
#include "formgraph/error.hpp"

namespace formgraph {

inline LabelSchema funsd_schema() { return {{"other", "header", "question", "answer"}, 0}; }

struct FunsdDataset {
  Corpus train;
  Corpus test;
  std::vector<std::string> warnings;
};

namespace funsd_detail {

// Width/height from a PNG IHDR chunk; nullopt if the file is not a PNG.
inline std::optional<std::pair<double, double>> png_size(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) return std::nullopt;
  std::array<unsigned char, 24> h{};
  if (!is.read(reinterpret_cast<char*>(h.data()), h.size())) return std::nullopt;
  static constexpr std::array<unsigned char, 8> sig{0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (!std::equal(sig.begin(), sig.end(), h.begin())) return std::nullopt;
  auto be32 = [&](std::size_t o) {
    return (std::uint32_t{h[o]} << 24) | (std::uint32_t{h[o + 1]} << 16) |
           (std::uint32_t{h[o + 2]} << 8) | std::uint32_t{h[o + 3]};
  };
  return std::make_pair(static_cast<double>(be32(16)), static_cast<double>(be32(20)));
}

}  // namespace funsd_detail

// One page from a parsed annotation. Blank words are dropped and reported.
inline Document funsd_page(const nlohmann::json& ann, const std::string& id, double page_w,
                           double page_h, std::vector<std::string>* warnings) {
  const auto schema = funsd_schema();
  if (!ann.contains("form") || !ann.at("form").is_array())
    throw MalformedAnnotation(id + ": missing 'form' list");

  struct RawWord {
    std::string text;
    BoundingBox box;
    int entity;
  };
  std::vector<RawWord> words;
  std::vector<int> entity_labels;
  for (const auto& ent : ann.at("form")) {
    const std::string eid = ent.contains("id") ? ent.at("id").dump() : "?";
    const std::string label = ent.value("label", std::string());
    const auto cls = schema.id_of(label);
    if (!cls) throw MalformedAnnotation(id + " entity " + eid + ": unknown label '" + label + "'");
    if (!ent.contains("words") || !ent.at("words").is_array())
      throw MalformedAnnotation(id + " entity " + eid + ": missing words");
    const int e = static_cast<int>(entity_labels.size());
    entity_labels.push_back(*cls);
    for (const auto& w : ent.at("words")) {
      const std::string text = w.value("text", std::string());
      const auto& b = w.at("box");
      if (!b.is_array() || b.size() != 4)
        throw MalformedAnnotation(id + " entity " + eid + ": word box must have 4 numbers");
      if (is_blank(text)) {
        if (warnings) warnings->push_back(id + " entity " + eid + ": dropped empty word");
        continue;
      }
      const double x0 = b[0].get<double>(), y0 = b[1].get<double>();
      const double x1 = b[2].get<double>(), y1 = b[3].get<double>();
      BoundingBox box{std::min(x0, x1), std::min(y0, y1), std::max(x0, x1), std::max(y0, y1)};
      words.push_back({text, box, e});
    }
  }

  double w = page_w, h = page_h;
  if (!(w > 0.0) || !(h > 0.0)) {
    w = h = 1.0;
    for (const auto& rw : words) {
      w = std::max(w, rw.box.x1);
      h = std::max(h, rw.box.y1);
    }
  }
  for (auto& rw : words) {
    rw.box.x0 = std::clamp(rw.box.x0, 0.0, w);
    rw.box.x1 = std::clamp(rw.box.x1, rw.box.x0, w);
    rw.box.y0 = std::clamp(rw.box.y0, 0.0, h);
    rw.box.y1 = std::clamp(rw.box.y1, rw.box.y0, h);
  }

  std::vector<BoundingBox> boxes;
  for (const auto& rw : words) boxes.push_back(rw.box);
  const auto order = row_band_order(boxes);

  Document d;
  d.id = id;
  d.page_width = w;
  d.page_height = h;
  std::vector<int> labels;
  std::vector<Entity> ents(entity_labels.size());
  for (std::size_t e = 0; e < ents.size(); ++e) ents[e].label = entity_labels[e];
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& rw = words[order[r]];
    d.tokens.push_back({r, rw.text, rw.box});
    labels.push_back(entity_labels[static_cast<std::size_t>(rw.entity)]);
    ents[static_cast<std::size_t>(rw.entity)].tokens.push_back(r);
  }
  std::erase_if(ents, [](const Entity& e) { return e.tokens.empty(); });
  d.labels = std::move(labels);
  d.entities = std::move(ents);
  return d;
}

inline Corpus load_funsd_split(const std::filesystem::path& split_dir, const std::string& name,
                               std::vector<std::string>* warnings) {
  namespace fs = std::filesystem;
  const fs::path ann_dir = split_dir / "annotations";
  if (!fs::is_directory(ann_dir)) throw MissingFile("missing directory " + ann_dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(ann_dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  Corpus c;
  c.name = name;
  c.schema = funsd_schema();
  for (const auto& f : files) {
    std::ifstream is(f);
    if (!is) throw MissingFile("cannot open " + f.string());
    nlohmann::json ann;
    try {
      ann = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedAnnotation(f.string() + ": " + e.what());
    }
    double w = 0.0, h = 0.0;
    if (auto sz = funsd_detail::png_size(split_dir / "images" / (f.stem().string() + ".png"))) {
      w = sz->first;
      h = sz->second;
    }
    try {
      c.docs.push_back(funsd_page(ann, f.stem().string(), w, h, warnings));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedAnnotation(f.string() + ": " + e.what());
    }
  }
  return c;
}

// Official split: training_data (149 pages) and testing_data (50 pages).
inline FunsdDataset load_funsd(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  fs::path base = root;
  if (!fs::is_directory(base / "training_data") && fs::is_directory(base / "dataset"))
    base /= "dataset";
  FunsdDataset ds;
  ds.train = load_funsd_split(base / "training_data", "funsd-train", &ds.warnings);
  ds.test = load_funsd_split(base / "testing_data", "funsd-test", &ds.warnings);
  return ds;
}

}  // namespace formgraph
