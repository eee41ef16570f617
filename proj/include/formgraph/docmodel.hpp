#pragma once

// In-memory model of one OCR-processed page: word tokens in reading order,
// their pixel boxes, and optional gold labels / entity groups.
//
// Coordinates are raw pixels, origin top-left, y growing downward.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace formgraph {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct BoundingBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool valid() const {
    return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) &&
           std::isfinite(y1) && x0 <= x1 && y0 <= y1;
  }
  bool operator==(const BoundingBox&) const = default;
};

inline Point box_center(const BoundingBox& b) {
  return {(b.x0 + b.x1) / 2.0, (b.y0 + b.y1) / 2.0};
}

inline BoundingBox box_union(const BoundingBox& a, const BoundingBox& b) {
  return {std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
          std::max(a.y1, b.y1)};
}

struct WordToken {
  std::size_t index = 0;  // reading-order position from the OCR serialization
  std::string text;
  BoundingBox box;
  bool operator==(const WordToken&) const = default;
};

struct Entity {
  int label = 0;
  std::vector<std::size_t> tokens;  // token indexes
  bool operator==(const Entity&) const = default;
};

struct LabelSchema {
  std::vector<std::string> names;
  int background = 0;

  std::size_t size() const { return names.size(); }
  std::optional<int> id_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<int>(i);
    return std::nullopt;
  }
  bool valid() const {
    if (names.size() < 2) return false;
    if (background < 0 || static_cast<std::size_t>(background) >= names.size()) return false;
    std::unordered_set<std::string> seen(names.begin(), names.end());
    return seen.size() == names.size();
  }
  bool operator==(const LabelSchema&) const = default;
};

struct Document {
  std::string id;
  double page_width = 0.0;
  double page_height = 0.0;
  std::vector<WordToken> tokens;  // ascending index
  std::optional<std::vector<int>> labels;
  std::optional<std::vector<Entity>> entities;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Document&) const = default;
};

enum class ViolationKind {
  InvalidBox,
  OutOfPage,
  DuplicateIndex,
  UnorderedIndex,
  EmptyText,
  LabelCount,
  UnknownToken,
  OverlappingEntity,
  IncompletePartition,
  InvalidPage,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::InvalidBox: return "InvalidBox";
    case ViolationKind::OutOfPage: return "OutOfPage";
    case ViolationKind::DuplicateIndex: return "DuplicateIndex";
    case ViolationKind::UnorderedIndex: return "UnorderedIndex";
    case ViolationKind::EmptyText: return "EmptyText";
    case ViolationKind::LabelCount: return "LabelCount";
    case ViolationKind::UnknownToken: return "UnknownToken";
    case ViolationKind::OverlappingEntity: return "OverlappingEntity";
    case ViolationKind::IncompletePartition: return "IncompletePartition";
    case ViolationKind::InvalidPage: return "InvalidPage";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::size_t token = 0;  // offending token index (0 when not token-specific)
  std::string detail;
};

inline bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

inline std::vector<Violation> validate_document(const Document& d) {
  std::vector<Violation> out;
  if (!(d.page_width > 0.0) || !(d.page_height > 0.0) || !std::isfinite(d.page_width) ||
      !std::isfinite(d.page_height))
    out.push_back({ViolationKind::InvalidPage, 0, "page dimensions must be positive"});

  std::unordered_set<std::size_t> seen;
  for (std::size_t pos = 0; pos < d.tokens.size(); ++pos) {
    const auto& t = d.tokens[pos];
    if (!seen.insert(t.index).second)
      out.push_back({ViolationKind::DuplicateIndex, t.index, "index repeated"});
    if (pos > 0 && t.index <= d.tokens[pos - 1].index)
      out.push_back({ViolationKind::UnorderedIndex, t.index, "tokens not in ascending index"});
    if (is_blank(t.text)) out.push_back({ViolationKind::EmptyText, t.index, "blank text"});
    if (!t.box.valid()) {
      out.push_back({ViolationKind::InvalidBox, t.index, "box not finite or inverted"});
    } else if (t.box.x0 < 0.0 || t.box.y0 < 0.0 || t.box.x1 > d.page_width ||
               t.box.y1 > d.page_height) {
      out.push_back({ViolationKind::OutOfPage, t.index, "box outside page"});
    }
  }

  if (d.labels && d.labels->size() != d.tokens.size())
    out.push_back({ViolationKind::LabelCount, 0,
                   "labels " + std::to_string(d.labels->size()) + " vs tokens " +
                       std::to_string(d.tokens.size())});

  if (d.entities) {
    std::unordered_map<std::size_t, int> owner;
    for (std::size_t e = 0; e < d.entities->size(); ++e) {
      for (std::size_t idx : (*d.entities)[e].tokens) {
        if (!seen.contains(idx)) {
          out.push_back({ViolationKind::UnknownToken, idx, "entity " + std::to_string(e)});
          continue;
        }
        if (!owner.emplace(idx, static_cast<int>(e)).second)
          out.push_back({ViolationKind::OverlappingEntity, idx,
                         "in entities " + std::to_string(owner[idx]) + " and " +
                             std::to_string(e)});
      }
    }
    for (const auto& t : d.tokens)
      if (!owner.contains(t.index))
        out.push_back({ViolationKind::IncompletePartition, t.index, "token in no entity"});
  }
  return out;
}

// Position of a token index inside d.tokens (tokens are sorted by index).
inline std::optional<std::size_t> position_of(const Document& d, std::size_t index) {
  auto it = std::lower_bound(d.tokens.begin(), d.tokens.end(), index,
                             [](const WordToken& t, std::size_t v) { return t.index < v; });
  if (it == d.tokens.end() || it->index != index) return std::nullopt;
  return static_cast<std::size_t>(it - d.tokens.begin());
}

}  // namespace formgraph
