#include <gtest/gtest.h>

#include "formgraph/docmodel.hpp"

using namespace formgraph;

namespace {

Document three_tokens() {
  Document d;
  d.id = "t";
  d.page_width = 100;
  d.page_height = 100;
  d.tokens = {{0, "Date", {10, 10, 30, 20}}, {1, "3/18/97", {35, 10, 60, 20}}, {2, "x", {10, 40, 15, 50}}};
  d.labels = std::vector<int>{1, 2, 0};
  d.entities = std::vector<Entity>{{1, {0}}, {2, {1}}, {0, {2}}};
  return d;
}

bool has(const std::vector<Violation>& v, ViolationKind k) {
  for (const auto& x : v)
    if (x.kind == k) return true;
  return false;
}

}  // namespace

TEST(BoxCenter, Examples) {
  EXPECT_EQ(box_center({0, 0, 2, 2}).x, 1.0);
  EXPECT_EQ(box_center({0, 0, 2, 2}).y, 1.0);
  EXPECT_EQ(box_center({0, 0, 0, 0}).x, 0.0);
  EXPECT_EQ(box_center({1, 2, 3, 8}).x, 2.0);
  EXPECT_EQ(box_center({1, 2, 3, 8}).y, 5.0);
}

TEST(BoxUnion, Examples) {
  auto eq = [](BoundingBox a, BoundingBox b) {
    return a.x0 == b.x0 && a.y0 == b.y0 && a.x1 == b.x1 && a.y1 == b.y1;
  };
  EXPECT_TRUE(eq(box_union({0, 0, 1, 1}, {0, 0, 1, 1}), {0, 0, 1, 1}));
  EXPECT_TRUE(eq(box_union({0, 0, 1, 1}, {2, 2, 3, 3}), {0, 0, 3, 3}));
  EXPECT_TRUE(eq(box_union({0, 0, 4, 1}, {1, 0, 2, 5}), {0, 0, 4, 5}));
}

TEST(ValidateDocument, WellFormed) { EXPECT_TRUE(validate_document(three_tokens()).empty()); }

TEST(ValidateDocument, DuplicateIndex) {
  auto d = three_tokens();
  d.tokens[1].index = 0;
  EXPECT_TRUE(has(validate_document(d), ViolationKind::DuplicateIndex));
}

TEST(ValidateDocument, IncompletePartition) {
  auto d = three_tokens();
  d.entities->pop_back();
  EXPECT_TRUE(has(validate_document(d), ViolationKind::IncompletePartition));
}

TEST(ValidateDocument, OverlappingEntity) {
  auto d = three_tokens();
  d.entities->push_back({0, {1}});
  EXPECT_TRUE(has(validate_document(d), ViolationKind::OverlappingEntity));
}

TEST(ValidateDocument, BadTokens) {
  auto d = three_tokens();
  d.tokens[0].text = "  ";
  d.tokens[1].box = {50, 10, 40, 20};
  d.tokens[2].box = {95, 40, 120, 50};
  const auto v = validate_document(d);
  EXPECT_TRUE(has(v, ViolationKind::EmptyText));
  EXPECT_TRUE(has(v, ViolationKind::InvalidBox));
  EXPECT_TRUE(has(v, ViolationKind::OutOfPage));
}

TEST(ValidateDocument, LabelCountAndUnknownToken) {
  auto d = three_tokens();
  d.labels->pop_back();
  (*d.entities)[0].tokens = {7};
  const auto v = validate_document(d);
  EXPECT_TRUE(has(v, ViolationKind::LabelCount));
  EXPECT_TRUE(has(v, ViolationKind::UnknownToken));
}

TEST(LabelSchema, Lookup) {
  LabelSchema s{{"other", "header", "question", "answer"}, 0};
  EXPECT_EQ(s.size(), 4u);
  EXPECT_EQ(s.id_of("answer"), 3);
  EXPECT_FALSE(s.id_of("nope").has_value());
}
