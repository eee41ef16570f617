#pragma once

// Synthetic payment-style forms: key/value fields laid out in one to three
// columns, with either the key left of its value or stacked above it. The
// simulated OCR serializes a page either block by block (column after
// column) or by naive row banding, which interleaves columns.
//
// Schema: "other" (background) plus 13 field types. Keys, headers and notes
// are background entities; each field value is one entity of its type.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "formgraph/data/corpus.hpp"
#include "formgraph/docmodel.hpp"
#include "formgraph/error.hpp"
#include "formgraph/nn/tensor.hpp"

namespace formgraph {

inline constexpr const char* kSyntheticSpecVersion = "synthv1";

struct SyntheticFormSpec {
  double page_width = 850.0;
  double page_height = 1100.0;
  // P(1 column), P(2 columns), P(3 columns)
  std::array<double, 3> column_weights{0.35, 0.5, 0.15};
  int min_fields = 7;
  int max_fields = 11;
  double key_above_prob = 0.35;
  double aligned_values_prob = 0.5;
  double block_order_prob = 0.5;
  double jitter_px = 2.0;
  int min_note_lines = 1;
  int max_note_lines = 3;
  std::uint64_t seed = 1;
};

struct LayoutMeta {
  int columns = 1;
  bool key_above = false;
  bool block_order = false;
  bool operator==(const LayoutMeta&) const = default;
};

struct SyntheticCorpus {
  Corpus corpus;
  std::vector<LayoutMeta> layout;
};

enum SyntheticField : int {
  kOther = 0,
  kInvoiceNumber,
  kInvoiceDate,
  kDueDate,
  kShipDate,
  kPoNumber,
  kAccountNumber,
  kSubtotal,
  kTaxAmount,
  kTotalAmount,
  kAmountDue,
  kVendorName,
  kCustomerName,
  kPaymentTerms,
  kFieldCount
};

inline LabelSchema synthetic_schema() {
  return {{"other", "invoice_number", "invoice_date", "due_date", "ship_date", "po_number",
           "account_number", "subtotal", "tax_amount", "total_amount", "amount_due",
           "vendor_name", "customer_name", "payment_terms"},
          0};
}

namespace synth_detail {

using Rng = std::mt19937_64;

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double uniform(Rng& r, double lo, double hi) { return lo + (hi - lo) * nn::uniform01(r); }
inline int uniform_int(Rng& r, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(nn::uniform_below(r, static_cast<std::uint64_t>(hi - lo + 1)));
}
inline bool coin(Rng& r, double p) { return nn::uniform01(r) < p; }

template <class T>
const T& pick(Rng& r, const std::vector<T>& xs) {
  return xs[nn::uniform_below(r, xs.size())];
}

inline std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline const std::vector<std::string>& key_phrases(int field) {
  static const std::array<std::vector<std::string>, kFieldCount> keys{{
      {},
      {"Invoice No.", "Invoice #", "Invoice Number"},
      {"Invoice Date", "Date", "Date of Invoice"},
      {"Due Date", "Payment Due", "Due"},
      {"Ship Date", "Date Shipped", "Shipped"},
      {"PO Number", "P.O. #", "Order No."},
      {"Account No.", "Acct #", "Customer ID"},
      {"Subtotal", "Sub Total"},
      {"Tax", "Sales Tax", "VAT"},
      {"Total", "Invoice Total"},
      {"Amount Due", "Balance Due", "Please Pay"},
      {"From", "Vendor", "Remit To"},
      {"Bill To", "Customer", "Sold To"},
      {"Terms", "Payment Terms"},
  }};
  return keys[static_cast<std::size_t>(field)];
}

inline std::string digits(Rng& r, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + uniform_int(r, 0, 9)));
  return s;
}

inline std::string date_value(Rng& r) {
  static const std::vector<std::string> months{"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                               "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  const int m = uniform_int(r, 1, 12), d = uniform_int(r, 1, 28), y = uniform_int(r, 1990, 2024);
  switch (uniform_int(r, 0, 2)) {
    case 0:
      return std::to_string(m) + "/" + std::to_string(d) + "/" +
             (y % 100 < 10 ? "0" : "") + std::to_string(y % 100);
    case 1: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
      return buf;
    }
    default:
      return months[static_cast<std::size_t>(m - 1)] + " " + std::to_string(d) + ", " +
             std::to_string(y);
  }
}

inline std::string amount_value(Rng& r) {
  const int whole = uniform_int(r, 1, 99999);
  std::string w = std::to_string(whole);
  if (w.size() > 3) w.insert(w.size() - 3, ",");
  const std::string num = w + "." + digits(r, 2);
  switch (uniform_int(r, 0, 2)) {
    case 0: return "$" + num;
    case 1: return num;
    default: return "USD " + num;
  }
}

inline std::string name_value(Rng& r) {
  static const std::vector<std::string> first{"Acme", "Globex", "Initech", "Umbrella", "Stark",
                                              "Wayne", "Wonka", "Hooli", "Vandelay", "Soylent",
                                              "Cyberdyne", "Tyrell", "Oscorp", "Pied Piper"};
  static const std::vector<std::string> second{"Supply", "Industries", "Logistics", "Foods",
                                               "Systems", "Trading", "Services", "Labs"};
  static const std::vector<std::string> suffix{"Inc.", "LLC", "Co.", "Ltd."};
  std::string s = pick(r, first) + " " + pick(r, second);
  if (coin(r, 0.6)) s += " " + pick(r, suffix);
  return s;
}

inline std::string field_value(Rng& r, int field) {
  switch (field) {
    case kInvoiceNumber:
      return coin(r, 0.5) ? "INV-" + digits(r, 5) : "#" + digits(r, 6);
    case kInvoiceDate:
    case kDueDate:
    case kShipDate:
      return date_value(r);
    case kPoNumber:
      return coin(r, 0.5) ? "PO-" + digits(r, uniform_int(r, 4, 6)) : digits(r, 7);
    case kAccountNumber:
      return coin(r, 0.5) ? "ACCT-" + digits(r, 5) : "C" + digits(r, 6);
    case kSubtotal:
    case kTaxAmount:
    case kTotalAmount:
    case kAmountDue:
      return amount_value(r);
    case kVendorName:
    case kCustomerName:
      return name_value(r);
    case kPaymentTerms: {
      static const std::vector<std::string> terms{"Net 30", "Net 15", "Net 60",
                                                  "Due on receipt", "2% 10 Net 30", "COD"};
      return pick(r, terms);
    }
    default:
      throw UsageError("no value generator for field " + std::to_string(field));
  }
}

struct PlacedWord {
  std::string text;
  BoundingBox box;
  int entity = 0;
  int block = 0;
};

struct PageBuilder {
  const SyntheticFormSpec& spec;
  Rng& rng;
  double h = 14.0;   // glyph height
  double cw = 7.5;   // glyph width
  std::vector<PlacedWord> words;
  std::vector<Entity> entities;

  double jitter() { return uniform(rng, -spec.jitter_px, spec.jitter_px); }

  double text_width(const std::string& w) const { return cw * static_cast<double>(w.size()); }

  int new_entity(int label) {
    entities.push_back({label, {}});
    return static_cast<int>(entities.size()) - 1;
  }

  // Lays out a phrase from (x, y); wraps at x_limit back to x. Returns the
  // x after the last word and the y of the last line.
  std::pair<double, double> place(const std::string& phrase, double x, double y, double x_limit,
                                  int entity, int block) {
    double cx = x, cy = y;
    bool first = true;
    for (const auto& w : split_words(phrase)) {
      const double ww = text_width(w);
      if (!first && cx + ww > x_limit) {
        cx = x;
        cy += 1.3 * h;
      }
      const double jx = jitter(), jy = jitter();
      BoundingBox b{cx + jx, cy + jy, cx + jx + ww, cy + jy + h};
      b.x0 = std::clamp(b.x0, 0.0, spec.page_width);
      b.x1 = std::clamp(b.x1, b.x0, spec.page_width);
      b.y0 = std::max(b.y0, 0.0);
      words.push_back({w, b, entity, block});
      entities[static_cast<std::size_t>(entity)].tokens.push_back(words.size() - 1);
      cx += ww + cw;
      first = false;
    }
    return {cx - cw, cy};
  }
};

}  // namespace synth_detail

inline void validate_spec(const SyntheticFormSpec& s) {
  if (!(s.page_width >= 400.0) || !(s.page_height >= 400.0))
    throw UsageError("synthetic page must be at least 400x400 px");
  if (s.min_fields < 1 || s.max_fields < s.min_fields || s.max_fields > kFieldCount - 1)
    throw UsageError("field count range must lie in [1, 13]");
  double total = 0.0;
  for (double w : s.column_weights) {
    if (!(w >= 0.0)) throw UsageError("column weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw UsageError("column weights sum to zero");
  if (s.min_note_lines < 0 || s.max_note_lines < s.min_note_lines)
    throw UsageError("bad note line range");
}

// One page; `doc_seed` fully determines it.
inline Document gen_synthetic_page(const SyntheticFormSpec& spec, std::uint64_t doc_seed,
                                   const std::string& id, LayoutMeta* meta = nullptr) {
  using namespace synth_detail;
  Rng rng(doc_seed);
  PageBuilder pb{spec, rng, 14.0, 7.5, {}, {}};
  pb.h = uniform(rng, 11.0, 16.0);
  pb.cw = pb.h * uniform(rng, 0.5, 0.6);
  const double margin = uniform(rng, 40.0, 70.0);
  const double W = spec.page_width;

  LayoutMeta lm;
  {
    const double total = spec.column_weights[0] + spec.column_weights[1] + spec.column_weights[2];
    double u = nn::uniform01(rng) * total;
    lm.columns = 1;
    for (int c = 0; c < 3; ++c) {
      if (u < spec.column_weights[static_cast<std::size_t>(c)]) {
        lm.columns = c + 1;
        break;
      }
      u -= spec.column_weights[static_cast<std::size_t>(c)];
      lm.columns = c + 1;
    }
  }
  lm.key_above = coin(rng, spec.key_above_prob);
  lm.block_order = coin(rng, spec.block_order_prob);
  const bool aligned = coin(rng, spec.aligned_values_prob);

  // Header: title and two address lines.
  int block = 0;
  double y = uniform(rng, 40.0, 80.0);
  {
    static const std::vector<std::string> titles{"INVOICE", "Invoice", "STATEMENT",
                                                 "Payment Advice", "Tax Invoice"};
    const int e = pb.new_entity(kOther);
    pb.place(pick(rng, titles), margin, y, W - margin, e, block);
    y += 2.2 * pb.h;
    static const std::vector<std::string> streets{"Market Street", "Main St.", "Oak Avenue",
                                                  "Industrial Pkwy", "Harbor Blvd"};
    static const std::vector<std::string> cities{"Springfield, IL", "Riverton, CA",
                                                 "Fairview, TX", "Lakeside, NY"};
    const int a1 = pb.new_entity(kOther);
    pb.place(digits(rng, uniform_int(rng, 2, 4)) + " " + pick(rng, streets), margin, y,
             W - margin, a1, block);
    y += 1.4 * pb.h;
    const int a2 = pb.new_entity(kOther);
    pb.place(pick(rng, cities) + " " + digits(rng, 5), margin, y, W - margin, a2, block);
    y += uniform(rng, 2.0, 3.5) * pb.h;
  }

  // Fields.
  std::vector<int> fields;
  for (int f = 1; f < kFieldCount; ++f) fields.push_back(f);
  nn::fisher_yates(fields.begin(), fields.end(), rng);
  fields.resize(static_cast<std::size_t>(uniform_int(rng, spec.min_fields, spec.max_fields)));

  const double region_top = y;
  const double col_w = (W - 2.0 * margin) / lm.columns;
  const double line_gap = pb.h * uniform(rng, 1.7, 2.3);
  const std::size_t per_col = (fields.size() + static_cast<std::size_t>(lm.columns) - 1) /
                              static_cast<std::size_t>(lm.columns);
  double region_bottom = region_top;
  for (int c = 0; c < lm.columns; ++c) {
    ++block;
    const double x = margin + c * col_w;
    const double x_limit = x + col_w - 2.0 * pb.cw;
    double cy = region_top + (c > 0 ? uniform(rng, -0.5, 1.5) * pb.h : 0.0);
    const std::size_t lo = static_cast<std::size_t>(c) * per_col;
    const std::size_t hi = std::min(fields.size(), lo + per_col);

    std::vector<std::string> keys;
    double tab = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      keys.push_back(pick(rng, key_phrases(fields[k])) + (lm.key_above ? "" : ":"));
      tab = std::max(tab, pb.text_width(keys.back()));
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const int field = fields[k];
      const std::string& key = keys[k - lo];
      const int ke = pb.new_entity(kOther);
      const int ve = pb.new_entity(field);
      const std::string value = field_value(rng, field);
      if (lm.key_above) {
        pb.place(key, x, cy, x_limit, ke, block);
        const double ey = pb.place(value, x, cy + 1.3 * pb.h, x_limit, ve, block).second;
        cy = ey + line_gap + 0.3 * pb.h;
      } else {
        auto [kx, ky] = pb.place(key, x, cy, x_limit, ke, block);
        const double vx = aligned ? x + tab + 2.0 * pb.cw
                                  : kx + uniform(rng, 1.0, 3.0) * pb.cw;
        const double ey = pb.place(value, std::min(vx, x_limit - pb.cw), ky, x_limit, ve, block).second;
        cy = ey + line_gap * uniform(rng, 1.0, 1.3);
      }
    }
    region_bottom = std::max(region_bottom, cy);
  }

  // Footer notes.
  ++block;
  y = region_bottom + uniform(rng, 1.0, 3.0) * pb.h;
  static const std::vector<std::string> notes{
      "Thank you for your business", "Please include the invoice number with payment",
      "All amounts in US dollars", "Questions? Contact accounts receivable",
      "Late payments subject to a finance charge"};
  const int n_notes = uniform_int(rng, spec.min_note_lines, spec.max_note_lines);
  for (int i = 0; i < n_notes; ++i) {
    const int e = pb.new_entity(kOther);
    y = pb.place(pick(rng, notes), margin, y, W - margin, e, block).second + 1.5 * pb.h;
  }

  // Simulated OCR serialization.
  std::vector<std::size_t> order;
  if (lm.block_order) {
    order.resize(pb.words.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pb.words[a].block < pb.words[b].block;
    });
  } else {
    std::vector<BoundingBox> boxes;
    for (const auto& w : pb.words) boxes.push_back(w.box);
    order = row_band_order(boxes);
  }

  Document d;
  d.id = id;
  d.page_width = spec.page_width;
  double bottom = 0.0;
  for (const auto& w : pb.words) bottom = std::max(bottom, w.box.y1);
  d.page_height = std::max(spec.page_height, std::ceil(bottom + 20.0));
  std::vector<std::size_t> index_of_word(pb.words.size());
  for (std::size_t r = 0; r < order.size(); ++r) index_of_word[order[r]] = r;
  std::vector<int> labels(pb.words.size(), kOther);
  d.tokens.resize(pb.words.size());
  for (std::size_t w = 0; w < pb.words.size(); ++w) {
    const std::size_t r = index_of_word[w];
    d.tokens[r] = {r, pb.words[w].text, pb.words[w].box};
    labels[r] = pb.entities[static_cast<std::size_t>(pb.words[w].entity)].label;
  }
  std::vector<Entity> ents;
  for (auto& e : pb.entities) {
    if (e.tokens.empty()) continue;
    Entity out{e.label, {}};
    for (std::size_t w : e.tokens) out.tokens.push_back(index_of_word[w]);
    std::sort(out.tokens.begin(), out.tokens.end());
    ents.push_back(std::move(out));
  }
  d.labels = std::move(labels);
  d.entities = std::move(ents);
  if (meta) *meta = lm;
  return d;
}

inline SyntheticCorpus gen_synthetic(const SyntheticFormSpec& spec, std::size_t n_docs,
                                     std::uint64_t seed) {
  validate_spec(spec);
  SyntheticCorpus out;
  out.corpus.name = "synthetic";
  out.corpus.schema = synthetic_schema();
  out.corpus.docs.reserve(n_docs);
  out.layout.reserve(n_docs);
  for (std::size_t i = 0; i < n_docs; ++i) {
    LayoutMeta lm;
    const std::uint64_t doc_seed = synth_detail::mix(seed * 0x100000001b3ULL + i);
    out.corpus.docs.push_back(
        gen_synthetic_page(spec, doc_seed, "synth-" + std::to_string(seed) + "-" + std::to_string(i), &lm));
    out.layout.push_back(lm);
  }
  return out;
}

}  // namespace formgraph
