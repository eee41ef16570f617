#pragma once

// Precision / recall / F1 from confusion counts.

#include <cstddef>
#include <string>
#include <vector>

#include "formgraph/error.hpp"

namespace formgraph {

struct Counts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline Prf prf_from_counts(const Counts& c) {
  Prf m;
  m.precision = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  m.recall = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  const double s = m.precision + m.recall;
  m.f1 = s > 0.0 ? 2.0 * m.precision * m.recall / s : 0.0;
  return m;
}

enum class TaskId { Labeling, Grouping };

inline const char* to_string(TaskId t) { return t == TaskId::Labeling ? "labeling" : "grouping"; }

struct ClassMetrics {
  std::string name;
  Counts counts;
  Prf prf;
  long support = 0;  // gold count
};

struct MetricsReport {
  TaskId task = TaskId::Labeling;
  std::vector<ClassMetrics> per_class;
  Counts micro_counts;
  Prf micro;
};

// Multi-class single-label confusion: every item contributes one TP, or one
// FP (predicted class) plus one FN (gold class). Micro P = R = accuracy.
class LabelConfusion {
 public:
  explicit LabelConfusion(std::vector<std::string> class_names)
      : names_(std::move(class_names)), counts_(names_.size()), support_(names_.size(), 0) {}

  void add(int gold, int predicted) {
    const auto n = static_cast<int>(names_.size());
    if (gold < 0 || gold >= n || predicted < 0 || predicted >= n)
      throw SchemaMismatch("class id outside schema of " + std::to_string(n) + " classes");
    ++support_[static_cast<std::size_t>(gold)];
    if (gold == predicted) {
      ++counts_[static_cast<std::size_t>(gold)].tp;
    } else {
      ++counts_[static_cast<std::size_t>(predicted)].fp;
      ++counts_[static_cast<std::size_t>(gold)].fn;
    }
  }

  MetricsReport report() const {
    MetricsReport r;
    r.task = TaskId::Labeling;
    for (std::size_t c = 0; c < names_.size(); ++c) {
      r.per_class.push_back({names_[c], counts_[c], prf_from_counts(counts_[c]), support_[c]});
      r.micro_counts += counts_[c];
    }
    r.micro = prf_from_counts(r.micro_counts);
    return r;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Counts> counts_;
  std::vector<long> support_;
};

// Binary confusion with "same entity" as the positive class.
class BinaryConfusion {
 public:
  void add(bool gold, bool predicted) {
    if (gold && predicted) ++c_.tp;
    else if (!gold && predicted) ++c_.fp;
    else if (gold && !predicted) ++c_.fn;
    if (gold) ++support_;
  }

  MetricsReport report() const {
    MetricsReport r;
    r.task = TaskId::Grouping;
    r.micro_counts = c_;
    r.micro = prf_from_counts(c_);
    r.per_class.push_back({"same_entity", c_, r.micro, support_});
    return r;
  }

 private:
  Counts c_;
  long support_ = 0;
};

}  // namespace formgraph
