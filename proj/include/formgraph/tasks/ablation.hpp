#pragma once

// Ablation matrix over (EdgeGeo, ROPE mode) and the reading-order shuffle
// sweep. Each (config, seed) pair is trained once and shared between tables.

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "formgraph/data/corpus.hpp"
#include "formgraph/tasks/results.hpp"
#include "formgraph/tasks/shuffle.hpp"
#include "formgraph/tasks/train.hpp"

namespace formgraph {

struct AblationVariant {
  std::string name;
  bool edge_geo = false;
  RopeMode rope = RopeMode::Off;
};

// First table: encodings on/off. Second: encoding function, EdgeGeo always on.
inline std::vector<AblationVariant> encoding_variants() {
  return {{"none", false, RopeMode::Off},
          {"edgegeo", true, RopeMode::Off},
          {"rope", false, RopeMode::Combined},
          {"both", true, RopeMode::Combined}};
}

inline std::vector<AblationVariant> function_variants() {
  return {{"none", true, RopeMode::Off},
          {"index", true, RopeMode::Index},
          {"sine", true, RopeMode::Sinusoidal},
          {"both", true, RopeMode::Combined}};
}

struct SeedRun {
  std::uint64_t seed = 0;
  EvalResult result;
};

struct Summary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline Summary summarize(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  Summary s{0.0, xs.front(), xs.front()};
  for (double x : xs) {
    s.mean += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean /= static_cast<double>(xs.size());
  return s;
}

struct VariantResult {
  AblationVariant variant;
  std::vector<SeedRun> runs;

  std::vector<double> labeling_f1() const {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.result.labeling.micro.f1);
    return v;
  }
  std::vector<double> grouping_f1() const {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.result.grouping.micro.f1);
    return v;
  }
  Summary labeling() const { return summarize(labeling_f1()); }
  Summary grouping() const { return summarize(grouping_f1()); }
};

struct AblationTable {
  std::string name;
  std::vector<VariantResult> rows;

  const VariantResult& row(const std::string& n) const {
    for (const auto& r : rows)
      if (r.variant.name == n) return r;
    throw UsageError("ablation table '" + name + "' has no row '" + n + "'");
  }
};

using ProgressFn = std::function<void(const std::string&)>;

class AblationRunner {
 public:
  AblationRunner(const Corpus& train, const Corpus& test, ExperimentConfig base,
                 std::vector<std::uint64_t> seeds, ProgressFn progress = {})
      : train_(train), test_(test), base_(std::move(base)), seeds_(std::move(seeds)),
        progress_(std::move(progress)) {
    if (seeds_.empty()) throw UsageError("ablation needs at least one seed");
    base_.validate();
  }

  AblationTable run(const std::string& name, const std::vector<AblationVariant>& variants) {
    AblationTable t{name, {}};
    for (const auto& v : variants) {
      VariantResult vr{v, {}};
      for (auto seed : seeds_) vr.runs.push_back({seed, cell(v, seed)});
      t.rows.push_back(std::move(vr));
    }
    return t;
  }

  int trainings() const { return static_cast<int>(cache_.size()); }

 private:
  EvalResult cell(const AblationVariant& v, std::uint64_t seed) {
    const auto key = std::make_tuple(v.edge_geo, static_cast<int>(v.rope), seed);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    ExperimentConfig cfg = base_;
    cfg.gcn.use_edge_geo = v.edge_geo;
    cfg.gcn.rope.mode = v.rope;
    cfg.seed = seed;
    cfg.eval_every_epochs = 0;
    if (progress_)
      progress_("train edge_geo=" + std::string(v.edge_geo ? "on" : "off") +
                " rope=" + std::string(to_string(v.rope)) + " seed=" + std::to_string(seed));
    const auto m = train(train_, cfg);
    auto r = evaluate(m, test_);
    cache_.emplace(key, r);
    return r;
  }

  const Corpus& train_;
  const Corpus& test_;
  ExperimentConfig base_;
  std::vector<std::uint64_t> seeds_;
  ProgressFn progress_;
  std::map<std::tuple<bool, int, std::uint64_t>, EvalResult> cache_;
};

inline ResultTable ablation_result_table(const AblationTable& t, const ExperimentConfig& base,
                                         const std::string& dataset_label) {
  ResultTable out;
  out.add_echo("table", t.name);
  out.add_echo("dataset", dataset_label);
  out.add_echo("config", to_json(base));
  std::vector<std::uint64_t> seeds;
  if (!t.rows.empty())
    for (const auto& r : t.rows.front().runs) seeds.push_back(r.seed);
  out.add_echo("seeds", seeds);
  out.columns = {"variant", "edge_geo", "rope", "labeling_f1_mean", "labeling_f1_min",
                 "labeling_f1_max", "grouping_f1_mean", "grouping_f1_min", "grouping_f1_max",
                 "labeling_f1_per_seed", "grouping_f1_per_seed"};
  auto join = [](const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fixed(xs[i]);
    return s;
  };
  for (const auto& r : t.rows) {
    const auto l = r.labeling(), g = r.grouping();
    out.add_row({r.variant.name, r.variant.edge_geo ? "on" : "off", std::string(to_string(r.variant.rope)),
                 fixed(l.mean), fixed(l.min), fixed(l.max), fixed(g.mean), fixed(g.min),
                 fixed(g.max), join(r.labeling_f1()), join(r.grouping_f1())});
  }
  return out;
}

struct SweepPoint {
  double fraction = 0.0;
  EvalResult result;
};

// Shuffle sweep. Default: train and test sets are both shuffled at the same
// fraction, one training per point. With test_only, one model is trained on
// unshuffled data and evaluated on each shuffled test set.
inline std::vector<SweepPoint> run_shuffle_sweep(const Corpus& train_corpus, const Corpus& test,
                                                 ExperimentConfig cfg,
                                                 const std::vector<double>& fractions,
                                                 bool test_only, const ProgressFn& progress = {}) {
  for (double f : fractions)
    if (!(f >= 0.0 && f <= 1.0)) throw UsageError("shuffle fraction must lie in [0, 1]");
  cfg.eval_every_epochs = 0;
  cfg.shuffle_test_only = test_only;
  std::vector<SweepPoint> out;
  if (test_only) {
    cfg.shuffle_fraction = 0.0;
    if (progress) progress("train unshuffled");
    const auto m = train(train_corpus, cfg);
    for (double f : fractions) {
      if (progress) progress("evaluate rho=" + fixed(f, 2));
      out.push_back({f, evaluate(m, shuffle_corpus(test, f, cfg.seed + 1))});
    }
    return out;
  }
  for (double f : fractions) {
    cfg.shuffle_fraction = f;
    if (progress) progress("train rho=" + fixed(f, 2));
    const auto m = train(train_corpus, cfg);
    out.push_back({f, evaluate(m, shuffle_corpus(test, f, cfg.seed + 1))});
  }
  return out;
}

inline ResultTable sweep_result_table(const std::vector<SweepPoint>& pts, const ExperimentConfig& cfg,
                                      bool test_only, const std::string& dataset_label) {
  ResultTable out;
  out.add_echo("table", "shuffle_sweep");
  out.add_echo("dataset", dataset_label);
  out.add_echo("shuffle", test_only ? "test_only" : "train_and_test");
  out.add_echo("config", to_json(cfg));
  out.columns = {"rho",          "labeling_p", "labeling_r", "labeling_f1",
                 "grouping_p",   "grouping_r", "grouping_f1"};
  for (const auto& p : pts) {
    const auto& l = p.result.labeling.micro;
    const auto& g = p.result.grouping.micro;
    out.add_row({fixed(p.fraction, 2), fixed(l.precision), fixed(l.recall), fixed(l.f1),
                 fixed(g.precision), fixed(g.recall), fixed(g.f1)});
  }
  return out;
}

}  // namespace formgraph
