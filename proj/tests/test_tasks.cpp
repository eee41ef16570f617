#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "formgraph/data/synthetic.hpp"
#include "formgraph/tasks/ablation.hpp"
#include "formgraph/tasks/checkpoint.hpp"
#include "formgraph/tasks/metrics.hpp"
#include "formgraph/tasks/results.hpp"
#include "formgraph/tasks/shuffle.hpp"
#include "formgraph/tasks/train.hpp"

using namespace formgraph;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig c = default_experiment("synthetic");
  c.gcn.hops = 1;
  c.gcn.heads = 2;
  c.gcn.head_size = 8;
  c.gcn.attention_layers = 2;
  c.gcn.mlp_hidden = 16;
  c.epochs = 2;
  c.lr = 1e-3;
  c.eval_every_epochs = 0;
  return c;
}

Corpus tiny_corpus(std::size_t n, std::uint64_t seed) {
  SyntheticFormSpec spec;
  spec.min_fields = 2;
  spec.max_fields = 3;
  spec.max_note_lines = 1;
  return gen_synthetic(spec, n, seed).corpus;
}

}  // namespace

TEST(Metrics, HandComputed) {
  const auto m = prf_from_counts({8, 2, 4});
  EXPECT_NEAR(m.precision, 0.8, 1e-12);
  EXPECT_NEAR(m.recall, 8.0 / 12.0, 1e-12);
  EXPECT_NEAR(m.f1, 0.7272727272727273, 1e-12);
  const auto z = prf_from_counts({0, 0, 0});
  EXPECT_EQ(z.f1, 0.0);
}

TEST(Metrics, PerfectAndDegenerateLabeling) {
  LabelConfusion perfect({"a", "b"});
  perfect.add(0, 0);
  perfect.add(1, 1);
  EXPECT_EQ(perfect.report().micro.f1, 1.0);

  LabelConfusion c({"a", "b", "c", "d"});
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 5; ++i) c.add(k, 0);
  const auto r = c.report();
  EXPECT_NEAR(r.micro.f1, 0.25, 1e-12);
  EXPECT_EQ(r.per_class[0].counts.fp, 15);
  EXPECT_EQ(r.per_class[1].counts.fn, 5);
  EXPECT_THROW(c.add(4, 0), SchemaMismatch);
}

TEST(Metrics, Binary) {
  BinaryConfusion perfect;
  perfect.add(true, true);
  perfect.add(false, false);
  EXPECT_EQ(perfect.report().micro.f1, 1.0);
  BinaryConfusion neg;
  neg.add(true, false);
  neg.add(false, false);
  EXPECT_EQ(neg.report().micro.recall, 0.0);
  EXPECT_EQ(neg.report().micro.f1, 0.0);
}

TEST(DecodeGroups, Components) {
  const std::vector<VertexPair> edges{{0, 1}, {1, 2}, {3, 4}};
  const auto c = decode_groups(5, edges, {0.9, 0.6, 0.1});
  EXPECT_EQ(c, (std::vector<std::vector<int>>{{0, 1, 2}, {3}, {4}}));
  const auto none = decode_groups(5, edges, {0.1, 0.2, 0.3});
  EXPECT_EQ(none.size(), 5u);
  const auto high = decode_groups(5, edges, {1.0, 1.0, 1.0}, 1.0 + 1e-9);
  EXPECT_EQ(high.size(), 5u);
  EXPECT_THROW(decode_groups(5, edges, {0.5}), UsageError);
}

TEST(Shuffle, ZeroIsIdentity) {
  const auto c = tiny_corpus(3, 1);
  for (const auto& d : c.docs) EXPECT_EQ(shuffle_reading_order(d, 0.0, 5), d);
}

TEST(Shuffle, IsPermutationAndKeepsAnnotations) {
  const auto c = tiny_corpus(5, 2);
  for (double rho : {0.1, 0.5, 1.0}) {
    for (const auto& d : c.docs) {
      const auto s = shuffle_reading_order(d, rho, 17);
      ASSERT_EQ(s.size(), d.size());
      std::multiset<std::size_t> a, b;
      for (const auto& t : d.tokens) a.insert(t.index);
      for (const auto& t : s.tokens) b.insert(t.index);
      EXPECT_EQ(a, b);
      EXPECT_TRUE(validate_document(s).empty());
      // Each word keeps its label and box.
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto it = std::find_if(d.tokens.begin(), d.tokens.end(), [&](const WordToken& t) {
          return t.text == s.tokens[i].text && t.box.x0 == s.tokens[i].box.x0 && t.box.y0 == s.tokens[i].box.y0;
        });
        ASSERT_NE(it, d.tokens.end());
        EXPECT_EQ((*d.labels)[static_cast<std::size_t>(it - d.tokens.begin())], (*s.labels)[i]);
      }
    }
  }
}

TEST(Shuffle, CountAndPinnedPermutation) {
  EXPECT_EQ(shuffle_count(0.1, 10), 1u);
  EXPECT_EQ(shuffle_count(0.25, 10), 3u);
  EXPECT_EQ(shuffle_count(1.0, 3), 3u);
  Document d;
  d.page_width = d.page_height = 100;
  d.tokens = {{0, "a", {0, 0, 5, 5}}, {1, "b", {10, 0, 15, 5}}, {2, "c", {20, 0, 25, 5}}};
  const auto s = shuffle_reading_order(d, 1.0, 42);
  std::string order;
  for (const auto& t : s.tokens) order += t.text;
  EXPECT_EQ(order, "bca");  // recorded with seed 42
  EXPECT_EQ(shuffle_reading_order(d, 1.0, 42), s);
  EXPECT_THROW(shuffle_reading_order(d, 1.5, 1), UsageError);
}

TEST(Train, LossDecreasesOnTinyCorpus) {
  const auto c = tiny_corpus(10, 3);
  auto cfg = tiny_config();
  cfg.epochs = 20;
  TrainLog log;
  train(c, cfg, &log);
  ASSERT_EQ(log.step_loss.size(), 200u);
  double first = 0, last = 0;
  for (int i = 0; i < 10; ++i) {
    first += log.step_loss[static_cast<std::size_t>(i)];
    last += log.step_loss[190 + static_cast<std::size_t>(i)];
  }
  EXPECT_LT(last, first);
}

TEST(Train, StepCap) {
  const auto c = tiny_corpus(10, 3);
  auto cfg = tiny_config();
  cfg.max_steps = 13;
  TrainLog log;
  const auto m = train(c, cfg, &log);
  EXPECT_EQ(log.step_loss.size(), 13u);
  EXPECT_EQ(m.params.step(), 13);
}

TEST(Train, DeterministicAndCheckpointStable) {
  const auto c = tiny_corpus(6, 4);
  const auto cfg = tiny_config();
  TrainLog a, b;
  const auto ma = train(c, cfg, &a);
  const auto mb = train(c, cfg, &b);
  EXPECT_EQ(a.step_loss, b.step_loss);
  EXPECT_EQ(checkpoint_bytes(ma), checkpoint_bytes(mb));

  std::istringstream is(checkpoint_bytes(ma));
  const auto loaded = load_checkpoint(is);
  EXPECT_EQ(checkpoint_bytes(loaded), checkpoint_bytes(ma));
  const auto ea = evaluate(ma, c), eb = evaluate(loaded, c);
  EXPECT_EQ(ea.labeling.micro.f1, eb.labeling.micro.f1);
  EXPECT_EQ(ea.grouping.micro.f1, eb.grouping.micro.f1);
}

TEST(Checkpoint, RejectsOtherFormats) {
  std::istringstream bad("ckptv0\n{}\n");
  EXPECT_THROW(load_checkpoint(bad), VersionMismatch);
  EXPECT_THROW(load_checkpoint(std::string("/nonexistent/x.ckpt")), MissingFile);
}

TEST(Train, SchemaMismatch) {
  const auto c = tiny_corpus(2, 5);
  auto cfg = tiny_config();
  cfg.gcn.n_classes = 4;
  EXPECT_THROW(train(c, cfg), SchemaMismatch);
}

TEST(Experiment, JsonRoundTrip) {
  auto c = tiny_config();
  c.gcn.rope.mode = RopeMode::Sinusoidal;
  c.shuffle_fraction = 0.25;
  c.max_steps = 77;
  const auto j = to_json(c);
  EXPECT_EQ(to_json(experiment_from_json(j)), j);
  auto bad = j;
  bad["feature_layout"] = "featv0";
  EXPECT_THROW(experiment_from_json(bad), VersionMismatch);
}

TEST(Experiment, Validation) {
  auto c = tiny_config();
  c.epochs = 0;
  EXPECT_THROW(c.validate(), UsageError);
  c = tiny_config();
  c.shuffle_fraction = 2.0;
  EXPECT_THROW(c.validate(), UsageError);
  c = tiny_config();
  c.batch_size = 4;
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(Results, TableFormat) {
  ResultTable t;
  t.add_echo("dataset", "x");
  t.columns = {"a", "b"};
  t.add_row({"1", "2"});
  EXPECT_THROW(t.add_row({"1"}), UsageError);
  std::ostringstream os;
  write_table(t, os);
  EXPECT_EQ(os.str(), "# format: \"resv1\"\n# feature_layout: \"featv1\"\n# dataset: \"x\"\na\tb\n1\t2\n");
}

TEST(Ablation, SharedCellsAndDeterminism) {
  const auto train_c = tiny_corpus(4, 6), test_c = tiny_corpus(2, 7);
  auto cfg = tiny_config();
  cfg.epochs = 1;
  AblationRunner r(train_c, test_c, cfg, {1, 2});
  const auto t1 = r.run("encodings", encoding_variants());
  EXPECT_EQ(r.trainings(), 8);
  const auto t2 = r.run("encoding_function", function_variants());
  EXPECT_EQ(r.trainings(), 12);
  EXPECT_EQ(t1.row("edgegeo").labeling_f1(), t2.row("none").labeling_f1());
  EXPECT_EQ(t1.row("both").grouping_f1(), t2.row("both").grouping_f1());

  AblationRunner again(train_c, test_c, cfg, {1, 2});
  const auto t1b = again.run("encodings", encoding_variants());
  std::ostringstream a, b;
  write_table(ablation_result_table(t1, cfg, "tiny"), a);
  write_table(ablation_result_table(t1b, cfg, "tiny"), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Sweep, ZeroPointMatchesPlainRun) {
  const auto train_c = tiny_corpus(4, 8), test_c = tiny_corpus(3, 9);
  auto cfg = tiny_config();
  cfg.epochs = 1;
  const auto pts = run_shuffle_sweep(train_c, test_c, cfg, {0.0, 1.0}, false);
  ASSERT_EQ(pts.size(), 2u);
  const auto plain = evaluate(train(train_c, cfg), test_c);
  EXPECT_EQ(pts[0].result.labeling.micro.f1, plain.labeling.micro.f1);
  EXPECT_EQ(pts[0].result.grouping.micro.f1, plain.grouping.micro.f1);
  const auto test_only = run_shuffle_sweep(train_c, test_c, cfg, {0.0, 0.5}, true);
  EXPECT_EQ(test_only[0].result.labeling.micro.f1, plain.labeling.micro.f1);
  EXPECT_THROW(run_shuffle_sweep(train_c, test_c, cfg, {1.5}, false), UsageError);
}
