// formgraph command-line driver.
//
//   formgraph gen-synthetic --n 500 --seed 11 --out train.jsonl
//   formgraph build-graph --corpus train.jsonl --out graphs.json
//   formgraph train --dataset synthetic --rope both --edge-geo on --seed 1 --out model.ckpt
//   formgraph eval --checkpoint model.ckpt --test test.jsonl --out eval.tsv
//   formgraph ablate --dataset synthetic --seeds 1,2,3 --out ablation
//   formgraph sweep-shuffle --fractions 0,0.25,0.5,1 --out sweep.tsv
//   formgraph render --corpus test.jsonl --doc synth-22-0 --show-rope --target 5 --out page.svg
//
// Exit codes: 0 ok, 1 usage, 2 data, 3 numeric.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "formgraph/data/datasets.hpp"
#include "formgraph/render.hpp"
#include "formgraph/tasks/ablation.hpp"
#include "formgraph/tasks/checkpoint.hpp"
#include "formgraph/tasks/results.hpp"
#include "formgraph/tasks/train.hpp"

using namespace formgraph;

namespace {

struct ModelFlags {
  std::string dataset = "synthetic";
  std::string rope = "both";
  std::string edge_geo = "on";
  std::optional<int> hops;
  std::uint64_t seed = 1;
  long steps = 0;
  int epochs = 20;
  double lr = 1e-4;
  std::string train_path;
  std::string test_path;
  std::string funsd_dir;
  int synthetic_train = kSyntheticTrainDocs;
  int synthetic_test = kSyntheticTestDocs;
};

void add_model_flags(CLI::App* app, ModelFlags& f) {
  app->add_option("--dataset", f.dataset, "synthetic or funsd")
      ->check(CLI::IsMember({"synthetic", "funsd"}))
      ->capture_default_str();
  app->add_option("--rope", f.rope, "reading-order encoding: off|index|sine|both")
      ->check(CLI::IsMember({"off", "index", "sine", "both"}))
      ->capture_default_str();
  app->add_option("--edge-geo", f.edge_geo, "relative box geometry on edges: on|off")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  app->add_option("--hops", f.hops, "message-passing hops (default 2 for funsd, 7 otherwise)");
  app->add_option("--seed", f.seed, "model and document-order seed")->capture_default_str();
  app->add_option("--steps", f.steps, "cap on optimizer steps, 0 for epochs x documents")
      ->capture_default_str();
  app->add_option("--epochs", f.epochs, "training epochs")->capture_default_str();
  app->add_option("--lr", f.lr, "peak Adam learning rate")->capture_default_str();
  app->add_option("--train", f.train_path, "training corpus (corpv1); default: pinned synthetic split");
  app->add_option("--test", f.test_path, "test corpus (corpv1); default: pinned synthetic split");
  app->add_option("--funsd-dir", f.funsd_dir, "FUNSD root (default: $FUNSD_DIR)");
  app->add_option("--synthetic-train", f.synthetic_train, "documents in the generated train split")
      ->capture_default_str();
  app->add_option("--synthetic-test", f.synthetic_test, "documents in the generated test split")
      ->capture_default_str();
}

ExperimentConfig make_config(const ModelFlags& f) {
  ExperimentConfig c = default_experiment(f.dataset);
  c.gcn.rope.mode = parse_rope_mode(f.rope);
  c.gcn.use_edge_geo = f.edge_geo == "on";
  if (f.hops) c.gcn.hops = *f.hops;
  c.seed = f.seed;
  c.max_steps = f.steps;
  c.epochs = f.epochs;
  c.lr = f.lr;
  if (f.synthetic_train < 1 || f.synthetic_test < 1)
    throw UsageError("synthetic split sizes must be >= 1");
  c.validate();
  return c;
}

DatasetSplit load_split(const ModelFlags& f) {
  DatasetSplit s;
  if (f.dataset == "funsd") {
    std::string dir = f.funsd_dir;
    if (dir.empty())
      if (const char* env = std::getenv("FUNSD_DIR")) dir = env;
    s = funsd_split(dir);
  } else {
    s = synthetic_split({}, f.synthetic_train, f.synthetic_test);
  }
  if (!f.train_path.empty()) {
    s.train = load_corpus(f.train_path);
    s.label = "corpus files";
  }
  if (!f.test_path.empty()) s.test = load_corpus(f.test_path);
  return s;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad ") + what + " entry '" + item + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void log_line(const std::string& s) { std::cerr << "[formgraph] " << s << '\n'; }

ResultTable eval_table(const EvalResult& r, const nlohmann::json& config, const std::string& label) {
  ResultTable t;
  t.add_echo("table", "evaluation");
  t.add_echo("dataset", label);
  t.add_echo("config", config);
  t.columns = {"task", "class", "support", "tp", "fp", "fn", "precision", "recall", "f1"};
  for (const auto* rep : {&r.labeling, &r.grouping}) {
    for (const auto& c : rep->per_class)
      t.add_row({to_string(rep->task), c.name, std::to_string(c.support), std::to_string(c.counts.tp),
                 std::to_string(c.counts.fp), std::to_string(c.counts.fn), fixed(c.prf.precision),
                 fixed(c.prf.recall), fixed(c.prf.f1)});
    t.add_row({to_string(rep->task), "micro", "", std::to_string(rep->micro_counts.tp),
               std::to_string(rep->micro_counts.fp), std::to_string(rep->micro_counts.fn),
               fixed(rep->micro.precision), fixed(rep->micro.recall), fixed(rep->micro.f1)});
  }
  return t;
}

const Document& find_doc(const Corpus& c, const std::string& id) {
  for (const auto& d : c.docs)
    if (d.id == id) return d;
  throw DataError("no document '" + id + "' in corpus '" + c.name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"formgraph: document graphs, reading-order codes and GCN training"};
  app.require_subcommand(1);

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic", "generate a synthetic form corpus");
  std::size_t gen_n = kSyntheticTrainDocs;
  std::uint64_t gen_seed = kSyntheticTrainSeed;
  std::string gen_spec, gen_out;
  gen->add_option("--n", gen_n, "number of documents")->capture_default_str();
  gen->add_option("--seed", gen_seed, "corpus seed")->capture_default_str();
  gen->add_option("--spec", gen_spec, "generator spec file (synthv1 JSON)");
  gen->add_option("--out", gen_out, "output corpus (corpv1)")->required();

  // build-graph
  auto* bg = app.add_subcommand("build-graph", "build skeleton graphs and reading-order codes");
  std::string bg_corpus, bg_doc, bg_out;
  bg->add_option("--corpus", bg_corpus, "input corpus (corpv1)")->required();
  bg->add_option("--doc", bg_doc, "only this document id");
  bg->add_option("--out", bg_out, "output JSON")->required();

  // train
  auto* tr = app.add_subcommand("train", "train a model and write a checkpoint");
  ModelFlags tr_flags;
  std::string tr_out, tr_log;
  double tr_shuffle = 0.0;
  bool tr_eval = false;
  add_model_flags(tr, tr_flags);
  tr->add_option("--shuffle", tr_shuffle, "reading-order shuffle fraction for training data")
      ->capture_default_str();
  tr->add_flag("--eval-each-epoch", tr_eval, "evaluate on the test split after every epoch");
  tr->add_option("--out", tr_out, "checkpoint path (ckptv1)")->required();
  tr->add_option("--log", tr_log, "training log (TSV with config echo)");

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string ev_ckpt, ev_test, ev_out, ev_funsd;
  ev->add_option("--checkpoint", ev_ckpt, "checkpoint (ckptv1)")->required();
  ev->add_option("--test", ev_test, "test corpus (corpv1); default: the checkpoint's dataset test split");
  ev->add_option("--funsd-dir", ev_funsd, "FUNSD root (default: $FUNSD_DIR)");
  ev->add_option("--out", ev_out, "results file (TSV); stdout if omitted");

  // ablate
  auto* ab = app.add_subcommand("ablate", "EdgeGeo x ROPE and encoding-function ablations");
  ModelFlags ab_flags;
  std::string ab_seeds = "1,2,3", ab_out, ab_tables = "1,2";
  add_model_flags(ab, ab_flags);
  ab->add_option("--seeds", ab_seeds, "comma-separated seeds")->capture_default_str();
  ab->add_option("--tables", ab_tables, "1 = encodings on/off, 2 = encoding function")
      ->capture_default_str();
  ab->add_option("--out", ab_out, "output prefix; writes <prefix>.table1.tsv / .table2.tsv")->required();

  // sweep-shuffle
  auto* sw = app.add_subcommand("sweep-shuffle", "F1 as a function of shuffled reading order");
  ModelFlags sw_flags;
  std::string sw_fractions = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1", sw_out;
  bool sw_test_only = false;
  add_model_flags(sw, sw_flags);
  sw->add_option("--fractions", sw_fractions, "comma-separated shuffle fractions")->capture_default_str();
  sw->add_flag("--test-only", sw_test_only, "shuffle only the test set (one training run)");
  sw->add_option("--out", sw_out, "curve file (TSV)")->required();

  // render
  auto* rd = app.add_subcommand("render", "draw a document graph as SVG");
  std::string rd_corpus, rd_doc, rd_out;
  bool rd_rope = false, rd_no_text = false;
  std::optional<std::size_t> rd_target;
  rd->add_option("--corpus", rd_corpus, "input corpus (corpv1)")->required();
  rd->add_option("--doc", rd_doc, "document id")->required();
  rd->add_flag("--show-rope", rd_rope, "label the target's neighbors with their codes");
  rd->add_option("--target", rd_target, "target token position for --show-rope");
  rd->add_flag("--no-text", rd_no_text, "omit word text");
  rd->add_option("--out", rd_out, "output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      SyntheticFormSpec spec;
      if (!gen_spec.empty()) {
        std::ifstream is(gen_spec);
        if (!is) throw MissingFile("cannot open generator spec '" + gen_spec + "'");
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(is);
        } catch (const nlohmann::json::exception& e) {
          throw DataError(gen_spec + ": " + e.what());
        }
        spec = synthetic_spec_from_json(j);
      }
      validate_spec(spec);
      auto c = gen_synthetic(spec, gen_n, gen_seed).corpus;
      save_corpus(c, gen_out, {{"generator", to_json(spec)}, {"n", gen_n}, {"seed", gen_seed}});
      log_line("wrote " + std::to_string(c.docs.size()) + " documents to " + gen_out);
    } else if (*bg) {
      const auto c = load_corpus(bg_corpus);
      nlohmann::json docs = nlohmann::json::array();
      for (const auto& d : c.docs) {
        if (!bg_doc.empty() && d.id != bg_doc) continue;
        const auto g = build_doc_graph(d);
        const auto codes = rope_codes(g, reading_order_of(d));
        nlohmann::json edges = nlohmann::json::array();
        for (auto [i, j] : g.skeleton.undirected_edges) edges.push_back({i, j});
        nlohmann::json directed = nlohmann::json::array();
        for (std::size_t e = 0; e < g.directed_edges.size(); ++e)
          directed.push_back({{"src", g.directed_edges[e].src},
                              {"dst", g.directed_edges[e].dst},
                              {"rope", codes.codes[e]}});
        docs.push_back({{"id", d.id}, {"n", d.size()}, {"edges", edges}, {"directed", directed}});
      }
      if (!bg_doc.empty() && docs.empty()) throw DataError("no document '" + bg_doc + "'");
      std::ofstream os(bg_out);
      if (!os) throw DataError("cannot write '" + bg_out + "'");
      os << nlohmann::json{{"echo", {{"corpus", bg_corpus}, {"beta", 1.0}}}, {"documents", docs}}.dump()
         << '\n';
    } else if (*tr) {
      auto cfg = make_config(tr_flags);
      cfg.shuffle_fraction = tr_shuffle;
      cfg.eval_every_epochs = tr_eval ? 1 : 0;
      cfg.validate();
      const auto split = load_split(tr_flags);
      TrainLog log;
      const auto m = train(split.train, cfg, &log, tr_eval ? &split.test : nullptr,
                           [](const EpochSummary& s) {
                             std::string msg = "epoch " + std::to_string(s.epoch) +
                                               " loss " + fixed(s.mean_loss);
                             if (s.labeling_f1 >= 0)
                               msg += " labeling_f1 " + fixed(s.labeling_f1) + " grouping_f1 " +
                                      fixed(s.grouping_f1);
                             log_line(msg);
                           });
      save_checkpoint(m, tr_out);
      if (!tr_log.empty()) {
        ResultTable t;
        t.add_echo("table", "training_log");
        t.add_echo("dataset", split.label);
        t.add_echo("config", to_json(cfg));
        t.columns = {"step", "loss"};
        for (std::size_t i = 0; i < log.step_loss.size(); ++i) {
          char buf[40];
          std::snprintf(buf, sizeof buf, "%.17g", log.step_loss[i]);
          t.add_row({std::to_string(i + 1), buf});
        }
        write_table(t, tr_log);
      }
      log_line("wrote checkpoint " + tr_out);
    } else if (*ev) {
      const auto m = load_checkpoint(ev_ckpt);
      Corpus test;
      std::string label;
      if (!ev_test.empty()) {
        test = load_corpus(ev_test);
        label = ev_test;
      } else {
        ModelFlags f;
        f.dataset = m.config.dataset;
        f.funsd_dir = ev_funsd;
        auto s = load_split(f);
        test = std::move(s.test);
        label = s.label;
      }
      const auto r = evaluate(m, test);
      const auto t = eval_table(r, to_json(m.config), label);
      if (ev_out.empty())
        write_table(t, std::cout);
      else
        write_table(t, ev_out);
    } else if (*ab) {
      const auto base = make_config(ab_flags);
      std::vector<std::uint64_t> seeds;
      for (double s : parse_list(ab_seeds, "seed")) {
        if (s < 0 || s != static_cast<double>(static_cast<std::uint64_t>(s)))
          throw UsageError("seeds must be non-negative integers");
        seeds.push_back(static_cast<std::uint64_t>(s));
      }
      const auto tables = parse_list(ab_tables, "table");
      for (double t : tables)
        if (t != 1.0 && t != 2.0) throw UsageError("--tables accepts 1 and 2");
      const auto split = load_split(ab_flags);
      AblationRunner runner(split.train, split.test, base, seeds, log_line);
      for (double t : tables) {
        const bool first = t == 1.0;
        const auto table = runner.run(first ? "encodings" : "encoding_function",
                                      first ? encoding_variants() : function_variants());
        const std::string path = ab_out + (first ? ".table1.tsv" : ".table2.tsv");
        write_table(ablation_result_table(table, base, split.label), path);
        log_line("wrote " + path);
      }
    } else if (*sw) {
      const auto cfg = make_config(sw_flags);
      const auto fractions = parse_list(sw_fractions, "fraction");
      const auto split = load_split(sw_flags);
      const auto pts = run_shuffle_sweep(split.train, split.test, cfg, fractions, sw_test_only, log_line);
      write_table(sweep_result_table(pts, cfg, sw_test_only, split.label), sw_out);
      log_line("wrote " + sw_out);
    } else if (*rd) {
      if (rd_rope && !rd_target) throw UsageError("--show-rope needs --target");
      const auto c = load_corpus(rd_corpus);
      const auto& d = find_doc(c, rd_doc);
      RenderOptions opt;
      opt.show_text = !rd_no_text;
      if (rd_rope) opt.rope_target = rd_target;
      const auto svg = render_svg(d, opt);
      std::ofstream os(rd_out, std::ios::binary);
      if (!os) throw DataError("cannot write '" + rd_out + "'");
      os << svg;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
