#pragma once

// Named dataset splits used by the CLI and the acceptance harness.

#include <cstdint>
#include <string>

#include "formgraph/data/corpus_io.hpp"
#include "formgraph/data/funsd.hpp"
#include "formgraph/data/synthetic.hpp"
#include "formgraph/error.hpp"

namespace formgraph {

struct DatasetSplit {
  Corpus train;
  Corpus test;
  std::string label;  // how the split was produced, echoed into result files
};

inline constexpr int kSyntheticTrainDocs = 500;
inline constexpr int kSyntheticTestDocs = 100;
inline constexpr std::uint64_t kSyntheticTrainSeed = 11;
inline constexpr std::uint64_t kSyntheticTestSeed = 22;

// The pinned synthetic benchmark (stand-in for the private payment corpus).
inline DatasetSplit synthetic_split(const SyntheticFormSpec& spec = {},
                                    int n_train = kSyntheticTrainDocs,
                                    int n_test = kSyntheticTestDocs) {
  DatasetSplit s;
  s.train = gen_synthetic(spec, n_train, kSyntheticTrainSeed).corpus;
  s.train.name = "synthetic-train";
  s.test = gen_synthetic(spec, n_test, kSyntheticTestSeed).corpus;
  s.test.name = "synthetic-test";
  s.label = "synthetic stand-in (" + std::string(kSyntheticSpecVersion) + ", train " +
            std::to_string(n_train) + " docs seed " + std::to_string(kSyntheticTrainSeed) +
            ", test " + std::to_string(n_test) + " docs seed " + std::to_string(kSyntheticTestSeed) + ")";
  return s;
}

inline DatasetSplit funsd_split(const std::string& root) {
  if (root.empty()) throw UsageError("FUNSD needs a dataset directory (--funsd-dir or FUNSD_DIR)");
  auto ds = load_funsd(root);
  return {std::move(ds.train), std::move(ds.test),
          "FUNSD official split, reading order rebuilt by row banding"};
}

}  // namespace formgraph
