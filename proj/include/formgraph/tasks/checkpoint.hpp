#pragma once

// Checkpoint format "ckptv1":
//   line 1  "ckptv1"
//   line 2  JSON header: config echo, schema, feature layout, seed, optimizer
//           step, and the ordered parameter table {name, rows, cols}
//   rest    for each parameter in table order: value, Adam m, Adam v as raw
//           little-endian IEEE-754 doubles, row-major
// The same state always serializes to the same bytes.

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "formgraph/error.hpp"
#include "formgraph/tasks/experiment.hpp"
#include "formgraph/tasks/train.hpp"

namespace formgraph {

inline constexpr const char* kCheckpointFormat = "ckptv1";

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload assumes a little-endian host");

inline void save_checkpoint(const TrainedModel& m, std::ostream& os) {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& [name, p] : m.params.params())
    table.push_back({{"name", name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}});
  nlohmann::json header{{"config", to_json(m.config)},
                        {"schema", {{"names", m.schema.names}, {"background", m.schema.background}}},
                        {"feature_layout", kFeatureLayoutVersion},
                        {"seed", m.params.seed()},
                        {"step", m.params.step()},
                        {"params", table}};
  os << kCheckpointFormat << '\n' << header.dump() << '\n';
  auto put = [&](const nn::Tensor& t) {
    os.write(reinterpret_cast<const char*>(t.data()),
             static_cast<std::streamsize>(t.size() * sizeof(double)));
  };
  for (const auto& [_, p] : m.params.params()) {
    put(p.value);
    put(p.m);
    put(p.v);
  }
}

inline void save_checkpoint(const TrainedModel& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write checkpoint '" + path + "'");
  save_checkpoint(m, os);
  if (!os) throw DataError("write failed for '" + path + "'");
}

inline std::string checkpoint_bytes(const TrainedModel& m) {
  std::ostringstream os(std::ios::binary);
  save_checkpoint(m, os);
  return os.str();
}

inline TrainedModel load_checkpoint(std::istream& is, const std::string& what = "<stream>") {
  std::string magic, line;
  if (!std::getline(is, magic)) throw DataError(what + ": empty checkpoint");
  if (magic != kCheckpointFormat)
    throw VersionMismatch(what + ": checkpoint format '" + magic.substr(0, 32) +
                          "', this build reads '" + kCheckpointFormat + "'");
  if (!std::getline(is, line)) throw DataError(what + ": truncated checkpoint header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(what + ": bad checkpoint header: " + e.what());
  }
  if (header.value("feature_layout", std::string()) != kFeatureLayoutVersion)
    throw VersionMismatch(what + ": feature layout '" +
                          header.value("feature_layout", std::string()) + "', this build uses '" +
                          kFeatureLayoutVersion + "'");
  TrainedModel m;
  m.config = experiment_from_json(header.at("config"));
  m.schema.names = header.at("schema").at("names").get<std::vector<std::string>>();
  m.schema.background = header.at("schema").at("background").get<int>();
  m.params = nn::ParamStore(header.at("seed").get<std::uint64_t>());
  m.params.set_step(header.at("step").get<long>());
  auto get = [&](Eigen::Index rows, Eigen::Index cols) {
    nn::Tensor t(rows, cols);
    is.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!is) throw DataError(what + ": truncated checkpoint payload");
    return t;
  };
  for (const auto& entry : header.at("params")) {
    const auto rows = entry.at("rows").get<Eigen::Index>();
    const auto cols = entry.at("cols").get<Eigen::Index>();
    const auto name = entry.at("name").get<std::string>();
    m.params.add(name, get(rows, cols));
    auto& p = m.params.at(name);
    p.m = get(rows, cols);
    p.v = get(rows, cols);
  }
  return m;
}

inline TrainedModel load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw MissingFile("cannot open checkpoint '" + path + "'");
  return load_checkpoint(is, path);
}

}  // namespace formgraph
