#pragma once

// Experiment configuration files: INI-style sections with key = value lines.
//
//   [experiment]  task, trials, seed, algorithms, threads, num_features,
//                 bandwidths, compute_regret
//   [network]     nodes, connection_prob, edge_list, max_attempts
//   [data]        path, label_column, has_header, normalize, ar_order,
//                 ar_intercept, ar_coefficients, ar_noise_std, series_length,
//                 bandwidth, input_dim, generator_features, noise_std,
//                 samples_per_learner
//   [algorithm.domkl]     rho, eta_local, eta_global, variant, allow_cycles
//   [algorithm.dokl]      rho, eta_local, kernel
//   [algorithm.comkl]     eta_local, eta_global, loss_aggregation
//   [algorithm.rff_dokl]  step_size, kernel
//
// '#' and ';' start comments. Lists are comma separated. Relative paths are
// resolved against the directory of the config file.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "domkl/errors.hpp"
#include "domkl/graph.hpp"
#include "domkl/simulator.hpp"

namespace domkl {

namespace detail {

inline std::string strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct ConfigValue {
  std::string text;
  std::size_t line = 0;
  std::string key;  // "section.key" for messages

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("line " + std::to_string(line) + ": " + key + ": " + why, line);
  }
  double real() const {
    double v = 0.0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || r.ec != std::errc() || r.ptr != text.data() + text.size()) fail("expected a number, got '" + text + "'");
    return v;
  }
  std::uint64_t integer() const {
    std::uint64_t v = 0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || r.ec != std::errc() || r.ptr != text.data() + text.size())
      fail("expected a non-negative integer, got '" + text + "'");
    return v;
  }
  bool boolean() const {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail("expected true or false, got '" + text + "'");
  }
  std::vector<std::string> list() const {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto pos = text.find(',', start);
      auto item = strip(std::string_view(text).substr(start, pos == std::string::npos ? std::string::npos : pos - start));
      if (!item.empty()) out.push_back(item);
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    return out;
  }
  std::vector<double> reals() const {
    std::vector<double> out;
    for (const auto& item : list()) {
      ConfigValue v{item, line, key};
      out.push_back(v.real());
    }
    return out;
  }
};

}  // namespace detail

/// Parses a configuration stream. Unknown sections or keys, malformed
/// values and invalid combinations raise ParseError naming the line.
inline ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  using detail::ConfigValue;
  std::map<std::string, ConfigValue> values;
  std::string section, line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto cut = line.find_first_of("#;");
    auto body = detail::strip(std::string_view(line).substr(0, cut));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError("line " + std::to_string(line_no) + ": unterminated section header", line_no);
      section = detail::strip(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(line_no) + ": expected key = value", line_no);
    if (section.empty()) throw ParseError("line " + std::to_string(line_no) + ": key outside any section", line_no);
    auto key = section + "." + detail::strip(std::string_view(body).substr(0, eq));
    values[key] = ConfigValue{detail::strip(std::string_view(body).substr(eq + 1)), line_no, key};
  }

  ExperimentConfig cfg;
  auto path_of = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return (fp.is_absolute() || base_dir.empty()) ? fp.string() : (base_dir / fp).string();
  };
  std::string edge_list;

  using Setter = std::function<void(const ConfigValue&)>;
  const std::map<std::string, Setter> setters = {
      {"experiment.task", [&](const ConfigValue& v) {
         if (v.text == "regression") cfg.task = TaskKind::regression;
         else if (v.text == "timeseries") cfg.task = TaskKind::timeseries;
         else if (v.text == "synthetic") cfg.task = TaskKind::synthetic;
         else v.fail("unknown task '" + v.text + "'");
       }},
      {"experiment.trials", [&](const ConfigValue& v) { cfg.trials = v.integer(); }},
      {"experiment.seed", [&](const ConfigValue& v) { cfg.master_seed = v.integer(); }},
      {"experiment.threads", [&](const ConfigValue& v) { cfg.threads = v.integer(); }},
      {"experiment.num_features", [&](const ConfigValue& v) { cfg.num_features = v.integer(); }},
      {"experiment.compute_regret", [&](const ConfigValue& v) { cfg.compute_regret = v.boolean(); }},
      {"experiment.bandwidths", [&](const ConfigValue& v) {
         cfg.bandwidths = v.text == "default" ? default_bandwidths() : v.reals();
       }},
      {"experiment.algorithms", [&](const ConfigValue& v) {
         cfg.algorithms.clear();
         for (const auto& name : v.list()) {
           auto a = parse_algorithm(name);
           if (!a) v.fail("unknown algorithm '" + name + "'");
           cfg.algorithms.push_back(*a);
         }
       }},
      {"network.nodes", [&](const ConfigValue& v) { cfg.num_nodes = v.integer(); }},
      {"network.connection_prob", [&](const ConfigValue& v) { cfg.connection_prob = v.real(); }},
      {"network.max_attempts", [&](const ConfigValue& v) { cfg.max_graph_attempts = v.integer(); }},
      {"network.edge_list", [&](const ConfigValue& v) { edge_list = path_of(v.text); }},
      {"data.path", [&](const ConfigValue& v) { cfg.data.path = path_of(v.text); }},
      {"data.label_column", [&](const ConfigValue& v) { cfg.data.label_column = v.integer(); }},
      {"data.has_header", [&](const ConfigValue& v) { cfg.data.has_header = v.boolean(); }},
      {"data.normalize", [&](const ConfigValue& v) { cfg.data.normalize = v.boolean(); }},
      {"data.ar_order", [&](const ConfigValue& v) { cfg.data.ar_order = v.integer(); }},
      {"data.ar_intercept", [&](const ConfigValue& v) { cfg.data.ar.intercept = v.real(); }},
      {"data.ar_noise_std", [&](const ConfigValue& v) { cfg.data.ar.noise_std = v.real(); }},
      {"data.ar_coefficients", [&](const ConfigValue& v) {
         auto c = v.reals();
         cfg.data.ar.coefficients = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
         cfg.data.ar.order = c.size();
       }},
      {"data.series_length", [&](const ConfigValue& v) { cfg.data.series_length = v.integer(); }},
      {"data.bandwidth", [&](const ConfigValue& v) { cfg.synthetic.bandwidth = v.real(); }},
      {"data.input_dim", [&](const ConfigValue& v) { cfg.synthetic.input_dim = v.integer(); }},
      {"data.generator_features", [&](const ConfigValue& v) { cfg.synthetic.generator_features = v.integer(); }},
      {"data.noise_std", [&](const ConfigValue& v) { cfg.synthetic.noise_std = v.real(); }},
      {"data.samples_per_learner", [&](const ConfigValue& v) { cfg.synthetic.samples_per_learner = v.integer(); }},
      {"algorithm.domkl.rho", [&](const ConfigValue& v) { cfg.domkl.admm.rho = v.real(); }},
      {"algorithm.domkl.eta_local", [&](const ConfigValue& v) { cfg.domkl.admm.eta_local = v.real(); }},
      {"algorithm.domkl.eta_global", [&](const ConfigValue& v) { cfg.domkl.eta_global = v.real(); }},
      {"algorithm.domkl.allow_cycles", [&](const ConfigValue& v) { cfg.domkl.allow_cycles = v.boolean(); }},
      {"algorithm.domkl.variant", [&](const ConfigValue& v) {
         if (v.text == "product") cfg.domkl.variant = HedgeVariant::product;
         else if (v.text == "message_passing") cfg.domkl.variant = HedgeVariant::message_passing;
         else v.fail("unknown variant '" + v.text + "'");
       }},
      {"algorithm.dokl.rho", [&](const ConfigValue& v) { cfg.dokl.admm.rho = v.real(); }},
      {"algorithm.dokl.eta_local", [&](const ConfigValue& v) { cfg.dokl.admm.eta_local = v.real(); }},
      {"algorithm.dokl.kernel", [&](const ConfigValue& v) { cfg.dokl.kernel = v.integer(); }},
      {"algorithm.comkl.eta_local", [&](const ConfigValue& v) { cfg.comkl.eta_local = v.real(); }},
      {"algorithm.comkl.eta_global", [&](const ConfigValue& v) { cfg.comkl.eta_global = v.real(); }},
      {"algorithm.comkl.loss_aggregation", [&](const ConfigValue& v) {
         if (v.text == "sum") cfg.comkl.aggregation = BatchLossAggregation::sum;
         else if (v.text == "mean") cfg.comkl.aggregation = BatchLossAggregation::mean;
         else v.fail("expected sum or mean");
       }},
      {"algorithm.rff_dokl.step_size", [&](const ConfigValue& v) { cfg.rff_dokl.step_size = v.real(); }},
      {"algorithm.rff_dokl.kernel", [&](const ConfigValue& v) { cfg.rff_dokl.kernel = v.integer(); }},
  };

  for (const auto& [key, value] : values) {
    auto it = setters.find(key);
    if (it == setters.end())
      throw ParseError("line " + std::to_string(value.line) + ": unknown key '" + key + "'", value.line);
    it->second(value);
  }
  if (!edge_list.empty()) {
    cfg.topology = read_edge_list_file(edge_list);
    if (!values.count("network.nodes")) cfg.num_nodes = cfg.topology->num_nodes();
  }
  try {
    cfg.validate();
  } catch (const ParameterError& e) {
    throw ParseError(std::string("invalid configuration: ") + e.what(), 0);
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parse_config(in, std::filesystem::path(path).parent_path());
}

}  // namespace domkl
