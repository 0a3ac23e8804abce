// Copyright 2026 The Minpaint Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MINPAINT_CONFIG_H_
#define MINPAINT_CONFIG_H_

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace minpaint {

// Flat `key = value` configuration ('#' starts a comment). Unknown keys are
// rejected; every run logs the fully resolved form via ToString().
struct RunConfig {
  // data
  int resolution = 256;
  double split_ratio = 0.9;
  uint64_t seed = 0;
  bool augment_flip = true;
  // adapters
  std::string parser = "ellipse";
  std::string parser_assets;
  std::string remover = "identity";
  std::string remover_assets;
  std::string hrfpl_features = "frozen_random";
  std::string hrfpl_assets;
  std::string embedder = "toy";
  std::string embedder_assets;
  std::string identity_embedder = "toy";
  std::string identity_assets;
  // generator
  int z_dim = 512;
  int w_dim = 512;
  int base_resolution = 8;
  int base_channels = 32;
  int max_channels = 256;
  int mapping_depth = 8;
  bool global_context = false;
  // training
  double learning_rate = 1e-5;
  int batch_size = 2;
  int total_steps = 200;
  double lambda_rec = 10.0;
  double lambda_hrfpl = 5.0;
  bool r1_enabled = true;
  double r1_gamma = 10.0;
  int r1_interval = 16;
  int checkpoint_interval = 100;
  int log_interval = 10;

  static RunConfig FromString(const std::string& text);
  static RunConfig FromFile(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return FromString(os.str());
  }

  std::vector<std::string> Validate() const {
    std::vector<std::string> errs;
    auto check = [&](bool ok, const std::string& msg) {
      if (!ok) errs.push_back(msg);
    };
    check(resolution >= 32 && (resolution & (resolution - 1)) == 0,
          "resolution must be a power of 2 >= 32");
    check(split_ratio > 0 && split_ratio < 1, "split_ratio must be in (0,1)");
    check(z_dim > 0 && w_dim > 0, "z_dim/w_dim must be positive");
    check(base_resolution >= 4 && base_resolution < resolution &&
              (base_resolution & (base_resolution - 1)) == 0,
          "base_resolution must be a power of 2 in [4, resolution)");
    check(base_channels > 0 && max_channels >= base_channels,
          "channel schedule: need 0 < base_channels <= max_channels");
    check(mapping_depth >= 1, "mapping_depth must be >= 1");
    check(learning_rate > 0, "learning_rate must be > 0");
    check(batch_size >= 1, "batch_size must be >= 1");
    check(total_steps >= 1, "total_steps must be >= 1");
    check(lambda_rec >= 0 && lambda_hrfpl >= 0, "loss weights must be >= 0");
    check(r1_gamma >= 0, "r1_gamma must be >= 0");
    check(r1_interval >= 1, "r1_interval must be >= 1");
    check(checkpoint_interval >= 1 && log_interval >= 1,
          "checkpoint_interval/log_interval must be >= 1");
    return errs;
  }

  std::string ToString() const;

 private:
  struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
  };
  static const std::map<std::string, Field>& Fields();
};

namespace detail {

inline std::string Trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::string Unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

inline bool ParseBool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("not a boolean: " + v);
}

}  // namespace detail

inline const std::map<std::string, RunConfig::Field>& RunConfig::Fields() {
  auto str = [](std::string RunConfig::* m) {
    return Field{[m](RunConfig& c, const std::string& v) { c.*m = detail::Unquote(v); },
                 [m](const RunConfig& c) { return "\"" + c.*m + "\""; }};
  };
  auto num_i = [](int RunConfig::* m) {
    return Field{[m](RunConfig& c, const std::string& v) { c.*m = std::stoi(v); },
                 [m](const RunConfig& c) { return std::to_string(c.*m); }};
  };
  auto num_d = [](double RunConfig::* m) {
    return Field{[m](RunConfig& c, const std::string& v) { c.*m = std::stod(v); },
                 [m](const RunConfig& c) {
                   std::ostringstream os;
                   os.precision(17);
                   os << c.*m;
                   return os.str();
                 }};
  };
  auto b = [](bool RunConfig::* m) {
    return Field{[m](RunConfig& c, const std::string& v) { c.*m = detail::ParseBool(v); },
                 [m](const RunConfig& c) { return c.*m ? "true" : "false"; }};
  };
  static const std::map<std::string, Field> fields = {
      {"resolution", num_i(&RunConfig::resolution)},
      {"split_ratio", num_d(&RunConfig::split_ratio)},
      {"seed", Field{[](RunConfig& c, const std::string& v) { c.seed = std::stoull(v); },
                     [](const RunConfig& c) { return std::to_string(c.seed); }}},
      {"augment_flip", b(&RunConfig::augment_flip)},
      {"parser", str(&RunConfig::parser)},
      {"parser_assets", str(&RunConfig::parser_assets)},
      {"remover", str(&RunConfig::remover)},
      {"remover_assets", str(&RunConfig::remover_assets)},
      {"hrfpl_features", str(&RunConfig::hrfpl_features)},
      {"hrfpl_assets", str(&RunConfig::hrfpl_assets)},
      {"embedder", str(&RunConfig::embedder)},
      {"embedder_assets", str(&RunConfig::embedder_assets)},
      {"identity_embedder", str(&RunConfig::identity_embedder)},
      {"identity_assets", str(&RunConfig::identity_assets)},
      {"z_dim", num_i(&RunConfig::z_dim)},
      {"w_dim", num_i(&RunConfig::w_dim)},
      {"base_resolution", num_i(&RunConfig::base_resolution)},
      {"base_channels", num_i(&RunConfig::base_channels)},
      {"max_channels", num_i(&RunConfig::max_channels)},
      {"mapping_depth", num_i(&RunConfig::mapping_depth)},
      {"global_context", b(&RunConfig::global_context)},
      {"learning_rate", num_d(&RunConfig::learning_rate)},
      {"batch_size", num_i(&RunConfig::batch_size)},
      {"total_steps", num_i(&RunConfig::total_steps)},
      {"lambda_rec", num_d(&RunConfig::lambda_rec)},
      {"lambda_hrfpl", num_d(&RunConfig::lambda_hrfpl)},
      {"r1_enabled", b(&RunConfig::r1_enabled)},
      {"r1_gamma", num_d(&RunConfig::r1_gamma)},
      {"r1_interval", num_i(&RunConfig::r1_interval)},
      {"checkpoint_interval", num_i(&RunConfig::checkpoint_interval)},
      {"log_interval", num_i(&RunConfig::log_interval)},
  };
  return fields;
}

inline RunConfig RunConfig::FromString(const std::string& text) {
  RunConfig cfg;
  std::vector<std::string> errs;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      errs.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    std::string key = detail::Trim(line.substr(0, eq));
    std::string val = detail::Trim(line.substr(eq + 1));
    auto it = Fields().find(key);
    if (it == Fields().end()) {
      errs.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      continue;
    }
    try {
      it->second.set(cfg, val);
    } catch (const std::exception& e) {
      errs.push_back("line " + std::to_string(lineno) + ": bad value for '" +
                     key + "': " + e.what());
    }
  }
  for (const auto& e : cfg.Validate()) errs.push_back(e);
  if (!errs.empty()) {
    std::string msg = "config errors:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw std::runtime_error(msg);
  }
  return cfg;
}

inline std::string RunConfig::ToString() const {
  std::ostringstream os;
  for (const auto& [key, field] : Fields())
    os << key << " = " << field.get(*this) << "\n";
  return os.str();
}

}  // namespace minpaint

#endif  // MINPAINT_CONFIG_H_
