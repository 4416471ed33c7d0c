// Copyright 2026 The CICA Subnetwork Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cica/config.hpp"

#include <cctype>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace cica {
namespace {

using nlohmann::json;

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

// Walks an already validated JSON text and records the line of every key
// and array element.
class LineScanner {
 public:
  explicit LineScanner(std::string_view text) : text_(text) {}

  std::map<std::string, int> run() {
    skip_ws();
    value("");
    return std::move(lines_);
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string_token() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out.push_back(text_[pos_++]);
    }
    ++pos_;  // closing quote
    return out;
  }

  void value(const std::string& path) {
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != '}') {
        const int line = line_;
        const std::string key = join_path(path, string_token());
        lines_.emplace(key, line);
        skip_ws();
        ++pos_;  // ':'
        skip_ws();
        value(key);
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
        skip_ws();
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      std::size_t index = 0;
      while (pos_ < text_.size() && text_[pos_] != ']') {
        const std::string key = join_path(path, std::to_string(index++));
        lines_.emplace(key, line_);
        value(key);
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
        skip_ws();
      }
      ++pos_;
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' && text_[pos_] != ']' &&
             !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

// One JSON object of the configuration tree. Reads are tracked so that
// leftover (unknown) keys can be reported.
class Section {
 public:
  Section(const json* node, std::string path, const std::string& source, const std::map<std::string, int>& lines)
      : node_(node), path_(std::move(path)), source_(source), lines_(lines) {
    if (node_ != nullptr && !node_->is_object()) fail(path_, "must be an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    std::ostringstream msg;
    msg << source_;
    if (auto it = lines_.find(key); it != lines_.end()) msg << ':' << it->second;
    msg << ": '" << (key.empty() ? std::string("<root>") : key) << "' " << what;
    throw ConfigError(msg.str());
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    if (node_ == nullptr) return nullptr;
    auto it = node_->find(key);
    return it == node_->end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return join_path(path_, key); }

  Section child(const std::string& key) { return Section(find(key), path(key), source_, lines_); }

  void read(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(path(key), "must be a number");
      out = v->get<double>();
    }
  }

  void read(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(path(key), "must be true or false");
      out = v->get<bool>();
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(path(key), "must be a string");
      out = v->get<std::string>();
    }
  }

  template <class Int>
    requires std::is_integral_v<Int>
  void read(const std::string& key, Int& out) {
    if (const json* v = find(key)) out = to_integer<Int>(*v, path(key));
  }

  void read(const std::string& key, Interval& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        fail(path(key), "must be a [low, high] pair of numbers");
      }
      out = Interval{(*v)[0].get<double>(), (*v)[1].get<double>()};
    }
  }

  void read(const std::string& key, std::vector<std::size_t>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(path(key), "must be an array");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        out.push_back(to_integer<std::size_t>((*v)[i], join_path(path(key), std::to_string(i))));
      }
    }
  }

  void read(const std::string& key, std::vector<std::string>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(path(key), "must be an array");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_string()) fail(join_path(path(key), std::to_string(i)), "must be a string");
        out.push_back((*v)[i].get<std::string>());
      }
    }
  }

  std::optional<Matrix> matrix(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_array() || v->empty() || !(*v)[0].is_array() || (*v)[0].empty()) {
      fail(path(key), "must be a non-empty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(v->size());
    const auto cols = static_cast<Eigen::Index>((*v)[0].size());
    Matrix M(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const json& row = (*v)[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
        fail(join_path(path(key), std::to_string(r)), "must be a row of " + std::to_string(cols) + " numbers");
      }
      for (Eigen::Index c = 0; c < cols; ++c) {
        const json& e = row[static_cast<std::size_t>(c)];
        if (!e.is_number()) fail(join_path(path(key), std::to_string(r)), "must contain only numbers");
        M(r, c) = e.get<double>();
      }
    }
    return M;
  }

  void require(const std::string& key) {
    if (node_ == nullptr || !node_->contains(key)) fail(path(key), "is required but missing");
  }

  void finish() const {
    if (node_ == nullptr) return;
    for (const auto& item : node_->items()) {
      if (!seen_.contains(item.key())) fail(path(item.key()), "is not a recognized setting");
    }
  }

 private:
  template <class Int>
  Int to_integer(const json& v, const std::string& key) const {
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) fail(key, "is out of range");
      return static_cast<Int>(u);
    }
    if (v.is_number_integer()) {
      const auto s = v.get<std::int64_t>();
      if constexpr (std::is_unsigned_v<Int>) {
        fail(key, "must be a non-negative integer");
      } else {
        return static_cast<Int>(s);
      }
    }
    fail(key, std::is_unsigned_v<Int> ? "must be a non-negative integer" : "must be an integer");
  }

  const json* node_;
  std::string path_;
  const std::string& source_;
  const std::map<std::string, int>& lines_;
  std::set<std::string> seen_;
};

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::map<std::string, int> key_lines(std::string_view text) { return LineScanner(text).run(); }

void RunConfig::validate() const {
  scenario.validate();
  scenario.policy.cica.validate();
  if (!(scenario.policy.fixed_power_w >= 0.0 && scenario.policy.fixed_power_w <= scenario.radio.p_max_w)) {
    throw std::invalid_argument("policy.fixed_power_w must lie in [0, radio.p_max_w]");
  }
  const auto& mpr = scenario.policy.mpr;
  if (mpr.starts < 1 || mpr.iterations < 1 || !(mpr.epsilon_fraction > 0.0 && mpr.epsilon_fraction < 1.0)) {
    throw std::invalid_argument("policy.mpr needs starts >= 1, iterations >= 1 and 0 < epsilon_fraction < 1");
  }
  if (training.n_subnetworks < 1) throw std::invalid_argument("training.n_subnetworks must be at least 1");
  if (training.episodes < 1) throw std::invalid_argument("training.episodes must be at least 1");
  if (training.validation_episodes < 1) throw std::invalid_argument("training.validation_episodes must be at least 1");
  training.motpe.validate();
  if (evaluation.densities.empty()) throw std::invalid_argument("evaluation.densities must not be empty");
  for (auto n : evaluation.densities) {
    if (n < 1) throw std::invalid_argument("evaluation.densities entries must be at least 1");
  }
  if (evaluation.policies.empty()) throw std::invalid_argument("evaluation.policies must not be empty");
  for (const auto& p : evaluation.policies) PolicySpec::parse(p);
}

RunConfig parse_config(std::string_view text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset into line:column.
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        line_start = i + 1;
      }
    }
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(offset - line_start + 1) +
                      ": syntax error: " + e.what());
  }
  const auto lines = key_lines(text);

  RunConfig cfg;
  auto& sc = cfg.scenario;
  Section top(&root, "", source, lines);
  top.require("seed");
  top.read("seed", sc.seed);
  top.read("n_subnetworks", sc.n_subnetworks);
  top.read("horizon", sc.horizon);
  top.read("episodes", sc.episodes);
  top.read("sigma_w", sc.sigma_w);
  top.read("eta_cap", sc.eta_cap);

  Section plant = top.child("plant");
  plant.read("sampling_dt", sc.plant.sampling_dt);
  plant.read("x0_halfwidth", sc.plant.x0_halfwidth);
  plant.read("position_index", sc.plant.position_index);
  plant.read("angle_index", sc.plant.angle_index);
  {
    auto A = plant.matrix("A");
    auto B = plant.matrix("B");
    auto Q = plant.matrix("Q");
    auto R = plant.matrix("R");
    const int given = int(A.has_value()) + int(B.has_value()) + int(Q.has_value()) + int(R.has_value());
    if (given != 0 && given != 4) {
      const char* missing = !A ? "A" : !B ? "B" : !Q ? "Q" : "R";
      plant.fail(plant.path(missing), "is required when a custom plant is given (A, B, Q and R go together)");
    }
    if (given == 4) sc.plant.custom = PlantSpec::Custom{*A, *B, *Q, *R};
  }
  plant.finish();

  Section radio = top.child("radio");
  radio.read("bandwidth_hz", sc.radio.bandwidth_hz);
  radio.read("p_max_w", sc.radio.p_max_w);
  radio.read("noise_figure_db", sc.radio.noise_figure_db);
  radio.read("temperature_k", sc.radio.temperature_k);
  radio.read("tti_s", sc.radio.tti_s);
  radio.finish();

  Section channel = top.child("channel");
  channel.read("area_width", sc.channel.area_width);
  channel.read("area_height", sc.channel.area_height);
  channel.read("subnetwork_radius", sc.channel.subnetwork_radius);
  channel.read("carrier_ghz", sc.channel.carrier_ghz);
  channel.read("clutter_density", sc.channel.clutter_density);
  channel.read("clutter_size", sc.channel.clutter_size);
  channel.read("corr_distance", sc.channel.corr_distance);
  channel.read("shadowing_std_los", sc.channel.shadowing_std_los);
  channel.read("shadowing_std_nlos", sc.channel.shadowing_std_nlos);
  channel.read("shadowing", sc.channel.shadowing);
  channel.read("fading", sc.channel.fading);
  channel.finish();

  Section traffic = top.child("traffic");
  traffic.read("packet_bits", sc.traffic.packet_bits);
  traffic.read("period_steps", sc.traffic.period_steps);
  traffic.read("buffer_capacity", sc.traffic.buffer_capacity);
  traffic.finish();

  Section thresholds = top.child("thresholds");
  thresholds.read("position", sc.thresholds.position);
  thresholds.read("angle", sc.thresholds.angle);
  thresholds.finish();

  // CICA's saturation power defaults to the radio's maximum.
  sc.policy.cica.nu = sc.radio.p_max_w;
  sc.policy.fixed_power_w = sc.radio.p_max_w;
  Section policy = top.child("policy");
  policy.read("fixed_power_w", sc.policy.fixed_power_w);
  Section cica = policy.child("cica");
  cica.read("k", sc.policy.cica.k);
  cica.read("eta0", sc.policy.cica.eta0);
  cica.read("nu", sc.policy.cica.nu);
  cica.finish();
  Section mpr = policy.child("mpr");
  mpr.read("starts", sc.policy.mpr.starts);
  mpr.read("iterations", sc.policy.mpr.iterations);
  mpr.read("epsilon_fraction", sc.policy.mpr.epsilon_fraction);
  mpr.read("per_tti", sc.policy.mpr_per_tti);
  mpr.finish();
  policy.finish();

  Section training = top.child("training");
  training.read("n_subnetworks", cfg.training.n_subnetworks);
  training.read("episodes", cfg.training.episodes);
  training.read("validation_episodes", cfg.training.validation_episodes);
  training.read("trials", cfg.training.motpe.trials);
  training.read("startup", cfg.training.motpe.startup);
  training.read("candidates", cfg.training.motpe.candidates);
  training.read("quantile", cfg.training.motpe.quantile);
  training.read("k_range", cfg.training.motpe.space.k);
  training.read("eta0_range", cfg.training.motpe.space.eta0);
  training.finish();

  Section evaluation = top.child("evaluation");
  evaluation.read("densities", cfg.evaluation.densities);
  evaluation.read("policies", cfg.evaluation.policies);
  evaluation.read("cica_params", cfg.evaluation.cica_params);
  evaluation.finish();

  top.finish();

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

nlohmann::json to_json(const RunConfig& config) {
  const auto& sc = config.scenario;
  json plant = {
      {"sampling_dt", sc.plant.sampling_dt},
      {"x0_halfwidth", sc.plant.x0_halfwidth},
      {"position_index", sc.plant.position_index},
      {"angle_index", sc.plant.angle_index},
  };
  if (sc.plant.custom) {
    plant["A"] = matrix_json(sc.plant.custom->A);
    plant["B"] = matrix_json(sc.plant.custom->B);
    plant["Q"] = matrix_json(sc.plant.custom->Q);
    plant["R"] = matrix_json(sc.plant.custom->R);
  }
  const auto& m = config.training.motpe;
  return json{
      {"seed", sc.seed},
      {"n_subnetworks", sc.n_subnetworks},
      {"horizon", sc.horizon},
      {"episodes", sc.episodes},
      {"sigma_w", sc.sigma_w},
      {"eta_cap", sc.eta_cap},
      {"plant", plant},
      {"radio",
       {{"bandwidth_hz", sc.radio.bandwidth_hz},
        {"p_max_w", sc.radio.p_max_w},
        {"noise_figure_db", sc.radio.noise_figure_db},
        {"temperature_k", sc.radio.temperature_k},
        {"tti_s", sc.radio.tti_s}}},
      {"channel",
       {{"area_width", sc.channel.area_width},
        {"area_height", sc.channel.area_height},
        {"subnetwork_radius", sc.channel.subnetwork_radius},
        {"carrier_ghz", sc.channel.carrier_ghz},
        {"clutter_density", sc.channel.clutter_density},
        {"clutter_size", sc.channel.clutter_size},
        {"corr_distance", sc.channel.corr_distance},
        {"shadowing_std_los", sc.channel.shadowing_std_los},
        {"shadowing_std_nlos", sc.channel.shadowing_std_nlos},
        {"shadowing", sc.channel.shadowing},
        {"fading", sc.channel.fading}}},
      {"traffic",
       {{"packet_bits", sc.traffic.packet_bits},
        {"period_steps", sc.traffic.period_steps},
        {"buffer_capacity", sc.traffic.buffer_capacity}}},
      {"thresholds", {{"position", sc.thresholds.position}, {"angle", sc.thresholds.angle}}},
      {"policy",
       {{"fixed_power_w", sc.policy.fixed_power_w},
        {"cica", {{"k", sc.policy.cica.k}, {"eta0", sc.policy.cica.eta0}, {"nu", sc.policy.cica.nu}}},
        {"mpr",
         {{"starts", sc.policy.mpr.starts},
          {"iterations", sc.policy.mpr.iterations},
          {"epsilon_fraction", sc.policy.mpr.epsilon_fraction},
          {"per_tti", sc.policy.mpr_per_tti}}}}},
      {"training",
       {{"n_subnetworks", config.training.n_subnetworks},
        {"episodes", config.training.episodes},
        {"validation_episodes", config.training.validation_episodes},
        {"trials", m.trials},
        {"startup", m.startup},
        {"candidates", m.candidates},
        {"quantile", m.quantile},
        {"k_range", {m.space.k.lo, m.space.k.hi}},
        {"eta0_range", {m.space.eta0.lo, m.space.eta0.hi}}}},
      {"evaluation",
       {{"densities", config.evaluation.densities},
        {"policies", config.evaluation.policies},
        {"cica_params", config.evaluation.cica_params}}},
  };
}

}  // namespace cica
