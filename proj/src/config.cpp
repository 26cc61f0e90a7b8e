// Copyright 2026 The qauction Authors
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

#include "qauction/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qauction/error.hpp"

namespace qauction {
namespace internal {
// Generated at build time from presets/*.json.
extern const std::map<std::string_view, std::string_view> kPresetTexts;
}  // namespace internal

namespace {

// Reads an object while tracking which keys were consumed, so leftovers can
// be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    Require(obj_.is_object(), ErrorKind::kInvalidConfig, path_ + " must be an object");
  }

  bool Has(const std::string& key) const { return obj_.contains(key) && !obj_[key].is_null(); }

  const Json* Find(const std::string& key) {
    seen_.insert(key);
    if (!Has(key)) return nullptr;
    return &obj_[key];
  }

  template <typename T>
  void Read(const std::string& key, T& out) {
    if (const Json* v = Find(key)) {
      try {
        out = v->get<T>();
      } catch (const Json::exception& e) {
        Fail(ErrorKind::kInvalidConfig, Where(key) + ": " + e.what());
      }
    }
  }

  std::string Where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void Finish() const {
    for (const auto& item : obj_.items()) {
      Require(seen_.count(item.key()) > 0, ErrorKind::kInvalidConfig,
              "unknown key '" + Where(item.key()) + "'");
    }
  }

 private:
  const Json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Enum>
Enum ParseEnum(const std::string& text, const std::vector<std::pair<std::string, Enum>>& names,
               const std::string& where) {
  for (const auto& [name, value] : names) {
    if (name == text) return value;
  }
  Fail(ErrorKind::kInvalidConfig, "unknown value '" + text + "' for " + where);
}

template <typename Enum>
std::string EnumName(Enum value, const std::vector<std::pair<std::string, Enum>>& names) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "unknown";
}

const std::vector<std::pair<std::string, TieRule>> kTieRules{
    {"uniform-random-winner", TieRule::kUniformRandomWinner}};
const std::vector<std::pair<std::string, NegativeBidMode>> kNegativeModes{
    {"non-participation", NegativeBidMode::kNonParticipation},
    {"literal", NegativeBidMode::kLiteral}};
const std::vector<std::pair<std::string, Feedback>> kFeedbacks{
    {"win-only", Feedback::kWinOnly}, {"min-bid-to-win", Feedback::kMinBidToWin}};
const std::vector<std::pair<std::string, InitSpec::Kind>> kInitKinds{
    {"optimistic", InitSpec::Kind::kOptimistic},
    {"biased", InitSpec::Kind::kBiased},
    {"explicit", InitSpec::Kind::kExplicit}};
const std::vector<std::pair<std::string, ExplorationSpec::Kind>> kExplorationKinds{
    {"global", ExplorationSpec::Kind::kGlobal},
    {"local", ExplorationSpec::Kind::kLocal},
    {"push-down", ExplorationSpec::Kind::kPushDown}};
const std::vector<std::pair<std::string, UpdateMode>> kUpdateModes{
    {"asynchronous", UpdateMode::kAsynchronous}, {"synchronous", UpdateMode::kSynchronous}};

template <typename Enum>
void ReadEnum(ObjectReader& reader, const std::string& key,
              const std::vector<std::pair<std::string, Enum>>& names, Enum& out) {
  std::string text;
  bool present = reader.Has(key);
  reader.Read(key, text);
  if (present) out = ParseEnum(text, names, reader.Where(key));
}

AgentConfig AgentFromJson(const Json& doc, const std::string& path) {
  AgentConfig agent;
  ObjectReader reader(doc, path);
  reader.Read("learning_rate", agent.learning_rate);
  reader.Read("discount", agent.discount);
  reader.Read("eps_base", agent.eps_base);
  reader.Read("eps_decay", agent.eps_decay);
  ReadEnum(reader, "update_mode", kUpdateModes, agent.update_mode);
  if (const Json* init = reader.Find("init")) {
    ObjectReader r(*init, reader.Where("init"));
    ReadEnum(r, "kind", kInitKinds, agent.init.kind);
    r.Read("multiplier", agent.init.multiplier);
    r.Read("bid", agent.init.bid);
    r.Read("strength", agent.init.strength);
    r.Read("low_ratio", agent.init.low_ratio);
    r.Read("values", agent.init.values);
    r.Finish();
  }
  if (const Json* exploration = reader.Find("exploration")) {
    ObjectReader r(*exploration, reader.Where("exploration"));
    ReadEnum(r, "kind", kExplorationKinds, agent.exploration.kind);
    r.Read("chi_base", agent.exploration.chi_base);
    r.Read("chi_decay", agent.exploration.chi_decay);
    r.Read("closeness", agent.exploration.closeness);
    r.Finish();
  }
  reader.Finish();
  return agent;
}

Json AgentToJson(const AgentConfig& agent) {
  Json init{{"kind", EnumName(agent.init.kind, kInitKinds)},
            {"multiplier", agent.init.multiplier},
            {"bid", agent.init.bid},
            {"strength", agent.init.strength},
            {"low_ratio", agent.init.low_ratio},
            {"values", agent.init.values}};
  Json exploration{{"kind", EnumName(agent.exploration.kind, kExplorationKinds)},
                   {"chi_base", agent.exploration.chi_base},
                   {"chi_decay", agent.exploration.chi_decay},
                   {"closeness", agent.exploration.closeness}};
  return Json{{"learning_rate", agent.learning_rate},
              {"discount", agent.discount},
              {"eps_base", agent.eps_base},
              {"eps_decay", agent.eps_decay},
              {"init", init},
              {"exploration", exploration},
              {"update_mode", EnumName(agent.update_mode, kUpdateModes)}};
}

}  // namespace

ExperimentConfig ConfigFromJson(const Json& doc) {
  ExperimentConfig config;
  ObjectReader root(doc, "");
  root.Read("name", config.name);

  if (const Json* grid = root.Find("grid")) {
    ObjectReader r(*grid, "grid");
    int count = 19;
    double lo = 0.05, hi = 0.95;
    r.Read("count", count);
    r.Read("lo", lo);
    r.Read("hi", hi);
    r.Finish();
    config.grid = BidGridd::Build(count, lo, hi);
  }

  if (const Json* mech = root.Find("mechanism")) {
    ObjectReader r(*mech, "mechanism");
    auto& m = config.mechanism;
    r.Read("alpha", m.alpha);
    if (r.Has("reserve")) {
      double reserve = 0.0;
      r.Read("reserve", reserve);
      m.reserve = reserve;
    } else {
      r.Find("reserve");
    }
    if (const Json* fringe = r.Find("fringe")) {
      ObjectReader f(*fringe, "mechanism.fringe");
      FringeSpec spec;
      f.Read("low", spec.low);
      f.Read("high", spec.high);
      f.Finish();
      m.fringe = spec;
    }
    r.Read("n_bidders", m.n_bidders);
    r.Read("value", m.value);
    ReadEnum(r, "tie_rule", kTieRules, m.tie_rule);
    ReadEnum(r, "negative_bid_mode", kNegativeModes, m.negative_bid_mode);
    ReadEnum(r, "feedback", kFeedbacks, m.feedback);
    r.Finish();
  }
  Require(config.mechanism.n_bidders >= 2, ErrorKind::kInvalidConfig,
          "need at least two bidders");

  const Json* shared = root.Find("agent");
  const Json* per_bidder = root.Find("agents");
  if (per_bidder != nullptr) {
    Require(per_bidder->is_array(), ErrorKind::kInvalidConfig, "agents must be an array");
    Require(static_cast<int>(per_bidder->size()) == config.mechanism.n_bidders,
            ErrorKind::kInvalidConfig, "agents array length must equal n_bidders");
    Require(shared == nullptr, ErrorKind::kInvalidConfig,
            "give either 'agent' or 'agents', not both");
    for (std::size_t i = 0; i < per_bidder->size(); ++i) {
      config.agents.push_back(AgentFromJson((*per_bidder)[i], "agents." + std::to_string(i)));
    }
  } else {
    const AgentConfig agent = shared != nullptr ? AgentFromJson(*shared, "agent") : AgentConfig{};
    config.agents.assign(config.mechanism.n_bidders, agent);
  }

  if (const Json* run = root.Find("run")) {
    ObjectReader r(*run, "run");
    r.Read("max_periods", config.max_periods);
    r.Read("convergence_window", config.convergence_window);
    r.Read("n_runs", config.n_runs);
    r.Read("base_seed", config.base_seed);
    r.Read("early_stop", config.early_stop);
    r.Read("collusion_steps", config.collusion_steps);
    r.Finish();
  }

  if (const Json* record = root.Find("record")) {
    ObjectReader r(*record, "record");
    r.Read("occupancy", config.record.occupancy);
    r.Read("series", config.record.series);
    r.Read("series_stride", config.record.series_stride);
    r.Read("profile", config.record.profile);
    r.Finish();
  }

  if (const Json* sweep = root.Find("sweep")) {
    ObjectReader r(*sweep, "sweep");
    r.Read("alphas", config.sweep_alphas);
    r.Finish();
  }
  root.Finish();
  Validate(config);
  return config;
}

ExperimentConfig ParseConfig(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kParse, std::string("config is not valid JSON: ") + e.what());
  }
  return ConfigFromJson(doc);
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorKind::kIo, "cannot read config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

Json ConfigToJson(const ExperimentConfig& config) {
  const auto& m = config.mechanism;
  Json mech{{"alpha", m.alpha},
            {"reserve", m.reserve ? Json(*m.reserve) : Json(nullptr)},
            {"fringe", m.fringe ? Json{{"low", m.fringe->low}, {"high", m.fringe->high}}
                                : Json(nullptr)},
            {"n_bidders", m.n_bidders},
            {"value", m.value},
            {"tie_rule", EnumName(m.tie_rule, kTieRules)},
            {"negative_bid_mode", EnumName(m.negative_bid_mode, kNegativeModes)},
            {"feedback", EnumName(m.feedback, kFeedbacks)}};
  Json agents = Json::array();
  for (const auto& agent : config.agents) agents.push_back(AgentToJson(agent));
  Json doc{{"name", config.name},
           {"grid",
            {{"count", config.grid.count()}, {"lo", config.grid.front()}, {"hi", config.grid.back()}}},
           {"mechanism", mech},
           {"agents", agents},
           {"run",
            {{"max_periods", config.max_periods},
             {"convergence_window", config.convergence_window},
             {"n_runs", config.n_runs},
             {"base_seed", config.base_seed},
             {"early_stop", config.early_stop},
             {"collusion_steps", config.collusion_steps}}},
           {"record",
            {{"occupancy", config.record.occupancy},
             {"series", config.record.series},
             {"series_stride", config.record.series_stride},
             {"profile", config.record.profile}}}};
  if (!config.sweep_alphas.empty()) doc["sweep"] = Json{{"alphas", config.sweep_alphas}};
  return doc;
}

void ApplyOverride(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  Require(eq != std::string_view::npos && eq > 0, ErrorKind::kInvalidConfig,
          "override must look like key=value, got '" + std::string(assignment) + "'");
  const std::string path(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));

  Json value;
  try {
    value = Json::parse(raw);
  } catch (const Json::exception&) {
    value = raw;
  }

  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos
                                                                        : dot - start);
    Require(!key.empty(), ErrorKind::kInvalidConfig, "empty segment in override '" + path + "'");
    Json* next = nullptr;
    if (node->is_array()) {
      std::size_t index = 0;
      try {
        index = std::stoul(key);
      } catch (const std::exception&) {
        Fail(ErrorKind::kInvalidConfig, "override index '" + key + "' is not a number");
      }
      Require(index < node->size(), ErrorKind::kInvalidConfig,
              "override index out of range in '" + path + "'");
      next = &(*node)[index];
    } else {
      if (node->is_null()) *node = Json::object();
      Require(node->is_object(), ErrorKind::kInvalidConfig,
              "override path '" + path + "' crosses a non-object");
      next = &(*node)[key];
    }
    if (dot == std::string::npos) {
      *next = value;
      return;
    }
    node = next;
    start = dot + 1;
  }
}

std::vector<std::string> PresetNames() {
  std::vector<std::string> names;
  for (const auto& [name, text] : internal::kPresetTexts) names.emplace_back(name);
  return names;
}

std::string_view PresetText(std::string_view name) {
  const auto it = internal::kPresetTexts.find(name);
  Require(it != internal::kPresetTexts.end(), ErrorKind::kInvalidConfig,
          "unknown preset '" + std::string(name) + "'");
  return it->second;
}

Json PresetDocument(std::string_view name) {
  return Json::parse(PresetText(name), nullptr, true, /*ignore_comments=*/true);
}

ExperimentConfig LoadPreset(std::string_view name) { return ConfigFromJson(PresetDocument(name)); }

}  // namespace qauction
