// Copyright 2026 The pricelab Authors
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

#include "pricelab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "pricelab/errors.hpp"

namespace pricelab::config {
namespace {

using json = nlohmann::json;

// Reads keys from one JSON object and rejects whatever was not read.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    return convert<T>(key);
  }

  template <typename T>
  T require(const std::string& key) {
    raw(key);
    return convert<T>(key);
  }

  void mark(const std::string& key) { seen_.insert(key); }

  std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key()))
        throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
  }

 private:
  template <typename T>
  T convert(const std::string& key) const {
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(where_ + "." + key + ": expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(where_ + "." + key + ": expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(where_ + "." + key + ": expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(where_ + "." + key + ": expected a string");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.empty() || path.is_absolute() || base.empty()) return path;
  return base / path;
}

market::LogitMarketParams market_from(const json& j, const std::string& where) {
  Reader r(j, where);
  market::LogitMarketParams m;
  m.a = r.get("a", m.a);
  m.mu = r.get("mu", m.mu);
  m.a0 = r.get("a0", m.a0);
  m.c = r.get("c", m.c);
  m.n = r.get("n", m.n);
  r.finish();
  try {
    m.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return m;
}

json market_json(const market::LogitMarketParams& m) {
  return {{"a", m.a}, {"mu", m.mu}, {"a0", m.a0}, {"c", m.c}, {"n", m.n}};
}

template <typename E>
E enum_from(const std::string& text, std::initializer_list<std::pair<const char*, E>> names,
            const std::string& where) {
  for (const auto& [name, value] : names)
    if (text == name) return value;
  throw ConfigError(where + ": unknown value '" + text + "'");
}

llm::BackendConfig backend_from(const json& j, const std::string& where,
                                const std::filesystem::path& base) {
  Reader r(j, where);
  llm::BackendConfig b;
  b.kind = enum_from<llm::BackendKind>(
      r.get<std::string>("kind", "mock"),
      {{"openai", llm::BackendKind::OpenAi}, {"mock", llm::BackendKind::Mock}}, r.path("kind"));
  b.endpoint = r.get("endpoint", b.endpoint);
  b.model_name = r.get("model", b.model_name);
  b.api_key_ref = r.get("api_key_env", b.api_key_ref);
  b.temperature = r.get("temperature", b.temperature);
  b.timeout_seconds = r.get("timeout_seconds", b.timeout_seconds);
  b.max_retries = r.get("max_retries", b.max_retries);
  if (r.has("mock")) {
    Reader m(r.raw("mock"), r.path("mock"));
    b.mock.mode = enum_from<llm::MockMode>(
        m.get<std::string>("mode", "prices"),
        {{"prices", llm::MockMode::Prices}, {"texts", llm::MockMode::Texts},
         {"replay", llm::MockMode::Replay}},
        m.path("mode"));
    b.mock.prices = m.get("prices", b.mock.prices);
    b.mock.texts = m.get("texts", b.mock.texts);
    b.mock.hold_last = m.get("hold_last", b.mock.hold_last);
    b.mock.replay_file = resolve(base, m.get<std::string>("replay_file", ""));
    b.mock.replay_agent = m.get("replay_agent", b.mock.replay_agent);
    m.finish();
  } else {
    r.mark("mock");
  }
  r.finish();
  return b;
}

json backend_json(const llm::BackendConfig& b) {
  json j = {{"kind", b.kind == llm::BackendKind::OpenAi ? "openai" : "mock"},
            {"endpoint", b.endpoint},
            {"model", b.model_name},
            {"api_key_env", b.api_key_ref},
            {"temperature", b.temperature},
            {"timeout_seconds", b.timeout_seconds},
            {"max_retries", b.max_retries}};
  if (b.kind == llm::BackendKind::Mock) {
    const char* mode = b.mock.mode == llm::MockMode::Prices  ? "prices"
                       : b.mock.mode == llm::MockMode::Texts ? "texts"
                                                             : "replay";
    j["mock"] = {{"mode", mode},
                 {"prices", b.mock.prices},
                 {"texts", b.mock.texts},
                 {"hold_last", b.mock.hold_last},
                 {"replay_file", b.mock.replay_file.string()},
                 {"replay_agent", b.mock.replay_agent}};
  }
  return j;
}

engine::AgentSpec agent_from(const json& j, const std::string& where,
                             const std::filesystem::path& base, int index) {
  Reader r(j, where);
  engine::AgentSpec agent;
  agent.label = r.get<std::string>("label", "Seller " + std::to_string(index + 1));
  const auto family = r.require<std::string>("family");
  if (family == "llm") {
    engine::LlmAgentSpec s;
    auto& c = s.config;
    c.seller_label = agent.label;
    c.delta = r.get("delta", c.delta);
    c.info_access = enum_from<llm::InfoAccess>(
        r.get<std::string>("info_access", "full"),
        {{"full", llm::InfoAccess::Full}, {"own_only", llm::InfoAccess::OwnOnly}},
        r.path("info_access"));
    c.history_window = r.get("history_window", c.history_window);
    if (r.has("anti_collusion")) {
      const json& v = r.raw("anti_collusion");
      if (v.is_boolean()) {
        if (v.get<bool>()) c.anti_collusion = llm::kDefaultAntiCollusion;
      } else if (v.is_string()) {
        c.anti_collusion = v.get<std::string>();
      } else {
        throw ConfigError(r.path("anti_collusion") + ": expected a boolean or a string");
      }
    } else {
      r.mark("anti_collusion");
    }
    c.token_cap = r.get("token_cap", c.token_cap);
    c.max_prompt_chars = r.get("max_prompt_chars", c.max_prompt_chars);
    if (r.has("backend")) c.backend = backend_from(r.raw("backend"), r.path("backend"), base);
    r.mark("backend");
    agent.kind = std::move(s);
  } else if (family == "q_learning") {
    engine::QAgentSpec s;
    s.table_file = resolve(base, r.require<std::string>("table_file"));
    s.table_index = r.get("table_index", s.table_index);
    s.mode = enum_from<qlearn::QMode>(
        r.get<std::string>("mode", "frozen"),
        {{"frozen", qlearn::QMode::Frozen}, {"adaptive", qlearn::QMode::Adaptive}}, r.path("mode"));
    s.continue_clock = r.get("continue_clock", s.continue_clock);
    s.initial_index = r.get("initial_index", s.initial_index);
    agent.kind = std::move(s);
  } else if (family == "grim_trigger") {
    engine::GrimTriggerSpec s;
    s.config.p_collusive = r.get("p_collusive", s.config.p_collusive);
    s.config.p_competitive = r.get("p_competitive", s.config.p_competitive);
    s.config.rho_detect = r.get("rho_detect", s.config.rho_detect);
    s.public_signal = r.get("public_signal", s.public_signal);
    agent.kind = s;
  } else if (family == "constant") {
    agent.kind = engine::ConstantSpec{r.require<double>("price")};
  } else if (family == "scripted") {
    engine::ScriptedSpec s;
    s.script.trajectory = r.require<std::vector<double>>("trajectory");
    s.script.hold_last = r.get("hold_last", s.script.hold_last);
    agent.kind = std::move(s);
  } else {
    throw ConfigError(r.path("family") + ": unknown agent family '" + family + "'");
  }
  r.finish();
  return agent;
}

json agent_json(const engine::AgentSpec& agent) {
  json j = {{"label", agent.label}, {"family", agent.family()}};
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, engine::LlmAgentSpec>) {
          const auto& c = k.config;
          j["delta"] = c.delta;
          j["info_access"] = c.info_access == llm::InfoAccess::Full ? "full" : "own_only";
          j["history_window"] = c.history_window;
          j["anti_collusion"] = c.anti_collusion ? json(*c.anti_collusion) : json(nullptr);
          j["token_cap"] = c.token_cap;
          j["max_prompt_chars"] = c.max_prompt_chars;
          j["backend"] = backend_json(c.backend);
        } else if constexpr (std::is_same_v<T, engine::QAgentSpec>) {
          j["table_file"] = k.table_file.string();
          j["table_index"] = k.table_index;
          j["mode"] = k.mode == qlearn::QMode::Frozen ? "frozen" : "adaptive";
          j["continue_clock"] = k.continue_clock;
          j["initial_index"] = k.initial_index;
        } else if constexpr (std::is_same_v<T, engine::GrimTriggerSpec>) {
          j["p_collusive"] = k.config.p_collusive;
          j["p_competitive"] = k.config.p_competitive;
          j["rho_detect"] = k.config.rho_detect;
          j["public_signal"] = k.public_signal;
        } else if constexpr (std::is_same_v<T, engine::ConstantSpec>) {
          j["price"] = k.price;
        } else {
          j["trajectory"] = k.script.trajectory;
          j["hold_last"] = k.script.hold_last;
        }
      },
      agent.kind);
  return j;
}

void check_version(Reader& r) {
  const int version = r.require<int>("schema_version");
  if (version != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(version));
}

}  // namespace

llm::BackendConfig backend_from_json(const json& j, const std::filesystem::path& base_dir) {
  return backend_from(j, "backend", base_dir);
}

void check_secrets(const engine::ExperimentSpec& spec) {
  for (const auto& agent : spec.agents) {
    const auto* llm_spec = std::get_if<engine::LlmAgentSpec>(&agent.kind);
    if (!llm_spec) continue;
    const auto& b = llm_spec->config.backend;
    if (b.kind != llm::BackendKind::OpenAi || b.api_key_ref.empty()) continue;
    const char* value = std::getenv(b.api_key_ref.c_str());
    if (!value || !*value)
      throw ConfigError(agent.label + ": environment variable " + b.api_key_ref +
                        " (API key) is not set");
  }
}

nlohmann::json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

engine::ExperimentSpec experiment_from_json(const json& j, const std::filesystem::path& base_dir) {
  Reader r(j, "config");
  check_version(r);
  engine::ExperimentSpec spec;
  spec.condition = r.require<std::string>("condition");
  spec.market = market_from(r.raw("market"), r.path("market"));
  const json& agents = r.raw("agents");
  if (!agents.is_array()) throw ConfigError("config.agents: expected an array");
  for (std::size_t i = 0; i < agents.size(); ++i)
    spec.agents.push_back(agent_from(agents[i], "config.agents[" + std::to_string(i) + "]",
                                     base_dir, static_cast<int>(i)));
  spec.max_periods = r.get("max_periods", spec.max_periods);
  if (r.has("convergence")) {
    Reader c(r.raw("convergence"), r.path("convergence"));
    spec.convergence.window = c.get("window", spec.convergence.window);
    spec.convergence.band = c.get("band", spec.convergence.band);
    c.finish();
  }
  r.mark("convergence");
  spec.stop_on_convergence = r.get("stop_on_convergence", spec.stop_on_convergence);
  spec.runs = r.get("runs", spec.runs);
  spec.seed = r.get("seed", spec.seed);
  spec.output_dir = resolve(base_dir, r.get<std::string>("output_dir", ""));
  spec.concurrent_decisions = r.get("concurrent_decisions", spec.concurrent_decisions);
  r.finish();
  try {
    spec.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

nlohmann::json to_json(const engine::ExperimentSpec& spec) {
  json agents = json::array();
  for (const auto& agent : spec.agents) agents.push_back(agent_json(agent));
  return {{"schema_version", kSchemaVersion},
          {"condition", spec.condition},
          {"market", market_json(spec.market)},
          {"agents", agents},
          {"max_periods", spec.max_periods},
          {"convergence", {{"window", spec.convergence.window}, {"band", spec.convergence.band}}},
          {"stop_on_convergence", spec.stop_on_convergence},
          {"runs", spec.runs},
          {"seed", spec.seed},
          {"output_dir", spec.output_dir.string()},
          {"concurrent_decisions", spec.concurrent_decisions}};
}

engine::ExperimentSpec load_experiment(const std::filesystem::path& file) {
  return experiment_from_json(read_json_file(file), file.parent_path());
}

PretrainSpec pretrain_from_json(const json& j, const std::filesystem::path& base_dir) {
  Reader r(j, "pretrain");
  check_version(r);
  PretrainSpec spec;
  if (r.has("market")) spec.market = market_from(r.raw("market"), r.path("market"));
  r.mark("market");
  if (spec.market.n != 2) throw ConfigError("pretrain.market: Q-learning needs n = 2");
  spec.alpha = r.get("alpha", spec.alpha);
  spec.beta = r.get("beta", spec.beta);
  spec.delta = r.get("delta", spec.delta);
  spec.grid_points = r.get("grid_points", spec.grid_points);
  spec.grid_margin = r.get("grid_margin", spec.grid_margin);
  spec.options.stability_window = r.get("stability_window", spec.options.stability_window);
  spec.options.cap = r.get("cap", spec.options.cap);
  spec.options.seed = r.get("seed", spec.options.seed);
  spec.options.init = enum_from<qlearn::QInit>(
      r.get<std::string>("init", "uniform_rival"),
      {{"uniform_rival", qlearn::QInit::UniformRival}, {"zero", qlearn::QInit::Zero}},
      r.path("init"));
  spec.options.initial_index = r.get("initial_index", spec.options.initial_index);
  spec.output = resolve(base_dir, r.get<std::string>("output", "qtables.bin"));
  r.finish();
  if (spec.grid_points < 2) throw ConfigError("pretrain.grid_points must be >= 2");
  if (spec.options.stability_window < 1 || spec.options.cap < 1)
    throw ConfigError("pretrain: stability_window and cap must be positive");
  return spec;
}

nlohmann::json to_json(const PretrainSpec& spec) {
  return {{"schema_version", kSchemaVersion},
          {"market", market_json(spec.market)},
          {"alpha", spec.alpha},
          {"beta", spec.beta},
          {"delta", spec.delta},
          {"grid_points", spec.grid_points},
          {"grid_margin", spec.grid_margin},
          {"stability_window", spec.options.stability_window},
          {"cap", spec.options.cap},
          {"seed", spec.options.seed},
          {"init", spec.options.init == qlearn::QInit::Zero ? "zero" : "uniform_rival"},
          {"initial_index", spec.options.initial_index},
          {"output", spec.output.string()}};
}

PretrainSpec load_pretrain(const std::filesystem::path& file) {
  return pretrain_from_json(read_json_file(file), file.parent_path());
}

}  // namespace pricelab::config
