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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "pricelab/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pricelab/errors.hpp"
#include "pricelab/prompts.hpp"

namespace pricelab::llm {

using json = nlohmann::json;

void BackendConfig::validate() const {
  if (max_retries < 0) throw ContractViolation("max_retries must be >= 0");
  if (!(timeout_seconds > 0.0)) throw ContractViolation("timeout must be positive");
  if (kind == BackendKind::OpenAi && endpoint.empty())
    throw ContractViolation("remote backend needs an endpoint");
}

BackendConfig BackendConfig::local(std::string model, std::string endpoint) {
  BackendConfig cfg;
  cfg.kind = BackendKind::OpenAi;
  cfg.model_name = std::move(model);
  cfg.endpoint = std::move(endpoint);
  return cfg;
}

OpenAiChatBackend::OpenAiChatBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (!cfg_.api_key_ref.empty()) {
    const char* key = std::getenv(cfg_.api_key_ref.c_str());
    if (key == nullptr || *key == '\0')
      throw ConfigError("environment variable " + cfg_.api_key_ref +
                        " (API key for " + cfg_.endpoint + ") is not set");
    api_key_ = key;
  }
  const auto scheme_end = cfg_.endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint must start with http:// or https://: " + cfg_.endpoint);
  const auto path_begin = cfg_.endpoint.find('/', scheme_end + 3);
  scheme_host_ = cfg_.endpoint.substr(0, path_begin);
  path_ = path_begin == std::string::npos ? "/" : cfg_.endpoint.substr(path_begin);
}

std::string OpenAiChatBackend::request_body(const ChatRequest& request) const {
  json body = {
      {"model", cfg_.model_name},
      {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  return body.dump();
}

std::string OpenAiChatBackend::extract_content(const std::string& body) {
  json parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded()) throw TransportError("backend returned invalid JSON");
  try {
    return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("backend response lacks message content: ") + e.what());
  }
}

std::string OpenAiChatBackend::complete(const ChatRequest& request) {
  count_call();
  httplib::Client client(scheme_host_);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(cfg_.timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto result = client.Post(path_, headers, request_body(request), "application/json");
  if (!result) {
    const auto err = result.error();
    const std::string what = "request to " + cfg_.endpoint + " failed: " + httplib::to_string(err);
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) throw Timeout(what);
    throw TransportError(what);
  }
  if (result->status != 200)
    throw TransportError("backend returned HTTP " + std::to_string(result->status) + ": " +
                         result->body.substr(0, 500));
  return extract_content(result->body);
}

namespace {

int round_from_prompt(const std::string& prompt) {
  static const std::regex kRound("<round>(\\d+)</round>");
  std::smatch m;
  return std::regex_search(prompt, m, kRound) ? std::stoi(m[1].str()) : 0;
}

}  // namespace

ScriptedPriceBackend::ScriptedPriceBackend(std::vector<double> prices, bool hold_last)
    : prices_(std::move(prices)), hold_last_(hold_last) {
  if (prices_.empty()) throw ContractViolation("scripted backend needs at least one price");
}

std::string ScriptedPriceBackend::reply(int round, double price) {
  return "<round>" + std::to_string(round) + "</round>\n" +
         "My chosen price: \\boxed{" + format_number(price) + "}.\n" +
         "<rationale>\n  Scripted price.\n</rationale>\n" +
         "<strategy>\n  Follow the script.\n</strategy>\n";
}

std::string ScriptedPriceBackend::complete(const ChatRequest& request) {
  count_call();
  std::lock_guard lock(mu_);
  if (next_ >= prices_.size() && !hold_last_) throw TransportError("price script exhausted");
  const double price = prices_[std::min(next_, prices_.size() - 1)];
  ++next_;
  return reply(round_from_prompt(request.prompt), price);
}

ScriptedTextBackend::ScriptedTextBackend(std::vector<std::string> texts, bool hold_last)
    : texts_(std::move(texts)), hold_last_(hold_last) {
  if (texts_.empty()) throw ContractViolation("scripted backend needs at least one reply");
}

std::string ScriptedTextBackend::complete(const ChatRequest&) {
  count_call();
  std::lock_guard lock(mu_);
  if (next_ >= texts_.size() && !hold_last_) throw TransportError("reply script exhausted");
  const std::string& text = texts_[std::min(next_, texts_.size() - 1)];
  ++next_;
  return text;
}

std::vector<std::string> load_recorded_responses(const std::filesystem::path& io_file, int agent) {
  std::ifstream in(io_file);
  if (!in) throw ConfigError("cannot open replay file " + io_file.string());
  std::map<long long, std::string> by_period;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json entry = json::parse(line, nullptr, false);
    if (entry.is_discarded()) throw FormatError("bad line in " + io_file.string());
    if (entry.at("agent").get<int>() != agent) continue;
    const auto& responses = entry.at("responses");
    if (responses.empty()) continue;
    by_period[entry.at("t").get<long long>()] = responses.back().get<std::string>();
  }
  std::vector<std::string> out;
  out.reserve(by_period.size());
  for (auto& [t, text] : by_period) out.push_back(std::move(text));
  if (out.empty())
    throw ConfigError("no recorded responses for agent " + std::to_string(agent) + " in " +
                      io_file.string());
  return out;
}

std::shared_ptr<ChatBackend> make_backend(const BackendConfig& cfg) {
  cfg.validate();
  if (cfg.kind == BackendKind::OpenAi) return std::make_shared<OpenAiChatBackend>(cfg);
  switch (cfg.mock.mode) {
    case MockMode::Prices:
      return std::make_shared<ScriptedPriceBackend>(cfg.mock.prices, cfg.mock.hold_last);
    case MockMode::Texts:
      return std::make_shared<ScriptedTextBackend>(cfg.mock.texts, cfg.mock.hold_last);
    case MockMode::Replay:
      return std::make_shared<ScriptedTextBackend>(
          load_recorded_responses(cfg.mock.replay_file, cfg.mock.replay_agent), false);
  }
  throw ContractViolation("unknown mock mode");
}

}  // namespace pricelab::llm
