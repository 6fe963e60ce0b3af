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

// Chat-completion backends: an OpenAI-compatible HTTP client and in-process
// mocks (scripted, callback and replay) implementing the same interface.

#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace pricelab::llm {

enum class BackendKind { OpenAi, Mock };
enum class MockMode { Prices, Texts, Replay };

struct MockSpec {
  MockMode mode = MockMode::Prices;
  std::vector<double> prices;      // Prices: one well-formed reply per call
  std::vector<std::string> texts;  // Texts: raw replies, in order
  bool hold_last = true;
  std::filesystem::path replay_file;  // Replay: agent I/O sidecar of a previous run
  int replay_agent = 0;
};

struct BackendConfig {
  BackendKind kind = BackendKind::Mock;
  std::string endpoint = "http://localhost:8000/v1/chat/completions";
  std::string model_name;
  std::string api_key_ref;  // environment variable holding the key; empty = none
  double temperature = 0.6;
  double timeout_seconds = 600.0;
  int max_retries = 2;
  MockSpec mock;

  void validate() const;

  // Self-hosted OpenAI-compatible server without authentication.
  static BackendConfig local(std::string model, std::string endpoint =
                                                    "http://localhost:8000/v1/chat/completions");
};

struct ChatRequest {
  std::string prompt;
  int max_tokens = 5000;
  double temperature = 0.6;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  // One round trip. Throws TransportError / Timeout.
  virtual std::string complete(const ChatRequest& request) = 0;
  // Calls made so far (for audits and tests).
  int calls() const { return calls_.load(); }

 protected:
  void count_call() { ++calls_; }

 private:
  std::atomic<int> calls_{0};
};

class OpenAiChatBackend : public ChatBackend {
 public:
  // Resolves the API key now; throws ConfigError if api_key_ref names an
  // unset variable.
  explicit OpenAiChatBackend(BackendConfig cfg);
  std::string complete(const ChatRequest& request) override;

  // Request body sent for `request`.
  std::string request_body(const ChatRequest& request) const;
  // Assistant text from a response body; throws TransportError if absent.
  static std::string extract_content(const std::string& body);

 private:
  BackendConfig cfg_;
  std::string api_key_;
  std::string scheme_host_;
  std::string path_;
};

// Replies "<round>N</round> My chosen price: \boxed{p}" with N echoed from
// the prompt's response template and p taken from the script.
class ScriptedPriceBackend : public ChatBackend {
 public:
  ScriptedPriceBackend(std::vector<double> prices, bool hold_last);
  std::string complete(const ChatRequest& request) override;

  // Reply text the scripted backend emits for `price` at `round`.
  static std::string reply(int round, double price);

 private:
  std::mutex mu_;
  std::vector<double> prices_;
  bool hold_last_;
  std::size_t next_ = 0;
};

class ScriptedTextBackend : public ChatBackend {
 public:
  ScriptedTextBackend(std::vector<std::string> texts, bool hold_last);
  std::string complete(const ChatRequest& request) override;

 private:
  std::mutex mu_;
  std::vector<std::string> texts_;
  bool hold_last_;
  std::size_t next_ = 0;
};

class CallbackBackend : public ChatBackend {
 public:
  explicit CallbackBackend(std::function<std::string(const ChatRequest&)> fn)
      : fn_(std::move(fn)) {}
  std::string complete(const ChatRequest& request) override {
    count_call();
    return fn_(request);
  }

 private:
  std::function<std::string(const ChatRequest&)> fn_;
};

// Reads the final recorded response of every period for one agent from a
// run's I/O sidecar and replays them in order.
std::vector<std::string> load_recorded_responses(const std::filesystem::path& io_file, int agent);

std::shared_ptr<ChatBackend> make_backend(const BackendConfig& cfg);

}  // namespace pricelab::llm
