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

// Structured-response parsing for LLM pricing replies.

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pricelab::llm {

struct ParsedResponse {
  std::optional<int> round_echo;
  double price = 0.0;          // first price (the only one unless is_list)
  std::vector<double> prices;  // all prices in the boxed value
  bool is_list = false;
  std::string rationale;
  std::string strategy;
  std::string raw;
  std::vector<std::string> warnings;
};

// Price comes from the first \boxed{...} holding a number or a list of
// numbers; text after a closing </think> is searched first. Tag contents
// (<round>, <rationale>, <strategy>) use the last occurrence.
// Throws MalformedResponse when no boxed number exists and NonPositivePrice
// for prices <= 0. A round echo different from expected_round is recorded as
// a warning.
ParsedResponse parse_response(const std::string& text,
                              std::optional<int> expected_round = std::nullopt);

}  // namespace pricelab::llm
