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

#include <doctest.h>

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pricelab/backend.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/response.hpp"

using namespace pricelab;
using namespace pricelab::llm;

TEST_CASE("every corpus reply yields its price") {
  std::ifstream in(std::string(PRICELAB_FIXTURE_DIR) + "/responses.jsonl");
  REQUIRE(in);
  int total = 0, ok = 0;
  for (std::string line; std::getline(in, line);) {
    const auto entry = nlohmann::json::parse(line);
    const std::string text = entry.at("text");
    const double price = entry.at("price");
    CAPTURE(text);
    ++total;
    try {
      const auto parsed = parse_response(text);
      CHECK(parsed.price == price);
      ok += parsed.price == price ? 1 : 0;
    } catch (const Error& e) {
      FAIL_CHECK(std::string(e.what()));
    }
  }
  CHECK(total >= 20);
  CHECK(ok == total);
}

TEST_CASE("tags use the last occurrence") {
  const std::string text =
      "<think><strategy>draft</strategy></think>\n<round>7</round>\nMy chosen price: "
      "\\boxed{1.8}.\n<rationale>\n  Hold.\n</rationale>\n<strategy>\n  Stay at 1.8.\n</strategy>";
  const auto parsed = parse_response(text, 7);
  CHECK(parsed.round_echo == 7);
  CHECK(parsed.rationale == "Hold.");
  CHECK(parsed.strategy == "Stay at 1.8.");
  CHECK(parsed.warnings.empty());
  CHECK(parsed.raw == text);
}

TEST_CASE("boxed lists") {
  auto parsed = parse_response("My chosen prices: \\boxed{[3.2, 3.4]}");
  CHECK(parsed.is_list);
  REQUIRE(parsed.prices.size() == 2);
  CHECK(parsed.prices[0] == 3.2);
  CHECK(parsed.prices[1] == 3.4);
  CHECK(parsed.price == 3.2);
  parsed = parse_response("\\boxed{3.1, 3.3}");
  CHECK(parsed.is_list);
  CHECK(parsed.prices.size() == 2);
  CHECK_FALSE(parse_response("\\boxed{3.1}").is_list);
}

TEST_CASE("malformed and non-positive replies") {
  CHECK_THROWS_AS(parse_response("I will charge 1.8."), MalformedResponse);
  CHECK_THROWS_AS(parse_response("\\boxed{}"), MalformedResponse);
  CHECK_THROWS_AS(parse_response("\\boxed{high}"), MalformedResponse);
  CHECK_THROWS_AS(parse_response("\\boxed{1.8"), MalformedResponse);
  CHECK_THROWS_AS(parse_response(""), MalformedResponse);
  CHECK_THROWS_AS(parse_response("\\boxed{0}"), NonPositivePrice);
  CHECK_THROWS_AS(parse_response("\\boxed{-1.2}"), NonPositivePrice);
  CHECK_THROWS_AS(parse_response("\\boxed{[1.2, 0]}"), NonPositivePrice);
  CHECK_THROWS_AS(parse_response("\\boxed{inf}"), NonPositivePrice);
}

TEST_CASE("round echo mismatch is a warning") {
  const auto parsed = parse_response("<round>5</round> \\boxed{1.7}", 6);
  CHECK(parsed.price == 1.7);
  REQUIRE(parsed.warnings.size() == 1);
  CHECK(parsed.warnings[0].rfind("RoundMismatch", 0) == 0);
  CHECK(parse_response("<round>x</round> \\boxed{1.7}", 6).warnings.size() == 1);
  CHECK(parse_response("\\boxed{1.7}", 6).warnings.empty());
}

TEST_CASE("scripted replies parse back") {
  // Replies carry at most four decimals, like the prompt's numbers.
  CHECK(parse_response(ScriptedPriceBackend::reply(3, 1.472927)).price == 1.4729);
  for (double p : {1.0, 1.4729, 1.8, 12.25}) {
    for (int round : {1, 42, 300}) {
      const auto parsed = parse_response(ScriptedPriceBackend::reply(round, p), round);
      CHECK(parsed.price == doctest::Approx(p).epsilon(1e-12));
      CHECK(parsed.round_echo == round);
      CHECK(parsed.warnings.empty());
    }
  }
}
