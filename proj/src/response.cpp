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

#include "pricelab/response.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string_view>

#include "pricelab/errors.hpp"

namespace pricelab::llm {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  std::string cleaned;
  for (char ch : s) {
    if (ch == '$' || ch == '\\' || ch == '{' || ch == '}' ||
        std::isspace(static_cast<unsigned char>(ch)))
      continue;
    cleaned += ch;
  }
  while (!cleaned.empty() && cleaned.back() == '.') cleaned.pop_back();
  if (!cleaned.empty() && cleaned.front() == '+') cleaned.erase(0, 1);
  if (cleaned.empty()) return std::nullopt;
  double value = 0.0;
  const char* end = cleaned.data() + cleaned.size();
  auto [ptr, ec] = std::from_chars(cleaned.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

// Numbers inside one \boxed{...}: a scalar or a bracketed / comma list.
std::optional<std::vector<double>> parse_boxed(std::string_view content, bool& is_list) {
  content = trim(content);
  is_list = false;
  if (content.size() >= 2 && (content.front() == '[' || content.front() == '(') &&
      (content.back() == ']' || content.back() == ')')) {
    content = content.substr(1, content.size() - 2);
    is_list = true;
  }
  if (content.find(',') != std::string_view::npos) is_list = true;
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t comma = content.find(',', start);
    if (comma == std::string_view::npos) comma = content.size();
    auto value = parse_number(content.substr(start, comma - start));
    if (!value) return std::nullopt;
    values.push_back(*value);
    start = comma + 1;
  }
  if (values.empty()) return std::nullopt;
  return values;
}

struct Boxed {
  std::vector<double> values;
  bool is_list;
};

std::optional<Boxed> first_boxed(std::string_view text) {
  constexpr std::string_view kOpen = "\\boxed{";
  std::size_t pos = 0;
  while ((pos = text.find(kOpen, pos)) != std::string_view::npos) {
    const std::size_t begin = pos + kOpen.size();
    int depth = 1;
    std::size_t i = begin;
    for (; i < text.size() && depth > 0; ++i) {
      if (text[i] == '{') ++depth;
      if (text[i] == '}') --depth;
    }
    if (depth != 0) return std::nullopt;
    bool is_list = false;
    if (auto values = parse_boxed(text.substr(begin, i - 1 - begin), is_list))
      return Boxed{std::move(*values), is_list};
    pos = begin;
  }
  return std::nullopt;
}

std::optional<std::string> last_tag(std::string_view text, std::string_view tag) {
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  const std::size_t end = text.rfind(close);
  if (end == std::string_view::npos) return std::nullopt;
  const std::size_t begin = text.rfind(open, end);
  if (begin == std::string_view::npos) return std::nullopt;
  return std::string(trim(text.substr(begin + open.size(), end - begin - open.size())));
}

}  // namespace

ParsedResponse parse_response(const std::string& text, std::optional<int> expected_round) {
  ParsedResponse out;
  out.raw = text;
  const std::string_view view(text);

  std::optional<Boxed> boxed;
  if (const std::size_t think_end = view.rfind("</think>"); think_end != std::string_view::npos)
    boxed = first_boxed(view.substr(think_end));
  if (!boxed) boxed = first_boxed(view);
  if (!boxed) throw MalformedResponse("no boxed numeric price in response");

  for (double p : boxed->values) {
    if (!std::isfinite(p) || p <= 0.0)
      throw NonPositivePrice("boxed price must be positive and finite");
  }
  out.prices = std::move(boxed->values);
  out.price = out.prices.front();
  out.is_list = boxed->is_list;

  if (auto round = last_tag(view, "round")) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(round->data(), round->data() + round->size(), value);
    if (ec == std::errc() && ptr == round->data() + round->size()) {
      out.round_echo = value;
    } else {
      out.warnings.push_back("unparsable round echo '" + *round + "'");
    }
  }
  if (expected_round && out.round_echo && *out.round_echo != *expected_round) {
    out.warnings.push_back("RoundMismatch: echoed round " + std::to_string(*out.round_echo) +
                           ", expected " + std::to_string(*expected_round));
  }
  out.rationale = last_tag(view, "rationale").value_or("");
  out.strategy = last_tag(view, "strategy").value_or("");
  return out;
}

}  // namespace pricelab::llm
