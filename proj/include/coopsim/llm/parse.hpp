#pragma once

// Parsers from free-form model output to scenario actions. Numeric parsers use
// the last numeric token, since models tend to reason before they answer.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "../errors.hpp"
#include "../kernel/types.hpp"

namespace coopsim::llm {

struct NumericToken {
  double value = 0.0;
  bool has_fraction = false;
  std::string text;
};

namespace detail {
inline bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
inline bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
}  // namespace detail

// Numbers such as 7, -3, 7.50, 1,200 or 1,200.5. A '-' counts as a sign only
// when it does not follow a letter or digit ("0-100" is two tokens).
inline std::vector<NumericToken> numeric_tokens(std::string_view s) {
  using detail::is_alnum;
  using detail::is_digit;
  std::vector<NumericToken> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const bool sign = s[i] == '-' && i + 1 < s.size() && is_digit(s[i + 1]) && (i == 0 || !is_alnum(s[i - 1]));
    if (!is_digit(s[i]) && !sign) {
      ++i;
      continue;
    }
    // Digits glued to letters ("gpt4", "A1") are not numbers.
    if (!sign && i > 0 && std::isalpha(static_cast<unsigned char>(s[i - 1]))) {
      while (i < s.size() && is_alnum(s[i])) ++i;
      continue;
    }
    std::size_t j = i + (sign ? 1 : 0);
    std::string digits;
    while (j < s.size() && is_digit(s[j])) digits.push_back(s[j++]);
    // Thousands groups: ",ddd" not followed by another digit.
    const bool groupable = digits.size() <= 3;
    while (groupable && j + 3 < s.size() && s[j] == ',' && is_digit(s[j + 1]) && is_digit(s[j + 2]) &&
           is_digit(s[j + 3]) && (j + 4 >= s.size() || !is_digit(s[j + 4]))) {
      digits.append(s.substr(j + 1, 3));
      j += 4;
    }
    std::string frac;
    if (j + 1 < s.size() && s[j] == '.' && is_digit(s[j + 1])) {
      ++j;
      while (j < s.size() && is_digit(s[j])) frac.push_back(s[j++]);
    }
    NumericToken t;
    t.text = std::string(s.substr(i, j - i));
    t.value = std::stod(digits + (frac.empty() ? "" : "." + frac)) * (sign ? -1.0 : 1.0);
    t.has_fraction = !frac.empty() && frac.find_first_not_of('0') != std::string::npos;
    out.push_back(std::move(t));
    i = j;
  }
  return out;
}

inline int parse_integer_choice(std::string_view text, int lo = 0, int hi = 100) {
  const auto tokens = numeric_tokens(text);
  if (tokens.empty()) throw ParseFailure("no integer in reply");
  const auto& last = tokens.back();
  if (last.has_fraction) throw ParseFailure("final number '" + last.text + "' is not an integer");
  if (last.value < lo || last.value > hi) {
    throw RangeFailure("choice " + last.text + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(last.value);
}

inline double parse_price(std::string_view text) {
  std::string cleaned;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == '$') continue;
    // UTF-8 euro, pound and yen signs.
    if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x82 &&
        static_cast<unsigned char>(text[i + 2]) == 0xAC) {
      i += 2;
      continue;
    }
    if (c == 0xC2 && i + 1 < text.size() &&
        (static_cast<unsigned char>(text[i + 1]) == 0xA3 || static_cast<unsigned char>(text[i + 1]) == 0xA5)) {
      i += 1;
      continue;
    }
    cleaned.push_back(text[i]);
  }
  const auto tokens = numeric_tokens(cleaned);
  if (tokens.empty()) throw ParseFailure("no number in reply");
  const double v = tokens.back().value;
  if (!(v >= 0.0) || !std::isfinite(v)) throw RangeFailure("price " + tokens.back().text + " is negative");
  return v;
}

namespace detail {
inline std::string trim_punct_lower(std::string_view s) {
  auto strip = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || std::ispunct(static_cast<unsigned char>(c));
  };
  std::size_t b = 0, e = s.size();
  while (b < e && strip(s[b])) ++b;
  while (e > b && strip(s[e - 1])) --e;
  std::string out(s.substr(b, e - b));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}
}  // namespace detail

// Exact exit word after trimming punctuation; otherwise a reply naming exactly
// one distinct exit as a whole word ("I choose left.") is accepted.
inline ExitId parse_exit(std::string_view text) {
  const std::string t = detail::trim_punct_lower(text);
  for (auto id : kAllExits) {
    if (t == to_string(id)) return id;
  }
  std::vector<ExitId> seen;
  std::string word;
  auto flush = [&] {
    for (auto id : kAllExits) {
      if (word == to_string(id) && std::find(seen.begin(), seen.end(), id) == seen.end()) seen.push_back(id);
    }
    word.clear();
  };
  for (char c : t) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  if (seen.size() == 1) return seen.front();
  throw ParseFailure("reply does not name exactly one exit");
}

// The trimmed reply must be exactly one code. A well-formed code that was not
// offered is a RangeFailure.
inline char parse_move_code(std::string_view text, const std::vector<char>& legal_codes) {
  std::size_t b = 0, e = text.size();
  auto strip = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '\'' || c == '"' || c == '.' || c == '`' ||
           c == '(' || c == ')' || c == '[' || c == ']';
  };
  while (b < e && strip(text[b])) ++b;
  while (e > b && strip(text[e - 1])) --e;
  if (e - b != 1 || !std::isupper(static_cast<unsigned char>(text[b]))) {
    throw ParseFailure("reply is not a single move code");
  }
  const char code = text[b];
  if (std::find(legal_codes.begin(), legal_codes.end(), code) == legal_codes.end()) {
    throw RangeFailure(std::string("move code '") + code + "' was not offered");
  }
  return code;
}

}  // namespace coopsim::llm
