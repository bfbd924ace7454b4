#pragma once

// Parser corpora shared by the unit tests and the acceptance check.

#include <string>
#include <vector>

#include "coopsim/llm/parse.hpp"

namespace coopsim::test {

enum class Outcome { Ok, Parse, Range };

template <typename T>
struct Case {
  std::string text;
  Outcome outcome;
  T value{};
};

constexpr auto Ok = Outcome::Ok;
constexpr auto Parse = Outcome::Parse;
constexpr auto Range = Outcome::Range;

inline const std::vector<char> kCorpusMoveCodes{'A', 'B', 'D', 'E', 'S'};

inline std::vector<Case<int>> integer_corpus() {
  return std::vector<Case<int>>{
      {"33", Ok, 33},
      {"  42\n", Ok, 42},
      {"I choose 33.", Ok, 33},
      {"My choice is 22", Ok, 22},
      {"Considering that the average would be 50, two-thirds of 50 is 33. Therefore, I choose 33.", Ok, 33},
      {"If others pick 33, then 2/3 of 33 is 22, so I pick 22.", Ok, 22},
      {"Two-thirds of 50 is 33", Ok, 33},
      {"Final answer: 0", Ok, 0},
      {"100", Ok, 100},
      {"Answer: 15!", Ok, 15},
      {"I'd go with **25**", Ok, 25},
      {"between 0 and 100 I pick 67", Ok, 67},
      {"0-100 range, pick 10", Ok, 10},
      {"Level-2 thinking gives 22", Ok, 22},
      {"33.0", Ok, 33},
      {"I choose 33 (thirty-three).", Ok, 33},
      {"As GPT4 I choose 12", Ok, 12},
      {"Round 3: 18", Ok, 18},
      {"1,000 is too high; I choose 5", Ok, 5},
      {"(2/3)*50 = 33.33, rounding gives 33", Ok, 33},
      {"Choice = 1", Ok, 1},
      {"My pick: 150 no wait 14", Ok, 14},
      {"200, or rather 99", Ok, 99},
      {"Strategy: stay below the crowd.\n15", Ok, 15},
      {"I don't know", Parse},
      {"", Parse},
      {"thirty-three", Parse},
      {"I choose 33.33", Parse},
      {"22.5", Parse},
      {"101", Range},
      {"-5", Range},
      {"x=-1", Range},
      {"1,000", Range},
  };
}

inline std::vector<Case<double>> price_corpus() {
  return std::vector<Case<double>>{
      {"7", Ok, 7.0},
      {"7.50", Ok, 7.5},
      {"$7.25", Ok, 7.25},
      {"The price is $6.80.", Ok, 6.8},
      {"\xE2\x82\xAC" "6.5", Ok, 6.5},
      {"\xC2\xA3" "8", Ok, 8.0},
      {"\xC2\xA5" "9.99", Ok, 9.99},
      {"Price: 7", Ok, 7.0},
      {"I will set my price at 7.00 this round.", Ok, 7.0},
      {"Considering the rival charged 6.50, I set 6.75", Ok, 6.75},
      {"1,200.50", Ok, 1200.5},
      {"price=0", Ok, 0.0},
      {"0.99", Ok, 0.99},
      {"Let's go with 7.1!", Ok, 7.1},
      {"**7.2**", Ok, 7.2},
      {" 8.4 \n", Ok, 8.4},
      {"My strategy for round 12: 7.3", Ok, 7.3},
      {"I'll match at 7.", Ok, 7.0},
      {"Set price to 6.9 USD", Ok, 6.9},
      {"$ 7", Ok, 7.0},
      {"From 6 to 8, I pick 7.4", Ok, 7.4},
      {"Round #5 price: 7.60", Ok, 7.6},
      {"7.123456", Ok, 7.123456},
      {"I choose $10", Ok, 10.0},
      {"-2", Range},
      {"price: -0.5", Range},
      {"none", Parse},
      {"", Parse},
      {"abc", Parse},
      {"A1", Parse},
      {"free of charge", Parse},
  };
}

inline std::vector<Case<ExitId>> exit_corpus() {
  return std::vector<Case<ExitId>>{
      {"left", Ok, ExitId::Left},
      {"Left", Ok, ExitId::Left},
      {"LEFT.", Ok, ExitId::Left},
      {" bottom\n", Ok, ExitId::Bottom},
      {"right!", Ok, ExitId::Right},
      {"'right'", Ok, ExitId::Right},
      {"\"left\"", Ok, ExitId::Left},
      {"**bottom**", Ok, ExitId::Bottom},
      {"(left)", Ok, ExitId::Left},
      {"BOTTOM", Ok, ExitId::Bottom},
      {"I choose left.", Ok, ExitId::Left},
      {"I will go to the bottom exit", Ok, ExitId::Bottom},
      {"Right exit", Ok, ExitId::Right},
      {"exit: bottom", Ok, ExitId::Bottom},
      {"The left exit is closest, so left.", Ok, ExitId::Left},
      {"I prefer the right one", Ok, ExitId::Right},
      {"go bottom!", Ok, ExitId::Bottom},
      {"Decision: right", Ok, ExitId::Right},
      {"exit left", Ok, ExitId::Left},
      {"I'll head for the bottom one since it's less crowded.", Ok, ExitId::Bottom},
      {"left or right", Parse},
      {"Not left, right", Parse},
      {"left-bottom", Parse},
      {"", Parse},
      {"up", Parse},
      {"north", Parse},
      {"leftmost", Parse},
      {"rightwards", Parse},
      {"None", Parse},
      {"the exit near the window", Parse},
  };
}

inline std::vector<Case<char>> move_corpus() {
  return std::vector<Case<char>>{
      {"A", Ok, 'A'},
      {"S", Ok, 'S'},
      {" B ", Ok, 'B'},
      {"'E'", Ok, 'E'},
      {"\"D\"", Ok, 'D'},
      {"A.", Ok, 'A'},
      {"`S`", Ok, 'S'},
      {"(B)", Ok, 'B'},
      {"[E]", Ok, 'E'},
      {"\nS\n", Ok, 'S'},
      {"'S'.", Ok, 'S'},
      {"  'A'  ", Ok, 'A'},
      {"(D).", Ok, 'D'},
      {"E\n", Ok, 'E'},
      {"H", Range},
      {"G", Range},
      {"Z", Range},
      {"C", Range},
      {"F", Range},
      {"'H'", Range},
      {"a", Parse},
      {"s", Parse},
      {"AB", Parse},
      {"A B", Parse},
      {"Move A", Parse},
      {"I choose B", Parse},
      {"", Parse},
      {"1", Parse},
      {"stay", Parse},
      {"B!", Parse},
      {"...", Parse},
  };
}

// Descriptions of every case whose outcome differs from the expected one.
template <typename T, typename F>
std::vector<std::string> corpus_mismatches(const std::vector<Case<T>>& corpus, F parse) {
  std::vector<std::string> bad;
  for (const auto& c : corpus) {
    Outcome got = Outcome::Ok;
    T value{};
    try {
      value = parse(c.text);
    } catch (const ParseFailure&) {
      got = Outcome::Parse;
    } catch (const RangeFailure&) {
      got = Outcome::Range;
    }
    if (got != c.outcome || (got == Outcome::Ok && !(value == c.value))) bad.push_back("'" + c.text + "'");
  }
  return bad;
}

inline std::vector<std::string> integer_mismatches() {
  return corpus_mismatches(integer_corpus(), [](const std::string& s) { return llm::parse_integer_choice(s); });
}
inline std::vector<std::string> price_mismatches() {
  return corpus_mismatches(price_corpus(), [](const std::string& s) { return llm::parse_price(s); });
}
inline std::vector<std::string> exit_mismatches() {
  return corpus_mismatches(exit_corpus(), [](const std::string& s) { return llm::parse_exit(s); });
}
inline std::vector<std::string> move_mismatches() {
  return corpus_mismatches(move_corpus(), [](const std::string& s) { return llm::parse_move_code(s, kCorpusMoveCodes); });
}

}  // namespace coopsim::test
