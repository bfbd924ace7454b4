#include <gtest/gtest.h>

#include "parse_corpus.hpp"

using namespace coopsim;
using namespace coopsim::llm;
using namespace coopsim::test;

TEST(ParseInteger, Corpus) {
  ASSERT_GE(integer_corpus().size(), 30u);
  EXPECT_EQ(integer_mismatches(), std::vector<std::string>{});
}

TEST(ParsePrice, Corpus) {
  ASSERT_GE(price_corpus().size(), 30u);
  EXPECT_EQ(price_mismatches(), std::vector<std::string>{});
}

TEST(ParseExit, Corpus) {
  ASSERT_GE(exit_corpus().size(), 30u);
  EXPECT_EQ(exit_mismatches(), std::vector<std::string>{});
}

TEST(ParseMove, Corpus) {
  ASSERT_GE(move_corpus().size(), 30u);
  EXPECT_EQ(move_mismatches(), std::vector<std::string>{});
}

TEST(ParseInteger, ReportsReasons) {
  try {
    parse_integer_choice("I choose 120");
    FAIL();
  } catch (const RangeFailure& e) {
    EXPECT_NE(std::string(e.what()).find("120"), std::string::npos);
  }
  EXPECT_EQ(parse_integer_choice("5", 0, 10), 5);
  EXPECT_THROW(parse_integer_choice("11", 0, 10), RangeFailure);
}

TEST(NumericTokens, SplitsAndGroups) {
  const auto t = numeric_tokens("1,234,567 and -3 and 0-100 and 4.5");
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t[0].value, 1234567);
  EXPECT_EQ(t[1].value, -3);
  EXPECT_EQ(t[2].value, 0);
  EXPECT_EQ(t[3].value, 100);
  EXPECT_TRUE(t[4].has_fraction);
  EXPECT_EQ(numeric_tokens("12,34").size(), 2u);
}
