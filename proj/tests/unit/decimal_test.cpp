#include <charconv>
#include <random>
#include <string>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "emfrisk/decimal.hpp"

namespace emfrisk {
namespace {

double from_chars_exact(const std::string& s) {
  double v = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

TEST(ParseDecimal, PlainForms) {
  EXPECT_EQ(parse_decimal("0.96"), 0.96);
  EXPECT_EQ(parse_decimal("5"), 5.0);
  EXPECT_EQ(parse_decimal(".5"), 0.5);
  EXPECT_EQ(parse_decimal("1e-3"), 0.001);
  EXPECT_EQ(parse_decimal("2.5E+1"), 25.0);
  EXPECT_EQ(parse_decimal("-0.25"), -0.25);
}

TEST(ParseDecimal, RejectsGarbage) {
  for (const char* bad : {"", "abc", "1.2.3", "0x10", "1e", "nan", "inf", "1,5", " 1", "1e+"}) {
    EXPECT_FALSE(parse_decimal(bad).has_value()) << bad;
  }
}

TEST(ParseDecimal, ShiftIsExactDecimal) {
  EXPECT_EQ(parse_decimal("0.5", 1), 0.05);
  EXPECT_EQ(parse_decimal("3", 1), 0.3);
  EXPECT_EQ(parse_decimal("1.5e2", 1), 15.0);
}

// Four-decimal values in mG parse to exactly the decimal v/10 uT.
TEST(ParseDecimal, MilligaussRoundTripProperty) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5000; ++i) {
    const auto q = static_cast<long long>(rng() % 10000000);  // 0 .. 999.9999
    const std::string mg = fmt::format("{}.{:04d}", q / 10000, q % 10000);
    const std::string ut = fmt::format("{}.{:05d}", q / 100000, q % 100000);
    ASSERT_EQ(parse_decimal(mg, 1), from_chars_exact(ut)) << mg;
    ASSERT_EQ(to_ten_thousandths(*parse_decimal(mg, 1) * 10.0), q) << mg;
  }
}

TEST(Rounding, HalfUpOnFourDecimalGrid) {
  EXPECT_EQ(round_half_up_hundredths(0.1965).count, 20);
  EXPECT_EQ(round_half_up_hundredths(0.1204).count, 12);
  EXPECT_EQ(round_half_up_hundredths(0.0768).count, 8);
  EXPECT_EQ(round_half_up_hundredths(0.0412).count, 4);
  EXPECT_EQ(round_half_up_hundredths(0.0100).count, 1);
  EXPECT_EQ(round_half_up_hundredths(0.0150).count, 2);
  EXPECT_EQ(round_half_up_hundredths(0.0149).count, 1);
  EXPECT_EQ(round_half_up_hundredths(0.0).count, 0);
  EXPECT_EQ(round_half_up_hundredths(0.9571).count, 96);
}

TEST(Rounding, LimitComparisonUsesFourDecimals) {
  EXPECT_TRUE(at_or_above(0.2, 0.2));
  EXPECT_TRUE(at_or_above(0.19999999999, 0.2));
  EXPECT_FALSE(at_or_above(0.1999, 0.2));
}

TEST(Format, FixedAndHundredths) {
  EXPECT_EQ(format_uT(0.1965), "0.1965");
  EXPECT_EQ(format_uT(0.05), "0.0500");
  EXPECT_EQ(format_hundredths({19}), "0.19");
  EXPECT_EQ(format_hundredths({85}), "0.85");
  EXPECT_EQ(format_hundredths({120}), "1.20");
  EXPECT_EQ(format_hundredths({-1}), "-0.01");
}

}  // namespace
}  // namespace emfrisk
