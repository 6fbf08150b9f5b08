#include <gtest/gtest.h>

#include <sstream>

#include "pcnsim/amount.hpp"

using pcnsim::Amount;
using pcnsim::InvalidParameters;

TEST(Amount, ParsesFixedPoint) {
  EXPECT_EQ(Amount::parse("1").micros(), 1'000'000);
  EXPECT_EQ(Amount::parse("0.5").micros(), 500'000);
  EXPECT_EQ(Amount::parse("12.000001").micros(), 12'000'001);
  EXPECT_EQ(Amount::parse("-3.25").micros(), -3'250'000);
  EXPECT_EQ(Amount::parse("+.75").micros(), 750'000);
}

TEST(Amount, RejectsMalformedText) {
  for (const char* bad : {"", "-", ".", "1.2.3", "1e3", "abc", "1.0000001", "99999999999999999999"})
    EXPECT_THROW(Amount::parse(bad), InvalidParameters) << bad;
}

TEST(Amount, PrintsSixDecimals) {
  EXPECT_EQ(Amount::from_units(3).to_string(), "3.000000");
  EXPECT_EQ(Amount::from_micros(-1).to_string(), "-0.000001");
  EXPECT_EQ(Amount::from_micros(1234567).to_string(), "1.234567");
  std::ostringstream os;
  os << Amount::parse("0.1");
  EXPECT_EQ(os.str(), "0.100000");
}

TEST(Amount, TextRoundTrip) {
  for (std::int64_t m : {0LL, 1LL, 999'999LL, 1'000'000LL, -7LL, 123'456'789'012LL})
    EXPECT_EQ(Amount::parse(Amount::from_micros(m).to_string()).micros(), m);
}

TEST(Amount, FromDoubleRoundsToMicros) {
  EXPECT_EQ(Amount::from_double(0.1234564).micros(), 123'456);
  EXPECT_EQ(Amount::from_double(0.1234566).micros(), 123'457);
  EXPECT_THROW(Amount::from_double(1e30), InvalidParameters);
}

TEST(Amount, ScaledTruncates) {
  EXPECT_EQ(Amount::from_micros(3).scaled(0.5).micros(), 1);
  EXPECT_EQ(Amount::from_micros(7).scaled(1.0).micros(), 7);
  EXPECT_EQ(Amount::from_units(10).scaled(0.5), Amount::from_units(5));
  EXPECT_THROW(Amount::from_units(1).scaled(-1.0), InvalidParameters);
}

TEST(Amount, ArithmeticAndOrder) {
  const auto a = Amount::from_units(5), b = Amount::from_units(3);
  EXPECT_EQ(a + b, Amount::from_units(8));
  EXPECT_EQ(a - b, Amount::from_units(2));
  EXPECT_LT(b, a);
  EXPECT_EQ(pcnsim::min(a, b), b);
  EXPECT_EQ(pcnsim::max(a, b), a);
  EXPECT_TRUE(a.positive());
  EXPECT_TRUE(Amount{}.is_zero());
}
