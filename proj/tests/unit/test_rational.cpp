#include "platonic/rational.hpp"

#include <gtest/gtest.h>

using namespace platonic;

TEST(Rational, ParsesFractionsIntegersAndDecimals) {
    EXPECT_EQ(parse_rational("3/6"), ratio(1, 2));
    EXPECT_EQ(parse_rational(" -4/8 "), ratio(-1, 2));
    EXPECT_EQ(parse_rational("+7"), ratio(7));
    EXPECT_EQ(parse_rational("0.25"), ratio(1, 4));
    EXPECT_EQ(parse_rational("-0.125"), ratio(-1, 8));
    EXPECT_EQ(parse_rational("1e-3"), ratio(1, 1000));
    EXPECT_EQ(parse_rational("2.5E2"), ratio(250));
}

TEST(Rational, LeadingZerosAreDecimal) {
    EXPECT_EQ(parse_rational("010"), ratio(10));
    EXPECT_EQ(parse_rational("09/010"), ratio(9, 10));
    EXPECT_EQ(parse_rational("0.08"), ratio(2, 25));
}

TEST(Rational, RejectsMalformedInput) {
    for (const char* bad : {"", "1/0", "a", "1/2/3", "1..2", "1e", "--1", "0x10"})
        EXPECT_THROW(parse_rational(bad), std::invalid_argument) << bad;
}

TEST(Rational, FromDoubleUsesShortestDecimal) {
    EXPECT_EQ(rational_from_double(0.1), ratio(1, 10));
    EXPECT_EQ(rational_from_double(0.25), ratio(1, 4));
    EXPECT_EQ(rational_from_double(-3.0), ratio(-3));
    EXPECT_THROW(rational_from_double(1.0 / 0.0), std::invalid_argument);
}

TEST(Rational, FormattingAndFloor) {
    EXPECT_EQ(to_string(ratio(6, 4)), "3/2");
    EXPECT_EQ(to_string(ratio(-4, 2)), "-2");
    EXPECT_EQ(floor(ratio(7, 2)), 3);
    EXPECT_EQ(floor(ratio(-7, 2)), -4);
    EXPECT_EQ(floor(ratio(4)), 4);
    EXPECT_EQ(abs(ratio(-1, 3)), ratio(1, 3));
}
