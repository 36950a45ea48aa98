#include "medcalc/engine.hpp"
#include "medcalc/format.hpp"

#include <gtest/gtest.h>

using namespace medcalc;

TEST(Format, SignificantDigits) {
    EXPECT_EQ(format_significant(30.277777, 4), "30.28");
    EXPECT_EQ(format_significant(0.012345, 3), "0.0123");
    EXPECT_EQ(format_significant(1234.5, 4), "1235");
    EXPECT_EQ(format_significant(123456.0, 4), "123500");
    EXPECT_EQ(format_significant(2.5, 4), "2.5");
    EXPECT_EQ(format_significant(-3.14159, 3), "-3.14");
    EXPECT_EQ(format_significant(0.0, 4), "0");
    EXPECT_EQ(format_significant(-0.00001, 1), "-0.00001");
}

TEST(Format, RoundingCarriesIntoNewDigit) {
    EXPECT_EQ(format_significant(9.99996, 4), "10");
    EXPECT_EQ(format_significant(99.96, 3), "100");
    EXPECT_EQ(format_significant(0.099996, 4), "0.1");
}

TEST(Format, Answers) {
    EXPECT_EQ(format_answer(CalcResult::score(0)), "0");
    EXPECT_EQ(format_answer(CalcResult::score(7)), "7");
    EXPECT_EQ(format_answer(CalcResult::score(4.5)), "4.5");
    EXPECT_EQ(format_answer(CalcResult::score(-1)), "-1");
    EXPECT_EQ(format_answer(CalcResult::numeric(30.2847, units::sym::ml_min)), "30.28");
    EXPECT_EQ(format_answer(CalcResult::label("10/19/2023")), "10/19/2023");
}

TEST(Format, Percent) {
    EXPECT_EQ(format_percent(571.0 / 1100), "51.9%");
    EXPECT_EQ(format_percent(896.0 / 1100), "81.5%");
    EXPECT_EQ(format_percent(1.0), "100.0%");
}
