#include "medcalc/error.hpp"
#include "medcalc/units.hpp"

#include "../support/gen.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace medcalc;
using namespace medcalc::units;

namespace {

const UnitRegistry& reg() { return clinical_units(); }

double conv(double v, const char* from, const char* to, std::optional<Substance> s = std::nullopt) {
    return reg().convert_value(v, reg().resolve(from), reg().resolve(to), s);
}

TEST(Units, HeightInInches) { EXPECT_NEAR(conv(157, "cm", "in"), 61.81, 0.005); }

TEST(Units, BilirubinMolarMass) {
    EXPECT_NEAR(conv(100, "µmol/L", "mg/dL", substance::bilirubin), 5.8466, 1e-9);
}

TEST(Units, Identity) { EXPECT_DOUBLE_EQ(conv(1.0, "kg", "kg"), 1.0); }

TEST(Units, GlucoseFactor) { EXPECT_NEAR(conv(5.0, "mmol/L", "mg/dL", substance::glucose), 90.08, 1e-9); }

TEST(Units, PoundIsNistDefinition) { EXPECT_NEAR(conv(10, "lb", "kg"), 4.5359237, 1e-12); }

TEST(Units, FahrenheitFreezingPoint) {
    EXPECT_NEAR(conv(32, "°F", "°C"), 0.0, 1e-12);
    EXPECT_NEAR(conv(98.6, "°F", "°C"), 37.0, 1e-9);
    EXPECT_NEAR(conv(37, "°C", "°F"), 98.6, 1e-9);
}

TEST(Units, CreatinineMicromolar) { EXPECT_NEAR(conv(1.0, "mg/dL", "µmol/L", substance::creatinine), 88.40, 0.005); }

TEST(Units, BunUreaFactor) { EXPECT_NEAR(conv(10.0, "mmol/L", "mg/dL", substance::urea_nitrogen), 28.0, 1e-9); }

TEST(Units, MultiHopPath) {
    // µmol/L -> mmol/L -> mg/dL -> g/dL needs the bilirubin molar rule in the middle.
    EXPECT_NEAR(conv(1000, "µmol/L", "g/dL", substance::bilirubin), 0.058466, 1e-12);
}

TEST(Units, MolarNeedsSubstance) {
    EXPECT_THROW(conv(1.0, "mmol/L", "mg/dL"), DimensionMismatch);
    EXPECT_FALSE(reg().convertible(sym::mmol_l, sym::mg_dl));
    EXPECT_TRUE(reg().convertible(sym::mmol_l, sym::mg_dl, substance::glucose));
}

TEST(Units, CrossGroupAlwaysErrors) {
    EXPECT_THROW(conv(1.0, "kg", "cm"), DimensionMismatch);
    EXPECT_THROW(conv(1.0, "°C", "mm Hg"), DimensionMismatch);
    EXPECT_THROW(conv(1.0, "mg/dL", "%", substance::glucose), DimensionMismatch);
}

TEST(Units, UnknownUnit) {
    EXPECT_THROW(reg().resolve("furlongs"), UnknownUnit);
    EXPECT_THROW(conv(1.0, "kg", "stone"), UnknownUnit);
}

TEST(Units, AliasesAndMicroSign) {
    EXPECT_EQ(reg().resolve("umol/L"), sym::umol_l);
    EXPECT_EQ(reg().resolve("\xCE\xBCmol/L"), sym::umol_l);  // Greek mu
    EXPECT_EQ(reg().resolve("MG/DL"), sym::mg_dl);
    EXPECT_EQ(reg().resolve("bpm"), sym::per_min);
    EXPECT_EQ(reg().resolve("x10^9/L"), sym::giga_per_l);
}

TEST(Units, ParseQuantity) {
    auto q = reg().parse_quantity("2.0 mg/dL");
    EXPECT_DOUBLE_EQ(q.value(), 2.0);
    EXPECT_EQ(q.unit(), sym::mg_dl);
    q = reg().parse_quantity("49kg");
    EXPECT_EQ(q.unit(), sym::kg);
    q = reg().parse_quantity("-1.5e2 mm Hg");
    EXPECT_DOUBLE_EQ(q.value(), -150.0);
    q = reg().parse_quantity("7", sym::years);
    EXPECT_EQ(q.unit(), sym::years);
    EXPECT_THROW(reg().parse_quantity("7"), ParseError);
    EXPECT_THROW(reg().parse_quantity("abc kg"), ParseError);
}

TEST(Units, NonFiniteQuantityRejected) {
    EXPECT_THROW(Quantity(std::nan(""), sym::kg), OutOfRange);
    EXPECT_THROW(Quantity(INFINITY, sym::kg), OutOfRange);
}

TEST(Units, ConflictingRule) {
    UnitRegistry r;
    r.add_unit({UnitId("lb"), Dimension::mass, {}, ""});
    r.add_unit({UnitId("kg"), Dimension::mass, {}, ""});
    r.add_rule({UnitId("lb"), UnitId("kg"), Linear{0.45359237}, std::nullopt, "NIST"});
    EXPECT_NO_THROW(r.add_rule({UnitId("lb"), UnitId("kg"), Linear{0.45359237}, std::nullopt, "NIST"}));
    EXPECT_THROW(r.add_rule({UnitId("lb"), UnitId("kg"), Linear{0.5}, std::nullopt, "bad"}), ConflictingRule);
    // The inverse direction is registered too and conflicts the same way.
    EXPECT_THROW(r.add_rule({UnitId("kg"), UnitId("lb"), Linear{2.0}, std::nullopt, "bad"}), ConflictingRule);
    EXPECT_NEAR(r.convert_value(1.0, UnitId("kg"), UnitId("lb")), 2.2046226218, 1e-9);
}

TEST(Units, AffineRegistration) {
    UnitRegistry r;
    r.add_unit({UnitId("°F"), Dimension::temperature, {}, ""});
    r.add_unit({UnitId("°C"), Dimension::temperature, {}, ""});
    r.add_rule({UnitId("°F"), UnitId("°C"), Affine{5.0 / 9.0, -32.0}, std::nullopt, ""});
    EXPECT_NEAR(r.convert_value(32, UnitId("°F"), UnitId("°C")), 0.0, 1e-12);
    EXPECT_NEAR(r.convert_value(100, UnitId("°C"), UnitId("°F")), 212.0, 1e-12);
}

TEST(Units, MolarRuleValidation) {
    UnitRegistry r;
    r.add_unit({sym::mg_dl, Dimension::concentration, {}, ""});
    r.add_unit({sym::mmol_l, Dimension::concentration, {}, ""});
    EXPECT_THROW(r.add_rule({sym::mmol_l, sym::mg_dl, Molar{-1.0}, substance::glucose, ""}), InvalidParameter);
    EXPECT_THROW(r.add_rule({sym::mmol_l, sym::mg_dl, Molar{180.16}, std::nullopt, ""}), InvalidParameter);
}

TEST(Units, AuditTableListsRules) {
    const auto t = reg().audit_table();
    EXPECT_NE(t.find("bilirubin"), std::string::npos);
    EXPECT_NE(t.find("584.66"), std::string::npos);
    EXPECT_NE(t.find("mg/dL"), std::string::npos);
}

// Every convertible pair round-trips.
TEST(UnitsProperty, RoundTrip) {
    medcalc::testing::Gen g(0x5eed01);
    const auto all = reg().units();
    std::vector<Substance> subs{substance::bilirubin, substance::creatinine, substance::glucose,
                                substance::urea_nitrogen, substance::cholesterol, substance::calcium};
    int checked = 0;
    for (int i = 0; i < 20000 && checked < 5000; ++i) {
        const auto& a = g.pick(all);
        const auto& b = g.pick(all);
        if (a.dimension != b.dimension) continue;
        std::optional<Substance> s;
        if (!reg().convertible(a.id, b.id)) {
            s = g.pick(subs);
            if (!reg().convertible(a.id, b.id, s)) continue;
        }
        const double x = g.magnitude();
        const double y = reg().convert_value(x, a.id, b.id, s);
        const double back = reg().convert_value(y, b.id, a.id, s);
        ASSERT_LE(std::abs(back - x), 1e-9 * std::max(1.0, std::abs(x))) << a.id.symbol() << " -> " << b.id.symbol();
        ++checked;
    }
    EXPECT_GE(checked, 1000);
}

TEST(UnitsProperty, LinearKindsAreHomogeneous) {
    medcalc::testing::Gen g(77);
    const std::vector<std::pair<const char*, const char*>> pairs{
        {"µmol/L", "mg/dL"}, {"lb", "kg"}, {"g/L", "g/dL"}, {"mmol/L", "mg/dL"}};
    for (int i = 0; i < 500; ++i) {
        const auto& [f, t] = g.pick(pairs);
        const double x = g.uniform(0.01, 1000), a = g.uniform(0.1, 10);
        const double lhs = conv(a * x, f, t, substance::glucose);
        const double rhs = a * conv(x, f, t, substance::glucose);
        ASSERT_NEAR(lhs, rhs, 1e-9 * std::abs(rhs));
    }
}

TEST(UnitsProperty, CrossDimensionNeverReturns) {
    medcalc::testing::Gen g(99);
    const auto all = reg().units();
    for (int i = 0; i < 2000; ++i) {
        const auto& a = g.pick(all);
        const auto& b = g.pick(all);
        if (a.dimension == b.dimension) continue;
        EXPECT_THROW(reg().convert_value(1.0, a.id, b.id, substance::glucose), DimensionMismatch);
    }
}

}  // namespace
