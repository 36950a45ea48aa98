#include "medcalc/engine.hpp"
#include "medcalc/fixture.hpp"
#include "support/gen.hpp"
#include "support/witnesses.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <set>

using namespace medcalc;
using medcalc::testing::Gen;
using medcalc::testing::Witness;
using nlohmann::json;

namespace {

const Engine& E() { return default_engine(); }

PatientParams P(std::string_view id, const char* j) { return E().params_from_json(E().get(id), json::parse(j)); }

class WitnessTest : public ::testing::TestWithParam<Witness> {};

TEST_P(WitnessTest, CorrectedMatchesReference) {
    const auto& w = GetParam();
    const auto err = medcalc::testing::check(E(), w, EngineMode::corrected(), w.corrected);
    EXPECT_FALSE(err) << *err << " [" << w.reference << "]";
}

TEST_P(WitnessTest, LegacyReproducesDefect) {
    const auto& w = GetParam();
    const auto err = medcalc::testing::check(E(), w, EngineMode::legacy({w.bug}), w.legacy);
    EXPECT_FALSE(err) << *err;
}

// Re-enabling only this bug must break the corrected expectation.
TEST_P(WitnessTest, RevertingTheFixIsDetected) {
    const auto& w = GetParam();
    EXPECT_TRUE(medcalc::testing::check(E(), w, EngineMode::corrected().toggled(w.bug), w.corrected));
}

INSTANTIATE_TEST_SUITE_P(AllBugs, WitnessTest, ::testing::ValuesIn(medcalc::testing::witnesses()),
                         [](const auto& info) { return std::string(to_string(info.param.bug)); });

TEST(Witnesses, OnePerCatalogBug) {
    std::set<Bug> seen;
    for (const auto& w : medcalc::testing::witnesses()) EXPECT_TRUE(seen.insert(w.bug).second) << to_string(w.bug);
    for (const auto& b : bug_catalog()) EXPECT_TRUE(seen.contains(b.id)) << b.key;
    EXPECT_GE(seen.size(), 20u);
}

TEST(Witnesses, BugsAreRegisteredOnTheirCalculator) {
    for (const auto& w : medcalc::testing::witnesses()) {
        const auto& info_ = info(w.bug);
        if (info_.calculator == "*") continue;
        EXPECT_EQ(info_.calculator, w.calculator) << info_.key;
        const auto& bugs = E().get(w.calculator).bugs;
        EXPECT_NE(std::find(bugs.begin(), bugs.end(), w.bug), bugs.end()) << info_.key;
    }
}

// ---------------------------------------------------------------------------

TEST(EngineMode, ParseAndDescribe) {
    EXPECT_TRUE(EngineMode::parse("corrected").is_corrected());
    EXPECT_EQ(EngineMode::parse("legacy"), EngineMode::legacy_all());
    const auto m = EngineMode::parse("legacy:rcri_ischemic_key_typo,fib4_platelet_scaling");
    EXPECT_TRUE(m.has(Bug::rcri_ischemic_key_typo));
    EXPECT_TRUE(m.has(Bug::fib4_platelet_scaling));
    EXPECT_FALSE(m.has(Bug::gcs_not_testable));
    EXPECT_EQ(EngineMode::parse(m.describe()), m);
    EXPECT_THROW(EngineMode::parse("legacy:no_such_bug"), Error);
    EXPECT_THROW(EngineMode::parse("sometimes"), Error);
    EXPECT_EQ(EngineMode::legacy({}), EngineMode::corrected());
    EXPECT_EQ(m.toggled(Bug::fib4_platelet_scaling).toggled(Bug::rcri_ischemic_key_typo), EngineMode::corrected());
}

TEST(Engine, IdsAreNormalized) {
    EXPECT_EQ(E().get("Cockcroft-Gault").id, "cockcroft_gault");
    EXPECT_EQ(E().get("ckd epi 2021").id, "ckd_epi_2021");
    EXPECT_EQ(E().find("nope"), nullptr);
    try {
        E().get("nope");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::unknown_calculator);
    }
}

TEST(Engine, RegistryCoversEveryCalculator) {
    const auto j = E().registry_json();
    EXPECT_EQ(j.size(), E().calculators().size());
    EXPECT_GE(j.size(), 55u);
    int equation = 0;
    for (const auto& d : E().calculators()) {
        equation += d.category == Category::equation;
        EXPECT_FALSE(d.citation.empty()) << d.id;
        if (d.category == Category::equation) {
            EXPECT_FALSE(d.result_unit.empty()) << d.id;
            EXPECT_TRUE(std::find(d.bugs.begin(), d.bugs.end(), Bug::sigdig_off_by_one) != d.bugs.end()) << d.id;
        }
    }
    EXPECT_GT(equation, 20);
}

TEST(Engine, ParamsFromJsonForms) {
    const auto& def = E().get("bmi");
    const auto a = E().compute("bmi", E().params_from_json(def, json::parse(R"({"weight": 70, "height": 175})")));
    const auto b =
        E().compute("bmi", E().params_from_json(def, json::parse(R"({"weight": [70000, "g"], "height": "1.75 m"})")));
    EXPECT_NEAR(a.value(), b.value(), 1e-9);
    EXPECT_EQ(a.display, "22.86");
    const auto round = E().params_from_json(def, E().params_to_json(E().params_from_json(def, json::parse(R"({"weight": "154 lb", "height": "70 in"})"))));

    EXPECT_NEAR(E().compute("bmi", round).value(), 154 * 0.45359237 / (1.778 * 1.778), 1e-9);
}

struct ErrorCase {
    const char* id;
    const char* params;
    Errc code;
};

class EngineErrorTest : public ::testing::TestWithParam<ErrorCase> {};

TEST_P(EngineErrorTest, Throws) {
    const auto& c = GetParam();
    try {
        E().compute(c.id, P(c.id, c.params));
        FAIL() << "no error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), c.code) << e.what();
    }
}

INSTANTIATE_TEST_SUITE_P(
    Cases, EngineErrorTest,
    ::testing::Values(ErrorCase{"bmi", R"({"weight": 70})", Errc::missing_parameter},
                      ErrorCase{"bmi", R"({"weight": 70, "height": 900})", Errc::out_of_range},
                      ErrorCase{"bmi", R"({"weight": -1, "height": 170})", Errc::out_of_range},
                      ErrorCase{"gcs",
                                R"({"eye_response": "sleepy", "verbal_response": "oriented", "motor_response": "obeys_commands"})",
                                Errc::out_of_range},
                      ErrorCase{"ldl", R"({"total_cholesterol": 200, "hdl": 50, "triglycerides": 450})",
                                Errc::out_of_range},
                      ErrorCase{"delta_ratio", R"({"sodium": 140, "chloride": 100, "bicarbonate": 24})",
                                Errc::out_of_range},
                      ErrorCase{"estimated_due_date", R"({"last_menstrual_period": "2024-01-10", "cycle_length": 28.5})",
                                Errc::out_of_range},
                      ErrorCase{"gestational_age",
                                R"({"last_menstrual_period": "2024-03-10", "current_date": "2024-01-01"})",
                                Errc::out_of_range}));

TEST(Engine, ParamsFromJsonRejectsBadInput) {
    const auto& def = E().get("bmi");
    auto code_of = [&](const char* j) -> std::optional<Errc> {
        try {
            E().validate(def, E().params_from_json(def, json::parse(j)));
        } catch (const Error& e) {
            return e.code();
        }
        return std::nullopt;
    };
    EXPECT_EQ(code_of(R"({"weight": [70, "furlong"], "height": 170})"), Errc::unknown_unit);
    EXPECT_EQ(code_of(R"({"weight": [70, "cm"], "height": 170})"), Errc::dimension_mismatch);
    EXPECT_EQ(code_of(R"({"weight": 70, "height": 170, "shoe_size": 9})"), Errc::invalid_parameter);
    EXPECT_EQ(code_of(R"({"weight": true, "height": 170})"), Errc::invalid_parameter);
}

// ---------------------------------------------------------------------------
// Properties over sampled patients.

TEST(EngineProperty, ComputeIsPure) {
    Gen g(11);
    for (const auto& def : E().calculators()) {
        for (int i = 0; i < 10; ++i) {
            const auto p = sample_computable(E(), def, g.engine());
            ASSERT_TRUE(p) << def.id;
            const auto a = E().compute(def.id, *p);
            const auto b = E().compute(def.id, *p);
            EXPECT_EQ(a.display, b.display) << def.id;
            EXPECT_EQ(a.intermediates, b.intermediates) << def.id;
        }
    }
}

TEST(EngineProperty, ScoresStayInTheirRange) {
    Gen g(12);
    for (const auto& def : E().calculators()) {
        if (!def.score_range) continue;
        for (int i = 0; i < 200; ++i) {
            const auto p = sample_computable(E(), def, g.engine(), {.flag_rate = g.uniform(0, 1)});
            ASSERT_TRUE(p) << def.id;
            const double v = E().compute(def.id, *p).value();
            EXPECT_GE(v, def.score_range->lo) << def.id;
            EXPECT_LE(v, def.score_range->hi) << def.id;
        }
    }
}

TEST(EngineProperty, AllFlagsSetReachesKnownMaxima) {
    auto all_true = [](std::string_view id) {
        json j = json::object();
        for (const auto& p : E().get(id).params)
            if (p.kind == ParamKind::boolean) j[p.name] = true;
        return j;
    };
    auto j = all_true("feverpain");
    EXPECT_EQ(E().compute("feverpain", E().params_from_json(E().get("feverpain"), j)).value(), 5);
    j = all_true("wells_pe");
    j["heart_rate"] = 120;
    EXPECT_EQ(E().compute("wells_pe", E().params_from_json(E().get("wells_pe"), j)).value(), 12.5);
    j = all_true("has_bled");
    j["age"] = 70;
    EXPECT_EQ(E().compute("has_bled", E().params_from_json(E().get("has_bled"), j)).value(), 9);
}

// Expressing an input in an alternate unit moves the result by at most
// conversion round-off.
TEST(EngineProperty, AlternateUnitsAgree) {
    Gen g(13);
    const auto& reg = E().units();
    int checked = 0;
    for (const auto& def : E().calculators()) {
        for (int i = 0; i < 20; ++i) {
            const auto p = sample_computable(E(), def, g.engine(), {.alternate_unit_rate = 0});
            ASSERT_TRUE(p);
            const auto base = E().compute(def.id, *p);
            if (base.is_label()) break;
            PatientParams q = *p;
            for (const auto& spec : def.params) {
                if (spec.kind != ParamKind::numeric || spec.alternate_units.empty() || !p->contains(spec.name)) continue;
                const auto& qty = std::get<units::Quantity>(*p->find(spec.name));
                const auto& alt = spec.alternate_units[static_cast<size_t>(g.integer(0, int(spec.alternate_units.size()) - 1))];
                const double v = reg.convert_value(qty.value(), qty.unit(), alt, spec.substance);
                q.set(spec.name, v, alt);
            }
            const auto moved = E().compute(def.id, q);
            const double a = base.value(), b = moved.value();
            if (base.is_score()) {
                // Exact thresholds may flip on round-off; require equality away from them.
                if (a != b) continue;
            }
            EXPECT_LE(std::abs(a - b), 1e-9 * std::max(1.0, std::abs(a))) << def.id;
            ++checked;
        }
    }
    EXPECT_GT(checked, 500);
}

TEST(EngineProperty, MonotoneInCreatinine) {
    Gen g(14);
    for (int i = 0; i < 300; ++i) {
        const double age = g.uniform(18, 90), w = g.uniform(40, 140), h = g.uniform(150, 200);
        const double cr = g.uniform(0.3, 8), bump = g.uniform(0.01, 2);
        const char* sex = g.coin() ? "male" : "female";
        auto cg = [&](double c) {
            PatientParams p;
            p.set("age", age, units::sym::years).set("sex", sex).set("weight", w, units::sym::kg);
            p.set("height", h, units::sym::cm).set("creatinine", c, units::sym::mg_dl);
            return E().compute("cockcroft_gault", p).value();
        };
        auto egfr = [&](double c) {
            PatientParams p;
            p.set("age", age, units::sym::years).set("sex", sex).set("creatinine", c, units::sym::mg_dl);
            return E().compute("ckd_epi_2021", p).value();
        };
        EXPECT_GT(cg(cr), cg(cr + bump));
        EXPECT_GT(egfr(cr), egfr(cr + bump));
    }
}

TEST(EngineProperty, MonotoneInWeight) {
    Gen g(15);
    for (int i = 0; i < 300; ++i) {
        const double h = g.uniform(120, 220), w = g.uniform(5, 300), d = g.uniform(0.1, 50);
        auto bmi = [&](double kg) {
            PatientParams p;
            p.set("weight", kg, units::sym::kg).set("height", h, units::sym::cm);
            return E().compute("bmi", p).value();
        };
        auto fluids = [&](double kg) {
            PatientParams p;
            p.set("weight", kg, units::sym::kg);
            return E().compute("maintenance_fluids", p).value();
        };
        EXPECT_LT(bmi(w), bmi(w + d));
        EXPECT_LT(fluids(w), fluids(w + d));
    }
}

// Continuous formulas: a relative nudge of 1e-12 to every numeric input moves
// the answer by far less than the scoring band.
TEST(EngineProperty, EquationsAreStableUnderTinyPerturbation) {
    Gen g(16);
    for (const auto& def : E().calculators()) {
        if (def.category != Category::equation) continue;
        if (def.id == "maintenance_fluids") continue;  // piecewise, still continuous
        for (int i = 0; i < 20; ++i) {
            const auto p = sample_computable(E(), def, g.engine(), {.alternate_unit_rate = 0});
            ASSERT_TRUE(p);
            const auto base = E().compute(def.id, *p);
            if (!base.is_numeric()) break;
            PatientParams q = *p;
            for (const auto& [name, v] : *p)
                if (const auto* qty = std::get_if<units::Quantity>(&v))
                    q.set(name, qty->value() * (1 + 1e-12), qty->unit());
            double b;
            try {
                b = E().compute(def.id, q).value();
            } catch (const OutOfRange&) {
                continue;  // sampled exactly on a range bound
            }
            const double a = base.value();
            if (a == 0) continue;
            EXPECT_LE(std::abs(a - b) / std::abs(a), 1e-9) << def.id;
        }
    }
}

TEST(EngineProperty, LegacyModeNeverTouchesUnaffectedCalculators) {
    Gen g(17);
    const auto legacy = EngineMode::legacy_all();
    for (const auto& def : E().calculators()) {
        std::set<Bug> own(def.bugs.begin(), def.bugs.end());
        own.erase(Bug::sigdig_off_by_one);
        if (!own.empty()) continue;
        for (int i = 0; i < 10; ++i) {
            const auto p = sample_computable(E(), def, g.engine());
            const auto a = E().compute(def.id, *p);
            const auto b = E().compute(def.id, *p, legacy);
            if (a.is_label()) {
                EXPECT_EQ(a.display, b.display) << def.id;
            } else {
                EXPECT_EQ(a.value(), b.value()) << def.id;
            }
        }
    }
}

}  // namespace
