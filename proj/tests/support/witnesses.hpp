#pragma once

// One stored input per audited upstream defect on which corrected and legacy
// modes disagree. Corrected expectations come from tests/oracles (numeric)
// or from hand-scoring the published point tables (scores).

#include "medcalc/bugs.hpp"
#include "medcalc/engine.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace medcalc::testing {

struct Expect {
    std::optional<double> value;  // numeric value or points
    double tolerance = 5e-4;
    std::optional<std::string> display;
    bool throws_failure = false;  // CalculatorFailure
};

struct Witness {
    Bug bug;
    std::string calculator;
    std::string params_json;
    Expect corrected;
    Expect legacy;
    std::string reference;
};

inline std::vector<Witness> witnesses() {
    auto val = [](double v, double tol = 5e-4) { return Expect{v, tol, std::nullopt, false}; };
    auto pts = [](double v) { return Expect{v, 0.0, std::nullopt, false}; };
    auto shown = [](std::string s) { return Expect{std::nullopt, 0.0, std::move(s), false}; };
    const Expect fails{std::nullopt, 0.0, std::nullopt, true};

    return {
        {Bug::ckd_epi_male_kappa, "ckd_epi_2021", R"({"age": 60, "sex": "male", "creatinine": [1.2, "mg/dL"]})",
         val(69.2311), val(51.2068), "oracle ckd_epi_male_60_1.2 (2021 race-free equation, kappa 0.9 male)"},
        {Bug::meld_na_instead_of_meld3, "meld_3_0",
         R"({"sex": "female", "bilirubin": 3.0, "sodium": 130, "inr": 1.8, "creatinine": 1.6, "albumin": 2.8})",
         val(27.5057), val(26.158), "oracle meld3_ref (Kim 2021 coefficients)"},
        {Bug::homa_ir_glucose_conversion, "homa_ir", R"({"insulin": 10, "glucose": [100, "mg/dL"]})", val(2.4669),
         val(800.7111), "oracle homa_10_100 (Matthews 1985, glucose mmol/L = mg/dL / 18.016)"},
        {Bug::child_pugh_bilirubin_mw, "child_pugh",
         R"({"bilirubin": [35, "µmol/L"], "albumin": 3.6, "inr": 1.2, "ascites": "absent", "encephalopathy": "none"})",
         pts(6), pts(5), "35 µmol/L = 2.046 mg/dL at MW 584.66 -> 2 bilirubin points (Pugh 1973)"},
        {Bug::mme_fentanyl_patch_factor, "mme", R"({"fentanyl_patch": [25, "µg/hr"]})", val(60.0), val(3.25),
         "CDC 2022: transdermal fentanyl 2.4 MME per µg/hr"},
        {Bug::heart_atherosclerotic_logic, "heart",
         R"({"history": "slightly_suspicious", "ecg": "normal", "age": 40, "troponin": "normal", "atherosclerotic_disease": true})",
         pts(2), pts(1), "HEART: known atherosclerotic disease scores 2 risk-factor points (Six 2008)"},
        {Bug::sirs_band_criterion, "sirs",
         R"({"temperature": 37.0, "heart_rate": 80, "respiratory_rate": 16, "wbc": 8, "band_neutrophils": [11, "%"]})",
         pts(1), pts(0), "SIRS: bands > 10% meet the WBC criterion (Bone 1992)"},
        {Bug::sofa_fio2_vasopressor, "sofa",
         R"({"pao2": 90, "fio2": [40, "%"], "mechanical_ventilation": true, "platelets": 200, "gcs": 15,
             "bilirubin": 0.8, "mean_arterial_pressure": 75, "norepinephrine": 0.2, "creatinine": 0.9})",
         pts(6), pts(7), "SOFA: P/F 225 -> 2; norepinephrine > 0.1 µg/kg/min -> 4 (Vincent 1996)"},
        {Bug::gcs_not_testable, "gcs",
         R"({"eye_response": "spontaneous", "verbal_response": "not_testable", "motor_response": "obeys_commands"})",
         pts(11), pts(10), "GCS: not-testable component scored at its minimum of 1"},
        {Bug::framingham_unit_arg_order, "framingham_risk",
         R"({"age": 60, "sex": "male", "smoker": true, "total_cholesterol": [5.2, "mmol/L"], "hdl": [1.3, "mmol/L"],
             "sbp": 140, "bp_treated": false})",
         val(15.1496), val(2.5423), "oracle framingham_male_mmol (ATP III, cholesterol 38.665 mg/dL per mmol/L)"},
        {Bug::cci_liver_key_typo, "charlson",
         R"({"age": 45, "liver_disease": "moderate_to_severe", "diabetes_mellitus": "none_or_diet_controlled",
             "solid_tumor": "none"})",
         pts(3), pts(0), "Charlson 1987: moderate-to-severe liver disease 3 points"},
        {Bug::rcri_ischemic_key_typo, "rcri", R"({"ischemic": true, "creatinine": 1.0})", pts(1), pts(0),
         "Lee 1999: ischemic heart disease 1 point"},
        {Bug::mdrd_broken_path, "mdrd", R"({"age": 60, "sex": "female", "creatinine": 1.5})", val(35.4216), fails,
         "oracle mdrd_female_60_1.5 (IDMS-traceable MDRD, 175 coefficient)"},
        {Bug::curb65_broken_path, "curb65",
         R"({"confusion": false, "bun": 15, "respiratory_rate": 18, "sbp": 120, "dbp": 80, "age": 50})", pts(0), fails,
         "CURB-65 all criteria negative"},
        {Bug::gbs_bun_boundary, "glasgow_blatchford",
         R"({"bun": 70, "hemoglobin": 14, "sex": "male", "sbp": 120, "heart_rate": 80})", pts(6), pts(4),
         "Blatchford 2000: urea >= 25 mmol/L (BUN >= 70 mg/dL) scores 6"},
        {Bug::curb65_bun_threshold, "curb65",
         R"({"confusion": false, "bun": 20, "respiratory_rate": 18, "sbp": 120, "dbp": 80, "age": 50})", pts(0), pts(1),
         "Lim 2003: urea > 7 mmol/L, i.e. BUN > 20 mg/dL"},
        {Bug::fib4_platelet_scaling, "fib4", R"({"age": 36, "ast": 100, "alt": 100, "platelets": 100})", val(3.6),
         val(0.0036), "Sterling 2006: platelets in 10^9/L"},
        {Bug::steroid_intermediate_rounding, "steroid_conversion",
         R"({"source_steroid": "dexamethasone", "dose": 10, "target_steroid": "prednisone"})", val(66.6667),
         val(66.5), "oracle steroid_dex10_pred (dexamethasone 0.75 mg = prednisone 5 mg)"},
        {Bug::sigdig_off_by_one, "cockcroft_gault",
         R"({"age": 51, "sex": "male", "weight": 49, "height": 157, "creatinine": 2.0})", shown("30.28"),
         shown("30.3"), "oracle cg_worked 30.2847 at four significant digits"},
        {Bug::qtc_framingham_operator, "qtc_framingham", R"({"qt_interval": 400, "heart_rate": 75})", val(430.8),
         val(12.987), "Sagie 1992: QTc = QT + 0.154 (1 - RR) in seconds"},
        {Bug::apache_chronic_health_key, "apache_ii",
         R"({"age": 40, "temperature": 37, "sbp": 120, "dbp": 80, "heart_rate": 80, "respiratory_rate": 16,
             "fio2": 0.21, "pao2": 90, "ph": 7.4, "sodium": 140, "potassium": 4.0, "creatinine": 1.0,
             "hematocrit": 40, "wbc": 8, "gcs": 15, "organ_failure_immunocompromise": true,
             "surgery_type": "elective_postoperative"})",
         pts(2), pts(0), "Knaus 1985: chronic health points, elective postoperative 2"},
    };
}

/// Runs the witness in one mode; returns a description of the mismatch, or
/// nullopt when the result is as expected.
inline std::optional<std::string> check(const Engine& engine, const Witness& w, const EngineMode& mode,
                                        const Expect& want) {
    const auto& def = engine.get(w.calculator);
    const auto params = engine.params_from_json(def, nlohmann::json::parse(w.params_json));
    try {
        const auto r = engine.compute(w.calculator, params, mode);
        if (want.throws_failure) return "expected CalculatorFailure, got " + r.display;
        if (want.display && r.display != *want.display) return "display " + r.display + " != " + *want.display;
        if (want.value && std::abs(r.value() - *want.value) > want.tolerance)
            return "value " + std::to_string(r.value()) + " != " + std::to_string(*want.value);
        return std::nullopt;
    } catch (const Error& e) {
        if (want.throws_failure && e.code() == Errc::calculator_failure) return std::nullopt;
        return std::string("unexpected error: ") + e.what();
    }
}

}  // namespace medcalc::testing
