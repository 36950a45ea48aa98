#include "common.hpp"

#include <algorithm>

namespace medcalc::calc {

namespace {

Param creatinine_param() {
    return num("creatinine", "Serum creatinine", sym::mg_dl)
        .range(0.1, 30)
        .typical(0.5, 4.5)
        .dp(1)
        .substance(units::substance::creatinine)
        .alt({sym::umol_l});
}

Param weight_param() {
    return num("weight", "Body weight", sym::kg).range(1, 400).typical(40, 140).dp(1).alt({sym::lb, sym::g});
}

Param height_param() {
    return num("height", "Height", sym::cm).range(100, 250).typical(145, 200).alt({sym::in, sym::m});
}

CalcResult cockcroft_gault(const Inputs& in, const EngineMode&) {
    const double age = in.num("age");
    const bool female = in.female();
    const double weight = in.num("weight");
    const double height = in.num("height");
    const double scr = require_positive(in.num("creatinine"), "creatinine");

    const double bmi = weight / ((height / 100.0) * (height / 100.0));
    const double ibw = devine_ibw(female, height);
    const double abw = ibw + 0.4 * (weight - ibw);
    double selected;
    if (bmi < 18.5) selected = weight;
    else if (bmi < 25.0) selected = std::min(weight, ibw);
    else selected = abw;

    const double crcl = (140.0 - age) * selected * (female ? 0.85 : 1.0) / (72.0 * scr);
    auto r = CalcResult::numeric(crcl, sym::ml_min);
    r.note("bmi", bmi).note("ibw", ibw).note("adjusted_body_weight", abw).note("selected_weight", selected);
    return r;
}

double ckd_epi(bool female, double age, double scr, const EngineMode& mode, double* age_term) {
    const double kappa = female ? 0.7 : (mode.has(Bug::ckd_epi_male_kappa) ? 0.7 : 0.9);
    const double alpha = female ? -0.241 : -0.302;
    const double ratio = scr / kappa;
    const double at = std::pow(0.9938, age);
    if (age_term) *age_term = at;
    return 142.0 * std::pow(std::min(ratio, 1.0), alpha) * std::pow(std::max(ratio, 1.0), -1.200) * at *
           (female ? 1.012 : 1.0);
}

CalcResult ckd_epi_2021(const Inputs& in, const EngineMode& mode) {
    double at = 0;
    const double v =
        ckd_epi(in.female(), in.num("age"), require_positive(in.num("creatinine"), "creatinine"), mode, &at);
    return CalcResult::numeric(v, sym::gfr).note("age_term", at);
}

CalcResult mdrd(const Inputs& in, const EngineMode& mode) {
    if (mode.has(Bug::mdrd_broken_path)) throw CalculatorFailure("mdrd", "calculator module not found");
    const double scr = require_positive(in.num("creatinine"), "creatinine");
    const double age = in.num("age");
    double v = 175.0 * std::pow(scr, -1.154) * std::pow(age, -0.203);
    if (in.female()) v *= 0.742;
    if (in.flag("black_race")) v *= 1.212;
    return CalcResult::numeric(v, sym::gfr);
}

CalcResult fena(const Inputs& in, const EngineMode&) {
    const double na = in.num("sodium");
    const double cr = in.num("creatinine");
    const double una = in.num("urine_sodium");
    const double ucr = in.num("urine_creatinine");
    return CalcResult::numeric(100.0 * (una * cr) / (na * ucr), sym::percent);
}

CalcResult free_water_deficit(const Inputs& in, const EngineMode&) {
    const double age = in.num("age");
    const bool female = in.female();
    double tbw;
    if (age < 18) tbw = 0.6;
    else if (age >= 65) tbw = female ? 0.45 : 0.5;
    else tbw = female ? 0.5 : 0.6;
    const double na = in.num("sodium");
    const double v = tbw * in.num("weight") * (na / 140.0 - 1.0);
    return CalcResult::numeric(v, sym::liters).note("total_body_water_fraction", tbw);
}

Param sodium_param(const char* name = "sodium", const char* label = "Serum sodium") {
    return num(name, label, sym::mmol_l)
        .range(90, 200)
        .typical(120, 165)
        .substance(units::substance::sodium)
        .alt({sym::meq_l});
}

}  // namespace

void register_renal(std::vector<CalculatorDef>& out) {
    out.push_back({
        .id = "cockcroft_gault",
        .name = "Creatinine Clearance (Cockcroft-Gault Equation)",
        .category = Category::equation,
        .params = {age_param().range(18, 120).typical(18, 90), sex_param(), weight_param(), height_param(),
                   creatinine_param()},
        .result_unit = sym::ml_min,
        .citation = "Cockcroft DW, Gault MH. Prediction of creatinine clearance from serum creatinine. "
                    "Nephron. 1976;16(1):31-41.",
        .versioned = true,
        .fn = cockcroft_gault,
    });
    out.push_back({
        .id = "ckd_epi_2021",
        .name = "CKD-EPI Equations for Glomerular Filtration Rate (2021)",
        .category = Category::equation,
        .params = {age_param().range(18, 120).typical(18, 90), sex_param(), creatinine_param()},
        .result_unit = sym::gfr,
        .citation = "Inker LA, et al. New creatinine- and cystatin C-based equations to estimate GFR "
                    "without race. N Engl J Med. 2021;385(19):1737-1749.",
        .bugs = {Bug::ckd_epi_male_kappa},
        .versioned = true,
        .fn = ckd_epi_2021,
    });
    out.push_back({
        .id = "mdrd",
        .name = "MDRD GFR Equation",
        .category = Category::equation,
        .params = {age_param().range(18, 120).typical(18, 90), sex_param(), creatinine_param(),
                   flag("black_race", "Black race")},
        .result_unit = sym::gfr,
        .citation = "Levey AS, et al. Using standardized serum creatinine values in the Modification of Diet "
                    "in Renal Disease study equation. Ann Intern Med. 2006;145(4):247-254.",
        .bugs = {Bug::mdrd_broken_path},
        .versioned = true,
        .fn = mdrd,
    });
    out.push_back({
        .id = "fena",
        .name = "Fractional Excretion of Sodium (FENa)",
        .category = Category::equation,
        .params = {sodium_param(), creatinine_param(),
                   sodium_param("urine_sodium", "Urine sodium").range(1, 300).typical(5, 150),
                   num("urine_creatinine", "Urine creatinine", sym::mg_dl)
                       .range(1, 1000)
                       .typical(20, 300)
                       .substance(units::substance::creatinine)
                       .alt({sym::umol_l, sym::mmol_l})},
        .result_unit = sym::percent,
        .citation = "Espinel CH. The FENa test: use in the differential diagnosis of acute renal failure. "
                    "JAMA. 1976;236(6):579-581.",
        .fn = fena,
    });
    out.push_back({
        .id = "free_water_deficit",
        .name = "Free Water Deficit",
        .category = Category::equation,
        .params = {age_param(), sex_param(), weight_param(), sodium_param().typical(146, 175)},
        .result_unit = sym::liters,
        .citation = "Adrogue HJ, Madias NE. Hypernatremia. N Engl J Med. 2000;342(20):1493-1499.",
        .fn = free_water_deficit,
    });
}

}  // namespace medcalc::calc

namespace medcalc {

CalcResult ckd_epi_2021(std::string_view sex, double age_years, const units::Quantity& creatinine,
                        const EngineMode& mode) {
    PatientParams p;
    p.set("sex", std::string(sex));
    p.set("age", age_years, units::sym::years);
    p.set("creatinine", creatinine);
    return default_engine().compute("ckd_epi_2021", p, mode);
}

}  // namespace medcalc
