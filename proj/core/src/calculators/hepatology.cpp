#include "common.hpp"

#include <algorithm>

namespace medcalc::calc {

namespace {

Param bilirubin_param() {
    return num("bilirubin", "Total bilirubin", sym::mg_dl)
        .range(0.1, 60)
        .typical(0.3, 12)
        .dp(1)
        .substance(units::substance::bilirubin)
        .alt({sym::umol_l});
}
Param albumin_param() {
    return num("albumin", "Serum albumin", sym::g_dl).range(0.5, 7).typical(1.5, 5.0).dp(1).alt({sym::g_l});
}
Param inr_param() { return num("inr", "INR", sym::unitless).range(0.5, 15).typical(0.9, 4.0).dp(1); }

// Bilirubin as legacy converts it: molar inputs go through the wrong molar mass.
double bilirubin_mg_dl(const Inputs& in, const EngineMode& mode) {
    const double v = in.num("bilirubin");
    if (!mode.has(Bug::child_pugh_bilirubin_mw)) return v;
    const auto* raw = in.raw("bilirubin");
    if (!raw || !in.units().convertible(raw->unit(), sym::mmol_l)) return v;
    return v * 548.66 / units::molar_mass::bilirubin;
}

CalcResult child_pugh(const Inputs& in, const EngineMode& mode) {
    const double bili = bilirubin_mg_dl(in, mode);
    const double alb = in.num("albumin");
    const double inr = in.num("inr");
    const auto& ascites = in.choice("ascites");
    const auto& enceph = in.choice("encephalopathy");

    const int bili_pts = bili < 2.0 ? 1 : (bili <= 3.0 ? 2 : 3);
    const int alb_pts = alb > 3.5 ? 1 : (alb >= 2.8 ? 2 : 3);
    const int inr_pts = inr < 1.7 ? 1 : (inr <= 2.3 ? 2 : 3);
    const int asc_pts = ascites == "absent" ? 1 : (ascites == "slight" ? 2 : 3);
    const int enc_pts = enceph == "none" ? 1 : (enceph == "grade_1_2" ? 2 : 3);

    auto r = CalcResult::score(bili_pts + alb_pts + inr_pts + asc_pts + enc_pts);
    r.note("bilirubin_mg_dl", bili).note("bilirubin_points", bili_pts);
    return r;
}

double meld_na(double bili, double na, double inr, double cr, bool dialysis) {
    bili = std::max(bili, 1.0);
    inr = std::max(inr, 1.0);
    cr = std::max(cr, 1.0);
    if (dialysis || cr > 4.0) cr = 4.0;
    na = std::clamp(na, 125.0, 137.0);
    const double mi = 0.957 * std::log(cr) + 0.378 * std::log(bili) + 1.120 * std::log(inr) + 0.643;
    double m = std::round(mi * 10.0) / 10.0 * 10.0;
    if (m > 11.0) m = m + 1.32 * (137.0 - na) - 0.033 * m * (137.0 - na);
    return m;
}

CalcResult meld_3_0(const Inputs& in, const EngineMode& mode) {
    double bili = in.num("bilirubin");
    double na = in.num("sodium");
    double inr = in.num("inr");
    double cr = in.num("creatinine");
    double alb = in.num("albumin");
    const bool dialysis = in.flag("dialysis_twice_past_week");
    if (mode.has(Bug::meld_na_instead_of_meld3))
        return CalcResult::numeric(meld_na(bili, na, inr, cr, dialysis), sym::unitless);

    bili = std::max(bili, 1.0);
    inr = std::max(inr, 1.0);
    cr = std::max(cr, 1.0);
    if (dialysis || cr > 3.0) cr = 3.0;
    na = std::clamp(na, 125.0, 137.0);
    alb = std::clamp(alb, 1.5, 3.5);
    const double lb = std::log(bili), lc = std::log(cr);
    const double v = (in.female() ? 1.33 : 0.0) + 4.56 * lb + 0.82 * (137.0 - na) - 0.24 * (137.0 - na) * lb +
                     9.09 * std::log(inr) + 11.14 * lc + 1.85 * (3.5 - alb) - 1.83 * (3.5 - alb) * lc + 6.0;
    return CalcResult::numeric(v, sym::unitless);
}

CalcResult fib4(const Inputs& in, const EngineMode& mode) {
    const double age = in.num("age");
    const double ast = in.num("ast");
    const double alt = require_positive(in.num("alt"), "alt");
    double plt = require_positive(in.num("platelets"), "platelets");
    if (mode.has(Bug::fib4_platelet_scaling)) plt *= 1000.0;
    return CalcResult::numeric(age * ast / (plt * std::sqrt(alt)), sym::unitless);
}

}  // namespace

void register_hepatology(std::vector<CalculatorDef>& out) {
    out.push_back({
        .id = "child_pugh",
        .name = "Child-Pugh Score for Cirrhosis Mortality",
        .category = Category::rule,
        .params = {bilirubin_param(), albumin_param(), inr_param(),
                   choice("ascites", "Ascites", {"absent", "slight", "moderate"}),
                   choice("encephalopathy", "Encephalopathy", {"none", "grade_1_2", "grade_3_4"})},
        .score_range = ScoreRange{5, 15},
        .citation = "Pugh RN, et al. Transection of the oesophagus for bleeding oesophageal varices. "
                    "Br J Surg. 1973;60(8):646-649.",
        .bugs = {Bug::child_pugh_bilirubin_mw},
        .fn = child_pugh,
    });
    out.push_back({
        .id = "meld_3_0",
        .name = "MELD 3.0 for Liver Cirrhosis",
        .category = Category::equation,
        .params = {sex_param(), bilirubin_param(),
                   num("sodium", "Serum sodium", sym::mmol_l)
                       .range(90, 200)
                       .typical(120, 145)
                       .substance(units::substance::sodium)
                       .alt({sym::meq_l}),
                   inr_param(),
                   num("creatinine", "Serum creatinine", sym::mg_dl)
                       .range(0.1, 30)
                       .typical(0.5, 4.5)
                       .dp(1)
                       .substance(units::substance::creatinine)
                       .alt({sym::umol_l}),
                   albumin_param(), flag("dialysis_twice_past_week", "Dialysis at least twice in the past week")},
        .result_unit = sym::unitless,
        .citation = "Kim WR, et al. MELD 3.0: the Model for End-Stage Liver Disease updated for the modern era. "
                    "Gastroenterology. 2021;161(6):1887-1895.",
        .bugs = {Bug::meld_na_instead_of_meld3},
        .versioned = true,
        .fn = meld_3_0,
    });
    out.push_back({
        .id = "fib4",
        .name = "Fibrosis-4 (FIB-4) Index for Liver Fibrosis",
        .category = Category::equation,
        .params = {age_param(), num("ast", "AST", sym::u_l).range(1, 10000).typical(10, 300),
                   num("alt", "ALT", sym::u_l).range(1, 10000).typical(10, 300),
                   num("platelets", "Platelet count", sym::giga_per_l)
                       .range(1, 2000)
                       .typical(40, 450)
                       .alt({sym::per_ul, units::UnitId("×10³/µL")})},
        .result_unit = sym::unitless,
        .citation = "Sterling RK, et al. Development of a simple noninvasive index to predict significant "
                    "fibrosis in patients with HIV/HCV coinfection. Hepatology. 2006;43(6):1317-1325.",
        .bugs = {Bug::fib4_platelet_scaling},
        .fn = fib4,
    });
}

}  // namespace medcalc::calc
