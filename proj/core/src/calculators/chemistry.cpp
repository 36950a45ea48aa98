#include "common.hpp"

namespace medcalc::calc {

namespace {

Param electrolyte(const char* name, const char* label, const units::Substance& s, double lo, double hi) {
    return num(name, label, sym::mmol_l).range(1, 250).typical(lo, hi).substance(s).alt({sym::meq_l});
}
Param sodium() { return electrolyte("sodium", "Serum sodium", units::substance::sodium, 120, 160); }
Param chloride() { return electrolyte("chloride", "Serum chloride", units::substance::chloride, 85, 120); }
Param bicarbonate() {
    return electrolyte("bicarbonate", "Serum bicarbonate", units::substance::bicarbonate, 6, 40).range(0.5, 80);
}
Param albumin() {
    return num("albumin", "Serum albumin", sym::g_dl).range(0.5, 7).typical(1.5, 5.0).dp(1).alt({sym::g_l});
}
Param glucose(double lo = 60, double hi = 500) {
    return num("glucose", "Serum glucose", sym::mg_dl)
        .range(10, 3000)
        .typical(lo, hi)
        .substance(units::substance::glucose)
        .alt({sym::mmol_l});
}
Param lipid(const char* name, const char* label, const units::Substance& s, double lo, double hi) {
    return num(name, label, sym::mg_dl).range(5, 1000).typical(lo, hi).substance(s).alt({sym::mmol_l});
}

double anion_gap_of(const Inputs& in) { return in.num("sodium") - (in.num("chloride") + in.num("bicarbonate")); }
double albumin_corrected_ag(const Inputs& in) { return anion_gap_of(in) + 2.5 * (4.0 - in.num("albumin")); }

double ratio_denominator(const Inputs& in) {
    const double d = 24.0 - in.num("bicarbonate");
    if (d == 0.0) throw OutOfRange("bicarbonate", "delta ratio is undefined at 24 mmol/L");
    return d;
}

CalcResult anion_gap(const Inputs& in, const EngineMode&) { return CalcResult::numeric(anion_gap_of(in), sym::meq_l); }
CalcResult delta_gap(const Inputs& in, const EngineMode&) {
    return CalcResult::numeric(anion_gap_of(in) - 12.0, sym::meq_l);
}
CalcResult delta_ratio(const Inputs& in, const EngineMode&) {
    return CalcResult::numeric((anion_gap_of(in) - 12.0) / ratio_denominator(in), sym::unitless);
}
CalcResult albumin_corrected_anion_gap(const Inputs& in, const EngineMode&) {
    return CalcResult::numeric(albumin_corrected_ag(in), sym::meq_l).note("anion_gap", anion_gap_of(in));
}
CalcResult albumin_corrected_delta_gap(const Inputs& in, const EngineMode&) {
    return CalcResult::numeric(albumin_corrected_ag(in) - 12.0, sym::meq_l);
}
CalcResult albumin_corrected_delta_ratio(const Inputs& in, const EngineMode&) {
    return CalcResult::numeric((albumin_corrected_ag(in) - 12.0) / ratio_denominator(in), sym::unitless);
}

CalcResult calcium_correction(const Inputs& in, const EngineMode&) {
    return CalcResult::numeric(in.num("calcium") + 0.8 * (4.0 - in.num("albumin")), sym::mg_dl);
}

CalcResult sodium_correction(const Inputs& in, const EngineMode&) {
    return CalcResult::numeric(in.num("sodium") + 0.024 * (in.num("glucose") - 100.0), sym::meq_l);
}

CalcResult serum_osmolality(const Inputs& in, const EngineMode&) {
    const double v = 2.0 * in.num("sodium") + in.num("bun") / 2.8 + in.num("glucose") / 18.0;
    return CalcResult::numeric(v, sym::mosm_kg);
}

// Legacy multiplied mg/dL glucose by the mmol factor instead of dividing.
CalcResult homa_ir(const Inputs& in, const EngineMode& mode) {
    double g = in.num("glucose");
    if (mode.has(Bug::homa_ir_glucose_conversion)) {
        const auto* raw = in.raw("glucose");
        if (raw && raw->unit() == sym::mg_dl) g = raw->value() * 18.016;
    }
    return CalcResult::numeric(in.num("insulin") * g / 22.5, sym::unitless).note("glucose_mmol_l", g);
}

CalcResult ldl(const Inputs& in, const EngineMode&) {
    const double tg = in.num("triglycerides");
    if (tg > 400) throw OutOfRange("triglycerides", "Friedewald estimate is invalid above 400 mg/dL");
    return CalcResult::numeric(in.num("total_cholesterol") - in.num("hdl") - tg / 5.0, sym::mg_dl);
}

CalculatorDef gap_def(std::string id, std::string name, bool with_albumin, units::UnitId unit, ComputeFn fn) {
    CalculatorDef d{
        .id = std::move(id),
        .name = std::move(name),
        .category = Category::equation,
        .params = {sodium(), chloride(), bicarbonate()},
        .result_unit = std::move(unit),
        .citation = "Kraut JA, Madias NE. Serum anion gap: its uses and limitations in clinical medicine. "
                    "Clin J Am Soc Nephrol. 2007;2(1):162-174.",
        .fn = fn,
    };
    if (with_albumin) {
        d.params.push_back(albumin());
        d.citation += " Figge J, et al. Anion gap and hypoalbuminemia. Crit Care Med. 1998;26(11):1807-1810.";
    }
    return d;
}

}  // namespace

void register_chemistry(std::vector<CalculatorDef>& out) {
    out.push_back(gap_def("anion_gap", "Anion Gap", false, sym::meq_l, anion_gap));
    out.push_back(gap_def("delta_gap", "Delta Gap", false, sym::meq_l, delta_gap));
    out.push_back(gap_def("delta_ratio", "Delta Ratio", false, sym::unitless, delta_ratio));
    out.push_back(gap_def("albumin_corrected_anion_gap", "Albumin Corrected Anion Gap", true, sym::meq_l,
                          albumin_corrected_anion_gap));
    out.push_back(gap_def("albumin_corrected_delta_gap", "Albumin Corrected Delta Gap", true, sym::meq_l,
                          albumin_corrected_delta_gap));
    out.push_back(gap_def("albumin_corrected_delta_ratio", "Albumin Corrected Delta Ratio", true, sym::unitless,
                          albumin_corrected_delta_ratio));
    out.push_back({
        .id = "calcium_correction",
        .name = "Calcium Correction for Hypoalbuminemia",
        .category = Category::equation,
        .params = {num("calcium", "Serum calcium", sym::mg_dl)
                       .range(1, 25)
                       .typical(6, 12)
                       .dp(1)
                       .substance(units::substance::calcium)
                       .alt({sym::mmol_l, sym::meq_l}),
                   albumin()},
        .result_unit = sym::mg_dl,
        .citation = "Payne RB, et al. Interpretation of serum calcium in patients with abnormal serum proteins. "
                    "Br Med J. 1973;4(5893):643-646.",
        .fn = calcium_correction,
    });
    out.push_back({
        .id = "sodium_correction",
        .name = "Sodium Correction for Hyperglycemia",
        .category = Category::equation,
        .params = {sodium(), glucose(100, 900)},
        .result_unit = sym::meq_l,
        .citation = "Hillier TA, Abbott RD, Barrett EJ. Hyponatremia: evaluating the correction factor for "
                    "hyperglycemia. Am J Med. 1999;106(4):399-403.",
        .versioned = true,
        .fn = sodium_correction,
    });
    out.push_back({
        .id = "serum_osmolality",
        .name = "Serum Osmolality",
        .category = Category::equation,
        .params = {sodium(),
                   num("bun", "Blood urea nitrogen", sym::mg_dl)
                       .range(1, 300)
                       .typical(5, 100)
                       .substance(units::substance::urea_nitrogen)
                       .alt({sym::mmol_l}),
                   glucose()},
        .result_unit = sym::mosm_kg,
        .citation = "Dorwart WV, Chalmers L. Comparison of methods for calculating serum osmolality from "
                    "chemical concentrations. Clin Chem. 1975;21(2):190-194.",
        .fn = serum_osmolality,
    });
    out.push_back({
        .id = "homa_ir",
        .name = "HOMA-IR (Homeostatic Model Assessment for Insulin Resistance)",
        .category = Category::equation,
        .params = {num("insulin", "Fasting insulin", sym::uiu_ml)
                       .range(0.1, 1000)
                       .typical(2, 60)
                       .dp(1)
                       .substance(units::substance::insulin)
                       .alt({units::UnitId("pmol/L")}),
                   num("glucose", "Fasting glucose", sym::mmol_l)
                       .range(0.5, 170)
                       .typical(3.5, 20)
                       .dp(1)
                       .substance(units::substance::glucose)
                       .alt({sym::mg_dl})},
        .result_unit = sym::unitless,
        .citation = "Matthews DR, et al. Homeostasis model assessment: insulin resistance and beta-cell function "
                    "from fasting plasma glucose and insulin concentrations in man. Diabetologia. 1985;28(7):412-419.",
        .bugs = {Bug::homa_ir_glucose_conversion},
        .fn = homa_ir,
    });
    out.push_back({
        .id = "ldl",
        .name = "LDL Calculated",
        .category = Category::equation,
        .params = {lipid("total_cholesterol", "Total cholesterol", units::substance::cholesterol, 130, 320),
                   lipid("hdl", "HDL cholesterol", units::substance::cholesterol, 25, 90),
                   lipid("triglycerides", "Triglycerides", units::substance::triglycerides, 40, 380)},
        .result_unit = sym::mg_dl,
        .citation = "Friedewald WT, Levy RI, Fredrickson DS. Estimation of the concentration of low-density "
                    "lipoprotein cholesterol in plasma. Clin Chem. 1972;18(6):499-502.",
        .versioned = true,
        .fn = ldl,
    });
}

}  // namespace medcalc::calc
