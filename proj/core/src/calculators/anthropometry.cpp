#include "common.hpp"

namespace medcalc::calc {

namespace {

Param weight_param() {
    return num("weight", "Body weight", sym::kg).range(1, 400).typical(40, 140).dp(1).alt({sym::lb, sym::g});
}

Param height_param() {
    return num("height", "Height", sym::cm).range(100, 250).typical(145, 200).alt({sym::in, sym::m});
}

double bmi_of(double kg, double cm) { return kg / ((cm / 100.0) * (cm / 100.0)); }

CalcResult bmi(const Inputs& in, const EngineMode&) {
    return CalcResult::numeric(bmi_of(in.num("weight"), in.num("height")), sym::kg_m2);
}

CalcResult bsa(const Inputs& in, const EngineMode&) {
    return CalcResult::numeric(std::sqrt(in.num("weight") * in.num("height") / 3600.0), sym::m2);
}

CalcResult ideal_body_weight(const Inputs& in, const EngineMode&) {
    return CalcResult::numeric(devine_ibw(in.female(), in.num("height")), sym::kg);
}

CalcResult adjusted_body_weight(const Inputs& in, const EngineMode&) {
    const double ibw = devine_ibw(in.female(), in.num("height"));
    return CalcResult::numeric(ibw + 0.4 * (in.num("weight") - ibw), sym::kg).note("ibw", ibw);
}

CalcResult target_weight(const Inputs& in, const EngineMode&) {
    const double m = in.num("height") / 100.0;
    return CalcResult::numeric(in.num("target_bmi") * m * m, sym::kg);
}

// Holliday-Segar 4-2-1 rule.
CalcResult maintenance_fluids(const Inputs& in, const EngineMode&) {
    const double w = in.num("weight");
    double rate;
    if (w <= 10) rate = 4.0 * w;
    else if (w <= 20) rate = 40.0 + 2.0 * (w - 10.0);
    else rate = 60.0 + (w - 20.0);
    return CalcResult::numeric(rate, sym::ml_hr);
}

}  // namespace

void register_anthropometry(std::vector<CalculatorDef>& out) {
    out.push_back({
        .id = "bmi",
        .name = "Body Mass Index (BMI)",
        .category = Category::equation,
        .params = {weight_param(), height_param()},
        .result_unit = sym::kg_m2,
        .citation = "Keys A, et al. Indices of relative weight and obesity. J Chronic Dis. 1972;25(6):329-343.",
        .fn = bmi,
    });
    out.push_back({
        .id = "bsa",
        .name = "Body Surface Area Calculator",
        .category = Category::equation,
        .params = {weight_param(), height_param()},
        .result_unit = sym::m2,
        .citation = "Mosteller RD. Simplified calculation of body-surface area. N Engl J Med. 1987;317(17):1098.",
        .versioned = true,
        .fn = bsa,
    });
    out.push_back({
        .id = "ideal_body_weight",
        .name = "Ideal Body Weight",
        .category = Category::equation,
        .params = {sex_param(), height_param().range(120, 250)},
        .result_unit = sym::kg,
        .citation = "Devine BJ. Gentamicin therapy. Drug Intell Clin Pharm. 1974;8:650-655.",
        .versioned = true,
        .fn = ideal_body_weight,
    });
    out.push_back({
        .id = "adjusted_body_weight",
        .name = "Adjusted Body Weight",
        .category = Category::equation,
        .params = {sex_param(), weight_param(), height_param().range(120, 250)},
        .result_unit = sym::kg,
        .citation = "Bauer LA. Applied Clinical Pharmacokinetics. 2nd ed. McGraw-Hill; 2008. "
                    "Devine BJ. Drug Intell Clin Pharm. 1974;8:650-655.",
        .fn = adjusted_body_weight,
    });
    out.push_back({
        .id = "target_weight",
        .name = "Target weight",
        .category = Category::equation,
        .params = {num("target_bmi", "Target BMI", sym::kg_m2).range(10, 60).typical(18.5, 30).dp(1),
                   height_param()},
        .result_unit = sym::kg,
        .citation = "WHO Expert Consultation. Appropriate body-mass index for Asian populations. "
                    "Lancet. 2004;363(9403):157-163.",
        .fn = target_weight,
    });
    out.push_back({
        .id = "maintenance_fluids",
        .name = "Maintenance Fluids Calculations",
        .category = Category::equation,
        .params = {num("weight", "Body weight", sym::kg).range(0.5, 400).typical(3, 120).dp(1).alt({sym::lb, sym::g})},
        .result_unit = sym::ml_hr,
        .citation = "Holliday MA, Segar WE. The maintenance need for water in parenteral fluid therapy. "
                    "Pediatrics. 1957;19(5):823-832.",
        .fn = maintenance_fluids,
    });
}

}  // namespace medcalc::calc
