#include "common.hpp"

#include "medcalc/calculators.hpp"
#include "medcalc/format.hpp"

#include <algorithm>
#include <cctype>

namespace medcalc::calc {

namespace {

struct Opioid {
    const char* param;
    const char* drug;
    const char* route;
    const units::UnitId* unit;
    double factor;
};

// CDC Clinical Practice Guideline for Prescribing Opioids for Pain, 2022, Table 1.
const Opioid kOpioids[] = {
    {"codeine", "codeine", "oral", &sym::mg_day, 0.15},
    {"fentanyl_buccal", "fentanyl", "buccal", &sym::ug_day, 0.13},
    {"fentanyl_patch", "fentanyl", "transdermal", &sym::ug_hr, 2.4},
    {"hydrocodone", "hydrocodone", "oral", &sym::mg_day, 1.0},
    {"hydromorphone", "hydromorphone", "oral", &sym::mg_day, 5.0},
    {"methadone", "methadone", "oral", &sym::mg_day, 4.7},
    {"morphine", "morphine", "oral", &sym::mg_day, 1.0},
    {"oxycodone", "oxycodone", "oral", &sym::mg_day, 1.5},
    {"oxymorphone", "oxymorphone", "oral", &sym::mg_day, 3.0},
    {"tapentadol", "tapentadol", "oral", &sym::mg_day, 0.4},
    {"tramadol", "tramadol", "oral", &sym::mg_day, 0.2},
};

double factor_of(const Opioid& o, const EngineMode& mode) {
    if (std::string_view(o.param) == "fentanyl_patch" && mode.has(Bug::mme_fentanyl_patch_factor)) return 0.13;
    return o.factor;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string canonical_route(std::string_view route) {
    auto r = lower(route);
    if (r == "po" || r == "by mouth" || r == "oral") return "oral";
    if (r == "patch" || r == "td" || r == "transdermal") return "transdermal";
    if (r == "transmucosal" || r == "buccal" || r == "sublingual") return "buccal";
    return r;
}

const Opioid* find_opioid(std::string_view drug, std::string_view route) {
    const auto d = lower(drug);
    const auto r = canonical_route(route);
    for (const auto& o : kOpioids)
        if (d == o.drug && r == o.route) return &o;
    return nullptr;
}

CalcResult mme(const Inputs& in, const EngineMode& mode) {
    double total = 0;
    auto r = CalcResult::numeric(0, sym::mme_day);
    for (const auto& o : kOpioids) {
        if (const auto dose = in.opt_num(o.param)) {
            const double contrib = *dose * factor_of(o, mode);
            r.note(o.param, contrib);
            total += contrib;
        }
    }
    r.kind = CalcResult::Numeric{total, sym::mme_day};
    return r;
}

struct Steroid {
    const char* name;
    double equivalent_mg;
};

// Equivalent anti-inflammatory doses (Meikle & Tyler 1977; Lexicomp).
constexpr Steroid kSteroids[] = {
    {"betamethasone", 0.75}, {"cortisone", 25.0},     {"dexamethasone", 0.75}, {"hydrocortisone", 20.0},
    {"methylprednisolone", 4.0}, {"prednisolone", 5.0}, {"prednisone", 5.0},    {"triamcinolone", 4.0},
};

double steroid_eq(const std::string& name) {
    for (const auto& s : kSteroids)
        if (name == s.name) return s.equivalent_mg;
    throw UnknownDrug(name);
}

CalcResult steroid_conversion(const Inputs& in, const EngineMode& mode) {
    const double dose = in.num("dose");
    double units_ = dose / steroid_eq(in.choice("source_steroid"));
    if (mode.has(Bug::steroid_intermediate_rounding)) units_ = std::round(units_ * 10.0) / 10.0;
    const double target = units_ * steroid_eq(in.choice("target_steroid"));
    return CalcResult::numeric(target, sym::mg).note("equivalent_units", units_);
}

}  // namespace

void register_pharmacology(std::vector<CalculatorDef>& out) {
    CalculatorDef m{
        .id = "mme",
        .name = "Morphine Milligram Equivalents (MME) Calculator",
        .category = Category::equation,
        .result_unit = sym::mme_day,
        .citation = "Dowell D, et al. CDC Clinical Practice Guideline for Prescribing Opioids for Pain - United "
                    "States, 2022. MMWR Recomm Rep. 2022;71(3):1-95.",
        .bugs = {Bug::mme_fentanyl_patch_factor},
        .versioned = true,
        .fn = mme,
    };
    for (const auto& o : kOpioids) {
        std::string label = std::string(o.drug) + " (" + o.route + ") daily dose";
        label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
        const bool micro = o.unit != &sym::mg_day;
        m.params.push_back(num(o.param, label, *o.unit).range(0, micro ? 10000 : 5000).typical(5, micro ? 200 : 120).optional());
    }
    out.push_back(std::move(m));

    std::vector<const char*> names;
    for (const auto& s : kSteroids) names.push_back(s.name);
    const auto steroid_choice = [&](const char* param, const char* label) {
        Param p(param, ParamKind::categorical, label);
        ParameterSpec spec = p;
        spec.labels.assign(names.begin(), names.end());
        return spec;
    };
    out.push_back({
        .id = "steroid_conversion",
        .name = "Steroid Conversion Calculator",
        .category = Category::equation,
        .params = {steroid_choice("source_steroid", "Current corticosteroid"),
                   num("dose", "Current daily dose", sym::mg).range(0.1, 5000).typical(1, 200).dp(1).alt({sym::g}),
                   steroid_choice("target_steroid", "Target corticosteroid")},
        .result_unit = sym::mg,
        .citation = "Meikle AW, Tyler FH. Potency and duration of action of glucocorticoids. Am J Med. "
                    "1977;63(2):200-207.",
        .bugs = {Bug::steroid_intermediate_rounding},
        .fn = steroid_conversion,
    });
}

}  // namespace medcalc::calc

namespace medcalc {

std::optional<double> mme_factor(std::string_view drug, std::string_view route, const EngineMode& mode) {
    const auto* o = calc::find_opioid(drug, route);
    if (!o) return std::nullopt;
    return calc::factor_of(*o, mode);
}

CalcResult mme_daily(std::span<const OpioidDose> opioids, const EngineMode& mode) {
    const auto& reg = units::clinical_units();
    double total = 0;
    auto r = CalcResult::numeric(0, units::sym::mme_day);
    for (const auto& d : opioids) {
        const auto* o = calc::find_opioid(d.drug, d.route);
        if (!o) throw UnknownDrug(d.drug, "no conversion factor for route '" + d.route + "'");
        const double dose = reg.convert_value(d.dose.value(), d.dose.unit(), *o->unit);
        if (dose < 0) throw OutOfRange(d.drug, "dose must be non-negative");
        const double contrib = dose * calc::factor_of(*o, mode);
        r.note(o->param, contrib);
        total += contrib;
    }
    r.kind = CalcResult::Numeric{total, units::sym::mme_day};
    r.display = format_answer(r, mode.has(Bug::sigdig_off_by_one) ? kAnswerSignificantDigits - 1
                                                                   : kAnswerSignificantDigits);
    return r;
}

}  // namespace medcalc
