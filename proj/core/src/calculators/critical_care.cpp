#include "common.hpp"

#include "medcalc/calculators.hpp"

#include <algorithm>
#include <utility>

namespace medcalc::calc {

namespace {

/// Points for the first band whose lower bound `v` reaches; `floor_pts` below all.
int band(double v, std::initializer_list<std::pair<double, int>> bands, int floor_pts) {
    for (const auto& [lo, pts] : bands)
        if (v >= lo) return pts;
    return floor_pts;
}

Param temp_param() {
    return num("temperature", "Temperature", sym::celsius).range(20, 46).typical(34, 41).dp(1).alt({sym::fahrenheit});
}
Param hr_param() { return num("heart_rate", "Heart rate", sym::per_min).range(0, 300).typical(40, 180); }
Param rr_param() { return num("respiratory_rate", "Respiratory rate", sym::per_min).range(0, 80).typical(8, 40); }
Param sbp_param() {
    return num("sbp", "Systolic blood pressure", sym::mmhg).range(30, 300).typical(70, 200).alt({units::UnitId("kPa")});
}
Param dbp_param() {
    return num("dbp", "Diastolic blood pressure", sym::mmhg).range(10, 200).typical(35, 120).alt({units::UnitId("kPa")});
}
Param bun_param() {
    return num("bun", "Blood urea nitrogen", sym::mg_dl)
        .range(1, 300)
        .typical(5, 100)
        .substance(units::substance::urea_nitrogen)
        .alt({sym::mmol_l});
}
Param sodium_param() {
    return num("sodium", "Serum sodium", sym::mmol_l).range(90, 200).typical(115, 165).substance(units::substance::sodium).alt({sym::meq_l});
}
Param creatinine_param() {
    return num("creatinine", "Serum creatinine", sym::mg_dl)
        .range(0.1, 30)
        .typical(0.4, 6)
        .dp(1)
        .substance(units::substance::creatinine)
        .alt({sym::umol_l});
}
Param pao2_param() {
    return num("pao2", "PaO2", sym::mmhg).range(10, 700).typical(40, 400).alt({units::UnitId("kPa")});
}
Param fio2_param() {
    return num("fio2", "FiO2", sym::fraction).range(0.21, 1.0).typical(0.21, 1.0).dp(2).alt({sym::percent}).percent_or_fraction();
}
Param wbc_param() {
    return num("wbc", "White blood cell count", sym::giga_per_l).range(0, 500).typical(0.5, 45).dp(1).alt({sym::per_ul, units::UnitId("×10³/µL")});
}
Param gcs_param() { return num("gcs", "Glasgow Coma Scale", sym::unitless).range(3, 15).typical(3, 15); }

// ---------------------------------------------------------------------------

int gcs_component(const Inputs& in, const char* name, std::initializer_list<const char*> order, bool legacy,
                  CalcResult& r) {
    const auto& v = in.choice(name);
    if (v == "not_testable") {
        if (legacy) return 0;
        r.annotations.push_back(std::string(name) + " not testable; scored as 1");
        return 1;
    }
    int pts = static_cast<int>(order.size());
    for (const char* l : order) {
        if (v == l) return pts;
        --pts;
    }
    return 1;
}

CalcResult gcs(const Inputs& in, const EngineMode& mode) {
    const bool legacy = mode.has(Bug::gcs_not_testable);
    CalcResult r = CalcResult::score(0);
    const int e = gcs_component(in, "eye_response", {"spontaneous", "to_verbal_command", "to_pain", "no_eye_opening"},
                                legacy, r);
    const int v = gcs_component(in, "verbal_response",
                                {"oriented", "confused", "inappropriate_words", "incomprehensible_sounds",
                                 "no_verbal_response"},
                                legacy, r);
    const int m = gcs_component(in, "motor_response",
                                {"obeys_commands", "localizes_pain", "withdraws_from_pain", "flexion_to_pain",
                                 "extension_to_pain", "no_motor_response"},
                                legacy, r);
    r.kind = CalcResult::Score{static_cast<double>(e + v + m)};
    r.note("eye", e).note("verbal", v).note("motor", m);
    return r;
}

CalcResult apache_ii(const Inputs& in, const EngineMode& mode) {
    const double temp = in.num("temperature");
    const double map = (in.num("sbp") + 2.0 * in.num("dbp")) / 3.0;
    const double fio2 = in.num("fio2");

    int pts = 0;
    pts += band(temp, {{41, 4}, {39, 3}, {38.5, 1}, {36, 0}, {34, 1}, {32, 2}, {30, 3}}, 4);
    pts += band(map, {{160, 4}, {130, 3}, {110, 2}, {70, 0}, {50, 2}}, 4);
    pts += band(in.num("heart_rate"), {{180, 4}, {140, 3}, {110, 2}, {70, 0}, {55, 2}, {40, 3}}, 4);
    pts += band(in.num("respiratory_rate"), {{50, 4}, {35, 3}, {25, 1}, {12, 0}, {10, 1}, {6, 2}}, 4);
    if (fio2 >= 0.5) {
        const auto aa = in.opt_num("aa_gradient");
        if (!aa) throw MissingParameter("aa_gradient", "required when FiO2 >= 0.5");
        pts += band(*aa, {{500, 4}, {350, 3}, {200, 2}}, 0);
    } else {
        const double pao2 = in.num("pao2");
        pts += pao2 > 70 ? 0 : band(pao2, {{61, 1}, {55, 3}}, 4);
    }
    pts += band(in.num("ph"), {{7.7, 4}, {7.6, 3}, {7.5, 1}, {7.33, 0}, {7.25, 2}, {7.15, 3}}, 4);
    pts += band(in.num("sodium"), {{180, 4}, {160, 3}, {155, 2}, {150, 1}, {130, 0}, {120, 2}, {111, 3}}, 4);
    pts += band(in.num("potassium"), {{7, 4}, {6, 3}, {5.5, 1}, {3.5, 0}, {3, 1}, {2.5, 2}}, 4);
    const int cr = band(in.num("creatinine"), {{3.5, 4}, {2, 3}, {1.5, 2}, {0.6, 0}}, 2);
    pts += in.flag("acute_renal_failure") ? 2 * cr : cr;
    pts += band(in.num("hematocrit"), {{60, 4}, {50, 2}, {46, 1}, {30, 0}, {20, 2}}, 4);
    pts += band(in.num("wbc"), {{40, 4}, {20, 2}, {15, 1}, {3, 0}, {1, 2}}, 4);
    pts += 15 - static_cast<int>(std::lround(in.num("gcs")));
    const int age_pts = band(in.num("age"), {{75, 6}, {65, 5}, {55, 3}, {45, 2}}, 0);
    pts += age_pts;

    bool chronic = in.flag("organ_failure_immunocompromise");
    if (mode.has(Bug::apache_chronic_health_key)) {
        const auto* v = in.lookup("severe_organ_failure_or_immunocompromise");
        chronic = v && std::holds_alternative<bool>(*v) && std::get<bool>(*v);
    }
    int chronic_pts = 0;
    if (chronic) chronic_pts = in.choice("surgery_type") == "elective_postoperative" ? 2 : 5;
    pts += chronic_pts;

    auto r = CalcResult::score(pts);
    r.note("mean_arterial_pressure", map).note("age_points", age_pts).note("chronic_health_points", chronic_pts);
    return r;
}

CalcResult sofa(const Inputs& in, const EngineMode& mode) {
    const bool legacy = mode.has(Bug::sofa_fio2_vasopressor);
    const double pao2 = in.num("pao2");
    double fio2 = in.num("fio2");
    if (legacy) fio2 = in.raw("fio2")->value();
    const bool vent = in.flag("mechanical_ventilation");
    const double pf = pao2 / fio2;
    int resp;
    if (pf < 100 && vent) resp = 4;
    else if (pf < 200 && vent) resp = 3;
    else if (pf < 300) resp = 2;
    else if (pf < 400) resp = 1;
    else resp = 0;

    const double plt = in.num("platelets");
    const int coag = plt < 20 ? 4 : plt < 50 ? 3 : plt < 100 ? 2 : plt < 150 ? 1 : 0;

    const double bili = in.num("bilirubin");
    const int liver = bili >= 12 ? 4 : bili >= 6 ? 3 : bili >= 2 ? 2 : bili >= 1.2 ? 1 : 0;

    const double dop = in.opt_num("dopamine").value_or(0);
    const double dob = in.opt_num("dobutamine").value_or(0);
    const double epi = in.opt_num("epinephrine").value_or(0);
    const double nor = in.opt_num("norepinephrine").value_or(0);
    const double map = in.num("mean_arterial_pressure");
    int cardio;
    if (legacy) {
        if ((dop > 0 && dop <= 5) || dob > 0) cardio = 2;
        else if (dop > 5 || epi > 0 || nor > 0) cardio = 3;
        else if (dop > 15 || epi > 0.1 || nor > 0.1) cardio = 4;
        else cardio = map < 70 ? 1 : 0;
    } else {
        if (dop > 15 || epi > 0.1 || nor > 0.1) cardio = 4;
        else if (dop > 5 || epi > 0 || nor > 0) cardio = 3;
        else if (dop > 0 || dob > 0) cardio = 2;
        else cardio = map < 70 ? 1 : 0;
    }

    const double g = in.num("gcs");
    const int cns = g < 6 ? 4 : g < 10 ? 3 : g < 13 ? 2 : g < 15 ? 1 : 0;

    const double cr = in.num("creatinine");
    const auto uo = in.opt_num("urine_output");
    int renal = cr >= 5 ? 4 : cr >= 3.5 ? 3 : cr >= 2 ? 2 : cr >= 1.2 ? 1 : 0;
    if (uo) renal = std::max(renal, *uo < 200 ? 4 : *uo < 500 ? 3 : 0);

    auto r = CalcResult::score(resp + coag + liver + cardio + cns + renal);
    r.note("pf_ratio", pf).note("respiration", resp).note("coagulation", coag).note("liver", liver);
    r.note("cardiovascular", cardio).note("cns", cns).note("renal", renal);
    return r;
}

CalcResult sirs_fn(const Inputs& in, const EngineMode& mode) {
    int n = 0;
    if (auto t = in.opt_num("temperature")) n += (*t > 38.0 || *t < 36.0) ? 1 : 0;
    if (auto hr = in.opt_num("heart_rate")) n += *hr > 90 ? 1 : 0;
    {
        const auto rr = in.opt_num("respiratory_rate");
        const auto co2 = in.opt_num("paco2");
        n += ((rr && *rr > 20) || (co2 && *co2 < 32)) ? 1 : 0;
    }
    {
        const auto wbc = in.opt_num("wbc");
        const auto bands = in.opt_num("band_neutrophils");
        bool met = wbc && (*wbc > 12 || *wbc < 4);
        if (!mode.has(Bug::sirs_band_criterion)) met = met || (bands && *bands > 10);
        n += met ? 1 : 0;
    }
    return CalcResult::score(n);
}

CalcResult curb65_fn(const Inputs& in, const EngineMode& mode) {
    if (mode.has(Bug::curb65_broken_path)) throw CalculatorFailure("curb65", "calculator module not found");
    const double bun = in.num("bun");
    const double threshold = mode.has(Bug::curb65_bun_threshold) ? 19.0 : 20.0;
    const int n = count({in.flag("confusion"), bun > threshold, in.num("respiratory_rate") >= 30,
                         in.num("sbp") < 90 || in.num("dbp") <= 60, in.num("age") >= 65});
    return CalcResult::score(n);
}

CalcResult psi(const Inputs& in, const EngineMode&) {
    const double age = in.num("age");
    double pts = in.female() ? age - 10 : age;
    pts += in.flag("nursing_home_resident") ? 10 : 0;
    pts += in.flag("neoplastic_disease") ? 30 : 0;
    pts += in.flag("liver_disease") ? 20 : 0;
    pts += in.flag("chf") ? 10 : 0;
    pts += in.flag("cerebrovascular_disease") ? 10 : 0;
    pts += in.flag("renal_disease") ? 10 : 0;
    pts += in.flag("altered_mental_status") ? 20 : 0;
    pts += in.num("respiratory_rate") >= 30 ? 20 : 0;
    pts += in.num("sbp") < 90 ? 20 : 0;
    const double t = in.num("temperature");
    pts += (t < 35 || t >= 40) ? 15 : 0;
    pts += in.num("heart_rate") >= 125 ? 10 : 0;
    // Labs not drawn score nothing, as in the derivation cohort.
    if (auto v = in.opt_num("ph")) pts += *v < 7.35 ? 30 : 0;
    if (auto v = in.opt_num("bun")) pts += *v >= 30 ? 20 : 0;
    if (auto v = in.opt_num("sodium")) pts += *v < 130 ? 20 : 0;
    if (auto v = in.opt_num("glucose")) pts += *v >= 250 ? 10 : 0;
    if (auto v = in.opt_num("hematocrit")) pts += *v < 30 ? 10 : 0;
    if (auto v = in.opt_num("pao2")) pts += *v < 60 ? 10 : 0;
    pts += in.flag("pleural_effusion") ? 10 : 0;
    return CalcResult::score(std::round(pts));
}

int gbs_bun_points(double bun, bool legacy) {
    if (legacy ? bun > 70 : bun >= 70) return 6;
    if (bun >= 28) return 4;
    if (bun >= 22.4) return 3;
    if (bun >= 18.2) return 2;
    return 0;
}

CalcResult gbs(const Inputs& in, const EngineMode& mode) {
    const int bun_pts = gbs_bun_points(in.num("bun"), mode.has(Bug::gbs_bun_boundary));
    const double hb = in.num("hemoglobin");
    int hb_pts;
    if (in.female()) hb_pts = hb >= 12 ? 0 : hb >= 10 ? 1 : 6;
    else hb_pts = hb >= 13 ? 0 : hb >= 12 ? 1 : hb >= 10 ? 3 : 6;
    const double sbp = in.num("sbp");
    const int sbp_pts = sbp >= 110 ? 0 : sbp >= 100 ? 1 : sbp >= 90 ? 2 : 3;
    int pts = bun_pts + hb_pts + sbp_pts;
    pts += in.num("heart_rate") >= 100 ? 1 : 0;
    pts += in.flag("melena") ? 1 : 0;
    pts += in.flag("syncope") ? 2 : 0;
    pts += in.flag("hepatic_disease") ? 2 : 0;
    pts += in.flag("cardiac_failure") ? 2 : 0;
    auto r = CalcResult::score(pts);
    r.note("bun_points", bun_pts);
    return r;
}

}  // namespace

void register_critical_care(std::vector<CalculatorDef>& out) {
    out.push_back({
        .id = "gcs",
        .name = "Glasgow Coma Scale/Score (GCS)",
        .category = Category::rule,
        .params = {choice("eye_response", "Best eye response",
                          {"spontaneous", "to_verbal_command", "to_pain", "no_eye_opening", "not_testable"}),
                   choice("verbal_response", "Best verbal response",
                          {"oriented", "confused", "inappropriate_words", "incomprehensible_sounds",
                           "no_verbal_response", "not_testable"}),
                   choice("motor_response", "Best motor response",
                          {"obeys_commands", "localizes_pain", "withdraws_from_pain", "flexion_to_pain",
                           "extension_to_pain", "no_motor_response", "not_testable"})},
        .score_range = ScoreRange{3, 15},
        .citation = "Teasdale G, Jennett B. Assessment of coma and impaired consciousness. A practical scale. "
                    "Lancet. 1974;2(7872):81-84.",
        .bugs = {Bug::gcs_not_testable},
        .fn = gcs,
    });
    out.push_back({
        .id = "apache_ii",
        .name = "APACHE II Score",
        .category = Category::rule,
        .params = {age_param(), temp_param(), sbp_param(), dbp_param(), hr_param(), rr_param(), fio2_param(),
                   pao2_param(),
                   num("aa_gradient", "A-a gradient", sym::mmhg).range(0, 700).typical(50, 600).optional(),
                   num("ph", "Arterial pH", sym::unitless).range(6.5, 8.0).typical(7.05, 7.75).dp(2),
                   sodium_param(),
                   num("potassium", "Serum potassium", sym::mmol_l)
                       .range(1, 12)
                       .typical(2.2, 7.5)
                       .dp(1)
                       .substance(units::substance::potassium)
                       .alt({sym::meq_l}),
                   creatinine_param(), flag("acute_renal_failure", "Acute renal failure"),
                   num("hematocrit", "Hematocrit", sym::percent).range(5, 80).typical(15, 65).alt({sym::fraction}),
                   wbc_param(), gcs_param(),
                   flag("organ_failure_immunocompromise",
                        "History of severe organ insufficiency or immunocompromised"),
                   choice("surgery_type", "Admission type",
                          {"nonoperative", "emergency_postoperative", "elective_postoperative"})},
        .score_range = ScoreRange{0, 71},
        .citation = "Knaus WA, Draper EA, Wagner DP, Zimmerman JE. APACHE II: a severity of disease "
                    "classification system. Crit Care Med. 1985;13(10):818-829.",
        .bugs = {Bug::apache_chronic_health_key},
        .fn = apache_ii,
    });
    const auto vaso = [](const char* name, const char* label) {
        return num(name, label, sym::ug_kg_min).range(0, 100).typical(0.01, 20).dp(2).optional();
    };
    out.push_back({
        .id = "sofa",
        .name = "Sequential Organ Failure Assessment (SOFA) Score",
        .category = Category::rule,
        .params = {pao2_param(), fio2_param(), flag("mechanical_ventilation", "On mechanical ventilation or CPAP"),
                   num("platelets", "Platelet count", sym::giga_per_l)
                       .range(1, 2000)
                       .typical(5, 400)
                       .alt({sym::per_ul, units::UnitId("×10³/µL")}),
                   gcs_param(),
                   num("bilirubin", "Total bilirubin", sym::mg_dl)
                       .range(0.1, 60)
                       .typical(0.3, 15)
                       .dp(1)
                       .substance(units::substance::bilirubin)
                       .alt({sym::umol_l}),
                   num("mean_arterial_pressure", "Mean arterial pressure", sym::mmhg).range(10, 250).typical(40, 110),
                   vaso("dopamine", "Dopamine"), vaso("dobutamine", "Dobutamine"),
                   vaso("epinephrine", "Epinephrine").range(0, 10).typical(0.01, 0.5),
                   vaso("norepinephrine", "Norepinephrine").range(0, 10).typical(0.01, 0.5), creatinine_param(),
                   num("urine_output", "Urine output", sym::ml_day).range(0, 10000).typical(50, 3000).optional()},
        .score_range = ScoreRange{0, 24},
        .citation = "Vincent JL, et al. The SOFA (Sepsis-related Organ Failure Assessment) score to describe "
                    "organ dysfunction/failure. Intensive Care Med. 1996;22(7):707-710.",
        .bugs = {Bug::sofa_fio2_vasopressor},
        .fn = sofa,
    });
    out.push_back({
        .id = "sirs",
        .name = "SIRS, Sepsis, and Septic Shock Criteria",
        .category = Category::rule,
        .params = {temp_param().optional(), hr_param().optional(), rr_param().optional(),
                   num("paco2", "PaCO2", sym::mmhg).range(5, 150).typical(20, 60).alt({units::UnitId("kPa")}).optional(),
                   wbc_param().optional(),
                   num("band_neutrophils", "Band neutrophils", sym::percent)
                       .range(0, 100)
                       .typical(0, 25)
                       .alt({sym::fraction})
                       .optional()},
        .score_range = ScoreRange{0, 4},
        .citation = "Bone RC, et al. Definitions for sepsis and organ failure and guidelines for the use of "
                    "innovative therapies in sepsis. Chest. 1992;101(6):1644-1655.",
        .bugs = {Bug::sirs_band_criterion},
        .fn = sirs_fn,
    });
    out.push_back({
        .id = "curb65",
        .name = "CURB-65 Score for Pneumonia Severity",
        .category = Category::rule,
        .params = {flag("confusion", "Confusion"), bun_param(), rr_param(), sbp_param(), dbp_param(), age_param()},
        .score_range = ScoreRange{0, 5},
        .citation = "Lim WS, et al. Defining community acquired pneumonia severity on presentation to hospital. "
                    "Thorax. 2003;58(5):377-382.",
        .bugs = {Bug::curb65_broken_path, Bug::curb65_bun_threshold},
        .fn = curb65_fn,
    });
    out.push_back({
        .id = "psi_port",
        .name = "PSI/PORT Score: Pneumonia Severity Index for CAP",
        .category = Category::rule,
        .params = {age_param().range(18, 120), sex_param(), flag("nursing_home_resident", "Nursing home resident"),
                   flag("neoplastic_disease", "Neoplastic disease"), flag("liver_disease", "Liver disease history"),
                   flag("chf", "Congestive heart failure history"),
                   flag("cerebrovascular_disease", "Cerebrovascular disease history"),
                   flag("renal_disease", "Renal disease history"),
                   flag("altered_mental_status", "Altered mental status"), rr_param(), sbp_param(), temp_param(),
                   hr_param(), num("ph", "Arterial pH", sym::unitless).range(6.5, 8.0).typical(7.1, 7.6).dp(2).optional(),
                   bun_param().optional(), sodium_param().optional(),
                   num("glucose", "Glucose", sym::mg_dl)
                       .range(10, 2000)
                       .typical(60, 400)
                       .substance(units::substance::glucose)
                       .alt({sym::mmol_l})
                       .optional(),
                   num("hematocrit", "Hematocrit", sym::percent).range(5, 80).typical(20, 55).alt({sym::fraction}).optional(),
                   pao2_param().optional(), flag("pleural_effusion", "Pleural effusion on x-ray")},
        .score_range = ScoreRange{0, 415},
        .citation = "Fine MJ, et al. A prediction rule to identify low-risk patients with community-acquired "
                    "pneumonia. N Engl J Med. 1997;336(4):243-250.",
        .fn = psi,
    });
    out.push_back({
        .id = "glasgow_blatchford",
        .name = "Glasgow-Blatchford Bleeding Score (GBS)",
        .category = Category::rule,
        .params = {bun_param(),
                   num("hemoglobin", "Hemoglobin", sym::g_dl)
                       .range(1, 25)
                       .typical(5, 17)
                       .dp(1)
                       .substance(units::substance::hemoglobin)
                       .alt({sym::g_l, sym::mmol_l}),
                   sex_param(), sbp_param(), hr_param(), flag("melena", "Melena present"),
                   flag("syncope", "Presented with syncope"), flag("hepatic_disease", "Hepatic disease history"),
                   flag("cardiac_failure", "Cardiac failure present")},
        .score_range = ScoreRange{0, 23},
        .citation = "Blatchford O, Murray WR, Blatchford M. A risk score to predict need for treatment for "
                    "upper-gastrointestinal haemorrhage. Lancet. 2000;356(9238):1318-1321.",
        .bugs = {Bug::gbs_bun_boundary},
        .fn = gbs,
    });
}

}  // namespace medcalc::calc

namespace medcalc {

CalcResult glasgow_blatchford(const PatientParams& p, const EngineMode& mode) {
    return default_engine().compute("glasgow_blatchford", p, mode);
}
CalcResult curb65(const PatientParams& p, const EngineMode& mode) { return default_engine().compute("curb65", p, mode); }
CalcResult sirs(const PatientParams& p, const EngineMode& mode) { return default_engine().compute("sirs", p, mode); }

}  // namespace medcalc
