#include "common.hpp"

#include "medcalc/calculators.hpp"
#include "medcalc/format.hpp"

namespace medcalc::calc {

namespace {

Param sbp_param() {
    return num("sbp", "Systolic blood pressure", sym::mmhg).range(40, 300).typical(80, 200).alt({units::UnitId("kPa")});
}
Param dbp_param() {
    return num("dbp", "Diastolic blood pressure", sym::mmhg).range(20, 200).typical(40, 120).alt({units::UnitId("kPa")});
}
Param hr_param() {
    return num("heart_rate", "Heart rate", sym::per_min).range(20, 300).typical(45, 150);
}

CalcResult mean_arterial_pressure(const Inputs& in, const EngineMode&) {
    const double sbp = in.num("sbp");
    const double dbp = in.num("dbp");
    return CalcResult::numeric(2.0 / 3.0 * dbp + sbp / 3.0, sym::mmhg);
}

CalcResult cha2ds2_vasc(const Inputs& in, const EngineMode&) {
    const double age = in.num("age");
    int pts = age >= 75 ? 2 : (age >= 65 ? 1 : 0);
    pts += in.female() ? 1 : 0;
    pts += count({in.flag("chf"), in.flag("hypertension"), in.flag("vascular_disease"), in.flag("diabetes")});
    pts += in.flag("stroke_tia_thromboembolism") ? 2 : 0;
    return CalcResult::score(pts);
}

CalcResult has_bled(const Inputs& in, const EngineMode&) {
    int pts = in.num("age") > 65 ? 1 : 0;
    pts += count({in.flag("hypertension"), in.flag("renal_disease"), in.flag("liver_disease"),
                  in.flag("stroke_history"), in.flag("prior_major_bleeding"), in.flag("labile_inr"),
                  in.flag("medication_bleeding_risk"), in.flag("alcohol_use")});
    return CalcResult::score(pts);
}

CalcResult heart(const Inputs& in, const EngineMode& mode) {
    const auto& history = in.choice("history");
    const auto& ecg = in.choice("ecg");
    const auto& trop = in.choice("troponin");
    const double age = in.num("age");

    int pts = history == "highly_suspicious" ? 2 : (history == "moderately_suspicious" ? 1 : 0);
    pts += ecg == "significant_st_deviation" ? 2 : (ecg == "nonspecific_repolarization" ? 1 : 0);
    pts += age >= 65 ? 2 : (age >= 45 ? 1 : 0);
    pts += trop == "over_three_times_normal" ? 2 : (trop == "one_to_three_times_normal" ? 1 : 0);

    const int factors = count({in.flag("hypertension"), in.flag("hypercholesterolemia"), in.flag("diabetes"),
                               in.flag("obesity"), in.flag("smoking"), in.flag("family_history_cvd")});
    const bool athero = in.flag("atherosclerotic_disease");
    int risk;
    if (mode.has(Bug::heart_atherosclerotic_logic)) {
        const int n = factors + (athero ? 1 : 0);
        risk = n >= 3 ? 2 : (n >= 1 ? 1 : 0);
    } else {
        risk = (athero || factors >= 3) ? 2 : (factors >= 1 ? 1 : 0);
    }
    auto r = CalcResult::score(pts + risk);
    r.note("risk_factor_points", risk);
    return r;
}

CalcResult rcri(const Inputs& in, const EngineMode& mode) {
    bool ischemic = in.flag("ischemic");
    if (mode.has(Bug::rcri_ischemic_key_typo)) {
        const auto* v = in.lookup("ischemetic");
        ischemic = v && std::holds_alternative<bool>(*v) && std::get<bool>(*v);
    }
    int pts = count({in.flag("high_risk_surgery"), ischemic, in.flag("chf"), in.flag("cerebrovascular_disease"),
                     in.flag("insulin_treatment")});
    pts += in.num("creatinine") > 2.0 ? 1 : 0;
    return CalcResult::score(pts);
}

// Legacy converts cholesterol with the arguments of the unit converter
// swapped, i.e. as if the supplied value were already in mg/dL.
double cholesterol_mg_dl(const Inputs& in, std::string_view name, const EngineMode& mode) {
    const double v = in.num(name);
    if (!mode.has(Bug::framingham_unit_arg_order)) return v;
    const auto* raw = in.raw(name);
    if (!raw || raw->unit() == sym::mg_dl) return v;
    return in.units().convert_value(raw->value(), sym::mg_dl, raw->unit(), units::substance::cholesterol);
}

// Hard coronary heart disease, 10-year risk (ATP III continuous form).
CalcResult framingham_risk(const Inputs& in, const EngineMode& mode) {
    const double age = in.num("age");
    const double tc = cholesterol_mg_dl(in, "total_cholesterol", mode);
    const double hdl = cholesterol_mg_dl(in, "hdl", mode);
    const double sbp = in.num("sbp");
    const double treated = in.flag("bp_treated") ? 1.0 : 0.0;
    const double smoker = in.flag("smoker") ? 1.0 : 0.0;
    if (!(tc > 0) || !(hdl > 0)) throw OutOfRange("total_cholesterol", "must be positive");

    const double la = std::log(age), lt = std::log(tc), lh = std::log(hdl), ls = std::log(sbp);
    double l, s0;
    if (!in.female()) {
        const double las = std::log(std::min(age, 70.0));
        l = 52.00961 * la + 20.014077 * lt - 0.905964 * lh + 1.305784 * ls + 0.241549 * treated +
            12.096316 * smoker - 4.605038 * la * lt - 2.84367 * las * smoker - 2.93323 * la * la - 172.300168;
        s0 = 0.9402;
    } else {
        const double las = std::log(std::min(age, 78.0));
        l = 31.764001 * la + 22.465206 * lt - 1.187731 * lh + 2.552905 * ls + 0.420251 * treated +
            13.07543 * smoker - 5.060998 * la * lt - 2.996945 * las * smoker - 146.5933061;
        s0 = 0.98767;
    }
    const double risk = 100.0 * (1.0 - std::pow(s0, std::exp(l)));
    return CalcResult::numeric(risk, sym::percent).note("linear_predictor", l);
}

double qtc_value(QtcFormula f, double qt, double rr, const EngineMode& mode) {
    if (!(rr > 0)) throw OutOfRange("rr_interval", "must be positive");
    const double hr = 60.0 / rr;
    switch (f) {
        case QtcFormula::bazett: return qt / std::sqrt(rr);
        case QtcFormula::fridericia: return qt / std::cbrt(rr);
        case QtcFormula::framingham:
            if (mode.has(Bug::qtc_framingham_operator)) {
                const double d = 154.0 * (1.0 - rr);
                if (d == 0.0) throw CalculatorFailure("qtc_framingham", "division by zero");
                return qt / d;
            }
            return qt + 154.0 * (1.0 - rr);
        case QtcFormula::hodges: return qt + 1.75 * (hr - 60.0);
        case QtcFormula::rautaharju: return qt * (120.0 + hr) / 180.0;
    }
    return qt;
}

template <QtcFormula F>
CalcResult qtc_fn(const Inputs& in, const EngineMode& mode) {
    const double rr = 60.0 / in.num("heart_rate");
    return CalcResult::numeric(qtc_value(F, in.num("qt_interval"), rr, mode), sym::ms).note("rr_interval", rr);
}

CalculatorDef qtc_def(std::string id, std::string name, std::string citation, ComputeFn fn) {
    CalculatorDef d{
        .id = std::move(id),
        .name = std::move(name),
        .category = Category::equation,
        .params = {num("qt_interval", "QT interval", sym::ms).range(150, 800).typical(320, 520).alt({sym::s}),
                   hr_param().range(20, 250).typical(45, 140)},
        .result_unit = sym::ms,
        .citation = std::move(citation),
        .fn = fn,
    };
    return d;
}

}  // namespace

void register_cardiology(std::vector<CalculatorDef>& out) {
    out.push_back({
        .id = "mean_arterial_pressure",
        .name = "Mean Arterial Pressure (MAP)",
        .category = Category::equation,
        .params = {sbp_param(), dbp_param()},
        .result_unit = sym::mmhg,
        .citation = "Sesso HD, et al. Systolic and diastolic blood pressure, pulse pressure, and mean arterial "
                    "pressure as predictors of cardiovascular disease risk in men. Hypertension. 2000;36(5):801-807.",
        .fn = mean_arterial_pressure,
    });
    out.push_back({
        .id = "cha2ds2_vasc",
        .name = "CHA2DS2-VASc Score for Atrial Fibrillation Stroke Risk",
        .category = Category::rule,
        .params = {age_param(), sex_param(), flag("chf", "Congestive heart failure history"),
                   flag("hypertension", "Hypertension history"),
                   flag("stroke_tia_thromboembolism", "Stroke, TIA or thromboembolism history"),
                   flag("vascular_disease", "Vascular disease (prior MI, peripheral artery disease, aortic plaque)"),
                   flag("diabetes", "Diabetes mellitus")},
        .score_range = ScoreRange{0, 9},
        .citation = "Lip GY, et al. Refining clinical risk stratification for predicting stroke and "
                    "thromboembolism in atrial fibrillation. Chest. 2010;137(2):263-272.",
        .fn = cha2ds2_vasc,
    });
    out.push_back({
        .id = "has_bled",
        .name = "HAS-BLED Score for Major Bleeding Risk",
        .category = Category::rule,
        .params = {age_param(), flag("hypertension", "Uncontrolled hypertension (SBP > 160 mm Hg)"),
                   flag("renal_disease", "Renal disease (dialysis, transplant, Cr > 2.26 mg/dL)"),
                   flag("liver_disease", "Liver disease (cirrhosis or bilirubin > 2x normal with AST/ALT > 3x)"),
                   flag("stroke_history", "Stroke history"),
                   flag("prior_major_bleeding", "Prior major bleeding or predisposition to bleeding"),
                   flag("labile_inr", "Labile INR"),
                   flag("medication_bleeding_risk", "Medication predisposing to bleeding (antiplatelet, NSAID)"),
                   flag("alcohol_use", "Alcohol use (8 or more drinks per week)")},
        .score_range = ScoreRange{0, 9},
        .citation = "Pisters R, et al. A novel user-friendly score (HAS-BLED) to assess 1-year risk of major "
                    "bleeding in patients with atrial fibrillation. Chest. 2010;138(5):1093-1100.",
        .fn = has_bled,
    });
    out.push_back({
        .id = "heart",
        .name = "HEART Score for Major Cardiac Events",
        .category = Category::rule,
        .params = {choice("history", "History", {"slightly_suspicious", "moderately_suspicious", "highly_suspicious"}),
                   choice("ecg", "EKG", {"normal", "nonspecific_repolarization", "significant_st_deviation"}),
                   age_param(), flag("hypertension", "Hypertension"),
                   flag("hypercholesterolemia", "Hypercholesterolemia"), flag("diabetes", "Diabetes mellitus"),
                   flag("obesity", "Obesity (BMI > 30)"), flag("smoking", "Current or recent smoker"),
                   flag("family_history_cvd", "Family history of cardiovascular disease"),
                   flag("atherosclerotic_disease", "Known atherosclerotic disease (MI, PCI/CABG, stroke/TIA, PAD)"),
                   choice("troponin", "Initial troponin",
                          {"normal", "one_to_three_times_normal", "over_three_times_normal"})},
        .score_range = ScoreRange{0, 10},
        .citation = "Six AJ, Backus BE, Kelder JC. Chest pain in the emergency room: value of the HEART score. "
                    "Neth Heart J. 2008;16(6):191-196.",
        .bugs = {Bug::heart_atherosclerotic_logic},
        .fn = heart,
    });
    out.push_back({
        .id = "rcri",
        .name = "Revised Cardiac Risk Index for Pre-Operative Risk",
        .category = Category::rule,
        .params = {flag("high_risk_surgery", "Elevated-risk surgery (intraperitoneal, intrathoracic, suprainguinal vascular)"),
                   flag("ischemic", "History of ischemic heart disease"),
                   flag("chf", "History of congestive heart failure"),
                   flag("cerebrovascular_disease", "History of cerebrovascular disease"),
                   flag("insulin_treatment", "Pre-operative treatment with insulin"),
                   num("creatinine", "Pre-operative serum creatinine", sym::mg_dl)
                       .range(0.1, 30)
                       .typical(0.5, 4.0)
                       .dp(1)
                       .substance(units::substance::creatinine)
                       .alt({sym::umol_l})},
        .score_range = ScoreRange{0, 6},
        .citation = "Lee TH, et al. Derivation and prospective validation of a simple index for prediction of "
                    "cardiac risk of major noncardiac surgery. Circulation. 1999;100(10):1043-1049.",
        .bugs = {Bug::rcri_ischemic_key_typo},
        .fn = rcri,
    });
    const auto chol = [](const char* name, const char* label, double lo, double hi) {
        return num(name, label, sym::mg_dl)
            .range(10, 1000)
            .typical(lo, hi)
            .substance(units::substance::cholesterol)
            .alt({sym::mmol_l});
    };
    out.push_back({
        .id = "framingham_risk",
        .name = "Framingham Risk Score for Hard Coronary Heart Disease",
        .category = Category::equation,
        .params = {age_param().range(30, 79).typical(30, 79), sex_param(), flag("smoker", "Current smoker"),
                   chol("total_cholesterol", "Total cholesterol", 130, 320), chol("hdl", "HDL cholesterol", 20, 100),
                   sbp_param().range(60, 260).typical(100, 200), flag("bp_treated", "Blood pressure being treated")},
        .result_unit = sym::percent,
        .citation = "Expert Panel on Detection, Evaluation, and Treatment of High Blood Cholesterol in Adults. "
                    "Third Report of the NCEP (ATP III). JAMA. 2001;285(19):2486-2497.",
        .bugs = {Bug::framingham_unit_arg_order},
        .versioned = true,
        .fn = framingham_risk,
    });
    out.push_back(qtc_def("qtc_bazett", "QTc Bazett Calculator",
                          "Bazett HC. An analysis of the time-relations of electrocardiograms. Heart. 1920;7:353-370.",
                          qtc_fn<QtcFormula::bazett>));
    out.push_back(qtc_def("qtc_fridericia", "QTc Fridericia Calculator",
                          "Fridericia LS. Die Systolendauer im Elektrokardiogramm bei normalen Menschen und bei "
                          "Herzkranken. Acta Med Scand. 1920;53:469-486.",
                          qtc_fn<QtcFormula::fridericia>));
    auto fram = qtc_def("qtc_framingham", "QTc Framingham Calculator",
                        "Sagie A, et al. An improved method for adjusting the QT interval for heart rate "
                        "(the Framingham Heart Study). Am J Cardiol. 1992;70(7):797-801.",
                        qtc_fn<QtcFormula::framingham>);
    fram.bugs = {Bug::qtc_framingham_operator};
    out.push_back(std::move(fram));
    out.push_back(qtc_def("qtc_hodges", "QTc Hodges Calculator",
                          "Hodges M, et al. Bazett's QT correction reviewed: evidence that a linear QT correction "
                          "for heart rate is better. J Am Coll Cardiol. 1983;1:694.",
                          qtc_fn<QtcFormula::hodges>));
    out.push_back(qtc_def("qtc_rautaharju", "QTc Rautaharju Calculator",
                          "Rautaharju PM, et al. Sex differences in the evolution of the electrocardiographic QT "
                          "interval with age. Can J Cardiol. 1992;8(7):690-695.",
                          qtc_fn<QtcFormula::rautaharju>));
}

}  // namespace medcalc::calc

namespace medcalc {

CalcResult qtc(QtcFormula formula, const units::Quantity& qt, const units::Quantity& rr_or_hr,
               const EngineMode& mode) {
    const auto& reg = units::clinical_units();
    const double qt_ms = reg.convert_value(qt.value(), qt.unit(), units::sym::ms);
    double rr;
    if (reg.dimension(rr_or_hr.unit()) == units::Dimension::time) {
        rr = reg.convert_value(rr_or_hr.value(), rr_or_hr.unit(), units::sym::s);
    } else {
        const double hr = reg.convert_value(rr_or_hr.value(), rr_or_hr.unit(), units::sym::per_min);
        if (!(hr > 0)) throw OutOfRange("heart_rate", "must be positive");
        rr = 60.0 / hr;
    }
    auto r = CalcResult::numeric(calc::qtc_value(formula, qt_ms, rr, mode), units::sym::ms);
    r.note("rr_interval", rr);
    r.display = format_answer(r, mode.has(Bug::sigdig_off_by_one) ? kAnswerSignificantDigits - 1
                                                                   : kAnswerSignificantDigits);
    return r;
}

}  // namespace medcalc
