#include "common.hpp"

namespace medcalc::calc {

namespace {

CalcResult centor(const Inputs& in, const EngineMode&) {
    const double age = in.num("age");
    int pts = age < 15 ? 1 : (age >= 45 ? -1 : 0);
    pts += count({in.flag("tonsillar_exudate_or_swelling"), in.flag("tender_swollen_anterior_nodes"),
                  in.num("temperature") > 38.0, in.flag("cough_absent")});
    return CalcResult::score(pts);
}

CalcResult feverpain(const Inputs& in, const EngineMode&) {
    return CalcResult::score(count({in.flag("fever_past_24h"), in.flag("purulence"), in.flag("attend_rapidly"),
                                    in.flag("severely_inflamed_tonsils"), in.flag("no_cough_or_coryza")}));
}

CalcResult wells_pe(const Inputs& in, const EngineMode&) {
    double pts = 0;
    pts += in.flag("clinical_signs_dvt") ? 3.0 : 0;
    pts += in.flag("pe_most_likely") ? 3.0 : 0;
    pts += in.num("heart_rate") > 100 ? 1.5 : 0;
    pts += in.flag("immobilization_or_surgery") ? 1.5 : 0;
    pts += in.flag("previous_pe_or_dvt") ? 1.5 : 0;
    pts += in.flag("hemoptysis") ? 1.0 : 0;
    pts += in.flag("malignancy") ? 1.0 : 0;
    return CalcResult::score(pts);
}

CalcResult wells_dvt(const Inputs& in, const EngineMode&) {
    int pts = count({in.flag("active_cancer"), in.flag("bedridden_or_recent_surgery"), in.flag("calf_swelling_3cm"),
                     in.flag("collateral_superficial_veins"), in.flag("entire_leg_swollen"),
                     in.flag("localized_deep_vein_tenderness"), in.flag("pitting_edema_symptomatic_leg"),
                     in.flag("paralysis_or_recent_cast"), in.flag("previous_dvt")});
    pts -= in.flag("alternative_diagnosis_as_likely") ? 2 : 0;
    return CalcResult::score(pts);
}

CalcResult perc(const Inputs& in, const EngineMode&) {
    return CalcResult::score(count({in.num("age") >= 50, in.num("heart_rate") >= 100,
                                    in.num("oxygen_saturation") < 95, in.flag("unilateral_leg_swelling"),
                                    in.flag("hemoptysis"), in.flag("recent_surgery_or_trauma"),
                                    in.flag("prior_pe_or_dvt"), in.flag("hormone_use")}));
}

struct Weighted {
    const char* name;
    const char* label;
    int points;
};

constexpr Weighted kCapriniFlags[] = {
    {"recent_major_surgery", "Major surgery within the last month", 1},
    {"recent_chf", "Congestive heart failure within the last month", 1},
    {"recent_sepsis", "Sepsis within the last month", 1},
    {"recent_pneumonia", "Pneumonia within the last month", 1},
    {"immobilizing_plaster_cast", "Immobilizing plaster cast within the last month", 2},
    {"hip_pelvis_leg_fracture", "Hip, pelvis or leg fracture within the last month", 5},
    {"stroke", "Stroke within the last month", 5},
    {"multiple_trauma", "Multiple trauma within the last month", 5},
    {"acute_spinal_cord_injury", "Acute spinal cord injury with paralysis within the last month", 5},
    {"varicose_veins", "Varicose veins", 1},
    {"current_swollen_legs", "Current swollen legs", 1},
    {"central_venous_access", "Current central venous access", 2},
    {"history_dvt_pe", "History of DVT or PE", 3},
    {"family_history_thrombosis", "Family history of thrombosis", 3},
    {"factor_v_leiden", "Positive factor V Leiden", 3},
    {"prothrombin_20210a", "Positive prothrombin 20210A", 3},
    {"lupus_anticoagulant", "Positive lupus anticoagulant", 3},
    {"anticardiolipin_antibody", "Elevated anticardiolipin antibody", 3},
    {"elevated_homocysteine", "Elevated serum homocysteine", 3},
    {"heparin_induced_thrombocytopenia", "Heparin-induced thrombocytopenia", 3},
    {"other_thrombophilia", "Other congenital or acquired thrombophilia", 3},
    {"inflammatory_bowel_disease", "History of inflammatory bowel disease", 1},
    {"bmi_over_25", "BMI above 25", 1},
    {"acute_mi", "Acute myocardial infarction", 1},
    {"copd", "Chronic obstructive pulmonary disease", 1},
    {"present_malignancy", "Present or previous malignancy", 2},
    {"other_risk_factors", "Other risk factors", 1},
};

constexpr Weighted kCapriniFemaleFlags[] = {
    {"pregnant_or_postpartum", "Pregnant or postpartum", 1},
    {"recurrent_abortion_or_stillbirth", "History of unexplained stillborn or recurrent spontaneous abortion", 1},
    {"hormone_therapy", "Oral contraceptives or hormone replacement", 1},
};

CalcResult caprini(const Inputs& in, const EngineMode&) {
    const double age = in.num("age");
    int pts = age >= 75 ? 3 : age >= 61 ? 2 : age >= 41 ? 1 : 0;
    const auto& surgery = in.choice("surgery_type");
    if (surgery == "minor") pts += 1;
    else if (surgery == "major" || surgery == "laparoscopic" || surgery == "arthroscopic") pts += 2;
    else if (surgery == "elective_major_lower_extremity_arthroplasty") pts += 5;
    const auto& mobility = in.choice("mobility");
    pts += mobility == "bed_rest" ? 1 : (mobility == "confined_over_72h" ? 2 : 0);
    for (const auto& f : kCapriniFlags) pts += in.flag(f.name) ? f.points : 0;
    if (in.female())
        for (const auto& f : kCapriniFemaleFlags) pts += in.flag(f.name) ? f.points : 0;
    return CalcResult::score(pts);
}

CalcResult charlson(const Inputs& in, const EngineMode& mode) {
    const double age = in.num("age");
    int pts = age >= 80 ? 4 : age >= 70 ? 3 : age >= 60 ? 2 : age >= 50 ? 1 : 0;
    pts += count({in.flag("myocardial_infarction"), in.flag("chf"), in.flag("peripheral_vascular_disease"),
                  in.flag("cerebrovascular_accident_or_tia"), in.flag("dementia"), in.flag("chronic_pulmonary_disease"),
                  in.flag("connective_tissue_disease"), in.flag("peptic_ulcer_disease")});

    std::string liver = in.choice("liver_disease");
    if (mode.has(Bug::cci_liver_key_typo)) {
        const auto* v = in.lookup("liver_diease");
        const auto* s = v ? std::get_if<std::string>(v) : nullptr;
        liver = s ? *s : "none";
    }
    pts += liver == "mild" ? 1 : (liver == "moderate_to_severe" ? 3 : 0);

    const auto& dm = in.choice("diabetes_mellitus");
    pts += dm == "uncomplicated" ? 1 : (dm == "end_organ_damage" ? 2 : 0);
    pts += in.flag("hemiplegia") ? 2 : 0;
    pts += in.flag("moderate_to_severe_ckd") ? 2 : 0;
    const auto& tumor = in.choice("solid_tumor");
    pts += tumor == "localized" ? 2 : (tumor == "metastatic" ? 6 : 0);
    pts += in.flag("leukemia") ? 2 : 0;
    pts += in.flag("lymphoma") ? 2 : 0;
    pts += in.flag("aids") ? 6 : 0;
    return CalcResult::score(pts);
}

std::vector<ParameterSpec> caprini_params() {
    std::vector<ParameterSpec> ps{
        age_param(), sex_param(),
        choice("surgery_type", "Type of surgery",
               {"none", "minor", "major", "laparoscopic", "arthroscopic", "elective_major_lower_extremity_arthroplasty"}),
        choice("mobility", "Mobility", {"normal", "bed_rest", "confined_over_72h"})};
    for (const auto& f : kCapriniFlags) ps.push_back(flag(f.name, f.label));
    for (const auto& f : kCapriniFemaleFlags) ps.push_back(flag(f.name, f.label));
    return ps;
}

Param temperature() {
    return num("temperature", "Temperature", sym::celsius).range(30, 45).typical(36, 40.5).dp(1).alt({sym::fahrenheit});
}
Param heart_rate() { return num("heart_rate", "Heart rate", sym::per_min).range(20, 300).typical(50, 150); }

}  // namespace

void register_infection_and_thrombosis(std::vector<CalculatorDef>& out) {
    out.push_back({
        .id = "centor",
        .name = "Centor Score (Modified/McIsaac) for Strep Pharyngitis",
        .category = Category::rule,
        .params = {age_param().range(3, 120).typical(3, 80), flag("tonsillar_exudate_or_swelling", "Exudate or swelling on tonsils"),
                   flag("tender_swollen_anterior_nodes", "Tender/swollen anterior cervical lymph nodes"), temperature(),
                   flag("cough_absent", "Cough absent")},
        .score_range = ScoreRange{-1, 5},
        .citation = "McIsaac WJ, et al. A clinical score to reduce unnecessary antibiotic use in patients with "
                    "sore throat. CMAJ. 1998;158(1):75-83.",
        .versioned = true,
        .fn = centor,
    });
    out.push_back({
        .id = "feverpain",
        .name = "FeverPAIN Score for Strep Pharyngitis",
        .category = Category::rule,
        .params = {flag("fever_past_24h", "Fever in past 24 hours"), flag("purulence", "Purulence (pharyngeal/tonsillar exudate)"),
                   flag("attend_rapidly", "Attend rapidly (3 days or less)"),
                   flag("severely_inflamed_tonsils", "Severely inflamed tonsils"),
                   flag("no_cough_or_coryza", "No cough or coryza")},
        .score_range = ScoreRange{0, 5},
        .citation = "Little P, et al. Predictors of suppurative complications for acute sore throat in primary "
                    "care. BMJ. 2013;347:f6867.",
        .fn = feverpain,
    });
    out.push_back({
        .id = "caprini",
        .name = "Caprini Score for Venous Thromboembolism (2005)",
        .category = Category::rule,
        .params = caprini_params(),
        .score_range = ScoreRange{0, 77},
        .citation = "Caprini JA. Thrombosis risk assessment as a guide to quality patient care. Dis Mon. "
                    "2005;51(2-3):70-78.",
        .versioned = true,
        .fn = caprini,
    });
    out.push_back({
        .id = "charlson",
        .name = "Charlson Comorbidity Index (CCI)",
        .category = Category::rule,
        .params = {age_param(), flag("myocardial_infarction", "History of myocardial infarction"),
                   flag("chf", "Congestive heart failure"),
                   flag("peripheral_vascular_disease", "Peripheral vascular disease"),
                   flag("cerebrovascular_accident_or_tia", "Cerebrovascular accident or TIA"),
                   flag("dementia", "Dementia"), flag("chronic_pulmonary_disease", "Chronic pulmonary disease"),
                   flag("connective_tissue_disease", "Connective tissue disease"),
                   flag("peptic_ulcer_disease", "Peptic ulcer disease"),
                   choice("liver_disease", "Liver disease", {"none", "mild", "moderate_to_severe"}),
                   choice("diabetes_mellitus", "Diabetes mellitus",
                          {"none_or_diet_controlled", "uncomplicated", "end_organ_damage"}),
                   flag("hemiplegia", "Hemiplegia"), flag("moderate_to_severe_ckd", "Moderate to severe CKD"),
                   choice("solid_tumor", "Solid tumor", {"none", "localized", "metastatic"}),
                   flag("leukemia", "Leukemia"), flag("lymphoma", "Lymphoma"), flag("aids", "AIDS")},
        .score_range = ScoreRange{0, 37},
        .citation = "Charlson ME, et al. A new method of classifying prognostic comorbidity in longitudinal "
                    "studies. J Chronic Dis. 1987;40(5):373-383.",
        .bugs = {Bug::cci_liver_key_typo},
        .versioned = true,
        .fn = charlson,
    });
    out.push_back({
        .id = "wells_pe",
        .name = "Wells' Criteria for Pulmonary Embolism",
        .category = Category::rule,
        .params = {flag("clinical_signs_dvt", "Clinical signs and symptoms of DVT"),
                   flag("pe_most_likely", "PE is the most likely diagnosis"), heart_rate(),
                   flag("immobilization_or_surgery", "Immobilization at least 3 days or surgery in previous 4 weeks"),
                   flag("previous_pe_or_dvt", "Previously diagnosed PE or DVT"), flag("hemoptysis", "Hemoptysis"),
                   flag("malignancy", "Malignancy with treatment within 6 months or palliative")},
        .score_range = ScoreRange{0, 12.5},
        .citation = "Wells PS, et al. Derivation of a simple clinical model to categorize patients probability of "
                    "pulmonary embolism. Thromb Haemost. 2000;83(3):416-420.",
        .fn = wells_pe,
    });
    out.push_back({
        .id = "wells_dvt",
        .name = "Wells' Criteria for DVT",
        .category = Category::rule,
        .params = {flag("active_cancer", "Active cancer"),
                   flag("bedridden_or_recent_surgery", "Bedridden recently over 3 days or major surgery within 12 weeks"),
                   flag("calf_swelling_3cm", "Calf swelling over 3 cm compared to the other leg"),
                   flag("collateral_superficial_veins", "Collateral (nonvaricose) superficial veins present"),
                   flag("entire_leg_swollen", "Entire leg swollen"),
                   flag("localized_deep_vein_tenderness", "Localized tenderness along the deep venous system"),
                   flag("pitting_edema_symptomatic_leg", "Pitting edema confined to symptomatic leg"),
                   flag("paralysis_or_recent_cast", "Paralysis, paresis, or recent cast immobilization"),
                   flag("previous_dvt", "Previously documented DVT"),
                   flag("alternative_diagnosis_as_likely", "Alternative diagnosis to DVT as likely or more likely")},
        .score_range = ScoreRange{-2, 9},
        .citation = "Wells PS, et al. Evaluation of D-dimer in the diagnosis of suspected deep-vein thrombosis. "
                    "N Engl J Med. 2003;349(13):1227-1235.",
        .fn = wells_dvt,
    });
    out.push_back({
        .id = "perc",
        .name = "PERC Rule for Pulmonary Embolism",
        .category = Category::rule,
        .params = {age_param(), heart_rate(),
                   num("oxygen_saturation", "Oxygen saturation", sym::percent).range(30, 100).typical(82, 100).alt({sym::fraction}),
                   flag("unilateral_leg_swelling", "Unilateral leg swelling"), flag("hemoptysis", "Hemoptysis"),
                   flag("recent_surgery_or_trauma", "Recent surgery or trauma (4 weeks or less)"),
                   flag("prior_pe_or_dvt", "Prior PE or DVT"), flag("hormone_use", "Hormone use")},
        .score_range = ScoreRange{0, 8},
        .citation = "Kline JA, et al. Clinical criteria to prevent unnecessary diagnostic testing in emergency "
                    "department patients with suspected pulmonary embolism. J Thromb Haemost. 2004;2(8):1247-1255.",
        .fn = perc,
    });
}

}  // namespace medcalc::calc
