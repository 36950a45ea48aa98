#include "medcalc/bugs.hpp"

#include "medcalc/error.hpp"

#include <array>

namespace medcalc {

namespace {

using C = BugCategory;

constexpr std::array kCatalog{
    BugInfo{Bug::ckd_epi_male_kappa, "ckd_epi_male_kappa", C::logic_formula, "ckd_epi_2021",
            "male kappa 0.7 instead of 0.9"},
    BugInfo{Bug::meld_na_instead_of_meld3, "meld_na_instead_of_meld3", C::logic_formula, "meld_3_0",
            "computes MELD-Na (2016 UNOS) instead of MELD 3.0"},
    BugInfo{Bug::homa_ir_glucose_conversion, "homa_ir_glucose_conversion", C::logic_formula, "homa_ir",
            "glucose mg/dL multiplied by 18.016 instead of divided"},
    BugInfo{Bug::child_pugh_bilirubin_mw, "child_pugh_bilirubin_mw", C::logic_formula, "child_pugh",
            "bilirubin molar mass 548.66 instead of 584.66"},
    BugInfo{Bug::mme_fentanyl_patch_factor, "mme_fentanyl_patch_factor", C::logic_formula, "mme",
            "transdermal fentanyl factor 0.13 instead of 2.4 per µg/hr"},
    BugInfo{Bug::heart_atherosclerotic_logic, "heart_atherosclerotic_logic", C::logic_formula, "heart",
            "known atherosclerotic disease counted as one risk factor instead of 2 points"},
    BugInfo{Bug::sirs_band_criterion, "sirs_band_criterion", C::logic_formula, "sirs",
            "band neutrophils > 10% not counted toward the WBC criterion"},
    BugInfo{Bug::sofa_fio2_vasopressor, "sofa_fio2_vasopressor", C::logic_formula, "sofa",
            "FiO2 percent used as a fraction; vasopressor bands tested low-to-high"},
    BugInfo{Bug::gcs_not_testable, "gcs_not_testable", C::logic_formula, "gcs",
            "'not testable' components score 0 instead of 1"},
    BugInfo{Bug::framingham_unit_arg_order, "framingham_unit_arg_order", C::runtime_implementation,
            "framingham_risk", "cholesterol unit conversion called with source and target swapped"},
    BugInfo{Bug::cci_liver_key_typo, "cci_liver_key_typo", C::runtime_implementation, "charlson",
            "reads 'liver_diease', so liver disease never scores"},
    BugInfo{Bug::rcri_ischemic_key_typo, "rcri_ischemic_key_typo", C::runtime_implementation, "rcri",
            "reads 'ischemetic', so ischemic heart disease never scores"},
    BugInfo{Bug::mdrd_broken_path, "mdrd_broken_path", C::runtime_implementation, "mdrd",
            "calculator module fails to load (broken file path)"},
    BugInfo{Bug::curb65_broken_path, "curb65_broken_path", C::runtime_implementation, "curb65",
            "calculator module fails to load (broken file path)"},
    BugInfo{Bug::gbs_bun_boundary, "gbs_bun_boundary", C::threshold_boundary, "glasgow_blatchford",
            "BUN of exactly 70 mg/dL scores 4 instead of 6"},
    BugInfo{Bug::curb65_bun_threshold, "curb65_bun_threshold", C::threshold_boundary, "curb65",
            "urea criterion BUN > 19 instead of > 20 mg/dL"},
    BugInfo{Bug::fib4_platelet_scaling, "fib4_platelet_scaling", C::threshold_boundary, "fib4",
            "platelets used per µL instead of 10^9/L"},
    BugInfo{Bug::steroid_intermediate_rounding, "steroid_intermediate_rounding", C::precision_rounding,
            "steroid_conversion", "equivalent-dose intermediate rounded to 1 decimal"},
    BugInfo{Bug::sigdig_off_by_one, "sigdig_off_by_one", C::precision_rounding, "*",
            "answers rounded to one significant digit too few"},
    BugInfo{Bug::qtc_framingham_operator, "qtc_framingham_operator", C::precision_rounding,
            "qtc_framingham", "QT divided by 154(1-RR) instead of added"},
    BugInfo{Bug::apache_chronic_health_key, "apache_chronic_health_key", C::ground_truth_mapping,
            "apache_ii", "reads 'severe_organ_failure_or_immunocompromise', so chronic health points never apply"},
};

}  // namespace

std::span<const BugInfo> bug_catalog() noexcept { return kCatalog; }

const BugInfo& info(Bug b) noexcept { return kCatalog[static_cast<size_t>(b)]; }

std::string_view to_string(Bug b) noexcept { return info(b).key; }

std::string_view to_string(BugCategory c) noexcept {
    switch (c) {
        case C::logic_formula: return "logic_formula";
        case C::runtime_implementation: return "runtime_implementation";
        case C::threshold_boundary: return "threshold_boundary";
        case C::precision_rounding: return "precision_rounding";
        case C::ground_truth_mapping: return "ground_truth_mapping";
    }
    return "?";
}

std::optional<Bug> parse_bug(std::string_view key) noexcept {
    for (const auto& b : kCatalog)
        if (b.key == key) return b.id;
    return std::nullopt;
}

EngineMode EngineMode::legacy_all() {
    std::set<Bug> all;
    for (const auto& b : kCatalog) all.insert(b.id);
    return EngineMode(std::move(all));
}

EngineMode EngineMode::parse(std::string_view text) {
    if (text == "corrected") return corrected();
    if (text == "legacy") return legacy_all();
    constexpr std::string_view prefix = "legacy:";
    if (!text.starts_with(prefix)) throw ConfigError(std::string(text), "expected corrected, legacy or legacy:<bug,...>");
    text.remove_prefix(prefix.size());
    std::set<Bug> bugs;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto key = text.substr(0, comma);
        if (!key.empty()) {
            auto b = parse_bug(key);
            if (!b) throw ConfigError(std::string(key), "unknown bug identifier");
            bugs.insert(*b);
        }
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return legacy(std::move(bugs));
}

EngineMode EngineMode::toggled(Bug b) const {
    auto bugs = bugs_;
    if (!bugs.erase(b)) bugs.insert(b);
    return EngineMode(std::move(bugs));
}

std::string EngineMode::describe() const {
    if (bugs_.empty()) return "corrected";
    if (bugs_.size() == kCatalog.size()) return "legacy";
    std::string out = "legacy:";
    bool first = true;
    for (auto b : bugs_) {
        if (!first) out += ',';
        out += to_string(b);
        first = false;
    }
    return out;
}

}  // namespace medcalc
