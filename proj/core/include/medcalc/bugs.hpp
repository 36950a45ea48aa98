#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

namespace medcalc {

/// Upstream defects that legacy mode can reproduce, one per audit finding.
enum class Bug : std::uint8_t {
    ckd_epi_male_kappa,
    meld_na_instead_of_meld3,
    homa_ir_glucose_conversion,
    child_pugh_bilirubin_mw,
    mme_fentanyl_patch_factor,
    heart_atherosclerotic_logic,
    sirs_band_criterion,
    sofa_fio2_vasopressor,
    gcs_not_testable,
    framingham_unit_arg_order,
    cci_liver_key_typo,
    rcri_ischemic_key_typo,
    mdrd_broken_path,
    curb65_broken_path,
    gbs_bun_boundary,
    curb65_bun_threshold,
    fib4_platelet_scaling,
    steroid_intermediate_rounding,
    sigdig_off_by_one,
    qtc_framingham_operator,
    apache_chronic_health_key,
};

enum class BugCategory { logic_formula, runtime_implementation, threshold_boundary, precision_rounding, ground_truth_mapping };

struct BugInfo {
    Bug id;
    std::string_view key;
    BugCategory category;
    /// Calculator id, or "*" when the bug touches every equation calculator.
    std::string_view calculator;
    std::string_view summary;
};

std::span<const BugInfo> bug_catalog() noexcept;
const BugInfo& info(Bug b) noexcept;
std::string_view to_string(Bug b) noexcept;
std::string_view to_string(BugCategory c) noexcept;
std::optional<Bug> parse_bug(std::string_view key) noexcept;

/// Corrected, or legacy with a set of reproduced bugs. Legacy with an empty
/// set is indistinguishable from corrected.
class EngineMode {
public:
    EngineMode() = default;

    static EngineMode corrected() { return {}; }
    static EngineMode legacy(std::set<Bug> bugs) { return EngineMode(std::move(bugs)); }
    static EngineMode legacy_all();

    /// Parses "corrected", "legacy" (all bugs) or "legacy:a,b,c".
    static EngineMode parse(std::string_view text);

    bool has(Bug b) const { return bugs_.contains(b); }
    bool is_corrected() const noexcept { return bugs_.empty(); }
    const std::set<Bug>& bugs() const noexcept { return bugs_; }

    EngineMode toggled(Bug b) const;
    std::string describe() const;

    friend bool operator==(const EngineMode&, const EngineMode&) = default;

private:
    explicit EngineMode(std::set<Bug> bugs) : bugs_(std::move(bugs)) {}
    std::set<Bug> bugs_;
};

}  // namespace medcalc
