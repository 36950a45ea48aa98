#pragma once

#include "medcalc/dataset.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace medcalc {

enum class FailureClass { none, parse_failure, wrong_value, missing_answer };

std::string_view to_string(FailureClass f) noexcept;
std::optional<FailureClass> parse_failure_class(std::string_view text) noexcept;

struct RowOutcome {
    std::string row_id;
    std::string calculator_id;
    Category category = Category::equation;
    std::string given_answer;
    bool correct = false;
    FailureClass failure_class = FailureClass::missing_answer;
};

struct ScoringConfig {
    /// Equation rows whose band collapses to [0, 0] accept |answer| <= this.
    double zero_abs_tolerance = 1e-6;
};

/// Plain decimal with an optional trailing unit ("30.28", "-1.5", "30.28 mL/min").
/// Expressions, exponents and fractions are rejected.
std::optional<double> parse_decimal_answer(std::string_view text);

/// Rule-answer canonical form: trimmed, lowercased, whitespace collapsed,
/// numbers canonicalized ("03" -> "3", "4.50" -> "4.5"), dates as ISO, and
/// "W weeks, D days" tuples as "W weeks, D days".
std::string normalize_rule_answer(std::string_view text);

bool is_missing_answer(std::string_view text);

RowOutcome judge(const DatasetRow& row, std::string_view answer, const ScoringConfig& cfg = {});

struct Tally {
    int correct = 0;
    int total = 0;

    double fraction() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
    Tally& operator+=(const Tally& o) {
        correct += o.correct;
        total += o.total;
        return *this;
    }
};

struct AccuracyReport {
    Tally overall;
    std::map<std::string, Tally> by_calculator;
    std::map<std::string, Tally> by_category;
    std::map<std::string, int> failures;  // failure class -> count

    double fraction() const { return overall.fraction(); }
    nlohmann::json to_json() const;
};

/// Throws EmptyRun.
AccuracyReport accuracy(std::span<const RowOutcome> outcomes);

enum class ResidualCategory { ground_truth_issue, likely_model_error, ambiguous };

std::string_view to_string(ResidualCategory c) noexcept;
std::optional<ResidualCategory> parse_residual_category(std::string_view text) noexcept;

/// Reads an adjudication CSV with header row_id,category. Throws SchemaError/RowError.
std::map<std::string, ResidualCategory> load_adjudication(std::istream& in);

struct BoundsEstimate {
    int base_correct = 0;
    int recovered = 0;
    int gt_issues = 0;
    int ambiguous = 0;
    int likely_model_errors = 0;
    int total = 0;
    double conservative = 0;
    double optimistic = 0;
};

/// Throws InconsistentCounts unless every count is non-negative and
/// base + recovered + residuals == total.
BoundsEstimate composite_bounds(int base_correct, int recovered, std::span<const ResidualCategory> residuals,
                                int total);
/// Count form; likely model errors are whatever remains of the total.
BoundsEstimate composite_bounds(int base_correct, int recovered, int gt_issues, int ambiguous, int total);

/// Table-shaped line: model, prompt, N, correct, accuracy.
std::string format_accuracy_row(std::string_view model, std::string_view prompt, const Tally& t);

}  // namespace medcalc
