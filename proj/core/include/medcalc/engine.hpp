#pragma once

#include "medcalc/bugs.hpp"
#include "medcalc/error.hpp"
#include "medcalc/params.hpp"
#include "medcalc/units.hpp"

#include <nlohmann/json_fwd.hpp>

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace medcalc {

enum class Category { equation, rule };
enum class ParamKind { numeric, boolean, categorical, date };

std::string_view to_string(Category c) noexcept;
std::string_view to_string(ParamKind k) noexcept;
std::optional<Category> parse_category(std::string_view text) noexcept;

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

struct ParameterSpec {
    std::string name;
    ParamKind kind = ParamKind::numeric;
    std::string label;
    units::UnitId unit;
    std::optional<units::Substance> substance;
    bool required = true;
    Interval valid;
    /// Range a realistic vignette draws from; a subset of `valid`.
    Interval typical;
    int decimals = 1;
    std::vector<std::string> labels;
    std::vector<units::UnitId> alternate_units;
    /// Fraction-unit values above 1 are read as percent (FiO2 charting).
    bool percent_or_fraction = false;
};

struct CalcResult {
    struct Numeric {
        double value;
        units::UnitId unit;
    };
    struct Score {
        double points;
    };
    struct Label {
        std::string text;
    };

    std::variant<Numeric, Score, Label> kind;
    std::string display;
    std::vector<std::pair<std::string, double>> intermediates;
    std::vector<std::string> annotations;

    bool is_numeric() const noexcept { return std::holds_alternative<Numeric>(kind); }
    bool is_score() const noexcept { return std::holds_alternative<Score>(kind); }
    bool is_label() const noexcept { return std::holds_alternative<Label>(kind); }

    /// Value of a numeric result or points of a score. Throws for labels.
    double value() const;
    std::optional<double> intermediate(std::string_view name) const;

    static CalcResult numeric(double v, units::UnitId unit) { return {Numeric{v, std::move(unit)}, {}, {}, {}}; }
    static CalcResult score(double points) { return {Score{points}, {}, {}, {}}; }
    static CalcResult label(std::string text) { return {Label{std::move(text)}, {}, {}, {}}; }

    CalcResult& note(std::string name, double v) {
        intermediates.emplace_back(std::move(name), v);
        return *this;
    }
};

class Inputs;
using ComputeFn = CalcResult (*)(const Inputs&, const EngineMode&);

struct ScoreRange {
    double lo;
    double hi;
};

struct CalculatorDef {
    std::string id;
    std::string name;
    Category category = Category::equation;
    std::vector<ParameterSpec> params;
    /// Unit of equation results; empty for rule calculators.
    units::UnitId result_unit;
    /// Closed range of score results; absent for equation and label outputs.
    std::optional<ScoreRange> score_range;
    std::string citation;
    std::vector<Bug> bugs;
    /// Several published versions exist; the spec document must say which.
    bool versioned = false;
    ComputeFn fn = nullptr;

    const ParameterSpec* param(std::string_view name) const;
};

/// Canonical-unit view over supplied parameters, handed to calculator code.
class Inputs {
public:
    Inputs(const CalculatorDef& def, const PatientParams& params, const units::UnitRegistry& reg)
        : def_(def), params_(params), reg_(reg) {}

    /// Value converted to the parameter's canonical unit. Throws MissingParameter.
    double num(std::string_view name) const;
    std::optional<double> opt_num(std::string_view name) const;
    /// Absent booleans are unmet findings.
    bool flag(std::string_view name) const;
    const std::string& choice(std::string_view name) const;
    std::optional<std::string> opt_choice(std::string_view name) const;
    Date date(std::string_view name) const;
    bool has(std::string_view name) const { return params_.contains(name); }

    /// The value as supplied, before conversion.
    const units::Quantity* raw(std::string_view name) const;
    /// Untyped lookup by key; legacy paths use it to reproduce key typos.
    const ParamValue* lookup(std::string_view key) const { return params_.find(key); }

    bool female() const { return choice("sex") == "female"; }

    const CalculatorDef& def() const noexcept { return def_; }
    const units::UnitRegistry& units() const noexcept { return reg_; }

private:
    const ParameterSpec& spec(std::string_view name) const;

    const CalculatorDef& def_;
    const PatientParams& params_;
    const units::UnitRegistry& reg_;
};

class Engine {
public:
    Engine();

    /// Accepts ids with '-' or '_' in any case. Throws UnknownCalculator.
    const CalculatorDef& get(std::string_view id) const;
    const CalculatorDef* find(std::string_view id) const;
    std::span<const CalculatorDef> calculators() const noexcept { return defs_; }

    /// Pure function of (id, params, mode). Throws UnknownCalculator,
    /// MissingParameter, OutOfRange, InvalidParameter, and in legacy mode
    /// CalculatorFailure where the upstream code crashed.
    CalcResult compute(std::string_view id, const PatientParams& params,
                       const EngineMode& mode = EngineMode::corrected()) const;

    /// Checks names, kinds, units and ranges without computing.
    void validate(const CalculatorDef& def, const PatientParams& params) const;

    /// Reads {"age": [51, "years"], "sex": "male", "chf": true, ...}. Bare
    /// numbers take the canonical unit.
    PatientParams params_from_json(const CalculatorDef& def, const nlohmann::json& j) const;
    nlohmann::json params_to_json(const PatientParams& params) const;

    /// Tab-separated: id, name, category, parameters, citation, bugs.
    std::string registry_table() const;
    nlohmann::json registry_json() const;

    const units::UnitRegistry& units() const noexcept { return *units_; }

private:
    const units::UnitRegistry* units_;
    std::vector<CalculatorDef> defs_;
};

/// Shared immutable engine.
const Engine& default_engine();

std::string normalize_calculator_id(std::string_view id);

}  // namespace medcalc
