#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace medcalc::units {

enum class Dimension {
    mass,
    length,
    temperature,
    time,
    frequency,
    pressure,
    fraction,
    cell_count,
    concentration,
    enzyme_activity,
    volume,
    flow,
    filtration_rate,
    infusion_rate,
    dose_rate,
    area,
    mass_per_area,
    osmolality,
    morphine_equivalent,
    dimensionless,
};

std::string_view to_string(Dimension d) noexcept;

/// Canonical unit symbol. Only symbols known to a registry are meaningful;
/// construction does not validate.
class UnitId {
public:
    UnitId() = default;
    explicit UnitId(std::string symbol) : symbol_(std::move(symbol)) {}

    const std::string& symbol() const noexcept { return symbol_; }
    bool empty() const noexcept { return symbol_.empty(); }

    friend auto operator<=>(const UnitId&, const UnitId&) = default;

private:
    std::string symbol_;
};

/// Analyte tag that unlocks substance-specific rules (molar mass, valence,
/// international units).
class Substance {
public:
    Substance() = default;
    explicit Substance(std::string name) : name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

    friend auto operator<=>(const Substance&, const Substance&) = default;

private:
    std::string name_;
};

/// A finite real value bound to a unit.
class Quantity {
public:
    /// Throws OutOfRange when `value` is not finite.
    Quantity(double value, UnitId unit);

    double value() const noexcept { return value_; }
    const UnitId& unit() const noexcept { return unit_; }

    friend bool operator==(const Quantity&, const Quantity&) = default;

private:
    double value_;
    UnitId unit_;
};

struct Linear {
    double factor;
};

/// target = (source + offset) * factor
struct Affine {
    double factor;
    double offset;
};

/// Mass/molar concentration bridge between mmol/L and mg/dL:
/// mg/dL = mmol/L * molecular_weight / 10.
struct Molar {
    double molecular_weight;
};

using RuleKind = std::variant<Linear, Affine, Molar>;

struct ConversionRule {
    UnitId from;
    UnitId to;
    RuleKind kind;
    std::optional<Substance> substance;
    std::string source;
};

struct UnitDef {
    UnitId id;
    Dimension dimension;
    std::vector<std::string> aliases;
    std::string description;
};

class UnitRegistry {
public:
    /// Throws ConflictingRule when the symbol or an alias is already taken.
    void add_unit(UnitDef def);

    /// Registers `rule` and its inverse. Re-registering an identical rule is
    /// a no-op; a different transform for the same (pair, substance) throws
    /// ConflictingRule.
    void add_rule(ConversionRule rule);

    /// Resolves a canonical symbol or alias. Throws UnknownUnit.
    UnitId resolve(std::string_view text) const;
    bool knows(std::string_view text) const;

    Dimension dimension(const UnitId& unit) const;

    /// Throws UnknownUnit or DimensionMismatch (no path within one group).
    Quantity convert(const Quantity& q, const UnitId& target,
                     const std::optional<Substance>& substance = std::nullopt) const;
    double convert_value(double value, const UnitId& from, const UnitId& to,
                         const std::optional<Substance>& substance = std::nullopt) const;
    bool convertible(const UnitId& from, const UnitId& to,
                     const std::optional<Substance>& substance = std::nullopt) const;

    /// Parses "2.0 mg/dL", "49kg", "98.6 °F". A bare number takes
    /// `default_unit`; without one it throws ParseError.
    Quantity parse_quantity(std::string_view text,
                            const std::optional<UnitId>& default_unit = std::nullopt) const;

    std::vector<UnitDef> units() const;
    const std::vector<ConversionRule>& rules() const noexcept { return rules_; }
    std::vector<UnitId> units_in(Dimension d) const;

    /// Tab-separated audit table: symbol, dimension, rule, substance, source.
    std::string audit_table() const;

private:
    struct Transform {
        double scale;
        double shift;
    };
    struct Edge {
        UnitId to;
        Transform t;
        std::optional<Substance> substance;
    };

    std::optional<Transform> find_path(const UnitId& from, const UnitId& to,
                                       const std::optional<Substance>& substance) const;
    const UnitDef& def(const UnitId& unit) const;

    std::map<UnitId, UnitDef> units_;
    std::map<std::string, UnitId, std::less<>> lookup_;
    std::map<std::string, UnitId, std::less<>> folded_lookup_;
    std::map<UnitId, std::vector<Edge>> edges_;
    std::vector<ConversionRule> rules_;
};

/// The clinical registry used by the engine. Built once; immutable.
const UnitRegistry& clinical_units();

namespace substance {
inline const Substance bilirubin{"bilirubin"};
inline const Substance creatinine{"creatinine"};
inline const Substance glucose{"glucose"};
inline const Substance urea_nitrogen{"urea_nitrogen"};
inline const Substance cholesterol{"cholesterol"};
inline const Substance triglycerides{"triglycerides"};
inline const Substance calcium{"calcium"};
inline const Substance sodium{"sodium"};
inline const Substance potassium{"potassium"};
inline const Substance chloride{"chloride"};
inline const Substance bicarbonate{"bicarbonate"};
inline const Substance hemoglobin{"hemoglobin"};
inline const Substance insulin{"insulin"};
}  // namespace substance

/// Molecular weights in g/mol.
namespace molar_mass {
inline constexpr double bilirubin = 584.66;
inline constexpr double creatinine = 113.12;
inline constexpr double glucose = 180.16;        // 18.016 mg/dL per mmol/L
inline constexpr double urea_nitrogen = 28.0;    // 2.8 mg/dL per mmol/L urea
inline constexpr double cholesterol = 386.65;
inline constexpr double triglycerides = 885.7;
inline constexpr double calcium = 40.08;
inline constexpr double hemoglobin = 16114.5;    // per haem monomer
}  // namespace molar_mass

/// Common symbols, so call sites do not spell micro signs by hand.
namespace sym {
inline const UnitId kg{"kg"};
inline const UnitId g{"g"};
inline const UnitId mg{"mg"};
inline const UnitId lb{"lb"};
inline const UnitId cm{"cm"};
inline const UnitId m{"m"};
inline const UnitId in{"in"};
inline const UnitId celsius{"°C"};
inline const UnitId fahrenheit{"°F"};
inline const UnitId ms{"ms"};
inline const UnitId s{"s"};
inline const UnitId years{"years"};
inline const UnitId days{"days"};
inline const UnitId per_min{"/min"};
inline const UnitId mmhg{"mm Hg"};
inline const UnitId percent{"%"};
inline const UnitId fraction{"fraction"};
inline const UnitId giga_per_l{"×10⁹/L"};
inline const UnitId per_ul{"/µL"};
inline const UnitId mg_dl{"mg/dL"};
inline const UnitId g_dl{"g/dL"};
inline const UnitId g_l{"g/L"};
inline const UnitId mmol_l{"mmol/L"};
inline const UnitId umol_l{"µmol/L"};
inline const UnitId meq_l{"mEq/L"};
inline const UnitId uiu_ml{"µIU/mL"};
inline const UnitId u_l{"U/L"};
inline const UnitId ml_min{"mL/min"};
inline const UnitId ml_hr{"mL/hr"};
inline const UnitId ml_day{"mL/day"};
inline const UnitId liters{"L"};
inline const UnitId gfr{"mL/min/1.73m²"};
inline const UnitId ug_kg_min{"µg/kg/min"};
inline const UnitId mg_day{"mg/day"};
inline const UnitId ug_hr{"µg/hr"};
inline const UnitId ug_day{"µg/day"};
inline const UnitId m2{"m²"};
inline const UnitId kg_m2{"kg/m²"};
inline const UnitId mosm_kg{"mOsm/kg"};
inline const UnitId mme_day{"MME/day"};
inline const UnitId unitless{"unitless"};
}  // namespace sym

}  // namespace medcalc::units
