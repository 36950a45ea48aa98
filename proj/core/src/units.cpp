#include "medcalc/units.hpp"

#include "medcalc/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

namespace medcalc::units {

std::string_view to_string(Dimension d) noexcept {
    switch (d) {
        case Dimension::mass: return "mass";
        case Dimension::length: return "length";
        case Dimension::temperature: return "temperature";
        case Dimension::time: return "time";
        case Dimension::frequency: return "frequency";
        case Dimension::pressure: return "pressure";
        case Dimension::fraction: return "fraction";
        case Dimension::cell_count: return "cell_count";
        case Dimension::concentration: return "concentration";
        case Dimension::enzyme_activity: return "enzyme_activity";
        case Dimension::volume: return "volume";
        case Dimension::flow: return "flow";
        case Dimension::filtration_rate: return "filtration_rate";
        case Dimension::infusion_rate: return "infusion_rate";
        case Dimension::dose_rate: return "dose_rate";
        case Dimension::area: return "area";
        case Dimension::mass_per_area: return "mass_per_area";
        case Dimension::osmolality: return "osmolality";
        case Dimension::morphine_equivalent: return "morphine_equivalent";
        case Dimension::dimensionless: return "dimensionless";
    }
    return "?";
}

Quantity::Quantity(double value, UnitId unit) : value_(value), unit_(std::move(unit)) {
    if (!std::isfinite(value)) throw OutOfRange(unit_.symbol(), "non-finite quantity value");
}

namespace {

// Greek small mu (U+03BC) and the micro sign (U+00B5) look identical; the
// registry stores the micro sign.
std::string normalize_symbol(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        if (i + 1 < text.size() && static_cast<unsigned char>(text[i]) == 0xCE &&
            static_cast<unsigned char>(text[i + 1]) == 0xBC) {
            out += "\xC2\xB5";
            ++i;
        } else {
            out += text[i];
        }
    }
    auto b = out.find_first_not_of(" \t");
    auto e = out.find_last_not_of(" \t");
    if (b == std::string::npos) return {};
    return out.substr(b, e - b + 1);
}

std::string fold(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c == ' ') continue;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

}  // namespace

void UnitRegistry::add_unit(UnitDef def) {
    auto claim = [&](const std::string& raw) {
        const auto key = normalize_symbol(raw);
        if (auto it = lookup_.find(key); it != lookup_.end() && it->second != def.id)
            throw ConflictingRule(key, "symbol already bound to " + it->second.symbol());
        lookup_.emplace(key, def.id);
        folded_lookup_.emplace(fold(key), def.id);
    };
    if (units_.contains(def.id)) throw ConflictingRule(def.id.symbol(), "unit already registered");
    claim(def.id.symbol());
    for (const auto& a : def.aliases) claim(a);
    units_.emplace(def.id, def);
}

void UnitRegistry::add_rule(ConversionRule rule) {
    const auto& from_def = def(rule.from);
    const auto& to_def = def(rule.to);
    if (from_def.dimension != to_def.dimension)
        throw DimensionMismatch(rule.from.symbol() + " -> " + rule.to.symbol(),
                                "rule crosses dimension groups");
    if (rule.from == rule.to) throw ConflictingRule(rule.from.symbol(), "self rule");

    Transform t{};
    if (const auto* lin = std::get_if<Linear>(&rule.kind)) {
        if (!(lin->factor > 0) || !std::isfinite(lin->factor))
            throw InvalidParameter(rule.from.symbol(), "linear factor must be positive");
        t = {lin->factor, 0.0};
    } else if (const auto* aff = std::get_if<Affine>(&rule.kind)) {
        if (aff->factor == 0 || !std::isfinite(aff->factor) || !std::isfinite(aff->offset))
            throw InvalidParameter(rule.from.symbol(), "affine factor must be nonzero");
        t = {aff->factor, aff->factor * aff->offset};
    } else {
        const auto& mol = std::get<Molar>(rule.kind);
        if (!(mol.molecular_weight > 0) || !std::isfinite(mol.molecular_weight))
            throw InvalidParameter(rule.from.symbol(), "molecular weight must be positive");
        if (!rule.substance)
            throw InvalidParameter(rule.from.symbol(), "molar rule requires a substance");
        const double k = mol.molecular_weight / 10.0;
        if (rule.from == sym::mmol_l && rule.to == sym::mg_dl)
            t = {k, 0.0};
        else if (rule.from == sym::mg_dl && rule.to == sym::mmol_l)
            t = {1.0 / k, 0.0};
        else
            throw InvalidParameter(rule.from.symbol(), "molar rules bridge mmol/L and mg/dL only");
    }
    const Transform inverse{1.0 / t.scale, -t.shift / t.scale};

    auto same = [](Transform a, Transform b) {
        return std::abs(a.scale - b.scale) <= 1e-12 * std::abs(a.scale) &&
               std::abs(a.shift - b.shift) <= 1e-12 * std::max(1.0, std::abs(a.shift));
    };
    for (const auto& e : edges_[rule.from]) {
        if (e.to == rule.to && e.substance == rule.substance) {
            if (same(e.t, t)) return;
            throw ConflictingRule(rule.from.symbol() + " -> " + rule.to.symbol(),
                                  "a different rule is already registered");
        }
    }
    edges_[rule.from].push_back({rule.to, t, rule.substance});
    edges_[rule.to].push_back({rule.from, inverse, rule.substance});
    rules_.push_back(std::move(rule));
}

const UnitDef& UnitRegistry::def(const UnitId& unit) const {
    auto it = units_.find(unit);
    if (it == units_.end()) throw UnknownUnit(unit.symbol());
    return it->second;
}

UnitId UnitRegistry::resolve(std::string_view text) const {
    const auto key = normalize_symbol(text);
    if (auto it = lookup_.find(key); it != lookup_.end()) return it->second;
    if (auto it = folded_lookup_.find(fold(key)); it != folded_lookup_.end()) return it->second;
    throw UnknownUnit(std::string(text));
}

bool UnitRegistry::knows(std::string_view text) const {
    const auto key = normalize_symbol(text);
    return lookup_.contains(key) || folded_lookup_.contains(fold(key));
}

Dimension UnitRegistry::dimension(const UnitId& unit) const { return def(unit).dimension; }

std::optional<UnitRegistry::Transform> UnitRegistry::find_path(
    const UnitId& from, const UnitId& to, const std::optional<Substance>& substance) const {
    std::map<UnitId, Transform> seen{{from, {1.0, 0.0}}};
    std::deque<UnitId> queue{from};
    while (!queue.empty()) {
        const UnitId cur = queue.front();
        queue.pop_front();
        const Transform acc = seen.at(cur);
        if (cur == to) return acc;
        auto it = edges_.find(cur);
        if (it == edges_.end()) continue;
        for (const auto& e : it->second) {
            if (e.substance && e.substance != substance) continue;
            if (seen.contains(e.to)) continue;
            seen.emplace(e.to, Transform{e.t.scale * acc.scale, e.t.scale * acc.shift + e.t.shift});
            queue.push_back(e.to);
        }
    }
    return std::nullopt;
}

double UnitRegistry::convert_value(double value, const UnitId& from, const UnitId& to,
                                   const std::optional<Substance>& substance) const {
    const auto& f = def(from);
    const auto& t = def(to);
    if (from == to) return value;
    if (f.dimension != t.dimension)
        throw DimensionMismatch(from.symbol() + " -> " + to.symbol(),
                                fmt::format("{} vs {}", to_string(f.dimension), to_string(t.dimension)));
    auto path = find_path(from, to, substance);
    if (!path)
        throw DimensionMismatch(from.symbol() + " -> " + to.symbol(),
                                substance ? "no conversion path for " + substance->name()
                                          : "no conversion path without a substance");
    return path->scale * value + path->shift;
}

Quantity UnitRegistry::convert(const Quantity& q, const UnitId& target,
                               const std::optional<Substance>& substance) const {
    return Quantity(convert_value(q.value(), q.unit(), target, substance), target);
}

bool UnitRegistry::convertible(const UnitId& from, const UnitId& to,
                               const std::optional<Substance>& substance) const {
    if (!units_.contains(from) || !units_.contains(to)) return false;
    if (from == to) return true;
    if (dimension(from) != dimension(to)) return false;
    return find_path(from, to, substance).has_value();
}

Quantity UnitRegistry::parse_quantity(std::string_view text,
                                      const std::optional<UnitId>& default_unit) const {
    auto b = text.find_first_not_of(" \t");
    if (b == std::string_view::npos) throw ParseError(std::string(text), "empty quantity");
    text.remove_prefix(b);
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    double value = 0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{}) throw ParseError(std::string(text), "expected a number");
    const auto rest = normalize_symbol(std::string_view(ptr, static_cast<size_t>(last - ptr)));
    if (rest.empty()) {
        if (!default_unit) throw ParseError(std::string(text), "missing unit");
        def(*default_unit);
        return Quantity(value, *default_unit);
    }
    return Quantity(value, resolve(rest));
}

std::vector<UnitDef> UnitRegistry::units() const {
    std::vector<UnitDef> out;
    for (const auto& [id, d] : units_) out.push_back(d);
    std::stable_sort(out.begin(), out.end(), [](const UnitDef& a, const UnitDef& b) {
        return static_cast<int>(a.dimension) < static_cast<int>(b.dimension);
    });
    return out;
}

std::vector<UnitId> UnitRegistry::units_in(Dimension d) const {
    std::vector<UnitId> out;
    for (const auto& [id, u] : units_)
        if (u.dimension == d) out.push_back(id);
    return out;
}

std::string UnitRegistry::audit_table() const {
    std::ostringstream os;
    os << "symbol\tdimension\trule\tsubstance\tsource\n";
    for (const auto& u : units()) {
        bool any = false;
        for (const auto& r : rules_) {
            if (r.from != u.id) continue;
            any = true;
            std::string rule;
            if (const auto* lin = std::get_if<Linear>(&r.kind))
                rule = fmt::format("-> {} linear x{:.12g}", r.to.symbol(), lin->factor);
            else if (const auto* aff = std::get_if<Affine>(&r.kind))
                rule = fmt::format("-> {} affine (x{:+.12g})*{:.12g}", r.to.symbol(), aff->offset,
                                   aff->factor);
            else
                rule = fmt::format("-> {} molar MW {:.12g} g/mol", r.to.symbol(),
                                   std::get<Molar>(r.kind).molecular_weight);
            os << u.id.symbol() << '\t' << to_string(u.dimension) << '\t' << rule << '\t'
               << (r.substance ? r.substance->name() : "-") << '\t' << r.source << '\n';
        }
        if (!any)
            os << u.id.symbol() << '\t' << to_string(u.dimension) << "\t-\t-\t" << u.description
               << '\n';
    }
    return os.str();
}

namespace {

UnitRegistry build_clinical_units() {
    UnitRegistry r;
    using D = Dimension;
    auto unit = [&](const char* symbol, D d, std::vector<std::string> aliases,
                    std::string description = {}) {
        r.add_unit({UnitId(symbol), d, std::move(aliases), std::move(description)});
    };
    auto linear = [&](const char* from, const char* to, double f, const char* source,
                      std::optional<Substance> s = std::nullopt) {
        r.add_rule({UnitId(from), UnitId(to), Linear{f}, std::move(s), source});
    };
    auto molar = [&](const Substance& s, double mw, const char* source) {
        r.add_rule({sym::mmol_l, sym::mg_dl, Molar{mw}, s, source});
    };

    unit("kg", D::mass, {"kilogram", "kilograms", "kgs"}, "canonical body mass");
    unit("g", D::mass, {"gram", "grams"});
    unit("mg", D::mass, {"milligram", "milligrams"});
    unit("µg", D::mass, {"ug", "mcg", "microgram", "micrograms"});
    unit("lb", D::mass, {"lbs", "pound", "pounds"});
    unit("oz", D::mass, {"ounce", "ounces"});
    linear("lb", "kg", 0.45359237, "NIST SP 811: avoirdupois pound");
    linear("oz", "lb", 1.0 / 16.0, "NIST SP 811: avoirdupois ounce");
    linear("g", "kg", 1e-3, "SI prefix");
    linear("mg", "g", 1e-3, "SI prefix");
    linear("µg", "mg", 1e-3, "SI prefix");

    unit("cm", D::length, {"centimeter", "centimeters", "centimetre", "centimetres"},
         "canonical height");
    unit("m", D::length, {"meter", "meters", "metre", "metres"});
    unit("mm", D::length, {"millimeter", "millimeters"});
    unit("in", D::length, {"inch", "inches", "\""});
    unit("ft", D::length, {"feet", "foot", "'"});
    linear("in", "cm", 2.54, "NIST SP 811: international inch");
    linear("ft", "in", 12.0, "NIST SP 811: international foot");
    linear("m", "cm", 100.0, "SI prefix");
    linear("mm", "cm", 0.1, "SI prefix");

    unit("°C", D::temperature, {"C", "degC", "deg C", "celsius", "ºC", "° C"}, "canonical temperature");
    unit("°F", D::temperature, {"F", "degF", "deg F", "fahrenheit", "ºF", "° F"});
    unit("K", D::temperature, {"kelvin"});
    r.add_rule({UnitId("°F"), UnitId("°C"), Affine{5.0 / 9.0, -32.0}, std::nullopt,
                "NIST SP 811: degree Fahrenheit"});
    r.add_rule({UnitId("K"), UnitId("°C"), Affine{1.0, -273.15}, std::nullopt, "SI definition"});

    unit("ms", D::time, {"msec", "millisecond", "milliseconds"}, "canonical QT interval");
    unit("s", D::time, {"sec", "second", "seconds"}, "canonical RR interval");
    unit("min", D::time, {"minute", "minutes", "mins"});
    unit("hr", D::time, {"h", "hour", "hours", "hrs"});
    unit("days", D::time, {"day", "d"});
    unit("weeks", D::time, {"week", "wk", "wks"});
    unit("years", D::time, {"year", "yr", "yrs", "y", "yo", "years old", "y/o"}, "canonical age");
    linear("ms", "s", 1e-3, "SI prefix");
    linear("min", "s", 60.0, "SI accepted unit");
    linear("hr", "min", 60.0, "SI accepted unit");
    linear("days", "hr", 24.0, "SI accepted unit");
    linear("weeks", "days", 7.0, "calendar week");
    linear("years", "days", 365.25, "Julian year");

    unit("/min", D::frequency,
         {"bpm", "beats/min", "breaths/min", "per min", "/minute", "min⁻¹", "beats per minute",
          "breaths per minute"},
         "heart and respiratory rate");

    unit("mm Hg", D::pressure, {"mmHg", "torr"}, "canonical pressure");
    unit("kPa", D::pressure, {"kilopascal"});
    unit("cm H2O", D::pressure, {"cmH2O", "cm H₂O"});
    linear("kPa", "mm Hg", 7.500615758, "NIST SP 811: 1 mmHg = 133.322 Pa");
    linear("cm H2O", "mm Hg", 0.73555912, "NIST SP 811: conventional cmH2O");

    unit("fraction", D::fraction, {"frac"}, "canonical proportion");
    unit("%", D::fraction, {"percent", "pct"});
    linear("fraction", "%", 100.0, "definition of percent");

    unit("×10⁹/L", D::cell_count, {"x10^9/L", "10^9/L", "x 10^9/L", "10*9/L", "×10^9/L"},
         "canonical leukocyte and platelet counts");
    unit("×10³/µL", D::cell_count,
         {"x10^3/uL", "10^3/uL", "K/uL", "x10^3/µL", "×10³/mm³", "x10^3/mm3", "10^3/mm3",
          "thousand/uL"});
    unit("/µL", D::cell_count, {"/uL", "cells/uL", "cells/µL", "/mm³", "/mm3", "cells/mm3", "per uL"});
    linear("×10³/µL", "×10⁹/L", 1.0, "1 µL = 1e-6 L");
    linear("/µL", "×10³/µL", 1e-3, "definition");

    unit("mg/dL", D::concentration, {"mg/dl", "mg%"}, "conventional mass concentration");
    unit("g/dL", D::concentration, {"g/dl"});
    unit("g/L", D::concentration, {"g/l"});
    unit("mg/L", D::concentration, {"mg/l"});
    unit("µg/dL", D::concentration, {"ug/dL", "mcg/dL"});
    unit("mmol/L", D::concentration, {"mmol/l", "mM"}, "SI molar concentration");
    unit("µmol/L", D::concentration, {"umol/L", "umol/l", "µmol/l", "µM", "uM"});
    unit("pmol/L", D::concentration, {"pmol/l"});
    unit("mEq/L", D::concentration, {"meq/L", "mEq/l", "mEq"});
    unit("µIU/mL", D::concentration, {"uIU/mL", "µU/mL", "uU/mL", "mIU/L", "mU/L"});
    linear("g/dL", "mg/dL", 1000.0, "SI prefix");
    linear("g/L", "g/dL", 0.1, "1 dL = 0.1 L");
    linear("mg/L", "mg/dL", 0.1, "1 dL = 0.1 L");
    linear("µg/dL", "mg/dL", 1e-3, "SI prefix");
    linear("µmol/L", "mmol/L", 1e-3, "SI prefix");
    linear("pmol/L", "µmol/L", 1e-6, "SI prefix");
    molar(substance::bilirubin, molar_mass::bilirubin, "bilirubin C33H36N4O6, 584.66 g/mol");
    molar(substance::creatinine, molar_mass::creatinine, "creatinine C4H7N3O, 113.12 g/mol (88.4 µmol/L per mg/dL)");
    molar(substance::glucose, molar_mass::glucose, "glucose C6H12O6, 180.16 g/mol (18.016 mg/dL per mmol/L)");
    molar(substance::urea_nitrogen, molar_mass::urea_nitrogen, "urea nitrogen 2 N, 28.0 g/mol (BUN mg/dL = urea mmol/L x 2.8)");
    molar(substance::cholesterol, molar_mass::cholesterol, "cholesterol C27H46O, 386.65 g/mol");
    molar(substance::triglycerides, molar_mass::triglycerides, "triolein reference, 885.7 g/mol");
    molar(substance::calcium, molar_mass::calcium, "calcium, 40.08 g/mol");
    molar(substance::hemoglobin, molar_mass::hemoglobin, "haemoglobin monomer, 16114.5 g/mol");
    linear("mEq/L", "mmol/L", 1.0, "monovalent ion", substance::sodium);
    linear("mEq/L", "mmol/L", 1.0, "monovalent ion", substance::potassium);
    linear("mEq/L", "mmol/L", 1.0, "monovalent ion", substance::chloride);
    linear("mEq/L", "mmol/L", 1.0, "monovalent ion", substance::bicarbonate);
    linear("mEq/L", "mmol/L", 0.5, "divalent ion", substance::calcium);
    linear("µIU/mL", "pmol/L", 6.0, "insulin: 1 µIU/mL = 6 pmol/L", substance::insulin);

    unit("U/L", D::enzyme_activity, {"IU/L", "units/L", "u/l"}, "aminotransferase activity");
    unit("µkat/L", D::enzyme_activity, {"ukat/L"});
    linear("µkat/L", "U/L", 60.0, "1 U = 1 µmol/min = 1/60 µkat");

    unit("L", D::volume, {"liter", "liters", "litre", "litres", "l"});
    unit("mL", D::volume, {"ml", "cc", "milliliter", "milliliters"});
    unit("dL", D::volume, {"dl", "deciliter"});
    linear("mL", "L", 1e-3, "SI prefix");
    linear("dL", "L", 0.1, "SI prefix");

    unit("mL/min", D::flow, {"ml/min"}, "creatinine clearance");
    unit("mL/hr", D::flow, {"mL/h", "ml/hr", "ml/h", "cc/hr"}, "infusion rate");
    unit("mL/day", D::flow, {"mL/24h", "mL/d", "ml/day", "mL/24 hr"}, "urine output");
    unit("L/day", D::flow, {"L/d", "L/24h"});
    linear("mL/hr", "mL/min", 1.0 / 60.0, "definition");
    linear("mL/day", "mL/hr", 1.0 / 24.0, "definition");
    linear("L/day", "mL/day", 1000.0, "SI prefix");

    unit("mL/min/1.73m²", D::filtration_rate,
         {"mL/min/1.73 m2", "mL/min/1.73m2", "mL/min/1.73 m²", "ml/min/1.73m2"},
         "body-surface normalised GFR");

    unit("µg/kg/min", D::infusion_rate, {"mcg/kg/min", "ug/kg/min"}, "vasopressor dosing");

    unit("mg/day", D::dose_rate, {"mg/d", "mg per day", "mg/24h"}, "oral opioid daily dose");
    unit("µg/hr", D::dose_rate, {"mcg/hr", "ug/hr", "µg/h", "mcg/h", "ug/h"}, "transdermal rate");
    unit("µg/day", D::dose_rate, {"mcg/day", "ug/day", "µg/d", "mcg/d"});
    linear("µg/hr", "mg/day", 0.024, "24 h x 1e-3 mg/µg");
    linear("µg/day", "mg/day", 1e-3, "SI prefix");

    unit("m²", D::area, {"m2", "m^2", "sq m"}, "body surface area");
    unit("kg/m²", D::mass_per_area, {"kg/m2", "kg/m^2"}, "body mass index");
    unit("mOsm/kg", D::osmolality, {"mOsm/kg H2O", "mosm/kg", "mOsm/kg H₂O"}, "serum osmolality");
    unit("MME/day", D::morphine_equivalent, {"MME", "mg MME/day", "MME/d"}, "morphine milligram equivalents");
    unit("unitless", D::dimensionless, {"1", "none", "ratio"}, "ratios, INR, pH, indices");
    return r;
}

}  // namespace

const UnitRegistry& clinical_units() {
    static const UnitRegistry registry = build_clinical_units();
    return registry;
}

}  // namespace medcalc::units
