#include "medcalc/engine.hpp"

#include "calculators/common.hpp"
#include "medcalc/format.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

namespace medcalc {

using nlohmann::json;

std::string_view to_string(Category c) noexcept { return c == Category::equation ? "equation" : "rule"; }

std::string_view to_string(ParamKind k) noexcept {
    switch (k) {
        case ParamKind::numeric: return "numeric";
        case ParamKind::boolean: return "boolean";
        case ParamKind::categorical: return "categorical";
        case ParamKind::date: return "date";
    }
    return "?";
}

std::optional<Category> parse_category(std::string_view text) noexcept {
    if (text == "equation") return Category::equation;
    if (text == "rule") return Category::rule;
    return std::nullopt;
}

double CalcResult::value() const {
    if (const auto* n = std::get_if<Numeric>(&kind)) return n->value;
    if (const auto* s = std::get_if<Score>(&kind)) return s->points;
    throw InvalidParameter("result", "label results have no numeric value");
}

std::optional<double> CalcResult::intermediate(std::string_view name) const {
    for (const auto& [k, v] : intermediates)
        if (k == name) return v;
    return std::nullopt;
}

const ParameterSpec* CalculatorDef::param(std::string_view name) const {
    for (const auto& p : params)
        if (p.name == name) return &p;
    return nullptr;
}

std::string normalize_calculator_id(std::string_view id) {
    std::string out;
    out.reserve(id.size());
    for (char c : id) {
        if (c == '-' || c == ' ') out += '_';
        else out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Inputs

const ParameterSpec& Inputs::spec(std::string_view name) const {
    const auto* s = def_.param(name);
    if (!s) throw std::logic_error(fmt::format("{} reads undeclared parameter {}", def_.id, name));
    return *s;
}

namespace {

double canonical_value(const units::UnitRegistry& reg, const ParameterSpec& s, const units::Quantity& q) {
    double v = reg.convert_value(q.value(), q.unit(), s.unit, s.substance);
    if (s.percent_or_fraction && s.unit == units::sym::fraction && v > 1.0) v /= 100.0;
    return v;
}

}  // namespace

std::optional<double> Inputs::opt_num(std::string_view name) const {
    const auto& s = spec(name);
    const auto* v = params_.find(name);
    if (!v) return std::nullopt;
    const auto* q = std::get_if<units::Quantity>(v);
    if (!q) throw InvalidParameter(std::string(name), "expected a quantity");
    return canonical_value(reg_, s, *q);
}

double Inputs::num(std::string_view name) const {
    auto v = opt_num(name);
    if (!v) throw MissingParameter(std::string(name));
    return *v;
}

bool Inputs::flag(std::string_view name) const {
    spec(name);
    const auto* v = params_.find(name);
    if (!v) return false;
    const auto* b = std::get_if<bool>(v);
    if (!b) throw InvalidParameter(std::string(name), "expected a boolean");
    return *b;
}

std::optional<std::string> Inputs::opt_choice(std::string_view name) const {
    spec(name);
    const auto* v = params_.find(name);
    if (!v) return std::nullopt;
    const auto* s = std::get_if<std::string>(v);
    if (!s) throw InvalidParameter(std::string(name), "expected a label");
    return *s;
}

const std::string& Inputs::choice(std::string_view name) const {
    spec(name);
    const auto* v = params_.find(name);
    if (!v) throw MissingParameter(std::string(name));
    const auto* s = std::get_if<std::string>(v);
    if (!s) throw InvalidParameter(std::string(name), "expected a label");
    return *s;
}

Date Inputs::date(std::string_view name) const {
    spec(name);
    const auto* v = params_.find(name);
    if (!v) throw MissingParameter(std::string(name));
    const auto* d = std::get_if<Date>(v);
    if (!d) throw InvalidParameter(std::string(name), "expected a date");
    return *d;
}

const units::Quantity* Inputs::raw(std::string_view name) const {
    const auto* v = params_.find(name);
    return v ? std::get_if<units::Quantity>(v) : nullptr;
}

// ---------------------------------------------------------------------------
// Engine

Engine::Engine() : units_(&units::clinical_units()) {
    calc::register_renal(defs_);
    calc::register_anthropometry(defs_);
    calc::register_cardiology(defs_);
    calc::register_hepatology(defs_);
    calc::register_critical_care(defs_);
    calc::register_chemistry(defs_);
    calc::register_infection_and_thrombosis(defs_);
    calc::register_pharmacology(defs_);
    calc::register_obstetrics(defs_);
    std::sort(defs_.begin(), defs_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    // The display rounding defect touches every numeric answer.
    for (auto& d : defs_)
        if (d.category == Category::equation) d.bugs.push_back(Bug::sigdig_off_by_one);

    std::set<std::string> ids;
    for (const auto& d : defs_) {
        if (!ids.insert(d.id).second) throw std::logic_error("duplicate calculator id " + d.id);
        std::set<std::string> names;
        for (const auto& p : d.params) {
            if (!names.insert(p.name).second)
                throw std::logic_error(fmt::format("{}: duplicate parameter {}", d.id, p.name));
            if (p.kind == ParamKind::numeric) {
                units_->dimension(p.unit);
                for (const auto& alt : p.alternate_units)
                    if (!units_->convertible(alt, p.unit, p.substance))
                        throw std::logic_error(fmt::format("{}.{}: {} not convertible", d.id, p.name, alt.symbol()));
            }
        }
        if (d.category == Category::equation && d.result_unit.empty())
            throw std::logic_error(d.id + ": equation calculator without result unit");
    }
}

const CalculatorDef* Engine::find(std::string_view id) const {
    const auto key = normalize_calculator_id(id);
    auto it = std::lower_bound(defs_.begin(), defs_.end(), key,
                               [](const CalculatorDef& d, const std::string& k) { return d.id < k; });
    return (it != defs_.end() && it->id == key) ? &*it : nullptr;
}

const CalculatorDef& Engine::get(std::string_view id) const {
    if (const auto* d = find(id)) return *d;
    throw UnknownCalculator(std::string(id));
}

void Engine::validate(const CalculatorDef& def, const PatientParams& params) const {
    for (const auto& [name, value] : params) {
        const auto* s = def.param(name);
        if (!s) throw InvalidParameter(name, "not a parameter of " + def.id);
        switch (s->kind) {
            case ParamKind::numeric: {
                const auto* q = std::get_if<units::Quantity>(&value);
                if (!q) throw InvalidParameter(name, "expected a quantity");
                const double v = canonical_value(*units_, *s, *q);
                if (!s->valid.contains(v))
                    throw OutOfRange(name, fmt::format("{:g} {} outside [{:g}, {:g}]", v, s->unit.symbol(),
                                                       s->valid.lo, s->valid.hi));
                break;
            }
            case ParamKind::boolean:
                if (!std::holds_alternative<bool>(value)) throw InvalidParameter(name, "expected a boolean");
                break;
            case ParamKind::categorical: {
                const auto* l = std::get_if<std::string>(&value);
                if (!l) throw InvalidParameter(name, "expected a label");
                if (std::find(s->labels.begin(), s->labels.end(), *l) == s->labels.end())
                    throw OutOfRange(name, "'" + *l + "' is not a permitted label");
                break;
            }
            case ParamKind::date:
                if (!std::holds_alternative<Date>(value)) throw InvalidParameter(name, "expected a date");
                break;
        }
    }
    for (const auto& s : def.params)
        if (s.required && !params.contains(s.name)) throw MissingParameter(s.name);
}

CalcResult Engine::compute(std::string_view id, const PatientParams& params, const EngineMode& mode) const {
    const auto& def = get(id);
    validate(def, params);
    Inputs in(def, params, *units_);
    CalcResult r = def.fn(in, mode);
    if (r.is_numeric() || r.is_score()) {
        if (!std::isfinite(r.value())) throw OutOfRange("result", def.id + " produced a non-finite value");
    }
    if (mode.is_corrected() && r.is_score() && def.score_range) {
        const double p = r.value();
        if (p < def.score_range->lo || p > def.score_range->hi)
            throw std::logic_error(fmt::format("{}: score {} outside documented range", def.id, p));
    }
    r.display = format_answer(r, mode.has(Bug::sigdig_off_by_one) ? kAnswerSignificantDigits - 1
                                                                   : kAnswerSignificantDigits);
    return r;
}

namespace {

std::string to_label(std::string s) {
    std::string out;
    for (char c : s) {
        if (c == ' ' || c == '-') out += '_';
        else out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    while (!out.empty() && out.front() == '_') out.erase(out.begin());
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

bool to_bool(const json& v, const std::string& name) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return v.get<double>() != 0.0;
    if (v.is_string()) {
        const auto s = to_label(v.get<std::string>());
        if (s == "true" || s == "yes" || s == "present" || s == "1") return true;
        if (s == "false" || s == "no" || s == "absent" || s == "0") return false;
    }
    throw InvalidParameter(name, "expected a boolean");
}

}  // namespace

PatientParams Engine::params_from_json(const CalculatorDef& def, const json& j) const {
    if (!j.is_object()) throw InvalidParameter("parameters", "expected an object");
    PatientParams out;
    for (const auto& [name, v] : j.items()) {
        if (v.is_null()) continue;
        const auto* s = def.param(name);
        if (!s) throw InvalidParameter(name, "not a parameter of " + def.id);
        switch (s->kind) {
            case ParamKind::numeric:
                if (v.is_number()) {
                    out.set(name, units::Quantity(v.get<double>(), s->unit));
                } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_string()) {
                    out.set(name, units::Quantity(v[0].get<double>(), units_->resolve(v[1].get<std::string>())));
                } else if (v.is_string()) {
                    out.set(name, units_->parse_quantity(v.get<std::string>(), s->unit));
                } else {
                    throw InvalidParameter(name, "expected a number or [value, unit]");
                }
                break;
            case ParamKind::boolean: out.set(name, to_bool(v, name)); break;
            case ParamKind::categorical:
                if (!v.is_string()) throw InvalidParameter(name, "expected a label");
                out.set(name, to_label(v.get<std::string>()));
                break;
            case ParamKind::date:
                if (!v.is_string()) throw InvalidParameter(name, "expected a date string");
                out.set(name, Date::parse(v.get<std::string>()));
                break;
        }
    }
    return out;
}

json Engine::params_to_json(const PatientParams& params) const {
    json j = json::object();
    for (const auto& [name, value] : params) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, units::Quantity>)
                    j[name] = json::array({v.value(), v.unit().symbol()});
                else if constexpr (std::is_same_v<T, Date>)
                    j[name] = v.iso();
                else
                    j[name] = v;
            },
            value);
    }
    return j;
}

namespace {

std::string describe_param(const ParameterSpec& p) {
    std::string s = p.name + ":" + std::string(to_string(p.kind));
    if (p.kind == ParamKind::numeric) s += "[" + p.unit.symbol() + "]";
    if (p.kind == ParamKind::categorical) {
        s += "{";
        for (size_t i = 0; i < p.labels.size(); ++i) s += (i ? "|" : "") + p.labels[i];
        s += "}";
    }
    if (!p.required) s += "?";
    return s;
}

std::vector<std::string> bug_keys(const CalculatorDef& d) {
    std::vector<std::string> out;
    for (auto b : d.bugs) out.emplace_back(to_string(b));
    return out;
}

}  // namespace

std::string Engine::registry_table() const {
    std::ostringstream os;
    os << "id\tname\tcategory\tparameters\tcitation\tbugs\n";
    for (const auto& d : defs_) {
        os << d.id << '\t' << d.name << '\t' << to_string(d.category) << '\t';
        for (size_t i = 0; i < d.params.size(); ++i) os << (i ? "; " : "") << describe_param(d.params[i]);
        os << '\t' << d.citation << '\t';
        const auto keys = bug_keys(d);
        for (size_t i = 0; i < keys.size(); ++i) os << (i ? "," : "") << keys[i];
        os << '\n';
    }
    return os.str();
}

json Engine::registry_json() const {
    json out = json::array();
    for (const auto& d : defs_) {
        json params = json::array();
        for (const auto& p : d.params) {
            json jp{{"name", p.name}, {"kind", to_string(p.kind)}, {"label", p.label}, {"required", p.required}};
            if (p.kind == ParamKind::numeric) {
                jp["unit"] = p.unit.symbol();
                jp["valid"] = {p.valid.lo, p.valid.hi};
                if (p.substance) jp["substance"] = p.substance->name();
                if (!p.alternate_units.empty()) {
                    jp["alternate_units"] = json::array();
                    for (const auto& u : p.alternate_units) jp["alternate_units"].push_back(u.symbol());
                }
            }
            if (p.kind == ParamKind::categorical) jp["labels"] = p.labels;
            params.push_back(std::move(jp));
        }
        json jd{{"id", d.id},          {"name", d.name},         {"category", to_string(d.category)},
                {"parameters", params}, {"citation", d.citation}, {"bugs", bug_keys(d)}};
        if (!d.result_unit.empty()) jd["result_unit"] = d.result_unit.symbol();
        if (d.versioned) jd["versioned"] = true;
        if (d.score_range) jd["score_range"] = {d.score_range->lo, d.score_range->hi};
        out.push_back(std::move(jd));
    }
    return out;
}

const Engine& default_engine() {
    static const Engine engine;
    return engine;
}

}  // namespace medcalc
