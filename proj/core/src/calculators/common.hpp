#pragma once

// Internal helpers shared by the calculator translation units.

#include "medcalc/engine.hpp"
#include "medcalc/error.hpp"

#include <cmath>
#include <initializer_list>
#include <string>
#include <vector>

namespace medcalc::calc {

namespace sym = units::sym;

class Param {
public:
    Param(std::string name, ParamKind kind, std::string label) {
        spec_.name = std::move(name);
        spec_.kind = kind;
        spec_.label = std::move(label);
        spec_.required = kind != ParamKind::boolean;
        spec_.decimals = 0;
    }

    Param& unit(units::UnitId u) { spec_.unit = std::move(u); return *this; }
    Param& range(double lo, double hi) {
        spec_.valid = {lo, hi};
        if (!typical_set_) spec_.typical = {lo, hi};
        return *this;
    }
    Param& typical(double lo, double hi) { spec_.typical = {lo, hi}; typical_set_ = true; return *this; }
    Param& dp(int decimals) { spec_.decimals = decimals; return *this; }
    Param& substance(const units::Substance& s) { spec_.substance = s; return *this; }
    Param& alt(std::initializer_list<units::UnitId> us) { spec_.alternate_units = us; return *this; }
    Param& optional() { spec_.required = false; return *this; }
    Param& required() { spec_.required = true; return *this; }
    Param& labels(std::initializer_list<const char*> ls) {
        spec_.labels.assign(ls.begin(), ls.end());
        return *this;
    }
    Param& percent_or_fraction() { spec_.percent_or_fraction = true; return *this; }

    operator ParameterSpec() const { return spec_; }

private:
    ParameterSpec spec_;
    bool typical_set_ = false;
};

inline Param num(std::string name, std::string label, units::UnitId unit) {
    Param p(std::move(name), ParamKind::numeric, std::move(label));
    p.unit(std::move(unit));
    return p;
}
inline Param flag(std::string name, std::string label) {
    return Param(std::move(name), ParamKind::boolean, std::move(label));
}
inline Param choice(std::string name, std::string label, std::initializer_list<const char*> ls) {
    Param p(std::move(name), ParamKind::categorical, std::move(label));
    p.labels(ls);
    return p;
}
inline Param date(std::string name, std::string label) {
    return Param(std::move(name), ParamKind::date, std::move(label));
}

inline Param age_param() {
    return num("age", "Age", sym::years).range(0, 120).typical(18, 90);
}
inline Param sex_param() { return choice("sex", "Sex", {"male", "female"}); }

/// Counts true flags.
inline int count(std::initializer_list<bool> xs) {
    int n = 0;
    for (bool x : xs) n += x ? 1 : 0;
    return n;
}

/// Devine ideal body weight in kg from height in cm.
inline double devine_ibw(bool female, double height_cm) {
    const double inches = height_cm / 2.54;
    return (female ? 45.5 : 50.0) + 2.3 * (inches - 60.0);
}

inline double require_positive(double v, const char* name) {
    if (!(v > 0)) throw OutOfRange(name, "must be positive");
    return v;
}

// Registration entry points, one per translation unit.
void register_renal(std::vector<CalculatorDef>& out);
void register_anthropometry(std::vector<CalculatorDef>& out);
void register_cardiology(std::vector<CalculatorDef>& out);
void register_hepatology(std::vector<CalculatorDef>& out);
void register_critical_care(std::vector<CalculatorDef>& out);
void register_chemistry(std::vector<CalculatorDef>& out);
void register_infection_and_thrombosis(std::vector<CalculatorDef>& out);
void register_pharmacology(std::vector<CalculatorDef>& out);
void register_obstetrics(std::vector<CalculatorDef>& out);

}  // namespace medcalc::calc
