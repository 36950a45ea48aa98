#pragma once

#include "medcalc/units.hpp"

#include <chrono>
#include <map>
#include <string>
#include <string_view>
#include <variant>

namespace medcalc {

/// Calendar date without time zone.
class Date {
public:
    Date() = default;
    explicit Date(std::chrono::year_month_day ymd);

    /// Accepts YYYY-MM-DD and MM/DD/YYYY. Throws ParseError.
    static Date parse(std::string_view text);

    std::chrono::year_month_day ymd() const noexcept { return ymd_; }
    std::chrono::sys_days days() const noexcept { return std::chrono::sys_days{ymd_}; }
    Date plus_days(long n) const;

    std::string iso() const;  // 2024-02-29
    std::string us() const;   // 02/29/2024

    friend auto operator<=>(const Date& a, const Date& b) { return a.days() <=> b.days(); }
    friend bool operator==(const Date& a, const Date& b) { return a.days() == b.days(); }

private:
    std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1},
                                     std::chrono::day{1}};
};

/// One supplied patient parameter. Categorical values are lowercase labels.
using ParamValue = std::variant<units::Quantity, bool, std::string, Date>;

class PatientParams {
public:
    PatientParams() = default;

    PatientParams& set(std::string name, ParamValue value);
    PatientParams& set(std::string name, double value, const units::UnitId& unit) {
        return set(std::move(name), units::Quantity(value, unit));
    }
    PatientParams& set(std::string name, const char* label) {
        return set(std::move(name), std::string(label));
    }
    PatientParams& erase(std::string_view name);

    const ParamValue* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }
    size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    friend bool operator==(const PatientParams&, const PatientParams&) = default;

private:
    std::map<std::string, ParamValue, std::less<>> values_;
};

}  // namespace medcalc
