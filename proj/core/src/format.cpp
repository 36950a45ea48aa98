#include "medcalc/format.hpp"

#include "medcalc/engine.hpp"

#include <fmt/format.h>

#include <cmath>

namespace medcalc {

namespace {

std::string trim_zeros(std::string s) {
    if (s.find('.') == std::string::npos) return s;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

std::string clean_negative_zero(std::string s) {
    if (s == "-0") return "0";
    return s;
}

}  // namespace

std::string format_significant(double value, int digits) {
    if (digits < 1) digits = 1;
    if (value == 0.0 || !std::isfinite(value)) return value == 0.0 ? "0" : fmt::format("{}", value);
    const int exponent = static_cast<int>(std::floor(std::log10(std::abs(value))));
    int decimals = digits - 1 - exponent;
    if (decimals > 0) {
        auto s = fmt::format("{:.{}f}", value, decimals);
        // 9.9996 at 4 digits prints as 10.000; drop the extra place.
        const double rounded = std::stod(s);
        if (rounded != 0.0 && static_cast<int>(std::floor(std::log10(std::abs(rounded)))) > exponent)
            s = fmt::format("{:.{}f}", value, decimals - 1);
        return clean_negative_zero(trim_zeros(s));
    }
    const double scale = std::pow(10.0, -decimals);
    const double rounded = std::round(value / scale) * scale;
    return clean_negative_zero(fmt::format("{:.0f}", rounded));
}

std::string format_answer(const CalcResult& r, int digits) {
    if (const auto* n = std::get_if<CalcResult::Numeric>(&r.kind)) return format_significant(n->value, digits);
    if (const auto* s = std::get_if<CalcResult::Score>(&r.kind)) {
        if (s->points == std::floor(s->points)) return clean_negative_zero(fmt::format("{:.0f}", s->points));
        return trim_zeros(fmt::format("{:.1f}", s->points));
    }
    return std::get<CalcResult::Label>(r.kind).text;
}

std::string format_percent(double fraction) { return fmt::format("{:.1f}%", fraction * 100.0); }

}  // namespace medcalc
