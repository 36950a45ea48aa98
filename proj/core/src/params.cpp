#include "medcalc/params.hpp"

#include "medcalc/error.hpp"

#include <fmt/format.h>

#include <charconv>

namespace medcalc {

using namespace std::chrono;

Date::Date(year_month_day ymd) : ymd_(ymd) {
    if (!ymd_.ok()) throw ParseError("date", "invalid calendar date");
}

namespace {

int read_int(std::string_view s, std::string_view whole) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError(std::string(whole), "bad date field");
    return v;
}

}  // namespace

Date Date::parse(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    int y = 0, m = 0, d = 0;
    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        y = read_int(text.substr(0, 4), text);
        m = read_int(text.substr(5, 2), text);
        d = read_int(text.substr(8, 2), text);
    } else if (text.size() == 10 && text[2] == '/' && text[5] == '/') {
        m = read_int(text.substr(0, 2), text);
        d = read_int(text.substr(3, 2), text);
        y = read_int(text.substr(6, 4), text);
    } else {
        throw ParseError(std::string(text), "expected YYYY-MM-DD or MM/DD/YYYY");
    }
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw ParseError(std::string(text), "invalid calendar date");
    return Date(ymd);
}

Date Date::plus_days(long n) const { return Date(year_month_day{days() + std::chrono::days{n}}); }

std::string Date::iso() const {
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd_.year()),
                       static_cast<unsigned>(ymd_.month()), static_cast<unsigned>(ymd_.day()));
}

std::string Date::us() const {
    return fmt::format("{:02d}/{:02d}/{:04d}", static_cast<unsigned>(ymd_.month()),
                       static_cast<unsigned>(ymd_.day()), static_cast<int>(ymd_.year()));
}

PatientParams& PatientParams::set(std::string name, ParamValue value) {
    values_.insert_or_assign(std::move(name), std::move(value));
    return *this;
}

PatientParams& PatientParams::erase(std::string_view name) {
    if (auto it = values_.find(name); it != values_.end()) values_.erase(it);
    return *this;
}

const ParamValue* PatientParams::find(std::string_view name) const {
    auto it = values_.find(name);
    return it == values_.end() ? nullptr : &it->second;
}

}  // namespace medcalc
