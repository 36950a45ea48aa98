#include "common.hpp"

#include <fmt/format.h>

namespace medcalc::calc {

namespace {

long cycle_offset(const Inputs& in) {
    const double c = in.num("cycle_length");
    if (c != std::floor(c)) throw OutOfRange("cycle_length", "must be a whole number of days");
    return static_cast<long>(c) - 28;
}

// Naegele's rule with the cycle-length adjustment.
CalcResult estimated_due_date(const Inputs& in, const EngineMode&) {
    const auto edd = in.date("last_menstrual_period").plus_days(280 + cycle_offset(in));
    return CalcResult::label(edd.us());
}

CalcResult estimated_conception_date(const Inputs& in, const EngineMode&) {
    const auto d = in.date("last_menstrual_period").plus_days(14 + cycle_offset(in));
    return CalcResult::label(d.us());
}

CalcResult gestational_age(const Inputs& in, const EngineMode&) {
    const auto lmp = in.date("last_menstrual_period");
    const auto today = in.date("current_date");
    const long days = (today.days() - lmp.days()).count();
    if (days < 0) throw OutOfRange("current_date", "precedes the last menstrual period");
    auto r = CalcResult::label(fmt::format("{} weeks, {} days", days / 7, days % 7));
    r.note("days", static_cast<double>(days));
    return r;
}

Param cycle_length() { return num("cycle_length", "Menstrual cycle length", sym::days).range(20, 45).typical(21, 35); }

}  // namespace

void register_obstetrics(std::vector<CalculatorDef>& out) {
    out.push_back({
        .id = "estimated_due_date",
        .name = "Estimated Due Date",
        .category = Category::rule,
        .params = {date("last_menstrual_period", "First day of last menstrual period"), cycle_length()},
        .citation = "Naegele FC. Lehrbuch der Geburtshulfe. 1830. ACOG Committee Opinion No. 700: Methods for "
                    "estimating the due date. Obstet Gynecol. 2017;129(5):e150-e154.",
        .fn = estimated_due_date,
    });
    out.push_back({
        .id = "estimated_conception_date",
        .name = "Estimated Date of Conception",
        .category = Category::rule,
        .params = {date("last_menstrual_period", "First day of last menstrual period"), cycle_length()},
        .citation = "ACOG Committee Opinion No. 700: Methods for estimating the due date. Obstet Gynecol. "
                    "2017;129(5):e150-e154.",
        .fn = estimated_conception_date,
    });
    out.push_back({
        .id = "gestational_age",
        .name = "Estimated Gestational Age",
        .category = Category::rule,
        .params = {date("current_date", "Current date"),
                   date("last_menstrual_period", "First day of last menstrual period")},
        .citation = "ACOG Committee Opinion No. 700: Methods for estimating the due date. Obstet Gynecol. "
                    "2017;129(5):e150-e154.",
        .fn = gestational_age,
    });
}

}  // namespace medcalc::calc
