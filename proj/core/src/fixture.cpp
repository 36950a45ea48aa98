#include "medcalc/fixture.hpp"
#include "medcalc/error.hpp"
#include "medcalc/format.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>

namespace medcalc {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    // Top 53 bits, so the stream is identical on every standard library.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

bool chance(std::mt19937_64& rng, double p) { return uniform(rng, 0, 1) < p; }

size_t index(std::mt19937_64& rng, size_t n) { return static_cast<size_t>(uniform(rng, 0, static_cast<double>(n))); }

double round_to(double v, int decimals) {
    const double f = std::pow(10.0, decimals);
    return std::round(v * f) / f;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

const Date kEpoch = Date::parse("2020-01-01");

}  // namespace

PatientParams sample_params(const Engine& engine, const CalculatorDef& def, std::mt19937_64& rng,
                            const SampleOptions& opt) {
    PatientParams p;
    std::optional<Date> anchor;
    for (const auto& s : def.params) {
        switch (s.kind) {
            case ParamKind::numeric: {
                if (!s.required && !chance(rng, opt.optional_rate)) break;
                const double lo = std::isfinite(s.typical.lo) ? s.typical.lo : 0.0;
                const double hi = std::isfinite(s.typical.hi) ? s.typical.hi : lo + 100;
                const double v = round_to(uniform(rng, lo, hi), s.decimals);
                if (!s.alternate_units.empty() && chance(rng, opt.alternate_unit_rate)) {
                    const auto& alt = s.alternate_units[index(rng, s.alternate_units.size())];
                    const double a = engine.units().convert_value(v, s.unit, alt, s.substance);
                    p.set(s.name, units::Quantity(round_to(a, s.decimals + 3), alt));
                } else {
                    p.set(s.name, units::Quantity(v, s.unit));
                }
                break;
            }
            case ParamKind::boolean:
                if (chance(rng, opt.flag_rate)) p.set(s.name, true);
                break;
            case ParamKind::categorical:
                if (!s.required && !chance(rng, opt.optional_rate)) break;
                p.set(s.name, s.labels[index(rng, s.labels.size())]);
                break;
            case ParamKind::date: {
                if (s.name == "current_date") break;
                const auto d = kEpoch.plus_days(static_cast<long>(index(rng, 4 * 365)));
                anchor = anchor ? std::max(*anchor, d) : d;
                p.set(s.name, d);
                break;
            }
        }
    }
    // Current dates follow the other dates by up to 41 weeks.
    if (def.param("current_date")) {
        const auto from = anchor.value_or(kEpoch);
        p.set("current_date", from.plus_days(static_cast<long>(index(rng, 287))));
    }
    return p;
}

std::optional<PatientParams> sample_computable(const Engine& engine, const CalculatorDef& def, std::mt19937_64& rng,
                                               const SampleOptions& opt, int attempts) {
    for (int i = 0; i < attempts; ++i) {
        auto p = sample_params(engine, def, rng, opt);
        try {
            engine.compute(def.id, p);
            return p;
        } catch (const Error&) {
        }
    }
    return std::nullopt;
}

std::string render_note(const CalculatorDef& def, const PatientParams& p) {
    std::string head = "A patient presented to the emergency department and was admitted.";
    const auto* age = p.find("age");
    const auto* sex = p.find("sex");
    if (age && sex)
        head = fmt::format("A {}-year-old {} presented to the emergency department and was admitted.",
                           format_significant(std::get<units::Quantity>(*age).value(), 6),
                           std::get<std::string>(*sex) == "female" ? "woman" : "man");

    std::vector<std::string> findings, history, absent;
    for (const auto& s : def.params) {
        const auto* v = p.find(s.name);
        if (s.name == "age" && age && sex) continue;
        if (s.name == "sex" && age && sex) continue;
        if (s.kind == ParamKind::boolean) {
            (v && std::get<bool>(*v) ? history : absent).push_back(s.label);
            continue;
        }
        if (!v) continue;
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, units::Quantity>) {
                    const std::string& unit = x.unit().symbol();
                    findings.push_back(fmt::format("{} {}{}{}", s.label, format_significant(x.value(), 8),
                                                   unit.empty() ? "" : " ", unit));
                } else if constexpr (std::is_same_v<T, std::string>) {
                    std::string label = x;
                    std::replace(label.begin(), label.end(), '_', ' ');
                    findings.push_back(fmt::format("{}: {}", s.label, label));
                } else if constexpr (std::is_same_v<T, Date>) {
                    findings.push_back(fmt::format("{}: {}", s.label, x.us()));
                }
            },
            *v);
    }

    std::string note = head;
    if (!findings.empty()) note += fmt::format(" Findings on admission: {}.", fmt::join(findings, "; "));
    if (!history.empty()) note += fmt::format(" Positive for: {}.", fmt::join(history, "; "));
    if (!absent.empty()) note += fmt::format(" Negative for: {}.", fmt::join(absent, "; "));
    return note;
}

std::string render_question(const CalculatorDef& def) {
    if (def.category == Category::equation && !def.result_unit.symbol().empty())
        return fmt::format("What is the patient's {} in terms of {}?", def.name, def.result_unit.symbol());
    return fmt::format("What is the patient's {}?", def.name);
}

std::vector<DatasetRow> make_fixture(const Engine& engine, int per_calculator, std::uint64_t seed,
                                     const EngineMode& label_mode) {
    std::vector<DatasetRow> rows;
    int next_id = 1;
    for (const auto& def : engine.calculators()) {
        std::mt19937_64 rng(seed ^ fnv1a(def.id));
        for (int i = 0; i < per_calculator; ++i) {
            const auto params = sample_computable(engine, def, rng);
            if (!params) throw InsufficientRows(def.id, "could not sample computable parameters");

            CalcResult r;
            try {
                r = engine.compute(def.id, *params, label_mode);
            } catch (const Error&) {
                r = engine.compute(def.id, *params);
            }

            DatasetRow row;
            row.row_id = std::to_string(next_id++);
            row.calculator_id = def.id;
            row.category = def.category;
            row.note = render_note(def, *params);
            row.question = render_question(def);
            row.ground_truth = r.display;
            if (def.category == Category::equation) {
                const double g = std::stod(r.display);
                row.lower_limit = std::min(0.95 * g, 1.05 * g);
                row.upper_limit = std::max(0.95 * g, 1.05 * g);
            }
            row.extracted_params = engine.params_to_json(*params);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace medcalc
