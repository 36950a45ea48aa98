#include "medcalc/scoring.hpp"
#include "medcalc/error.hpp"
#include "medcalc/format.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <regex>

namespace medcalc {

using nlohmann::json;

std::string_view to_string(FailureClass f) noexcept {
    switch (f) {
        case FailureClass::none: return "none";
        case FailureClass::parse_failure: return "parse_failure";
        case FailureClass::wrong_value: return "wrong_value";
        case FailureClass::missing_answer: return "missing_answer";
    }
    return "?";
}

std::optional<FailureClass> parse_failure_class(std::string_view text) noexcept {
    for (auto f : {FailureClass::none, FailureClass::parse_failure, FailureClass::wrong_value,
                   FailureClass::missing_answer})
        if (to_string(f) == text) return f;
    return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Length of a leading plain decimal ([+-]digits[.digits] or [+-].digits), 0 if none.
size_t decimal_prefix(std::string_view s) {
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    const size_t int_start = i;
    while (i < s.size() && is_digit(s[i])) ++i;
    bool digits = i > int_start;
    if (i < s.size() && s[i] == '.') {
        const size_t frac_start = ++i;
        while (i < s.size() && is_digit(s[i])) ++i;
        digits = digits || i > frac_start;
    }
    return digits ? i : 0;
}

double to_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

}  // namespace

std::optional<double> parse_decimal_answer(std::string_view text) {
    auto s = trim(text);
    const size_t n = decimal_prefix(s);
    if (n == 0) return std::nullopt;
    const auto rest = trim(s.substr(n));
    if (!rest.empty()) {
        // A unit may follow, never an operator or another number.
        const unsigned char c = static_cast<unsigned char>(rest.front());
        const bool unit_start = std::isalpha(c) || c == '%' || c >= 0x80;
        if (!unit_start) return std::nullopt;
        const bool exponent = (rest[0] == 'e' || rest[0] == 'E') && rest.size() > 1 &&
                              (is_digit(rest[1]) || rest[1] == '+' || rest[1] == '-');
        if (exponent) return std::nullopt;
    }
    return to_double(s.substr(0, n));
}

bool is_missing_answer(std::string_view text) {
    const auto t = lower(trim(text));
    return t.empty() || t == "n/a" || t == "na" || t == "none" || t == "null" || t == "unknown";
}

std::string normalize_rule_answer(std::string_view text) {
    auto t = trim(text);
    while (t.size() >= 2 && ((t.front() == '(' && t.back() == ')') || (t.front() == '"' && t.back() == '"') ||
                             (t.front() == '\'' && t.back() == '\'')))
        t = trim(t.substr(1, t.size() - 2));

    // Whole answer is a number.
    if (const size_t n = decimal_prefix(t); n != 0 && n == t.size()) {
        const double v = to_double(t);
        return v == 0 ? "0" : fmt::format("{}", v);
    }

    // Calendar date.
    try {
        return Date::parse(t).iso();
    } catch (const Error&) {
    }

    // Week/day tuples in any of the common spellings.
    static const std::regex weeks(R"(^\W*(\d+)\W*weeks?\W*(\d+)\W*days?\W*$)", std::regex::icase);
    std::cmatch m;
    const std::string ts(t);
    if (std::regex_match(ts.c_str(), m, weeks))
        return fmt::format("{} weeks, {} days", std::stoi(m[1].str()), std::stoi(m[2].str()));

    std::string out;
    bool space = false;
    for (char c : lower(t)) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

RowOutcome judge(const DatasetRow& row, std::string_view answer, const ScoringConfig& cfg) {
    RowOutcome o;
    o.row_id = row.row_id;
    o.calculator_id = row.calculator_id;
    o.category = row.category;
    o.given_answer = std::string(answer);

    if (is_missing_answer(answer)) {
        o.failure_class = FailureClass::missing_answer;
        return o;
    }
    if (row.category == Category::rule) {
        o.correct = normalize_rule_answer(answer) == normalize_rule_answer(row.ground_truth);
        o.failure_class = o.correct ? FailureClass::none : FailureClass::wrong_value;
        return o;
    }

    const auto v = parse_decimal_answer(answer);
    if (!v) {
        o.failure_class = FailureClass::parse_failure;
        return o;
    }
    const double lo = row.lower_limit.value_or(0), hi = row.upper_limit.value_or(0);
    if (lo == 0 && hi == 0)
        o.correct = std::abs(*v) <= cfg.zero_abs_tolerance;
    else
        o.correct = lo <= *v && *v <= hi;
    o.failure_class = o.correct ? FailureClass::none : FailureClass::wrong_value;
    return o;
}

json AccuracyReport::to_json() const {
    auto tally = [](const Tally& t) {
        return json{{"correct", t.correct}, {"total", t.total}, {"accuracy", format_percent(t.fraction())}};
    };
    json calcs = json::object(), cats = json::object();
    for (const auto& [k, t] : by_calculator) calcs[k] = tally(t);
    for (const auto& [k, t] : by_category) cats[k] = tally(t);
    return {{"overall", tally(overall)}, {"by_category", cats}, {"by_calculator", calcs}, {"failures", failures}};
}

AccuracyReport accuracy(std::span<const RowOutcome> outcomes) {
    if (outcomes.empty()) throw EmptyRun("outcomes", "no rows to score");
    AccuracyReport r;
    for (const auto& o : outcomes) {
        const Tally t{o.correct ? 1 : 0, 1};
        r.overall += t;
        r.by_calculator[o.calculator_id] += t;
        r.by_category[std::string(to_string(o.category))] += t;
        if (!o.correct) ++r.failures[std::string(to_string(o.failure_class))];
    }
    return r;
}

std::string_view to_string(ResidualCategory c) noexcept {
    switch (c) {
        case ResidualCategory::ground_truth_issue: return "ground_truth_issue";
        case ResidualCategory::likely_model_error: return "likely_model_error";
        case ResidualCategory::ambiguous: return "ambiguous";
    }
    return "?";
}

std::optional<ResidualCategory> parse_residual_category(std::string_view text) noexcept {
    for (auto c : {ResidualCategory::ground_truth_issue, ResidualCategory::likely_model_error,
                   ResidualCategory::ambiguous})
        if (to_string(c) == text) return c;
    return std::nullopt;
}

std::map<std::string, ResidualCategory> load_adjudication(std::istream& in) {
    const auto recs = read_csv(in);
    if (recs.empty()) throw SchemaError("header", "empty adjudication file");
    const auto& h = recs[0];
    auto col = [&](const char* name) {
        auto it = std::find(h.begin(), h.end(), name);
        if (it == h.end()) throw SchemaError(std::string("column ") + name, "missing from header");
        return static_cast<size_t>(it - h.begin());
    };
    const size_t c_id = col("row_id"), c_cat = col("category");
    std::map<std::string, ResidualCategory> out;
    for (size_t i = 1; i < recs.size(); ++i) {
        const auto& r = recs[i];
        const std::string where = "row " + std::to_string(i);
        if (r.size() != h.size()) throw RowError(where, "field count differs from header");
        const auto cat = parse_residual_category(r[c_cat]);
        if (!cat) throw RowError(where, "unknown category '" + r[c_cat] + "'");
        if (!out.emplace(r[c_id], *cat).second) throw RowError(where, "duplicate row id " + r[c_id]);
    }
    return out;
}

BoundsEstimate composite_bounds(int base_correct, int recovered, int gt_issues, int ambiguous, int total) {
    if (base_correct < 0 || recovered < 0 || gt_issues < 0 || ambiguous < 0 || total <= 0)
        throw InconsistentCounts("counts", "must be non-negative with a positive total");
    const int model_errors = total - base_correct - recovered - gt_issues - ambiguous;
    if (model_errors < 0)
        throw InconsistentCounts("counts", fmt::format("{} + {} + {} + {} exceeds total {}", base_correct, recovered,
                                                       gt_issues, ambiguous, total));
    BoundsEstimate b;
    b.base_correct = base_correct;
    b.recovered = recovered;
    b.gt_issues = gt_issues;
    b.ambiguous = ambiguous;
    b.likely_model_errors = model_errors;
    b.total = total;
    b.conservative = static_cast<double>(base_correct + recovered) / total;
    b.optimistic = static_cast<double>(base_correct + recovered + gt_issues + ambiguous) / total;
    return b;
}

BoundsEstimate composite_bounds(int base_correct, int recovered, std::span<const ResidualCategory> residuals,
                                int total) {
    const int n = static_cast<int>(residuals.size());
    if (base_correct + recovered + n != total)
        throw InconsistentCounts("counts",
                                 fmt::format("{} + {} + {} residuals != total {}", base_correct, recovered, n, total));
    const auto gt = static_cast<int>(std::count(residuals.begin(), residuals.end(), ResidualCategory::ground_truth_issue));
    const auto amb = static_cast<int>(std::count(residuals.begin(), residuals.end(), ResidualCategory::ambiguous));
    return composite_bounds(base_correct, recovered, gt, amb, total);
}

std::string format_accuracy_row(std::string_view model, std::string_view prompt, const Tally& t) {
    return fmt::format("{:<24} {:<18} {:>6} {:>8} {:>8}", model, prompt, t.total, t.correct, format_percent(t.fraction()));
}

}  // namespace medcalc
