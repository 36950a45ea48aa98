#include "medcalc/dataset.hpp"
#include "medcalc/error.hpp"
#include "medcalc/format.hpp"
#include "medcalc/scoring.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <unordered_map>

namespace medcalc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Column mapping

ColumnMapping ColumnMapping::from_json(const json& j) {
    if (!j.is_object()) throw ParseError("column mapping", "expected an object");
    ColumnMapping m;
    auto str = [&](const char* key, std::string& dst) {
        if (!j.contains(key)) return;
        if (!j[key].is_string()) throw ParseError(std::string("column mapping.") + key, "expected a string");
        dst = j[key].get<std::string>();
    };
    str("row_id", m.row_id);
    str("calculator_id", m.calculator_id);
    str("category", m.category);
    str("note", m.note);
    str("question", m.question);
    str("ground_truth", m.ground_truth);
    str("lower_limit", m.lower_limit);
    str("upper_limit", m.upper_limit);
    str("extracted_params", m.extracted_params);
    try {
        if (j.contains("category_values")) {
            m.category_values = j["category_values"].get<std::map<std::string, std::string>>();
            for (const auto& [raw, cat] : m.category_values)
                if (!parse_category(cat)) throw ParseError("column mapping.category_values." + raw, "equation or rule");
        }
        if (j.contains("calculator_ids"))
            m.calculator_ids = j["calculator_ids"].get<std::map<std::string, std::string>>();
    } catch (const json::exception& e) {
        throw ParseError("column mapping", e.what());
    }
    return m;
}

json ColumnMapping::to_json() const {
    return {{"row_id", row_id},
            {"calculator_id", calculator_id},
            {"category", category},
            {"note", note},
            {"question", question},
            {"ground_truth", ground_truth},
            {"lower_limit", lower_limit},
            {"upper_limit", upper_limit},
            {"extracted_params", extracted_params},
            {"category_values", category_values},
            {"calculator_ids", calculator_ids}};
}

// ---------------------------------------------------------------------------
// Load / save

namespace {

std::optional<double> parse_number(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string fmt_limit(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

}  // namespace

std::vector<DatasetRow> load_dataset(std::istream& in, const ColumnMapping& m) {
    const auto records = read_csv(in);
    if (records.empty()) throw SchemaError("header", "empty input");
    const auto& header = records[0];

    auto column = [&](const std::string& name, bool required) -> std::optional<size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            if (required) throw SchemaError("column " + name, "missing from header");
            return std::nullopt;
        }
        return static_cast<size_t>(it - header.begin());
    };
    const auto c_id = *column(m.row_id, true);
    const auto c_calc = *column(m.calculator_id, true);
    const auto c_cat = *column(m.category, true);
    const auto c_note = *column(m.note, true);
    const auto c_q = *column(m.question, true);
    const auto c_gt = *column(m.ground_truth, true);
    const auto c_lo = *column(m.lower_limit, true);
    const auto c_hi = *column(m.upper_limit, true);
    const auto c_params = column(m.extracted_params, false);

    std::vector<DatasetRow> rows;
    rows.reserve(records.size() - 1);
    std::set<std::string> seen;
    for (size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        const std::string where = "row " + std::to_string(r);
        if (rec.size() != header.size())
            throw RowError(where, fmt::format("{} fields, header has {}", rec.size(), header.size()));

        DatasetRow row;
        row.row_id = rec[c_id];
        if (row.row_id.empty()) throw RowError(where, "empty row id");
        if (!seen.insert(row.row_id).second) throw RowError(where, "duplicate row id " + row.row_id);

        const auto& calc = rec[c_calc];
        auto alias = m.calculator_ids.find(calc);
        row.calculator_id = normalize_calculator_id(alias != m.calculator_ids.end() ? alias->second : calc);
        if (row.calculator_id.empty()) throw RowError(where, "empty calculator id");

        auto cat = m.category_values.find(rec[c_cat]);
        if (cat == m.category_values.end()) throw RowError(where, "unmapped category '" + rec[c_cat] + "'");
        row.category = *parse_category(cat->second);

        row.note = rec[c_note];
        row.question = rec[c_q];
        row.ground_truth = rec[c_gt];

        if (row.category == Category::equation) {
            const auto gt = parse_number(row.ground_truth);
            row.lower_limit = parse_number(rec[c_lo]);
            row.upper_limit = parse_number(rec[c_hi]);
            if (!gt) throw RowError(where, "ground truth '" + row.ground_truth + "' is not a number");
            if (!row.lower_limit || !row.upper_limit) throw RowError(where, "equation row needs numeric limits");
            const double slack = 1e-9 * std::max(1.0, std::abs(*gt));
            if (*row.lower_limit > *gt + slack || *gt > *row.upper_limit + slack)
                throw RowError(where, "ground truth outside its limits");
        }

        if (c_params && !rec[*c_params].empty()) {
            try {
                row.extracted_params = json::parse(rec[*c_params]);
            } catch (const json::exception& e) {
                throw RowError(where, std::string("reference parameters: ") + e.what());
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<DatasetRow> load_dataset(const std::filesystem::path& path, const ColumnMapping& m) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open");
    return load_dataset(in, m);
}

void save_dataset(std::ostream& out, const std::vector<DatasetRow>& rows, const ColumnMapping& m) {
    auto category_cell = [&](Category c) {
        // First raw value that maps to the category, so a reload round-trips.
        for (const auto& [raw, cat] : m.category_values)
            if (parse_category(cat) == c) return raw;
        return std::string(to_string(c));
    };
    std::map<std::string, std::string> reverse_ids;
    for (const auto& [raw, id] : m.calculator_ids) reverse_ids.emplace(normalize_calculator_id(id), raw);

    std::vector<CsvRecord> recs;
    recs.reserve(rows.size() + 1);
    recs.push_back({m.row_id, m.calculator_id, m.category, m.note, m.question, m.ground_truth, m.lower_limit,
                    m.upper_limit, m.extracted_params});
    for (const auto& r : rows) {
        auto rid = reverse_ids.find(r.calculator_id);
        recs.push_back({r.row_id, rid != reverse_ids.end() ? rid->second : r.calculator_id,
                        category_cell(r.category), r.note, r.question, r.ground_truth, fmt_limit(r.lower_limit),
                        fmt_limit(r.upper_limit), r.extracted_params ? r.extracted_params->dump() : std::string()});
    }
    write_csv(out, recs);
}

void save_dataset(const std::filesystem::path& path, const std::vector<DatasetRow>& rows, const ColumnMapping& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string(), "cannot write");
    save_dataset(out, rows, m);
    if (!out) throw IoError(path.string(), "write failed");
}

// ---------------------------------------------------------------------------
// Regeneration

int RegenReport::changed_count() const {
    return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.changed; }));
}

int RegenReport::failed_count() const {
    return static_cast<int>(
        std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.error.has_value(); }));
}

json RegenReport::to_json() const {
    json rows = json::array();
    for (const auto& e : entries) {
        if (!e.changed && !e.error) continue;
        json bugs = json::array();
        for (auto b : e.responsible) bugs.push_back(to_string(b));
        json j{{"row_id", e.row_id},
               {"calculator_id", e.calculator_id},
               {"old_ground_truth", e.old_ground_truth},
               {"new_ground_truth", e.new_ground_truth},
               {"changed", e.changed},
               {"responsible_bugs", bugs}};
        if (e.error) j["error"] = *e.error;
        rows.push_back(std::move(j));
    }
    json per = json::object();
    for (const auto& [id, s] : per_calculator) per[id] = {{"rows", s.rows}, {"changed", s.changed}, {"failed", s.failed}};
    return {{"mode", mode},
            {"rows", entries.size()},
            {"changed", changed_count()},
            {"failed", failed_count()},
            {"per_calculator", per},
            {"entries", rows}};
}

std::string RegenReport::summary() const {
    std::string out = fmt::format("mode {}: {} rows, {} changed, {} not regenerated\n", mode, entries.size(),
                                  changed_count(), failed_count());
    for (const auto& [id, s] : per_calculator)
        if (s.changed || s.failed)
            out += fmt::format("  {:<32} {:>4} rows {:>4} changed {:>4} failed\n", id, s.rows, s.changed, s.failed);
    return out;
}

namespace {

void set_limits(DatasetRow& row, double band) {
    if (row.category != Category::equation) {
        row.lower_limit.reset();
        row.upper_limit.reset();
        return;
    }
    const double g = *parse_number(row.ground_truth);
    const double a = (1 - band) * g, b = (1 + band) * g;
    row.lower_limit = std::min(a, b);
    row.upper_limit = std::max(a, b);
}

}  // namespace

RegenResult regenerate_ground_truth(const Engine& engine, const std::vector<DatasetRow>& rows,
                                    const EngineMode& mode, const RegenOptions& opt) {
    RegenResult out;
    out.rows = rows;
    out.report.mode = mode.describe();
    out.report.entries.reserve(rows.size());

    for (auto& row : out.rows) {
        RegenEntry e;
        e.row_id = row.row_id;
        e.calculator_id = row.calculator_id;
        e.old_ground_truth = row.ground_truth;
        e.new_ground_truth = row.ground_truth;
        auto& sum = out.report.per_calculator[row.calculator_id];
        ++sum.rows;

        try {
            if (!row.extracted_params) throw MissingEntities(row.row_id, "no reference parameters");
            const auto& def = engine.get(row.calculator_id);
            const auto params = engine.params_from_json(def, *row.extracted_params);
            const auto result = engine.compute(def.id, params, mode);

            DatasetRow fresh = row;
            fresh.ground_truth = result.display;
            set_limits(fresh, opt.band);
            e.new_ground_truth = fresh.ground_truth;
            e.changed = !judge(fresh, row.ground_truth).correct;

            if (e.changed) {
                for (auto b : def.bugs) {
                    bool moves = false;
                    try {
                        moves = !judge(fresh, engine.compute(def.id, params, mode.toggled(b)).display).correct;
                    } catch (const Error&) {
                        moves = true;
                    }
                    if (moves) e.responsible.push_back(b);
                }
            }
            row = std::move(fresh);
        } catch (const Error& err) {
            e.error = std::string(to_string(err.code()));
        }

        if (e.changed) ++sum.changed;
        if (e.error) ++sum.failed;
        out.report.entries.push_back(std::move(e));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Subsampling

namespace {

std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

}  // namespace

std::vector<DatasetRow> stratified_subsample(const std::vector<DatasetRow>& rows, std::size_t n,
                                             std::uint64_t seed) {
    std::map<std::string, std::vector<size_t>> groups;
    for (size_t i = 0; i < rows.size(); ++i) groups[rows[i].calculator_id].push_back(i);
    if (groups.empty()) throw InsufficientRows("dataset", "no rows");

    const size_t k = groups.size(), quota = n / k, extra = n % k;
    std::vector<size_t> keep;
    keep.reserve(n);
    size_t g = 0;
    for (auto& [id, idx] : groups) {
        const size_t want = quota + (g++ < extra ? 1 : 0);
        if (idx.size() < want)
            throw InsufficientRows(id, fmt::format("needs {} rows, has {}", want, idx.size()));
        std::vector<std::pair<std::uint64_t, size_t>> keyed;
        keyed.reserve(idx.size());
        for (size_t i : idx) keyed.emplace_back(mix(seed ^ fnv1a(rows[i].row_id)), i);
        std::sort(keyed.begin(), keyed.end());
        for (size_t j = 0; j < want; ++j) keep.push_back(keyed[j].second);
    }
    std::sort(keep.begin(), keep.end());
    std::vector<DatasetRow> out;
    out.reserve(keep.size());
    for (size_t i : keep) out.push_back(rows[i]);
    return out;
}

}  // namespace medcalc
