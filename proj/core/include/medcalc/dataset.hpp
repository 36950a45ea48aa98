#pragma once

#include "medcalc/bugs.hpp"
#include "medcalc/engine.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace medcalc {

// ---- CSV (RFC 4180: quoted fields, doubled quotes, embedded newlines) ----

using CsvRecord = std::vector<std::string>;

/// Throws ParseError naming the 1-based line of an unterminated quote.
std::vector<CsvRecord> read_csv(std::istream& in);
void write_csv(std::ostream& out, const std::vector<CsvRecord>& records);

// ---- rows ----

struct DatasetRow {
    std::string row_id;
    std::string calculator_id;
    Category category = Category::equation;
    std::string note;
    std::string question;
    std::string ground_truth;
    /// Absent on rule rows: the exact-match sentinel.
    std::optional<double> lower_limit;
    std::optional<double> upper_limit;
    /// Reference parameters in Engine::params_from_json shape.
    std::optional<nlohmann::json> extracted_params;

    friend bool operator==(const DatasetRow&, const DatasetRow&) = default;
};

/// Which header holds which field, and how to read category and calculator
/// values. Loaded from JSON so upstream variants need no code.
struct ColumnMapping {
    std::string row_id = "Row Number";
    std::string calculator_id = "Calculator ID";
    std::string category = "Category";
    std::string note = "Patient Note";
    std::string question = "Question";
    std::string ground_truth = "Ground Truth Answer";
    std::string lower_limit = "Lower Limit";
    std::string upper_limit = "Upper Limit";
    /// Optional column; rows without it cannot be regenerated.
    std::string extracted_params = "Relevant Entities";
    /// Raw category cell -> "equation" | "rule".
    std::map<std::string, std::string> category_values{{"equation", "equation"}, {"rule", "rule"}};
    /// Raw calculator cell -> engine id. Unlisted values are normalized as is.
    std::map<std::string, std::string> calculator_ids;

    static ColumnMapping from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Throws SchemaError (empty input, missing column) and RowError (bad cell);
/// both name the 1-based data row.
std::vector<DatasetRow> load_dataset(std::istream& in, const ColumnMapping& mapping = {});
std::vector<DatasetRow> load_dataset(const std::filesystem::path& path, const ColumnMapping& mapping = {});

/// Writes the columns named by `mapping`, in its field order.
void save_dataset(std::ostream& out, const std::vector<DatasetRow>& rows, const ColumnMapping& mapping = {});
void save_dataset(const std::filesystem::path& path, const std::vector<DatasetRow>& rows,
                  const ColumnMapping& mapping = {});

// ---- regeneration ----

struct RegenOptions {
    double band = 0.05;
};

struct RegenEntry {
    std::string row_id;
    std::string calculator_id;
    std::string old_ground_truth;
    std::string new_ground_truth;
    bool changed = false;
    /// Bugs whose toggling in the regeneration mode moves this row's answer.
    std::vector<Bug> responsible;
    /// Error name when the row could not be regenerated (row left as is).
    std::optional<std::string> error;
};

struct RegenSummary {
    int rows = 0;
    int changed = 0;
    int failed = 0;
};

struct RegenReport {
    std::string mode;
    std::vector<RegenEntry> entries;
    std::map<std::string, RegenSummary> per_calculator;

    int changed_count() const;
    int failed_count() const;
    nlohmann::json to_json() const;
    /// Human table: one line per calculator with changes or failures.
    std::string summary() const;
};

struct RegenResult {
    std::vector<DatasetRow> rows;
    RegenReport report;
};

/// New ground truth = engine display in `mode`; equation limits are
/// (1 -/+ band) x value. Changed means the old answer no longer passes the
/// scorer against the new row.
RegenResult regenerate_ground_truth(const Engine& engine, const std::vector<DatasetRow>& rows,
                                    const EngineMode& mode, const RegenOptions& opt = {});

// ---- subsampling ----

/// Equal quota per calculator; the remainder goes one row each to the
/// calculators with the smallest ids. Selection within a calculator depends
/// only on (seed, row id). Output keeps input order. Throws InsufficientRows.
std::vector<DatasetRow> stratified_subsample(const std::vector<DatasetRow>& rows, std::size_t n,
                                             std::uint64_t seed);

}  // namespace medcalc
