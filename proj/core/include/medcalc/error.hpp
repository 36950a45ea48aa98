#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace medcalc {

/// Error categories raised by the library. The numeric values are not exit
/// codes; the CLI owns that mapping.
enum class Errc {
    unknown_unit,
    dimension_mismatch,
    conflicting_rule,
    unknown_calculator,
    missing_parameter,
    out_of_range,
    invalid_parameter,
    calculator_failure,
    unknown_drug,
    invalid_spec,
    parse_error,
    schema_error,
    row_error,
    missing_entities,
    insufficient_rows,
    empty_run,
    inconsistent_counts,
    missing_spec,
    endpoint_error,
    config_error,
    io_error,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string subject, const std::string& message)
        : std::runtime_error(message), code_(code), subject_(std::move(subject)) {}

    Errc code() const noexcept { return code_; }

    /// The offending entity (parameter name, unit symbol, calculator id, row
    /// number, ...). May be empty.
    const std::string& subject() const noexcept { return subject_; }

private:
    Errc code_;
    std::string subject_;
};

template <Errc Code>
class ErrorOf : public Error {
public:
    explicit ErrorOf(std::string subject, std::string detail = {})
        : Error(Code, subject, compose(subject, detail)) {}

private:
    static std::string compose(const std::string& subject, const std::string& detail) {
        std::string msg(to_string(Code));
        if (!subject.empty()) msg += ": " + subject;
        if (!detail.empty()) msg += " (" + detail + ")";
        return msg;
    }
};

using UnknownUnit = ErrorOf<Errc::unknown_unit>;
using DimensionMismatch = ErrorOf<Errc::dimension_mismatch>;
using ConflictingRule = ErrorOf<Errc::conflicting_rule>;
using UnknownCalculator = ErrorOf<Errc::unknown_calculator>;
using MissingParameter = ErrorOf<Errc::missing_parameter>;
using OutOfRange = ErrorOf<Errc::out_of_range>;
using InvalidParameter = ErrorOf<Errc::invalid_parameter>;
using CalculatorFailure = ErrorOf<Errc::calculator_failure>;
using UnknownDrug = ErrorOf<Errc::unknown_drug>;
using InvalidSpec = ErrorOf<Errc::invalid_spec>;
using ParseError = ErrorOf<Errc::parse_error>;
using SchemaError = ErrorOf<Errc::schema_error>;
using RowError = ErrorOf<Errc::row_error>;
using MissingEntities = ErrorOf<Errc::missing_entities>;
using InsufficientRows = ErrorOf<Errc::insufficient_rows>;
using EmptyRun = ErrorOf<Errc::empty_run>;
using InconsistentCounts = ErrorOf<Errc::inconsistent_counts>;
using MissingSpec = ErrorOf<Errc::missing_spec>;
using EndpointError = ErrorOf<Errc::endpoint_error>;
using ConfigError = ErrorOf<Errc::config_error>;
using IoError = ErrorOf<Errc::io_error>;

}  // namespace medcalc
