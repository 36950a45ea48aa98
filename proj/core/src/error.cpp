#include "medcalc/error.hpp"

namespace medcalc {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::unknown_unit: return "UnknownUnit";
        case Errc::dimension_mismatch: return "DimensionMismatch";
        case Errc::conflicting_rule: return "ConflictingRule";
        case Errc::unknown_calculator: return "UnknownCalculator";
        case Errc::missing_parameter: return "MissingParameter";
        case Errc::out_of_range: return "OutOfRange";
        case Errc::invalid_parameter: return "InvalidParameter";
        case Errc::calculator_failure: return "CalculatorFailure";
        case Errc::unknown_drug: return "UnknownDrug";
        case Errc::invalid_spec: return "InvalidSpec";
        case Errc::parse_error: return "ParseError";
        case Errc::schema_error: return "SchemaError";
        case Errc::row_error: return "RowError";
        case Errc::missing_entities: return "MissingEntities";
        case Errc::insufficient_rows: return "InsufficientRows";
        case Errc::empty_run: return "EmptyRun";
        case Errc::inconsistent_counts: return "InconsistentCounts";
        case Errc::missing_spec: return "MissingSpec";
        case Errc::endpoint_error: return "EndpointError";
        case Errc::config_error: return "ConfigError";
        case Errc::io_error: return "IoError";
    }
    return "Error";
}

}  // namespace medcalc
