#include "exit_codes.hpp"

namespace medcalc::cli {

int exit_code(Errc code) noexcept {
    switch (code) {
        case Errc::unknown_calculator: return unknown_calculator;
        case Errc::missing_parameter: return missing_parameter;
        case Errc::out_of_range: return out_of_range;
        case Errc::invalid_parameter:
        case Errc::unknown_unit:
        case Errc::dimension_mismatch:
        case Errc::conflicting_rule:
        case Errc::unknown_drug: return invalid_input;
        case Errc::calculator_failure: return calculator_failure;
        case Errc::invalid_spec:
        case Errc::parse_error:
        case Errc::schema_error:
        case Errc::row_error:
        case Errc::missing_entities:
        case Errc::missing_spec: return bad_document;
        case Errc::insufficient_rows:
        case Errc::empty_run:
        case Errc::inconsistent_counts: return bad_counts;
        case Errc::endpoint_error:
        case Errc::config_error: return endpoint;
        case Errc::io_error: return io;
    }
    return internal;
}

}  // namespace medcalc::cli
