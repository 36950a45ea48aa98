#pragma once

#include "medcalc/error.hpp"

namespace medcalc::cli {

// Stable public contract; README lists the same table.
enum Exit : int {
    ok = 0,
    internal = 1,
    usage = 2,
    unknown_calculator = 3,
    missing_parameter = 4,
    out_of_range = 5,
    invalid_input = 6,
    calculator_failure = 7,
    bad_document = 8,
    bad_counts = 9,
    endpoint = 10,
    io = 11,
};

int exit_code(Errc code) noexcept;

}  // namespace medcalc::cli
