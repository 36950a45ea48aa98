#pragma once

// Synthetic patients for property tests and the shipped fixture dataset.

#include "medcalc/dataset.hpp"
#include "medcalc/engine.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace medcalc {

struct SampleOptions {
    /// Chance that a numeric parameter is expressed in one of its alternate units.
    double alternate_unit_rate = 0.2;
    /// Chance that a boolean finding is present.
    double flag_rate = 0.3;
    /// Chance that an optional numeric parameter is supplied.
    double optional_rate = 0.8;
};

/// Draws every parameter from its typical range, rounded to its display
/// precision. The result may still be rejected by the calculator.
PatientParams sample_params(const Engine& engine, const CalculatorDef& def, std::mt19937_64& rng,
                            const SampleOptions& opt = {});

/// Redraws until corrected mode computes without error; nullopt after
/// `attempts` failures.
std::optional<PatientParams> sample_computable(const Engine& engine, const CalculatorDef& def,
                                               std::mt19937_64& rng, const SampleOptions& opt = {},
                                               int attempts = 200);

/// Short clinical vignette stating every supplied parameter.
std::string render_note(const CalculatorDef& def, const PatientParams& p);
std::string render_question(const CalculatorDef& def);

/// `per_calculator` rows for every registered calculator. Ground truth comes
/// from `label_mode`, so legacy labels reproduce the upstream dataset; rows
/// where that mode crashes fall back to corrected labels.
std::vector<DatasetRow> make_fixture(const Engine& engine, int per_calculator, std::uint64_t seed,
                                     const EngineMode& label_mode);

}  // namespace medcalc
