#pragma once

// Typed entry points for the calculators whose audited behaviour is most
// often exercised directly. Each is a thin front over Engine::compute.

#include "medcalc/engine.hpp"

#include <span>
#include <string>

namespace medcalc {

CalcResult ckd_epi_2021(std::string_view sex, double age_years, const units::Quantity& creatinine,
                        const EngineMode& mode = EngineMode::corrected());

CalcResult glasgow_blatchford(const PatientParams& p, const EngineMode& mode = EngineMode::corrected());
CalcResult curb65(const PatientParams& p, const EngineMode& mode = EngineMode::corrected());
CalcResult sirs(const PatientParams& p, const EngineMode& mode = EngineMode::corrected());

struct OpioidDose {
    std::string drug;
    std::string route;
    /// Daily dose; transdermal fentanyl in µg/hr.
    units::Quantity dose;
};

/// Conversion factor to oral morphine milligram equivalents, or nullopt for
/// an unknown (drug, route).
std::optional<double> mme_factor(std::string_view drug, std::string_view route,
                                 const EngineMode& mode = EngineMode::corrected());

/// Sum of dose x factor. Throws UnknownDrug.
CalcResult mme_daily(std::span<const OpioidDose> opioids,
                     const EngineMode& mode = EngineMode::corrected());

enum class QtcFormula { bazett, fridericia, framingham, hodges, rautaharju };

/// `rr_or_hr` is an RR interval (time) or a heart rate (/min).
CalcResult qtc(QtcFormula formula, const units::Quantity& qt, const units::Quantity& rr_or_hr,
               const EngineMode& mode = EngineMode::corrected());

}  // namespace medcalc
