#pragma once

#include <string>

namespace medcalc {

struct CalcResult;

/// Significant digits used for equation answers.
inline constexpr int kAnswerSignificantDigits = 4;

/// Rounds to `digits` significant digits and prints without exponent,
/// trailing zeros trimmed: 30.2847 -> "30.28", 0.012345 (3) -> "0.0123".
std::string format_significant(double value, int digits);

/// Display string for a result: significant-digit policy for numeric
/// results, integers or half points for scores, labels verbatim.
std::string format_answer(const CalcResult& r, int digits = kAnswerSignificantDigits);

/// "81.5%" style percentage with one decimal.
std::string format_percent(double fraction);

}  // namespace medcalc
