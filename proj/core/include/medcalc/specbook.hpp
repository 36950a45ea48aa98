#pragma once

#include "medcalc/engine.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace medcalc {

inline constexpr int kSpecSchemaVersion = 1;

struct ParameterDoc {
    std::string name;
    std::string definition;
    /// Expected unit symbol; empty for booleans, labels and dates.
    std::string unit;
    std::string conversion_notes;

    friend bool operator==(const ParameterDoc&, const ParameterDoc&) = default;
};

struct CalculatorSpec {
    int schema_version = kSpecSchemaVersion;
    std::string calculator_id;
    std::string name;
    std::string formula_text;
    std::vector<ParameterDoc> parameter_docs;
    std::string version_notes;
    std::vector<std::string> references;

    friend bool operator==(const CalculatorSpec&, const CalculatorSpec&) = default;
};

struct RenderedSpec {
    std::string text;
    /// Lowercase hex SHA-256 of `text`.
    std::string hash;
};

/// Throws ParseError; the subject names `source` and the field or
/// line:column at fault.
CalculatorSpec load_spec(const nlohmann::json& doc, std::string_view source = "spec");
CalculatorSpec load_spec_text(std::string_view text, std::string_view source = "spec");
CalculatorSpec load_spec_file(const std::filesystem::path& path);
nlohmann::json save_spec(const CalculatorSpec& spec);

/// Checks the spec against the engine's parameter list. Throws InvalidSpec.
void validate_spec(const CalculatorSpec& spec, const Engine& engine);

/// Sections in order: formula, parameters with units, unit conversions,
/// version notes, references. Validates first.
RenderedSpec render(const CalculatorSpec& spec, const Engine& engine);

std::string sha256_hex(std::string_view data);

/// The spec directory, one <calculator_id>.json per calculator.
class SpecBook {
public:
    /// Loads and validates every *.json file. Throws ParseError/InvalidSpec.
    static SpecBook load_dir(const std::filesystem::path& dir, const Engine& engine);

    const CalculatorSpec* find(std::string_view id) const;
    /// Throws MissingSpec.
    const RenderedSpec& rendered(std::string_view id) const;
    std::vector<std::string> ids() const;
    std::size_t size() const noexcept { return specs_.size(); }

    /// Engine calculators without a spec.
    std::vector<std::string> missing(const Engine& engine) const;

private:
    std::map<std::string, CalculatorSpec, std::less<>> specs_;
    std::map<std::string, RenderedSpec, std::less<>> rendered_;
};

/// Spec directory shipped with the source tree, or $MEDCALC_SPECS if set.
std::filesystem::path default_spec_dir();

}  // namespace medcalc
