#include "medcalc/specbook.hpp"
#include "medcalc/error.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <memory>
#include <set>

#ifndef MEDCALC_SOURCE_SPEC_DIR
#define MEDCALC_SOURCE_SPEC_DIR "specs"
#endif
#ifndef MEDCALC_INSTALL_SPEC_DIR
#define MEDCALC_INSTALL_SPEC_DIR ""
#endif

namespace medcalc {

using nlohmann::json;

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
        throw std::runtime_error("sha256 failed");
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Load / save

namespace {

const json& field(const json& doc, const char* key, json::value_t type, std::string_view source) {
    auto it = doc.find(key);
    if (it == doc.end()) throw ParseError(fmt::format("{}: {}", source, key), "missing field");
    const bool ok = it->type() == type ||
                    (type == json::value_t::number_integer && it->type() == json::value_t::number_unsigned);
    if (!ok) throw ParseError(fmt::format("{}: {}", source, key), std::string("expected ") + json(type).type_name());
    return *it;
}

std::string text(const json& doc, const char* key, std::string_view source) {
    return field(doc, key, json::value_t::string, source).get<std::string>();
}

std::pair<int, int> line_col(std::string_view text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

CalculatorSpec load_spec(const json& doc, std::string_view source) {
    if (!doc.is_object()) throw ParseError(std::string(source), "expected an object");
    CalculatorSpec s;
    s.schema_version = field(doc, "schema_version", json::value_t::number_integer, source).get<int>();
    if (s.schema_version != kSpecSchemaVersion)
        throw ParseError(fmt::format("{}: schema_version", source),
                         fmt::format("unsupported version {}", s.schema_version));
    s.calculator_id = text(doc, "calculator_id", source);
    s.name = text(doc, "name", source);
    s.formula_text = text(doc, "formula_text", source);
    s.version_notes = text(doc, "version_notes", source);

    const auto& params = field(doc, "parameter_docs", json::value_t::array, source);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto where = fmt::format("{}: parameter_docs[{}]", source, i);
        const auto& p = params[i];
        if (!p.is_object()) throw ParseError(where, "expected an object");
        ParameterDoc d;
        d.name = text(p, "name", where);
        d.definition = text(p, "definition", where);
        d.unit = text(p, "unit", where);
        d.conversion_notes = text(p, "conversion_notes", where);
        s.parameter_docs.push_back(std::move(d));
    }
    const auto& refs = field(doc, "references", json::value_t::array, source);
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (!refs[i].is_string()) throw ParseError(fmt::format("{}: references[{}]", source, i), "expected a string");
        s.references.push_back(refs[i].get<std::string>());
    }
    return s;
}

CalculatorSpec load_spec_text(std::string_view text, std::string_view source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError(fmt::format("{}:{}:{}", source, line, col), e.what());
    }
    return load_spec(doc, source);
}

CalculatorSpec load_spec_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open");
    const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return load_spec_text(data, path.string());
}

json save_spec(const CalculatorSpec& s) {
    json params = json::array();
    for (const auto& p : s.parameter_docs)
        params.push_back(
            {{"name", p.name}, {"definition", p.definition}, {"unit", p.unit}, {"conversion_notes", p.conversion_notes}});
    return {{"schema_version", s.schema_version},
            {"calculator_id", s.calculator_id},
            {"name", s.name},
            {"formula_text", s.formula_text},
            {"parameter_docs", params},
            {"version_notes", s.version_notes},
            {"references", s.references}};
}

// ---------------------------------------------------------------------------
// Validation and rendering

void validate_spec(const CalculatorSpec& s, const Engine& engine) {
    const auto* def = engine.find(s.calculator_id);
    if (!def) throw InvalidSpec(s.calculator_id, "no such calculator in the engine");
    if (def->id != s.calculator_id) throw InvalidSpec(s.calculator_id, "calculator_id must be the canonical id " + def->id);
    if (s.formula_text.empty()) throw InvalidSpec(s.calculator_id, "empty formula_text");
    if (s.references.empty()) throw InvalidSpec(s.calculator_id, "no references");
    if (def->versioned && s.version_notes.empty())
        throw InvalidSpec(s.calculator_id, "several published versions exist; version_notes must say which");

    std::set<std::string> documented;
    for (const auto& d : s.parameter_docs) {
        const auto* p = def->param(d.name);
        if (!p) throw InvalidSpec(s.calculator_id, "unknown parameter " + d.name);
        if (!documented.insert(d.name).second) throw InvalidSpec(s.calculator_id, "parameter documented twice: " + d.name);
        if (d.definition.empty()) throw InvalidSpec(s.calculator_id, "no definition for " + d.name);
        if (p->kind == ParamKind::numeric) {
            if (d.unit.empty()) throw InvalidSpec(s.calculator_id, "no unit for numeric parameter " + d.name);
            units::UnitId u;
            try {
                u = engine.units().resolve(d.unit);
            } catch (const Error&) {
                throw InvalidSpec(s.calculator_id, fmt::format("unit '{}' of {} is not a known unit", d.unit, d.name));
            }
            if (u != p->unit)
                throw InvalidSpec(s.calculator_id,
                                  fmt::format("{} is documented in {} but computed in {}", d.name, d.unit, p->unit.symbol()));
        }
    }
    for (const auto& p : def->params)
        if (!documented.contains(p.name)) throw InvalidSpec(s.calculator_id, "undocumented parameter " + p.name);
}

RenderedSpec render(const CalculatorSpec& s, const Engine& engine) {
    validate_spec(s, engine);
    const auto& def = engine.get(s.calculator_id);

    std::string t = fmt::format("# {} ({})\n\n## Formula\n{}\n\n## Parameters\n", s.name, s.calculator_id, s.formula_text);
    for (const auto& p : def.params) {
        const auto& d = *std::find_if(s.parameter_docs.begin(), s.parameter_docs.end(),
                                      [&](const auto& x) { return x.name == p.name; });
        std::string kind;
        switch (p.kind) {
            case ParamKind::numeric: kind = d.unit; break;
            case ParamKind::boolean: kind = "yes/no"; break;
            case ParamKind::categorical: {
                kind = "one of: ";
                for (std::size_t i = 0; i < p.labels.size(); ++i) kind += (i ? ", " : "") + p.labels[i];
                break;
            }
            case ParamKind::date: kind = "date"; break;
        }
        t += fmt::format("- {} [{}]{}: {}\n", d.name, kind, p.required ? "" : " (optional)", d.definition);
    }

    std::string conv;
    for (const auto& p : def.params) {
        const auto& d = *std::find_if(s.parameter_docs.begin(), s.parameter_docs.end(),
                                      [&](const auto& x) { return x.name == p.name; });
        if (!d.conversion_notes.empty()) conv += fmt::format("- {}: {}\n", d.name, d.conversion_notes);
    }
    t += "\n## Unit conversions\n";
    t += conv.empty() ? "No conversions needed; all inputs are unitless or categorical.\n" : conv;

    t += "\n## Version notes\n";
    t += s.version_notes.empty() ? "Single published version." : s.version_notes;
    t += "\n\n## References\n";
    for (const auto& r : s.references) t += "- " + r + "\n";
    return {t, sha256_hex(t)};
}

// ---------------------------------------------------------------------------
// SpecBook

SpecBook SpecBook::load_dir(const std::filesystem::path& dir, const Engine& engine) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError(dir.string(), "not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    SpecBook book;
    for (const auto& f : files) {
        auto spec = load_spec_file(f);
        if (f.stem().string() != spec.calculator_id)
            throw InvalidSpec(spec.calculator_id, "file name " + f.filename().string() + " does not match calculator_id");
        auto r = render(spec, engine);
        book.rendered_.emplace(spec.calculator_id, std::move(r));
        book.specs_.emplace(spec.calculator_id, std::move(spec));
    }
    return book;
}

const CalculatorSpec* SpecBook::find(std::string_view id) const {
    auto it = specs_.find(normalize_calculator_id(id));
    return it == specs_.end() ? nullptr : &it->second;
}

const RenderedSpec& SpecBook::rendered(std::string_view id) const {
    auto it = rendered_.find(normalize_calculator_id(id));
    if (it == rendered_.end()) throw MissingSpec(std::string(id));
    return it->second;
}

std::vector<std::string> SpecBook::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : specs_) out.push_back(id);
    return out;
}

std::vector<std::string> SpecBook::missing(const Engine& engine) const {
    std::vector<std::string> out;
    for (const auto& d : engine.calculators())
        if (!specs_.contains(d.id)) out.push_back(d.id);
    return out;
}

std::filesystem::path default_spec_dir() {
    if (const char* env = std::getenv("MEDCALC_SPECS"); env && *env) return env;
    const std::filesystem::path installed(MEDCALC_INSTALL_SPEC_DIR);
    if (!installed.empty() && std::filesystem::is_directory(installed)) return installed;
    return MEDCALC_SOURCE_SPEC_DIR;
}

}  // namespace medcalc
