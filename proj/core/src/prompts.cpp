#include "medcalc/error.hpp"
#include "medcalc/harness.hpp"

#include <fmt/format.h>

namespace medcalc {

using nlohmann::json;

namespace {

// Benchmark prompt templates. {note}, {question} and {spec} are the only
// substitutions; everything else is fixed text.

constexpr std::string_view kBaseline =
    R"(<s>[INST] You are a helpful assistant for calculating a score for a given
patient note. Please think step-by-step to solve the question and then
generate the required score. Your output should only contain a JSON dict
formatted as {"step_by_step_thinking":
str(your_step_by_step_thinking_procress_to_solve_the_question), "answer":
str(short_and_direct_answer_of_the_question)}.
Here is the patient note:
{note}

Here is the task:
{question}

Please directly output the JSON dict formatted as
{"step_by_step_thinking":
str(your_step_by_step_thinking_procress_to_solve_the_question), "answer":
str(short_and_direct_answer_of_the_question)}: [/INST])";

constexpr std::string_view kOpenBookSystem =
    R"(You are a clinical extraction assistant. Use only the patient note. The
calculator specification below is authoritative for parameters, units,
conversions, and formula. Extract parameter values in canonical units. For
each parameter, return an object with "value" and "unit". If a parameter is
missing, set its value to null and note it in extraction_notes. If you can
compute the final value, compute it; otherwise, set answer to "N/A". Output
only a JSON object with the exact schema: {"parameters": {...},
"extraction_notes": [...], "answer": "<value>"} and nothing else. Keep
"answer" as the last field in the JSON.)";

constexpr std::string_view kOpenBookUser = R"(Patient note:
{note}

Calculator specification:
{spec}

Task:
{question}

Return only the JSON object.)";

constexpr std::string_view kGuidance = R"(CRITICAL ENCOUNTER SELECTION RULES:
1) The patient note may contain multiple encounters (outpatient visits, ED
   visits, admissions, follow-ups).
2) INDEX ENCOUNTER (the only encounter you may use for parameter values) is
   defined as: the first ED or inpatient admission described in the note.
   Identify it by setting keywords such as: "emergency department", "ED",
   "admitted", "hospitalized".
3) Do NOT use values from outpatient baseline visits or later follow-ups
   unless the index encounter is missing a required parameter.
4) If a required parameter is missing in the index encounter, use the
   closest earlier value in time as a fallback and explicitly note that
   fallback.

WORKFLOW (must follow in this order):
A) Build a timeline: list each encounter with date (if present) and setting
   (outpatient/ED/inpatient/follow-up).
B) Declare the selected INDEX ENCOUNTER (date + setting) based on the rules
   above.
C) Extract parameter values ONLY from the index encounter (or explicit
   fallback if missing).
D) Apply unit conversions to canonical units.
E) Apply weight-selection logic as specified.
F) Compute the final answer if possible.

CONFLICT HANDLING: If the note contains multiple candidate values for the
same parameter, you must (i) list the alternatives, (ii) state which one
belongs to the index encounter, and (iii) justify the choice.)";

// Single-pass substitution, so slot-like text inside a note stays literal.
std::string fill(std::string_view tpl, const std::string& note, const std::string& question, const std::string& spec) {
    std::string out;
    out.reserve(tpl.size() + note.size() + question.size() + spec.size());
    for (std::size_t i = 0; i < tpl.size();) {
        auto take = [&](std::string_view slot, const std::string& value) {
            if (tpl.compare(i, slot.size(), slot) != 0) return false;
            out += value;
            i += slot.size();
            return true;
        };
        if (take("{note}", note) || take("{question}", question) || take("{spec}", spec)) continue;
        out += tpl[i++];
    }
    return out;
}

}  // namespace

std::string_view to_string(PromptVariant v) noexcept {
    switch (v) {
        case PromptVariant::baseline: return "baseline";
        case PromptVariant::open_book: return "open_book";
        case PromptVariant::open_book_guided: return "open_book_guided";
    }
    return "?";
}

std::optional<PromptVariant> parse_variant(std::string_view t) noexcept {
    if (t == "baseline") return PromptVariant::baseline;
    if (t == "open_book" || t == "open-book") return PromptVariant::open_book;
    if (t == "open_book_guided" || t == "open-book-guided" || t == "guided") return PromptVariant::open_book_guided;
    return std::nullopt;
}

std::string Prompt::text() const { return system.empty() ? user : system + "\n\n" + user; }

std::string Prompt::hash() const { return sha256_hex(text()); }

Prompt build_prompt(PromptVariant variant, const DatasetRow& row, const RenderedSpec* spec) {
    if (variant == PromptVariant::baseline) return {"", fill(kBaseline, row.note, row.question, "")};
    if (!spec) throw MissingSpec(row.calculator_id, std::string(to_string(variant)) + " needs a calculator specification");
    Prompt p{std::string(kOpenBookSystem), fill(kOpenBookUser, row.note, row.question, spec->text)};
    if (variant == PromptVariant::open_book_guided) p.system += "\n\n" + std::string(kGuidance);
    return p;
}

// ---------------------------------------------------------------------------
// Response parsing

namespace {

// End of the balanced object starting at `open`, honouring JSON strings.
std::optional<std::size_t> object_end(std::string_view t, std::size_t open) {
    int depth = 0;
    bool in_string = false, escaped = false;
    for (std::size_t i = open; i < t.size(); ++i) {
        const char c = t[i];
        if (in_string) {
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i;
    }
    return std::nullopt;
}

std::string answer_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "N/A";
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_number_float()) return fmt::format("{}", v.get<double>());
    return v.dump();
}

}  // namespace

ParsedAnswer parse_response(std::string_view text) {
    ParsedAnswer out;
    out.raw = std::string(text);
    std::optional<json> best;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{') continue;
        const auto end = object_end(text, i);
        if (!end) continue;
        const auto candidate = json::parse(text.substr(i, *end - i + 1), nullptr, false);
        if (candidate.is_discarded() || !candidate.is_object()) continue;
        if (candidate.contains("answer")) {
            best = candidate;
            i = *end;  // nested objects of an accepted one are not separate answers
        }
    }
    if (!best) return out;
    out.missing = false;
    out.answer = answer_text((*best)["answer"]);
    if (best->contains("parameters")) out.parameters = (*best)["parameters"];
    if (auto it = best->find("extraction_notes"); it != best->end() && it->is_array())
        for (const auto& n : *it) out.extraction_notes.push_back(n.is_string() ? n.get<std::string>() : n.dump());
    return out;
}

RowOutcome judge_response(const DatasetRow& row, const ParsedAnswer& parsed, const ScoringConfig& cfg) {
    if (parsed.missing) {
        RowOutcome o;
        o.row_id = row.row_id;
        o.calculator_id = row.calculator_id;
        o.category = row.category;
        o.failure_class = FailureClass::parse_failure;
        return o;
    }
    return judge(row, parsed.answer, cfg);
}

}  // namespace medcalc
