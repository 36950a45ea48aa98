#pragma once

#include "medcalc/dataset.hpp"
#include "medcalc/scoring.hpp"
#include "medcalc/specbook.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace medcalc {

// ---- prompts ----

enum class PromptVariant { baseline, open_book, open_book_guided };

std::string_view to_string(PromptVariant v) noexcept;
/// Accepts "baseline", "open_book"/"open-book", "open_book_guided"/"guided".
std::optional<PromptVariant> parse_variant(std::string_view text) noexcept;

struct Prompt {
    /// Empty for the single-turn baseline.
    std::string system;
    std::string user;

    /// Both turns joined; the unit of hashing and caching.
    std::string text() const;
    std::string hash() const;
};

/// Throws MissingSpec when an open-book variant gets no spec.
Prompt build_prompt(PromptVariant variant, const DatasetRow& row, const RenderedSpec* spec);

// ---- responses ----

struct ParsedAnswer {
    std::string answer;
    /// No structured object with an "answer" field was found.
    bool missing = true;
    std::optional<nlohmann::json> parameters;
    std::vector<std::string> extraction_notes;
    std::string raw;
};

/// Takes the last JSON object in `text` that has an "answer" field, so
/// prose, code fences and field order do not matter.
ParsedAnswer parse_response(std::string_view text);

/// No object -> parse_failure; otherwise the answer is judged as usual.
RowOutcome judge_response(const DatasetRow& row, const ParsedAnswer& parsed, const ScoringConfig& cfg = {});

// ---- endpoints ----

struct EndpointConfig {
    std::string name = "default";
    /// "http", "mock-oracle" (answers the row's ground truth) or "mock-engine"
    /// (computes the answer from the row's reference parameters).
    std::string kind = "http";
    std::string base_url;
    std::string model;
    /// Name of the environment variable holding the bearer token. The token
    /// itself is never stored.
    std::string token_env = "MEDCALC_API_KEY";
    double timeout_seconds = 120;
    int max_attempts = 3;
    double temperature = 0.0;
    /// First retry delay; doubles per attempt.
    double backoff_seconds = 1.0;

    static EndpointConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    /// Identity for cache keys and provenance: kind, base_url, model.
    std::string descriptor() const;
};

/// Built-in mock profiles plus any "endpoints" entries in a config file.
std::map<std::string, EndpointConfig> endpoint_profiles(const nlohmann::json& config = nlohmann::json::object());

struct CompletionRequest {
    const Prompt& prompt;
    /// Visible to mock endpoints only; an HTTP endpoint sends just the prompt.
    const DatasetRow& row;
};

class Endpoint {
public:
    explicit Endpoint(EndpointConfig cfg) : cfg_(std::move(cfg)) {}
    virtual ~Endpoint() = default;

    /// Raw model text. Throws EndpointError.
    virtual std::string complete(const CompletionRequest& req) = 0;

    const EndpointConfig& config() const noexcept { return cfg_; }
    /// Outbound calls made so far.
    long calls() const noexcept { return calls_.load(); }

protected:
    std::atomic<long> calls_{0};

private:
    EndpointConfig cfg_;
};

/// Throws ConfigError for an unknown kind or an incomplete http profile.
std::unique_ptr<Endpoint> make_endpoint(const EndpointConfig& cfg, const Engine& engine);

// ---- cache ----

/// One file per key under a directory; writes are atomic renames.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    static std::string key(PromptVariant v, const Prompt& p, const EndpointConfig& e);

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& response) const;

private:
    std::filesystem::path dir_;
};

// ---- runs ----

struct RunConfig {
    PromptVariant variant = PromptVariant::open_book;
    int parallelism = 4;
    std::optional<std::filesystem::path> cache_dir;
    ScoringConfig scoring;
};

struct RowRecord {
    std::string row_id;
    std::string calculator_id;
    std::string prompt_hash;
    std::string response;
    ParsedAnswer parsed;
    RowOutcome outcome;
    int attempts = 0;
    bool cached = false;
    /// EndpointError text when every attempt failed; the row is scored as missing.
    std::optional<std::string> error;
};

struct RunResult {
    std::string run_id;
    PromptVariant variant = PromptVariant::open_book;
    EndpointConfig endpoint;
    std::vector<RowRecord> rows;  // dataset order
    long outbound_calls = 0;
    double seconds = 0;

    std::vector<RowOutcome> outcomes() const;
    /// Throws EmptyRun.
    AccuracyReport accuracy() const;
    std::vector<std::string> failed_row_ids() const;

    nlohmann::json summary_json() const;
    /// config.json, records.jsonl and summary.json under `dir`.
    void write(const std::filesystem::path& dir) const;
    /// Reads a directory written by write(). Throws IoError/ParseError.
    static RunResult read(const std::filesystem::path& dir);
};

/// Re-parses and re-judges cached responses against `rows`; no calls.
RunResult rescore(const RunResult& prior, const std::vector<DatasetRow>& rows, const ScoringConfig& cfg = {});

/// Prompts every row, calls the endpoint (cache first), scores the answers.
/// `specs` may be null for the baseline variant. Throws ConfigError and
/// MissingSpec; endpoint failures are recorded per row.
RunResult run(const std::vector<DatasetRow>& rows, const SpecBook* specs, Endpoint& endpoint, const RunConfig& cfg);

struct EscalationResult {
    RunResult run;
    int prior_failures = 0;
    int recovered = 0;

    double recovery_rate() const { return prior_failures == 0 ? 0.0 : static_cast<double>(recovered) / prior_failures; }
};

/// Reruns only the rows `prior` got wrong.
EscalationResult escalate(const RunResult& prior, const std::vector<DatasetRow>& rows, const SpecBook* specs,
                          Endpoint& endpoint, const RunConfig& cfg);

}  // namespace medcalc
