#include "medcalc/error.hpp"
#include "medcalc/harness.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <mutex>
#include <random>
#include <thread>

namespace medcalc {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Endpoint configuration

EndpointConfig EndpointConfig::from_json(const json& j) {
    EndpointConfig c;
    try {
        c.name = j.value("name", c.name);
        c.kind = j.value("kind", c.kind);
        c.base_url = j.value("base_url", c.base_url);
        c.model = j.value("model", c.model);
        c.token_env = j.value("token_env", c.token_env);
        c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
        c.max_attempts = j.value("max_attempts", c.max_attempts);
        c.temperature = j.value("temperature", c.temperature);
        c.backoff_seconds = j.value("backoff_seconds", c.backoff_seconds);
    } catch (const json::exception& e) {
        throw ConfigError("endpoint " + c.name, e.what());
    }
    if (j.contains("token")) throw ConfigError("endpoint " + c.name, "put the token in the environment, not the config");
    if (c.max_attempts < 1) throw ConfigError("endpoint " + c.name, "max_attempts must be at least 1");
    if (c.timeout_seconds <= 0) throw ConfigError("endpoint " + c.name, "timeout_seconds must be positive");
    return c;
}

json EndpointConfig::to_json() const {
    return {{"name", name},
            {"kind", kind},
            {"base_url", base_url},
            {"model", model},
            {"token_env", token_env},
            {"timeout_seconds", timeout_seconds},
            {"max_attempts", max_attempts},
            {"temperature", temperature},
            {"backoff_seconds", backoff_seconds}};
}

std::string EndpointConfig::descriptor() const { return fmt::format("{}|{}|{}", kind, base_url, model); }

std::map<std::string, EndpointConfig> endpoint_profiles(const json& config) {
    std::map<std::string, EndpointConfig> out;
    for (const char* kind : {"mock-oracle", "mock-engine"}) {
        EndpointConfig c;
        c.name = kind;
        c.kind = kind;
        c.model = kind;
        c.max_attempts = 1;
        c.backoff_seconds = 0;
        out.emplace(kind, c);
    }
    if (config.contains("endpoints")) {
        const auto& eps = config["endpoints"];
        if (!eps.is_object()) throw ConfigError("endpoints", "expected an object of named profiles");
        for (const auto& [name, j] : eps.items()) {
            auto c = EndpointConfig::from_json(j);
            c.name = name;
            out[name] = c;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Endpoints

namespace {

class OracleEndpoint final : public Endpoint {
public:
    using Endpoint::Endpoint;
    std::string complete(const CompletionRequest& req) override {
        ++calls_;
        return json{{"parameters", json::object()}, {"extraction_notes", json::array()}, {"answer", req.row.ground_truth}}
            .dump();
    }
};

class EngineEndpoint final : public Endpoint {
public:
    EngineEndpoint(EndpointConfig cfg, const Engine& engine) : Endpoint(std::move(cfg)), engine_(engine) {}

    std::string complete(const CompletionRequest& req) override {
        ++calls_;
        json params = req.row.extracted_params.value_or(json::object());
        json notes = json::array();
        std::string answer = "N/A";
        try {
            const auto& def = engine_.get(req.row.calculator_id);
            answer = engine_.compute(def.id, engine_.params_from_json(def, params)).display;
        } catch (const Error& e) {
            notes.push_back(e.what());
        }
        // "answer" last, as the prompt contract asks.
        return fmt::format(R"({{"parameters": {}, "extraction_notes": {}, "answer": {}}})", params.dump(), notes.dump(),
                           json(answer).dump());
    }

private:
    const Engine& engine_;
};

class HttpEndpoint final : public Endpoint {
public:
    explicit HttpEndpoint(EndpointConfig cfg) : Endpoint(std::move(cfg)) {
        const auto& url = config().base_url;
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) throw ConfigError("endpoint " + config().name, "base_url needs a scheme");
        const auto path_start = url.find('/', scheme_end + 3);
        origin_ = url.substr(0, path_start);
        path_ = path_start == std::string::npos ? "" : url.substr(path_start);
        while (!path_.empty() && path_.back() == '/') path_.pop_back();
        path_ += "/chat/completions";
        if (config().model.empty()) throw ConfigError("endpoint " + config().name, "model is required");
    }

    std::string complete(const CompletionRequest& req) override {
        ++calls_;
        json messages = json::array();
        if (!req.prompt.system.empty()) messages.push_back({{"role", "system"}, {"content", req.prompt.system}});
        messages.push_back({{"role", "user"}, {"content", req.prompt.user}});
        const json body{{"model", config().model}, {"temperature", config().temperature}, {"messages", messages}};

        httplib::Client cli(origin_);
        const auto t = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::duration<double>(config().timeout_seconds));
        cli.set_connection_timeout(t);
        cli.set_read_timeout(t);
        cli.set_write_timeout(t);
        httplib::Headers headers;
        if (const char* token = std::getenv(config().token_env.c_str()); token && *token)
            headers.emplace("Authorization", std::string("Bearer ") + token);

        auto res = cli.Post(path_, headers, body.dump(), "application/json");
        if (!res) throw EndpointError(config().name, "transport: " + httplib::to_string(res.error()));
        if (res->status < 200 || res->status >= 300)
            throw EndpointError(config().name, fmt::format("HTTP {}", res->status));
        const auto reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded()) throw EndpointError(config().name, "response is not JSON");
        try {
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception&) {
            throw EndpointError(config().name, "response has no choices[0].message.content");
        }
    }

private:
    std::string origin_;
    std::string path_;
};

}  // namespace

std::unique_ptr<Endpoint> make_endpoint(const EndpointConfig& cfg, const Engine& engine) {
    if (cfg.kind == "mock-oracle") return std::make_unique<OracleEndpoint>(cfg);
    if (cfg.kind == "mock-engine") return std::make_unique<EngineEndpoint>(cfg, engine);
    if (cfg.kind == "http") return std::make_unique<HttpEndpoint>(cfg);
    throw ConfigError("endpoint " + cfg.name, "unknown kind '" + cfg.kind + "'");
}

// ---------------------------------------------------------------------------
// Cache

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError(dir_.string(), ec.message());
}

std::string ResponseCache::key(PromptVariant v, const Prompt& p, const EndpointConfig& e) {
    std::string material(to_string(v));
    material += '\0';
    material += p.text();
    material += '\0';
    material += e.descriptor();
    material += '\0';
    material += e.model;
    return sha256_hex(material);
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
    std::ifstream in(dir_ / (key + ".json"), std::ios::binary);
    if (!in) return std::nullopt;
    const auto j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("response") || !j["response"].is_string()) return std::nullopt;
    return j["response"].get<std::string>();
}

void ResponseCache::put(const std::string& key, const std::string& response) const {
    static std::atomic<unsigned long> counter{0};
    const auto tmp = dir_ / fmt::format(".{}.{}.tmp", key, counter++);
    {
        std::ofstream out(tmp, std::ios::binary);
        out << json{{"response", response}}.dump();
        if (!out) throw IoError(tmp.string(), "write failed");
    }
    std::error_code ec;
    fs::rename(tmp, dir_ / (key + ".json"), ec);
    if (ec) throw IoError(tmp.string(), ec.message());
}

// ---------------------------------------------------------------------------
// Runs

std::vector<RowOutcome> RunResult::outcomes() const {
    std::vector<RowOutcome> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.outcome);
    return out;
}

AccuracyReport RunResult::accuracy() const {
    const auto o = outcomes();
    return medcalc::accuracy(o);
}

std::vector<std::string> RunResult::failed_row_ids() const {
    std::vector<std::string> out;
    for (const auto& r : rows)
        if (!r.outcome.correct) out.push_back(r.row_id);
    return out;
}

json RunResult::summary_json() const {
    json j{{"run_id", run_id},
           {"variant", to_string(variant)},
           {"endpoint", endpoint.to_json()},
           {"rows", rows.size()},
           {"outbound_calls", outbound_calls},
           {"seconds", seconds},
           {"errors", std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.error.has_value(); })}};
    if (!rows.empty()) j["accuracy"] = accuracy().to_json();
    return j;
}

void RunResult::write(const fs::path& dir) const {
    fs::create_directories(dir);
    auto dump = [&](const fs::path& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary);
        out << text;
        if (!out) throw IoError(p.string(), "write failed");
    };
    dump(dir / "config.json",
         json{{"run_id", run_id}, {"variant", to_string(variant)}, {"endpoint", endpoint.to_json()}}.dump(2) + "\n");
    std::string lines;
    for (const auto& r : rows) {
        json rec{{"row_id", r.row_id},
                 {"calculator_id", r.calculator_id},
                 {"category", to_string(r.outcome.category)},
                 {"prompt_hash", r.prompt_hash},
                 {"response", r.response},
                 {"answer", r.parsed.answer},
                 {"answer_missing", r.parsed.missing},
                 {"correct", r.outcome.correct},
                 {"failure_class", to_string(r.outcome.failure_class)},
                 {"attempts", r.attempts},
                 {"cached", r.cached}};
        if (r.error) rec["error"] = *r.error;
        lines += rec.dump() + "\n";
    }
    dump(dir / "records.jsonl", lines);
    dump(dir / "summary.json", summary_json().dump(2) + "\n");
}

RunResult RunResult::read(const fs::path& dir) {
    auto load = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw IoError(p.string(), "cannot open");
        return std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    };
    RunResult r;
    try {
        const auto cfg = json::parse(load(dir / "config.json"));
        r.run_id = cfg.at("run_id").get<std::string>();
        const auto v = parse_variant(cfg.at("variant").get<std::string>());
        if (!v) throw ParseError((dir / "config.json").string(), "unknown variant");
        r.variant = *v;
        r.endpoint = EndpointConfig::from_json(cfg.at("endpoint"));

        const auto lines = load(dir / "records.jsonl");
        std::size_t pos = 0;
        int line_no = 0;
        while (pos < lines.size()) {
            const auto eol = std::min(lines.find('\n', pos), lines.size());
            const auto line = std::string_view(lines).substr(pos, eol - pos);
            pos = eol + 1;
            ++line_no;
            if (line.empty()) continue;
            const auto j = json::parse(line);
            RowRecord rec;
            rec.row_id = j.at("row_id").get<std::string>();
            rec.calculator_id = j.at("calculator_id").get<std::string>();
            rec.prompt_hash = j.at("prompt_hash").get<std::string>();
            rec.response = j.at("response").get<std::string>();
            rec.attempts = j.at("attempts").get<int>();
            rec.cached = j.at("cached").get<bool>();
            if (j.contains("error")) rec.error = j["error"].get<std::string>();
            rec.parsed = parse_response(rec.response);
            rec.outcome.row_id = rec.row_id;
            rec.outcome.calculator_id = rec.calculator_id;
            const auto cat = parse_category(j.at("category").get<std::string>());
            if (!cat) throw ParseError(fmt::format("{}:{}", (dir / "records.jsonl").string(), line_no), "bad category");
            rec.outcome.category = *cat;
            rec.outcome.given_answer = rec.parsed.answer;
            rec.outcome.correct = j.at("correct").get<bool>();
            const auto fc = parse_failure_class(j.at("failure_class").get<std::string>());
            if (!fc) throw ParseError(fmt::format("{}:{}", (dir / "records.jsonl").string(), line_no), "bad failure_class");
            rec.outcome.failure_class = *fc;
            r.rows.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw ParseError(dir.string(), e.what());
    }
    return r;
}

RunResult rescore(const RunResult& prior, const std::vector<DatasetRow>& rows, const ScoringConfig& cfg) {
    std::map<std::string, const DatasetRow*> by_id;
    for (const auto& r : rows) by_id.emplace(r.row_id, &r);
    RunResult out = prior;
    for (auto& rec : out.rows) {
        auto it = by_id.find(rec.row_id);
        if (it == by_id.end()) throw ConfigError("row " + rec.row_id, "run row is not in the dataset");
        rec.parsed = parse_response(rec.response);
        rec.outcome = judge_response(*it->second, rec.parsed, cfg);
        if (rec.error && rec.response.empty()) rec.outcome.failure_class = FailureClass::missing_answer;
    }
    out.outbound_calls = 0;
    return out;
}

RunResult run(const std::vector<DatasetRow>& rows, const SpecBook* specs, Endpoint& endpoint, const RunConfig& cfg) {
    if (cfg.parallelism < 1) throw ConfigError("parallelism", "must be at least 1");
    if (cfg.variant != PromptVariant::baseline && !specs)
        throw ConfigError("specs", "open-book variants need the spec directory");

    const auto start = std::chrono::steady_clock::now();
    const long calls_before = endpoint.calls();
    std::optional<ResponseCache> cache;
    if (cfg.cache_dir) cache.emplace(*cfg.cache_dir);

    // Prompts first, so a missing spec fails the run before any call.
    std::vector<Prompt> prompts;
    prompts.reserve(rows.size());
    std::string id_material(to_string(cfg.variant));
    id_material += endpoint.config().descriptor();
    for (const auto& row : rows) {
        const RenderedSpec* spec = cfg.variant == PromptVariant::baseline ? nullptr : &specs->rendered(row.calculator_id);
        prompts.push_back(build_prompt(cfg.variant, row, spec));
        id_material += '\0' + row.row_id + '\0' + prompts.back().hash() + '\0' + row.ground_truth;
    }

    RunResult result;
    result.run_id = sha256_hex(id_material).substr(0, 16);
    result.variant = cfg.variant;
    result.endpoint = endpoint.config();
    result.rows.resize(rows.size());

    const auto& ec = endpoint.config();
    auto process = [&](std::size_t i) {
        const auto& row = rows[i];
        auto& rec = result.rows[i];
        rec.row_id = row.row_id;
        rec.calculator_id = row.calculator_id;
        rec.prompt_hash = prompts[i].hash();
        const auto key = ResponseCache::key(cfg.variant, prompts[i], ec);

        std::optional<std::string> response;
        if (cache) response = cache->get(key);
        rec.cached = response.has_value();
        for (int attempt = 1; !response && attempt <= ec.max_attempts; ++attempt) {
            rec.attempts = attempt;
            try {
                response = endpoint.complete({prompts[i], row});
                rec.error.reset();
            } catch (const EndpointError& e) {
                rec.error = e.what();
                if (attempt < ec.max_attempts && ec.backoff_seconds > 0)
                    std::this_thread::sleep_for(
                        std::chrono::duration<double>(ec.backoff_seconds * std::pow(2.0, attempt - 1)));
            }
        }
        if (response) {
            if (cache && !rec.cached) cache->put(key, *response);
            rec.response = *response;
            rec.parsed = parse_response(*response);
        } else {
            rec.parsed.raw.clear();
        }
        rec.outcome = judge_response(row, rec.parsed, cfg.scoring);
        if (!response) rec.outcome.failure_class = FailureClass::missing_answer;
    };

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < rows.size();) {
            try {
                process(i);
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    const int n = std::min<int>(cfg.parallelism, std::max<std::size_t>(rows.size(), 1));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    if (first_error) std::rethrow_exception(first_error);

    result.outbound_calls = endpoint.calls() - calls_before;
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

EscalationResult escalate(const RunResult& prior, const std::vector<DatasetRow>& rows, const SpecBook* specs,
                          Endpoint& endpoint, const RunConfig& cfg) {
    std::map<std::string, const DatasetRow*> by_id;
    for (const auto& r : rows) by_id.emplace(r.row_id, &r);

    std::vector<DatasetRow> failed;
    for (const auto& id : prior.failed_row_ids()) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw ConfigError("row " + id, "prior run row is not in the dataset");
        failed.push_back(*it->second);
    }

    EscalationResult out;
    out.prior_failures = static_cast<int>(failed.size());
    out.run = run(failed, specs, endpoint, cfg);
    out.recovered = static_cast<int>(
        std::count_if(out.run.rows.begin(), out.run.rows.end(), [](const auto& r) { return r.outcome.correct; }));
    return out;
}

}  // namespace medcalc
