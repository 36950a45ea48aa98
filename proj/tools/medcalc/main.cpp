#include "exit_codes.hpp"

#include "medcalc/dataset.hpp"
#include "medcalc/engine.hpp"
#include "medcalc/format.hpp"
#include "medcalc/harness.hpp"
#include "medcalc/scoring.hpp"
#include "medcalc/specbook.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>

#ifndef MEDCALC_SOURCE_DATA_DIR
#define MEDCALC_SOURCE_DATA_DIR "data"
#endif
#ifndef MEDCALC_INSTALL_DATA_DIR
#define MEDCALC_INSTALL_DATA_DIR ""
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace medcalc;

namespace {

fs::path data_dir() {
    if (const char* env = std::getenv("MEDCALC_DATA"); env && *env) return env;
    const fs::path installed(MEDCALC_INSTALL_DATA_DIR);
    if (!installed.empty() && fs::is_directory(installed)) return installed;
    return MEDCALC_SOURCE_DATA_DIR;
}

std::string default_dataset() { return (data_dir() / "verified_fixture.csv").string(); }

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path, e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw IoError(path.string(), "write failed");
}

ColumnMapping mapping_from(const std::string& path) {
    return path.empty() ? ColumnMapping{} : ColumnMapping::from_json(read_json_file(path));
}

SpecBook load_specs(const std::string& dir) {
    return SpecBook::load_dir(dir.empty() ? default_spec_dir() : fs::path(dir), default_engine());
}

// ---------------------------------------------------------------------------
// calc

struct CalcArgs {
    std::string id;
    std::string params_file;
    std::string mode = "corrected";
    bool json_out = false;
    bool explain = false;
};

bool is_bool_word(const std::string& s) {
    for (const char* w : {"true", "false", "yes", "no", "1", "0"})
        if (s == w) return true;
    return false;
}

// --name value | --name=value | --flag (booleans only).
json params_from_flags(const CalculatorDef& def, const std::vector<std::string>& args) {
    json j = json::object();
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string a = args[i];
        if (a.rfind("--", 0) != 0) throw InvalidParameter(a, "expected --<parameter> <value>");
        a = a.substr(2);
        std::optional<std::string> value;
        if (auto eq = a.find('='); eq != std::string::npos) {
            value = a.substr(eq + 1);
            a = a.substr(0, eq);
        }
        std::replace(a.begin(), a.end(), '-', '_');
        const auto* spec = def.param(a);
        if (!spec) throw InvalidParameter(a, "not a parameter of " + def.id);
        if (spec->kind == ParamKind::boolean) {
            if (!value && i + 1 < args.size() && is_bool_word(args[i + 1])) value = args[++i];
            const std::string v = value.value_or("true");
            j[a] = v == "true" || v == "yes" || v == "1";
            continue;
        }
        if (!value) {
            if (i + 1 >= args.size()) throw InvalidParameter(a, "needs a value");
            value = args[++i];
        }
        j[a] = *value;
    }
    return j;
}

int cmd_calc(const CalcArgs& a, const std::vector<std::string>& extras) {
    const auto& engine = default_engine();
    const auto& def = engine.get(a.id);
    if (!a.params_file.empty() && !extras.empty())
        throw InvalidParameter("--params-file", "give parameters as flags or as a file, not both");
    const json pj = a.params_file.empty() ? params_from_flags(def, extras) : read_json_file(a.params_file);
    const auto mode = EngineMode::parse(a.mode);
    const auto r = engine.compute(def.id, engine.params_from_json(def, pj), mode);

    if (a.json_out) {
        json j{{"calculator", def.id}, {"mode", mode.describe()}, {"answer", r.display}};
        if (!r.is_label()) j["value"] = r.value();
        if (r.is_numeric()) j["unit"] = def.result_unit.symbol();
        for (const auto& [k, v] : r.intermediates) j["intermediates"][k] = v;
        if (!r.annotations.empty()) j["annotations"] = r.annotations;
        std::cout << j.dump(2) << "\n";
        return cli::ok;
    }
    std::cout << r.display << "\n";
    if (a.explain) {
        for (const auto& [k, v] : r.intermediates) std::cout << "  " << k << " = " << format_significant(v, 6) << "\n";
        for (const auto& n : r.annotations) std::cout << "  note: " << n << "\n";
    }
    return cli::ok;
}

// ---------------------------------------------------------------------------
// main

int run_cli(int argc, char** argv) {
    CLI::App app{"Clinical calculator engine and benchmark harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "medcalc 0.3.0");

    // calc
    CalcArgs calc;
    auto* c = app.add_subcommand("calc", "Compute one calculator");
    c->add_option("id", calc.id, "Calculator id (dashes or underscores)")->required();
    auto* pf = c->add_option("--params-file", calc.params_file, "JSON object of parameters");
    c->add_option("--mode", calc.mode, "corrected | legacy | legacy:<bug>,<bug>")->capture_default_str();
    c->add_flag("--json", calc.json_out, "Print the result as JSON");
    c->add_flag("--explain", calc.explain, "Also print intermediate values")->excludes(c->get_option("--json"));
    c->allow_extras();
    c->footer("Parameters: --<name> <value>, e.g. --age 51 --weight 49kg --creatinine \"2.0 mg/dL\".\n"
              "Bare numbers take the parameter's canonical unit; boolean findings may omit the value.\n"
              "List parameters with `medcalc registry <id>`. Not combinable with --params-file.");
    (void)pf;

    // registry
    std::string reg_id;
    bool reg_json = false;
    auto* r = app.add_subcommand("registry", "List calculators, their parameters and affecting bugs");
    r->add_option("id", reg_id, "Only this calculator");
    r->add_flag("--json", reg_json, "Machine-readable JSON instead of tab-separated text");

    // spec
    auto* s = app.add_subcommand("spec", "Calculator specifications");
    s->require_subcommand(1);
    std::string spec_dir, spec_id;
    bool spec_hash = false;
    auto* s_show = s->add_subcommand("show", "Print the rendered specification");
    s_show->add_option("id", spec_id, "Calculator id")->required();
    s_show->add_option("--dir", spec_dir, "Spec directory (default: shipped specs)");
    auto* s_render = s->add_subcommand("render", "Print the rendered text and its SHA-256");
    s_render->add_option("id", spec_id, "Calculator id")->required();
    s_render->add_option("--dir", spec_dir, "Spec directory (default: shipped specs)");
    s_render->add_flag("--hash-only", spec_hash, "Print only the digest");
    auto* s_validate = s->add_subcommand("validate", "Check every spec against the engine");
    s_validate->add_option("--dir", spec_dir, "Spec directory (default: shipped specs)");

    // dataset
    auto* d = app.add_subcommand("dataset", "Benchmark rows");
    d->require_subcommand(1);
    std::string ds_path = default_dataset(), ds_mapping, ds_out, ds_report, ds_mode = "corrected";
    std::size_t ds_n = 275;
    std::uint64_t ds_seed = 0;
    bool ds_verbose = false;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--dataset", ds_path, "Dataset CSV")->capture_default_str();
        sub->add_option("--mapping", ds_mapping, "Column mapping JSON (default: built-in header names)");
    };
    auto* d_load = d->add_subcommand("load", "Load and summarize a dataset");
    add_common(d_load);
    d_load->add_flag("-v,--verbose", ds_verbose, "Per-calculator row counts");
    auto* d_regen = d->add_subcommand("regen", "Regenerate ground truth and limits with the engine");
    add_common(d_regen);
    d_regen->add_option("--mode", ds_mode, "Engine mode for the new labels")->capture_default_str();
    d_regen->add_option("-o,--out", ds_out, "Write the regenerated dataset here");
    d_regen->add_option("--report", ds_report, "Write the JSON diff report here");
    auto* d_sub = d->add_subcommand("subsample", "Stratified subsample");
    add_common(d_sub);
    d_sub->add_option("-n,--count", ds_n, "Rows to keep")->capture_default_str();
    d_sub->add_option("--seed", ds_seed, "Selection seed")->capture_default_str();
    d_sub->add_option("-o,--out", ds_out, "Write the subsample here")->required();

    // eval
    auto* e = app.add_subcommand("eval", "Model runs");
    e->require_subcommand(1);
    std::string ev_variant = "open_book", ev_endpoint, ev_config, ev_out, ev_cache, ev_regen, ev_prior, ev_run;
    int ev_parallel = 4;
    auto add_run_opts = [&](CLI::App* sub) {
        add_common(sub);
        sub->add_option("--variant", ev_variant, "baseline | open_book | open_book_guided")->capture_default_str();
        sub->add_option("--endpoint", ev_endpoint, "Endpoint profile (mock-oracle, mock-engine, or from --config)")
            ->required();
        sub->add_option("--config", ev_config, "JSON file with an \"endpoints\" object of named profiles");
        sub->add_option("--specs", spec_dir, "Spec directory (default: shipped specs)");
        sub->add_option("-o,--out", ev_out, "Run directory (default: runs/<run id>)");
        sub->add_option("--cache", ev_cache, "Response cache directory");
        sub->add_option("-j,--parallelism", ev_parallel, "Concurrent requests")->capture_default_str()->check(
            CLI::PositiveNumber);
        sub->add_option("--regenerate", ev_regen, "Regenerate ground truth in this engine mode before running");
    };
    auto* e_run = e->add_subcommand("run", "Prompt every row and score the answers");
    add_run_opts(e_run);
    auto* e_esc = e->add_subcommand("escalate", "Rerun the rows a prior run got wrong");
    add_run_opts(e_esc);
    e_esc->add_option("--prior", ev_prior, "Prior run directory")->required();
    auto* e_score = e->add_subcommand("score", "Re-judge a run's stored responses without calling the model");
    add_common(e_score);
    e_score->add_option("--run", ev_run, "Run directory")->required();
    e_score->add_option("--regenerate", ev_regen, "Regenerate ground truth in this engine mode before scoring");

    // report
    auto* rp = app.add_subcommand("report", "Accuracy, bounds and label diffs");
    rp->require_subcommand(1);
    int rp_correct = 0, rp_total = 0, rp_base = 0, rp_rec = 0, rp_gt = 0, rp_amb = 0;
    std::string rp_run, rp_adj, rp_report, rp_model = "model", rp_prompt = "";
    bool rp_json = false;
    auto* r_acc = rp->add_subcommand("accuracy", "Accuracy from counts or from a run directory");
    auto* o_correct = r_acc->add_option("--correct", rp_correct, "Correct rows");
    auto* o_total = r_acc->add_option("--total", rp_total, "Total rows");
    auto* o_run = r_acc->add_option("--run", rp_run, "Run directory");
    o_run->excludes(o_correct)->excludes(o_total);
    o_correct->needs(o_total);
    o_total->needs(o_correct);
    r_acc->add_option("--model", rp_model, "Model label for the table row")->capture_default_str();
    r_acc->add_option("--prompt", rp_prompt, "Prompt label for the table row (default: the run's variant)");
    r_acc->add_flag("--json", rp_json, "Machine-readable output");
    auto* r_bounds = rp->add_subcommand("bounds", "Conservative and optimistic composite upper bounds");
    r_bounds->add_option("--base", rp_base, "Rows correct under the best prompt")->required();
    r_bounds->add_option("--recovered", rp_rec, "Rows recovered by escalation")->required();
    auto* o_gt = r_bounds->add_option("--gt", rp_gt, "Residuals adjudicated as ground-truth issues");
    auto* o_amb = r_bounds->add_option("--ambiguous", rp_amb, "Residuals adjudicated as ambiguous");
    auto* o_adj = r_bounds->add_option("--adjudication", rp_adj, "CSV with row_id,category for every residual");
    o_adj->excludes(o_gt)->excludes(o_amb);
    r_bounds->add_option("--total", rp_total, "Dataset rows")->required();
    r_bounds->add_flag("--json", rp_json, "Machine-readable output");
    auto* r_diff = rp->add_subcommand("diff", "Summarize a regeneration report");
    r_diff->add_option("--report", rp_report, "JSON report written by `dataset regen --report`")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? cli::ok : cli::usage;
    }

    const auto& engine = default_engine();

    if (*c) return cmd_calc(calc, c->remaining());

    if (*r) {
        if (reg_id.empty()) {
            std::cout << (reg_json ? engine.registry_json().dump(2) + "\n" : engine.registry_table());
        } else {
            const auto& def = engine.get(reg_id);
            json all = engine.registry_json();
            for (const auto& x : all)
                if (x["id"] == def.id) std::cout << x.dump(2) << "\n";
        }
        return cli::ok;
    }

    if (*s_show) {
        std::cout << load_specs(spec_dir).rendered(spec_id).text;
        return cli::ok;
    }
    if (*s_render) {
        const auto book = load_specs(spec_dir);
        const auto& rs = book.rendered(spec_id);
        if (!spec_hash) std::cout << rs.text << "\n";
        std::cout << "sha256 " << rs.hash << "\n";
        return cli::ok;
    }
    if (*s_validate) {
        const auto book = load_specs(spec_dir);
        const auto missing = book.missing(engine);
        for (const auto& m : missing) std::cerr << "missing spec: " << m << "\n";
        std::cout << book.size() << " specs valid";
        if (!missing.empty()) {
            std::cout << ", " << missing.size() << " calculators without a spec\n";
            return cli::bad_document;
        }
        std::cout << "\n";
        return cli::ok;
    }

    if (*d_load) {
        const auto rows = load_dataset(ds_path, mapping_from(ds_mapping));
        std::map<std::string, int> per;
        int equation = 0, with_params = 0;
        for (const auto& row : rows) {
            ++per[row.calculator_id];
            equation += row.category == Category::equation;
            with_params += row.extracted_params.has_value();
        }
        std::cout << fmt::format("{} rows, {} calculators, {} equation, {} rule, {} with reference parameters\n",
                                 rows.size(), per.size(), equation, rows.size() - equation, with_params);
        if (ds_verbose)
            for (const auto& [id, n] : per) std::cout << fmt::format("  {:<32} {}\n", id, n);
        return cli::ok;
    }
    if (*d_regen) {
        const auto rows = load_dataset(ds_path, mapping_from(ds_mapping));
        const auto mode = EngineMode::parse(ds_mode);
        const auto res = regenerate_ground_truth(engine, rows, mode);
        std::cout << res.report.summary();
        std::cout << "changed rows: " << res.report.changed_count() << "\n";
        if (!ds_out.empty()) save_dataset(ds_out, res.rows, mapping_from(ds_mapping));
        if (!ds_report.empty()) {
            json j = res.report.to_json();
            j["config"] = {{"command", "dataset regen"}, {"dataset", ds_path}, {"mapping", ds_mapping},
                           {"mode", ds_mode}, {"out", ds_out}};
            write_text(ds_report, j.dump(2) + "\n");
        }
        return res.report.failed_count() == 0 ? cli::ok : cli::bad_document;
    }
    if (*d_sub) {
        const auto rows = load_dataset(ds_path, mapping_from(ds_mapping));
        const auto sub = stratified_subsample(rows, ds_n, ds_seed);
        save_dataset(ds_out, sub, mapping_from(ds_mapping));
        std::map<std::string, int> per;
        for (const auto& row : sub) ++per[row.calculator_id];
        const auto [lo, hi] = std::minmax_element(per.begin(), per.end(),
                                                  [](const auto& a, const auto& b) { return a.second < b.second; });
        std::cout << fmt::format("{} rows from {} calculators ({}-{} each) written to {}\n", sub.size(), per.size(),
                                 lo->second, hi->second, ds_out);
        return cli::ok;
    }

    if (*e_run || *e_esc || *e_score) {
        auto rows = load_dataset(ds_path, mapping_from(ds_mapping));
        if (!ev_regen.empty()) {
            auto res = regenerate_ground_truth(engine, rows, EngineMode::parse(ev_regen));
            if (res.report.failed_count() > 0)
                throw MissingEntities(std::to_string(res.report.failed_count()) + " rows",
                                      "could not be regenerated; see `dataset regen`");
            rows = std::move(res.rows);
        }

        if (*e_score) {
            const auto scored = rescore(RunResult::read(ev_run), rows);
            const auto acc = scored.accuracy();
            std::cout << fmt::format("accuracy {} ({}/{})\n", format_percent(acc.fraction()), acc.overall.correct,
                                     acc.overall.total);
            return cli::ok;
        }

        const auto variant = parse_variant(ev_variant);
        if (!variant) throw ConfigError("--variant", "unknown variant " + ev_variant);
        const auto profiles = endpoint_profiles(ev_config.empty() ? json::object() : read_json_file(ev_config));
        auto prof = profiles.find(ev_endpoint);
        if (prof == profiles.end()) throw ConfigError(ev_endpoint, "no such endpoint profile");
        auto endpoint = make_endpoint(prof->second, engine);

        std::optional<SpecBook> specs;
        if (*variant != PromptVariant::baseline) specs = load_specs(spec_dir);
        RunConfig cfg;
        cfg.variant = *variant;
        cfg.parallelism = ev_parallel;
        if (!ev_cache.empty()) cfg.cache_dir = ev_cache;

        const json snapshot{{"command", *e_run ? "eval run" : "eval escalate"},
                            {"dataset", ds_path},
                            {"mapping", ds_mapping},
                            {"variant", to_string(*variant)},
                            {"endpoint", prof->second.to_json()},
                            {"parallelism", ev_parallel},
                            {"cache", ev_cache},
                            {"regenerate", ev_regen},
                            {"prior", ev_prior}};

        RunResult result;
        std::string headline;
        if (*e_run) {
            result = run(rows, specs ? &*specs : nullptr, *endpoint, cfg);
            const auto acc = result.accuracy();
            headline = fmt::format("accuracy {} ({}/{})", format_percent(acc.fraction()), acc.overall.correct,
                                   acc.overall.total);
        } else {
            auto esc = escalate(RunResult::read(ev_prior), rows, specs ? &*specs : nullptr, *endpoint, cfg);
            headline = fmt::format("recovered {} of {} ({})", esc.recovered, esc.prior_failures,
                                   format_percent(esc.recovery_rate()));
            result = std::move(esc.run);
        }
        const fs::path out = ev_out.empty() ? fs::path("runs") / result.run_id : fs::path(ev_out);
        result.write(out);
        write_text(out / "command.json", snapshot.dump(2) + "\n");
        std::cout << headline << "\n";
        std::cout << fmt::format("run {} written to {} ({} calls)\n", result.run_id, out.string(), result.outbound_calls);
        return cli::ok;
    }

    if (*r_acc) {
        Tally t{rp_correct, rp_total};
        std::string prompt = rp_prompt;
        std::optional<AccuracyReport> report;
        if (!rp_run.empty()) {
            const auto run = RunResult::read(rp_run);
            report = run.accuracy();
            t = report->overall;
            if (prompt.empty()) prompt = std::string(to_string(run.variant));
        } else if (rp_total <= 0) {
            throw EmptyRun("--total", "give --correct/--total or --run");
        } else if (rp_correct < 0 || rp_correct > rp_total) {
            throw InconsistentCounts("--correct", "must lie in [0, total]");
        }
        if (rp_json) {
            std::cout << (report ? report->to_json() : json{{"correct", t.correct}, {"total", t.total},
                                                            {"accuracy", format_percent(t.fraction())}})
                                 .dump(2)
                      << "\n";
            return cli::ok;
        }
        std::cout << format_percent(t.fraction()) << "\n";
        std::cout << format_accuracy_row(rp_model, prompt.empty() ? "-" : prompt, t) << "\n";
        if (report)
            for (const auto& [cat, ct] : report->by_category)
                std::cout << fmt::format("  {:<10} {}/{} {}\n", cat, ct.correct, ct.total, format_percent(ct.fraction()));
        return cli::ok;
    }
    if (*r_bounds) {
        BoundsEstimate b;
        if (!rp_adj.empty()) {
            std::ifstream in(rp_adj, std::ios::binary);
            if (!in) throw IoError(rp_adj, "cannot open");
            std::vector<ResidualCategory> cats;
            for (const auto& [id, cat] : load_adjudication(in)) cats.push_back(cat);
            b = composite_bounds(rp_base, rp_rec, cats, rp_total);
        } else {
            b = composite_bounds(rp_base, rp_rec, rp_gt, rp_amb, rp_total);
        }
        if (rp_json) {
            std::cout << json{{"base_correct", b.base_correct}, {"recovered", b.recovered}, {"gt_issues", b.gt_issues},
                              {"ambiguous", b.ambiguous}, {"likely_model_errors", b.likely_model_errors},
                              {"total", b.total}, {"conservative", format_percent(b.conservative)},
                              {"optimistic", format_percent(b.optimistic)}}
                             .dump(2)
                      << "\n";
            return cli::ok;
        }
        std::cout << format_percent(b.conservative) << " / " << format_percent(b.optimistic) << "\n";
        return cli::ok;
    }
    if (*r_diff) {
        const auto j = read_json_file(rp_report);
        std::map<std::string, int> by_bug;
        int unattributed = 0;
        for (const auto& row : j.at("entries")) {
            if (!row.value("changed", false)) continue;
            if (row.at("responsible_bugs").empty()) ++unattributed;
            for (const auto& b : row.at("responsible_bugs")) ++by_bug[b.get<std::string>()];
        }
        std::cout << fmt::format("mode {}: {} rows, {} changed, {} not regenerated\n", j.at("mode").get<std::string>(),
                                 j.at("rows").get<int>(), j.at("changed").get<int>(), j.at("failed").get<int>());
        for (const auto& [bug, n] : by_bug) std::cout << fmt::format("  {:<32} {}\n", bug, n);
        if (unattributed) std::cout << fmt::format("  {:<32} {}\n", "(no engine bug)", unattributed);
        return cli::ok;
    }
    return cli::usage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return cli::internal;
    }
}
