#include "medcalc/dataset.hpp"
#include "medcalc/engine.hpp"
#include "medcalc/harness.hpp"
#include "medcalc/scoring.hpp"
#include "medcalc/specbook.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace medcalc;

namespace {

const std::filesystem::path kFixture = std::filesystem::path(MEDCALC_BENCH_DATA) / "verified_fixture.csv";

const std::vector<DatasetRow>& rows() {
    static const auto r = load_dataset(kFixture);
    return r;
}

void BM_ComputeCockcroftGault(benchmark::State& st) {
    const auto& e = default_engine();
    PatientParams p;
    p.set("age", 51, units::sym::years).set("sex", "male");
    p.set("weight", 49, units::sym::kg).set("height", 157, units::sym::cm).set("creatinine", 2.0, units::sym::mg_dl);
    for (auto _ : st) benchmark::DoNotOptimize(e.compute("cockcroft_gault", p));
}
BENCHMARK(BM_ComputeCockcroftGault);

// Every fixture row through params_from_json + compute.
void BM_RegenerateFixture(benchmark::State& st) {
    const auto& e = default_engine();
    for (auto _ : st) benchmark::DoNotOptimize(regenerate_ground_truth(e, rows(), EngineMode::corrected()));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(rows().size()));
}
BENCHMARK(BM_RegenerateFixture)->Unit(benchmark::kMillisecond);

void BM_JudgeEquation(benchmark::State& st) {
    DatasetRow r;
    r.row_id = "1";
    r.calculator_id = "bmi";
    r.category = Category::equation;
    r.ground_truth = "30.28";
    r.lower_limit = 28.766;
    r.upper_limit = 31.794;
    for (auto _ : st) benchmark::DoNotOptimize(judge(r, " 30.1 mL/min"));
}
BENCHMARK(BM_JudgeEquation);

void BM_JudgeRule(benchmark::State& st) {
    DatasetRow r;
    r.row_id = "1";
    r.calculator_id = "gestational_age";
    r.category = Category::rule;
    r.ground_truth = "(6 weeks, 3 days)";
    for (auto _ : st) benchmark::DoNotOptimize(judge(r, "('6 weeks', '3 days')"));
}
BENCHMARK(BM_JudgeRule);

void BM_LoadFixtureCsv(benchmark::State& st) {
    std::ifstream in(kFixture);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto text = buf.str();
    for (auto _ : st) {
        std::istringstream s(text);
        benchmark::DoNotOptimize(load_dataset(s));
    }
    st.SetBytesProcessed(st.iterations() * static_cast<long>(text.size()));
}
BENCHMARK(BM_LoadFixtureCsv)->Unit(benchmark::kMillisecond);

void BM_BuildPromptAndHash(benchmark::State& st) {
    static const auto book = SpecBook::load_dir(default_spec_dir(), default_engine());
    const auto& row = rows().front();
    const auto& spec = book.rendered(row.calculator_id);
    for (auto _ : st) benchmark::DoNotOptimize(build_prompt(PromptVariant::open_book_guided, row, &spec).hash());
}
BENCHMARK(BM_BuildPromptAndHash);

void BM_MockEngineRun(benchmark::State& st) {
    static const auto book = SpecBook::load_dir(default_spec_dir(), default_engine());
    auto ep = make_endpoint(endpoint_profiles().at("mock-engine"), default_engine());
    for (auto _ : st) benchmark::DoNotOptimize(run(rows(), &book, *ep, {.parallelism = static_cast<int>(st.range(0))}));
}
BENCHMARK(BM_MockEngineRun)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
