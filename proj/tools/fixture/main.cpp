// Writes the synthetic fixture dataset: N rows per calculator, labelled by
// the chosen engine mode, with reference parameters for regeneration.

#include "medcalc/dataset.hpp"
#include "medcalc/fixture.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Generate the synthetic benchmark fixture"};
    int per_calculator = 20;
    std::uint64_t seed = 20240601;
    std::string mode = "legacy";
    std::string out = "data/verified_fixture.csv";
    app.add_option("-n,--per-calculator", per_calculator, "Rows per calculator")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--label-mode", mode, "Engine mode for the ground-truth labels (corrected, legacy, legacy:a,b)");
    app.add_option("-o,--out", out, "Output CSV path");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto& engine = medcalc::default_engine();
        const auto rows = medcalc::make_fixture(engine, per_calculator, seed, medcalc::EngineMode::parse(mode));
        medcalc::save_dataset(out, rows);
        std::cout << rows.size() << " rows written to " << out << "\n";
    } catch (const medcalc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
