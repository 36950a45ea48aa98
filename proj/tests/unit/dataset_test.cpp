#include "medcalc/dataset.hpp"
#include "medcalc/fixture.hpp"
#include "medcalc/scoring.hpp"
#include "support/gen.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

using namespace medcalc;
using medcalc::testing::Gen;

namespace {

const char* kHeader =
    "Row Number,Calculator ID,Category,Patient Note,Question,Ground Truth Answer,Lower Limit,Upper Limit,Relevant Entities\n";

Errc code_of(const std::string& csv) {
    std::istringstream in(csv);
    try {
        load_dataset(in);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error for\n" << csv;
    return Errc::io_error;
}

TEST(Csv, QuotesCommasAndNewlines) {
    std::istringstream in("a,b,c\r\n\"x, y\",\"he said \"\"hi\"\"\",\"line1\nline2\"\n,,\n");
    const auto r = read_csv(in);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[1][0], "x, y");
    EXPECT_EQ(r[1][1], "he said \"hi\"");
    EXPECT_EQ(r[1][2], "line1\nline2");
    EXPECT_EQ(r[2], (CsvRecord{"", "", ""}));
}

TEST(Csv, UnterminatedQuoteNamesLine) {
    std::istringstream in("a,b\n1,\"open\n2,3\n");
    try {
        read_csv(in);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("2"), std::string::npos) << e.what();
    }
}

TEST(CsvProperty, WriteReadRoundTrip) {
    Gen g(21);
    const std::string alphabet = "ab ,\"\n\r\t;xé";
    for (int t = 0; t < 300; ++t) {
        std::vector<CsvRecord> recs;
        const int cols = g.integer(1, 5);
        for (int r = 0; r < g.integer(1, 6); ++r) {
            CsvRecord rec;
            for (int c = 0; c < cols; ++c) {
                std::string f;
                for (int k = 0; k < g.integer(0, 8); ++k) f += alphabet[static_cast<size_t>(g.integer(0, int(alphabet.size()) - 1))];
                rec.push_back(f);
            }
            recs.push_back(rec);
        }
        // A lone empty field is indistinguishable from a blank line.
        if (cols == 1)
            for (auto& rec : recs)
                if (rec[0].empty()) rec[0] = "x";
        std::ostringstream out;
        write_csv(out, recs);
        std::istringstream in(out.str());
        EXPECT_EQ(read_csv(in), recs) << out.str();
    }
}

TEST(Dataset, LoadsDefaultHeaders) {
    std::istringstream in(std::string(kHeader) +
                          "1,bmi,equation,\"Note, with comma\",What is the BMI?,22.86,21.72,24.0,\"{\"\"weight\"\": 70, \"\"height\"\": 175}\"\n"
                          "2,Centor,rule,n,q,3,,,\n");
    const auto rows = load_dataset(in);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].note, "Note, with comma");
    EXPECT_EQ(rows[0].lower_limit, 21.72);
    EXPECT_EQ(rows[0].extracted_params->at("weight"), 70);
    EXPECT_EQ(rows[1].calculator_id, "centor");
    EXPECT_EQ(rows[1].category, Category::rule);
    EXPECT_FALSE(rows[1].lower_limit);
    EXPECT_FALSE(rows[1].extracted_params);
}

TEST(Dataset, CustomMapping) {
    const auto m = ColumnMapping::from_json(nlohmann::json::parse(R"j({
        "row_id": "id", "calculator_id": "calc", "category": "kind", "note": "text", "question": "q",
        "ground_truth": "answer", "lower_limit": "lo", "upper_limit": "hi", "extracted_params": "",
        "category_values": {"lab": "equation", "score": "rule"},
        "calculator_ids": {"Creatinine Clearance (Cockcroft-Gault Equation)": "cockcroft_gault"}})j"));
    std::istringstream in("id,calc,kind,text,q,answer,lo,hi\n"
                          "7,Creatinine Clearance (Cockcroft-Gault Equation),lab,n,q,30.28,28.77,31.79\n");
    const auto rows = load_dataset(in, m);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].calculator_id, "cockcroft_gault");
    EXPECT_EQ(ColumnMapping::from_json(m.to_json()).to_json(), m.to_json());
}

TEST(Dataset, SchemaAndRowErrors) {
    EXPECT_EQ(code_of(""), Errc::schema_error);
    EXPECT_EQ(code_of("Row Number,Category\n1,rule\n"), Errc::schema_error);
    const std::string h = kHeader;
    EXPECT_EQ(code_of(h + "1,bmi,equation,n,q,22.8\n"), Errc::row_error);
    EXPECT_EQ(code_of(h + "1,bmi,equation,n,q,x,1,2,\n"), Errc::row_error);
    EXPECT_EQ(code_of(h + "1,bmi,equation,n,q,22.8,,,\n"), Errc::row_error);
    EXPECT_EQ(code_of(h + "1,bmi,equation,n,q,22.8,23,24,\n"), Errc::row_error);
    EXPECT_EQ(code_of(h + "1,bmi,quantum,n,q,22.8,21,24,\n"), Errc::row_error);
    EXPECT_EQ(code_of(h + "1,bmi,equation,n,q,22.8,21,24,{oops\n"), Errc::row_error);
    EXPECT_EQ(code_of(h + "1,bmi,equation,n,q,22.8,21,24,\n1,bmi,equation,n,q,22.8,21,24,\n"), Errc::row_error);
}

TEST(Dataset, RowErrorNamesTheRow) {
    std::istringstream in(std::string(kHeader) + "1,bmi,equation,n,q,22.8,21,24,\n2,bmi,equation,n,q,oops,21,24,\n");
    try {
        load_dataset(in);
        FAIL();
    } catch (const RowError& e) {
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
    }
}

TEST(Dataset, SaveLoadRoundTrip) {
    const auto rows = make_fixture(default_engine(), 2, 99, EngineMode::legacy_all());
    std::stringstream buf;
    save_dataset(buf, rows);
    EXPECT_EQ(load_dataset(buf), rows);
}

// ---------------------------------------------------------------------------

TEST(Regenerate, CorrectedLabelsFixLegacyRows) {
    const auto& engine = default_engine();
    const auto legacy_rows = make_fixture(engine, 20, 5, EngineMode::legacy_all());
    const auto res = regenerate_ground_truth(engine, legacy_rows, EngineMode::corrected());
    EXPECT_EQ(res.report.failed_count(), 0);
    EXPECT_GT(res.report.changed_count(), 0);
    EXPECT_EQ(res.rows.size(), legacy_rows.size());

    std::set<std::string> attributed;
    for (const auto& e : res.report.entries) {
        if (!e.changed) continue;
        EXPECT_FALSE(e.responsible.empty()) << e.row_id << " " << e.calculator_id;
        for (auto b : e.responsible) attributed.insert(std::string(to_string(b)));
    }
    EXPECT_TRUE(attributed.contains("cci_liver_key_typo"));
    EXPECT_TRUE(attributed.contains("apache_chronic_health_key"));

    // Regenerating again in the same mode changes nothing.
    const auto again = regenerate_ground_truth(engine, res.rows, EngineMode::corrected());
    EXPECT_EQ(again.report.changed_count(), 0);
    EXPECT_EQ(again.rows, res.rows);
}

TEST(Regenerate, LimitsAreFivePercentBand) {
    const auto& engine = default_engine();
    const auto rows = make_fixture(engine, 3, 6, EngineMode::corrected());
    const auto res = regenerate_ground_truth(engine, rows, EngineMode::corrected());
    for (const auto& r : res.rows) {
        if (r.category == Category::rule) {
            EXPECT_FALSE(r.lower_limit);
            continue;
        }
        const double g = std::stod(r.ground_truth);
        EXPECT_NEAR(*r.lower_limit, std::min(0.95 * g, 1.05 * g), 1e-9 * std::abs(g) + 1e-12) << r.row_id;
        EXPECT_NEAR(*r.upper_limit, std::max(0.95 * g, 1.05 * g), 1e-9 * std::abs(g) + 1e-12) << r.row_id;
    }
}

TEST(Regenerate, RowsWithoutParametersAreReported) {
    auto rows = make_fixture(default_engine(), 1, 7, EngineMode::corrected());
    rows[0].extracted_params.reset();
    const auto res = regenerate_ground_truth(default_engine(), rows, EngineMode::corrected());
    EXPECT_EQ(res.report.failed_count(), 1);
    EXPECT_EQ(res.report.entries[0].error, "MissingEntities");
    EXPECT_EQ(res.rows[0], rows[0]);
}

// ---------------------------------------------------------------------------

std::vector<DatasetRow> fixture_rows() {
    static const auto rows = make_fixture(default_engine(), 20, 20240601, EngineMode::legacy_all());
    return rows;
}

TEST(Subsample, FivePerCalculator) {
    const auto rows = fixture_rows();
    const auto sub = stratified_subsample(rows, 275, 42);
    ASSERT_EQ(sub.size(), 275u);
    std::map<std::string, int> per;
    for (const auto& r : sub) ++per[r.calculator_id];
    EXPECT_EQ(per.size(), 55u);
    for (const auto& [id, n] : per) EXPECT_EQ(n, 5) << id;
}

TEST(Subsample, DeterministicAndSeedSensitive) {
    const auto rows = fixture_rows();
    EXPECT_EQ(stratified_subsample(rows, 275, 42), stratified_subsample(rows, 275, 42));
    EXPECT_NE(stratified_subsample(rows, 275, 42), stratified_subsample(rows, 275, 43));
}

TEST(Subsample, IndependentOfInputOrder) {
    auto rows = fixture_rows();
    const auto a = stratified_subsample(rows, 110, 3);
    std::reverse(rows.begin(), rows.end());
    auto b = stratified_subsample(rows, 110, 3);
    std::reverse(b.begin(), b.end());
    EXPECT_EQ(a, b);
}

TEST(Subsample, RemainderAndShortfall) {
    const auto rows = fixture_rows();
    const auto sub = stratified_subsample(rows, 57, 1);
    std::map<std::string, int> per;
    for (const auto& r : sub) ++per[r.calculator_id];
    EXPECT_EQ(per.begin()->second, 2);
    EXPECT_EQ(std::next(per.begin())->second, 2);
    EXPECT_EQ(std::next(per.begin(), 2)->second, 1);
    EXPECT_THROW(stratified_subsample(rows, 21 * 55, 1), InsufficientRows);
}

}  // namespace
