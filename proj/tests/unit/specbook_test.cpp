#include "medcalc/specbook.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace medcalc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const SpecBook& shipped() {
    static const SpecBook book = SpecBook::load_dir(default_spec_dir(), default_engine());
    return book;
}

CalculatorSpec bmi_spec() { return *shipped().find("bmi"); }

Errc validate_code(const CalculatorSpec& s) {
    try {
        validate_spec(s, default_engine());
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "spec accepted";
    return Errc::io_error;
}

TEST(SpecBook, EveryCalculatorHasAValidSpec) {
    EXPECT_TRUE(shipped().missing(default_engine()).empty());
    EXPECT_EQ(shipped().size(), default_engine().calculators().size());
}

TEST(SpecBook, RenderedSectionsInOrder) {
    const auto& t = shipped().rendered("cockcroft-gault").text;
    const auto f = t.find("## Formula"), p = t.find("## Parameters"), u = t.find("## Unit conversions"),
               v = t.find("## Version notes"), r = t.find("## References");
    ASSERT_NE(f, std::string::npos);
    EXPECT_LT(f, p);
    EXPECT_LT(p, u);
    EXPECT_LT(u, v);
    EXPECT_LT(v, r);
    EXPECT_NE(t.find("- creatinine [mg/dL]:"), std::string::npos);
    EXPECT_NE(t.find("88.40"), std::string::npos);
    EXPECT_NE(t.find("2.3"), std::string::npos);  // Devine slope
}

TEST(SpecBook, RenderingIsDeterministic) {
    const auto a = render(bmi_spec(), default_engine());
    const auto b = render(load_spec(save_spec(bmi_spec()), "copy"), default_engine());
    EXPECT_EQ(a.text, b.text);
    EXPECT_EQ(a.hash, b.hash);
    EXPECT_EQ(a.hash, sha256_hex(a.text));
    EXPECT_EQ(a.hash.size(), 64u);
}

TEST(SpecBook, Sha256KnownVector) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(SpecBook, MissingSpecThrows) {
    EXPECT_THROW(shipped().rendered("no_such_calc"), MissingSpec);
}

TEST(Spec, ValidationFailures) {
    auto s = bmi_spec();
    s.parameter_docs.pop_back();
    EXPECT_EQ(validate_code(s), Errc::invalid_spec);

    s = bmi_spec();
    s.parameter_docs[0].unit = "lb";
    EXPECT_EQ(validate_code(s), Errc::invalid_spec);

    s = bmi_spec();
    s.parameter_docs[0].unit = "furlong";
    EXPECT_EQ(validate_code(s), Errc::invalid_spec);

    s = bmi_spec();
    s.parameter_docs.push_back(s.parameter_docs[0]);
    EXPECT_EQ(validate_code(s), Errc::invalid_spec);

    s = bmi_spec();
    s.references.clear();
    EXPECT_EQ(validate_code(s), Errc::invalid_spec);

    s = *shipped().find("ckd_epi_2021");
    s.version_notes.clear();
    EXPECT_EQ(validate_code(s), Errc::invalid_spec);

    s = bmi_spec();
    s.calculator_id = "not_a_calculator";
    EXPECT_EQ(validate_code(s), Errc::invalid_spec);
}

TEST(Spec, ParseErrorsNameTheLocation) {
    try {
        load_spec_text("{\n  \"schema_version\": 1,\n  oops\n}", "x.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("x.json:3:"), std::string::npos) << e.what();
    }
    auto j = save_spec(bmi_spec());
    j.erase("formula_text");
    try {
        load_spec(j, "y.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("formula_text"), std::string::npos) << e.what();
    }
    j = save_spec(bmi_spec());
    j["schema_version"] = 2;
    EXPECT_THROW(load_spec(j), ParseError);
    j = save_spec(bmi_spec());
    j["parameter_docs"][0]["unit"] = 5;
    EXPECT_THROW(load_spec(j), ParseError);
}

TEST(SpecBook, FileNameMustMatchId) {
    const auto dir = fs::temp_directory_path() / "medcalc_spec_name_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "body_mass.json") << save_spec(bmi_spec()).dump();
    EXPECT_THROW(SpecBook::load_dir(dir, default_engine()), InvalidSpec);
    fs::remove(dir / "body_mass.json");
    std::ofstream(dir / "bmi.json") << save_spec(bmi_spec()).dump();
    const auto book = SpecBook::load_dir(dir, default_engine());
    EXPECT_EQ(book.size(), 1u);
    EXPECT_EQ(book.missing(default_engine()).size(), default_engine().calculators().size() - 1);
    fs::remove_all(dir);
}

}  // namespace
