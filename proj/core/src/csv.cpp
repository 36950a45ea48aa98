#include "medcalc/dataset.hpp"
#include "medcalc/error.hpp"

#include <istream>
#include <iterator>
#include <ostream>

namespace medcalc {

std::vector<CsvRecord> read_csv(std::istream& in) {
    const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::vector<CsvRecord> out;
    CsvRecord rec;
    std::string field;
    bool quoted = false, any = false;
    int line = 1, quote_line = 0;

    auto end_field = [&] {
        rec.push_back(std::move(field));
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        // A lone empty field is a blank line.
        if (!(rec.size() == 1 && rec[0].empty())) out.push_back(std::move(rec));
        rec.clear();
    };

    size_t i = 0;
    if (data.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
    for (; i < data.size(); ++i) {
        const char c = data[i];
        any = true;
        if (quoted) {
            if (c == '"') {
                if (i + 1 < data.size() && data[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                quote_line = line;
                break;
            case ',': end_field(); break;
            case '\r':
                if (i + 1 < data.size() && data[i + 1] == '\n') break;
                [[fallthrough]];
            case '\n':
                ++line;
                end_record();
                any = false;
                break;
            default: field += c;
        }
    }
    if (quoted) throw ParseError("line " + std::to_string(quote_line), "unterminated quoted field");
    if (any || !field.empty() || !rec.empty()) end_record();
    return out;
}

namespace {

void write_field(std::ostream& out, const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
        out << f;
        return;
    }
    out << '"';
    for (char c : f) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<CsvRecord>& records) {
    for (const auto& r : records) {
        for (size_t i = 0; i < r.size(); ++i) {
            if (i) out << ',';
            write_field(out, r[i]);
        }
        out << '\n';
    }
}

}  // namespace medcalc
