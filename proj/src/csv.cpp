#include "gapmeet/csv.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>

namespace gapmeet {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool looks_numeric(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

}  // namespace

std::vector<CsvRow> read_csv(const std::string& path, size_t min_fields) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open " + path);
    std::vector<CsvRow> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        CsvRow row;
        row.line = lineno;
        size_t start = 0;
        while (true) {
            const size_t comma = line.find(',', start);
            row.fields.push_back(trim(line.substr(start, comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (rows.empty() && lineno == 1 && !row.fields.empty() && !looks_numeric(row.fields[0])) {
            continue;  // header
        }
        if (row.fields.size() < min_fields) {
            throw IngestionError(path + ":" + std::to_string(lineno) + ": expected at least " +
                                 std::to_string(min_fields) + " fields");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double csv_double(const CsvRow& row, size_t idx, const std::string& path) {
    const std::string& f = row.fields.at(idx);
    char* end = nullptr;
    const double v = std::strtod(f.c_str(), &end);
    if (end != f.c_str() + f.size() || f.empty()) {
        throw IngestionError(path + ":" + std::to_string(row.line) + ": bad number '" + f + "'");
    }
    return v;
}

long long csv_int(const CsvRow& row, size_t idx, const std::string& path) {
    const std::string& f = row.fields.at(idx);
    long long v = 0;
    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || p != f.data() + f.size()) {
        throw IngestionError(path + ":" + std::to_string(row.line) + ": bad integer '" + f + "'");
    }
    return v;
}

}  // namespace gapmeet
