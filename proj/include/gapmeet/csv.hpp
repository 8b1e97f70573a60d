#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gapmeet {

// Malformed input data. Messages carry "file:line" where applicable.
class IngestionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration or parameters.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Violated caller contract between modules.
class ContractError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

struct CsvRow {
    std::vector<std::string> fields;
    long line = 0;  // 1-based line number in the source file
};

// Reads all non-empty rows of a comma-separated file. A first row whose
// first field is not numeric is treated as a header and skipped.
std::vector<CsvRow> read_csv(const std::string& path, size_t min_fields);

double csv_double(const CsvRow& row, size_t idx, const std::string& path);
long long csv_int(const CsvRow& row, size_t idx, const std::string& path);

}  // namespace gapmeet
