#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace msgest {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data (CLI exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

/// Singular systems and similar numerical failures (CLI exit code 4).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Failure while reading a CSV file. `row` is the 1-based data row (the header
/// is row 0) and is -1 when the failure is not tied to a row.
class CsvError : public DataError {
public:
    enum class Kind { missing_file, missing_column, unparsable_cell, empty_data, malformed_row };

    CsvError(Kind kind, std::string message, std::int64_t row = -1, std::string column = {})
        : DataError(std::move(message)), kind_(kind), row_(row), column_(std::move(column)) {}

    Kind kind() const noexcept { return kind_; }
    std::int64_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    Kind kind_;
    std::int64_t row_;
    std::string column_;
};

} // namespace msgest
