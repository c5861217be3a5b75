#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uec {

/// Coarse failure class; the CLI maps it onto a process exit code.
enum class ErrorClass { config, data, numeric, internal };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
    ErrorClass error_class() const noexcept { return class_; }

private:
    ErrorClass class_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorClass::config, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorClass::numeric, what) {}
};

/// A cell that does not parse; row is the 1-based data row (header excluded),
/// column the 1-based column in the file.
class ParseError : public DataError {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& what)
        : DataError("row " + std::to_string(row) + ", column " + std::to_string(column) + ": " + what),
          row_(row), column_(column) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

#define UEC_DATA_ERROR(Name)                                                   \
    class Name : public DataError {                                            \
    public:                                                                    \
        explicit Name(const std::string& what) : DataError(#Name ": " + what) {} \
    };

UEC_DATA_ERROR(EmptyFile)
UEC_DATA_ERROR(DegenerateSplit)
UEC_DATA_ERROR(TooShort)
UEC_DATA_ERROR(InsufficientData)
UEC_DATA_ERROR(SchemaError)
UEC_DATA_ERROR(MissingForecast)
UEC_DATA_ERROR(MissingTruth)
UEC_DATA_ERROR(EmptySampleSet)
UEC_DATA_ERROR(InsufficientTrainWindows)
UEC_DATA_ERROR(EmptySet)

#undef UEC_DATA_ERROR

class ShapeMismatch : public Error {
public:
    explicit ShapeMismatch(const std::string& what) : Error(ErrorClass::internal, "ShapeMismatch: " + what) {}
};

class EvenKernel : public ConfigError {
public:
    explicit EvenKernel(int ks) : ConfigError("EvenKernel: kernel size must be odd and positive, got " + std::to_string(ks)) {}
};

class ZeroBaseline : public NumericError {
public:
    ZeroBaseline() : NumericError("ZeroBaseline: baseline metric must be positive") {}
};

class AllCellsExcluded : public NumericError {
public:
    AllCellsExcluded() : NumericError("AllCellsExcluded: every truth cell is below the MAPE threshold") {}
};

} // namespace uec
