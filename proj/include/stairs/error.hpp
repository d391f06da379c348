#pragma once

#include <stdexcept>
#include <string>

namespace stairs {

// Base class for all toolkit errors. Subclasses map to the failure
// categories surfaced by the CLI (exit code 2).
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Layer geometry that does not produce an integral output size.
class geometry_error : public error {
public:
    using error::error;
};

// Invariant violations on domain values (bad counts, duplicate ids, ...).
class validation_error : public error {
public:
    using error::error;
};

// Unknown named entity (network name, layer id).
class lookup_error : public error {
public:
    using error::error;
};

// Argument outside its admissible range.
class range_error : public error {
public:
    using error::error;
};

// Cost-model calibration failures: missing coefficients, degenerate
// inputs, or tables inconsistent with the split model.
class calibration_error : public error {
public:
    using error::error;
};

// Curve analysis failures (empty curve, degenerate clustering).
class analysis_error : public error {
public:
    using error::error;
};

// No configuration satisfies the requested budget or accuracy floor.
class infeasible_error : public error {
public:
    using error::error;
};

// Malformed input file; message carries the 1-based line number.
class parse_error : public error {
public:
    parse_error(const std::string& msg, std::size_t line)
        : error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    explicit parse_error(const std::string& msg) : error(msg), line_(0) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace stairs
