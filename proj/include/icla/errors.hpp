#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace icla {

// Root of every error the library raises. The harness maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Non-finite loss or gradient: training diverged.
class NumericError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

// GMM estimation failure (empty class, Cholesky failure after ridge escalation).
class EstimationError : public Error {
public:
    EstimationError(const std::string& what, int class_id)
        : Error(what), class_id_(class_id) {}
    int class_id() const noexcept { return class_id_; }

private:
    int class_id_;
};

// A class that must be aligned is missing from one side.
class AlignmentError : public Error {
public:
    AlignmentError(const std::string& what, int class_id)
        : Error(what), class_id_(class_id) {}
    int class_id() const noexcept { return class_id_; }

private:
    int class_id_;
};

// No pseudo sample of a class passed the confidence filter.
class ReplayStarvation : public Error {
public:
    ReplayStarvation(int class_id, double acceptance_rate, const std::string& context = {})
        : Error((context.empty() ? std::string() : context + ": ") + "replay starvation: class " +
                std::to_string(class_id) + " accepted no pseudo samples (acceptance rate " +
                std::to_string(acceptance_rate) + ")"),
          class_id_(class_id),
          acceptance_rate_(acceptance_rate) {}
    int class_id() const noexcept { return class_id_; }
    double acceptance_rate() const noexcept { return acceptance_rate_; }

private:
    int class_id_;
    double acceptance_rate_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Dataset missing or inconsistent.
class DataError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class AuditError : public Error {
public:
    using Error::Error;
};

}  // namespace icla
