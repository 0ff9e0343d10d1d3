#pragma once

#include <exception>
#include <stdexcept>
#include <string>

namespace tg {

// Malformed or unreadable input (files, columns, rows).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller passed arguments that violate an operation's precondition.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A quantity is undefined for the given data (zero denominator, separation, rank deficiency).
class NumericError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Wraps a failure with the pipeline stage it happened in.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what, std::exception_ptr cause = nullptr)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), detail_(what), cause_(std::move(cause)) {}
    const std::string& stage() const noexcept { return stage_; }
    // Message without the stage prefix.
    const std::string& detail() const noexcept { return detail_; }
    // The original exception, if any.
    const std::exception_ptr& cause() const noexcept { return cause_; }

private:
    std::string stage_;
    std::string detail_;
    std::exception_ptr cause_;
};

}  // namespace tg
