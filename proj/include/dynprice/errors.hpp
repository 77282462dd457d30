#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dynprice {

/// Argument outside the domain of a function (time outside the horizon,
/// malformed parameters).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A sales rate that the demand law cannot produce.
class InfeasibleRate : public std::runtime_error {
public:
    InfeasibleRate(const std::string& what, double requested, double attainable)
        : std::runtime_error(what), requested_(requested), attainable_(attainable) {}

    double requested() const noexcept { return requested_; }
    double attainable() const noexcept { return attainable_; }

private:
    double requested_;
    double attainable_;
};

/// A revenue target above what the demand law (or a group) can deliver.
class InfeasibleTarget : public std::runtime_error {
public:
    InfeasibleTarget(const std::string& what, double shortfall)
        : std::runtime_error(what), shortfall_(shortfall) {}

    /// Amount by which the target exceeds the attainable maximum.
    double shortfall() const noexcept { return shortfall_; }

private:
    double shortfall_;
};

/// The constraint schedule cannot be met by any admissible policy found by the
/// planner. Carries the offending group, schedule index and planner step.
class InfeasibleScenario : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    InfeasibleScenario(const std::string& what, std::size_t group = npos,
                       std::size_t index = npos, int step = -1)
        : std::runtime_error(what), group_(group), index_(index), step_(step) {}

    std::size_t group() const noexcept { return group_; }
    std::size_t index() const noexcept { return index_; }
    int step() const noexcept { return step_; }

private:
    std::size_t group_;
    std::size_t index_;
    int step_;
};

/// A closed-form discounted policy left the linear branch of its demand law.
class BranchViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative procedure hit its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exhaustive search refused because the enumeration is too large.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, std::uint64_t required)
        : std::runtime_error(what), required_(required) {}

    std::uint64_t required() const noexcept { return required_; }

private:
    std::uint64_t required_;
};

/// Malformed scenario input. `path` names the offending field
/// (e.g. "groups[0].a"); line/column are set for syntax errors.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what, std::string path = {}, int line = 0,
                        int column = 0)
        : std::runtime_error(what), path_(std::move(path)), line_(line), column_(column) {}

    const std::string& path() const noexcept { return path_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    std::string path_;
    int line_;
    int column_;
};

}  // namespace dynprice
