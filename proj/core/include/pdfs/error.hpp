#pragma once

#include <stdexcept>
#include <string>

namespace pdfs {

// Precondition violations on user-supplied values (bad labels, radii, shapes).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An iterative routine ran out of iterations before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// Step sizes violate the convergence condition of the selected solver variant.
class StepConditionError : public std::runtime_error {
public:
    StepConditionError(const std::string& what, double slack)
        : std::runtime_error(what), slack_(slack) {}
    double slack() const noexcept { return slack_; }

private:
    double slack_;
};

// Non-finite values showed up in an iterate or a decomposition failed.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pdfs
