#pragma once

#include <stdexcept>
#include <string>

namespace ppcqed {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Operators, states or schedules that do not fit together.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Time outside a pulse schedule's horizon.
class ScheduleError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// A numerical invariant (trace, hermiticity, positivity, step size) was broken.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An iterative solver or fitter hit its iteration cap.
class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Input data cannot constrain the requested model.
class DegenerateDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace ppcqed
