#pragma once

#include <stdexcept>
#include <string>

namespace cavtherm {

// Bad input: rejected parameters, malformed scenario files, schema violations.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// The run itself went wrong: quadrature non-convergence, corrupted
// correlation values, solver divergence.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cavtherm
