#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "cavtherm/errors.hpp"

namespace cavtherm {

using Complex = std::complex<double>;
using RealSeries = std::vector<double>;
using ComplexSeries = std::vector<Complex>;

// Uniform time grid. Uniformity is required by the Toeplitz structure of
// the memory convolutions.
struct TimeGrid {
    double t0 = 0.0;       // ns
    double dt = 0.25;      // ns
    std::size_t n_steps = 2;

    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double horizon() const { return dt * static_cast<double>(n_steps - 1); }

    void validate() const {
        if (dt <= 0.0)
            throw ValidationError("TimeGrid: dt must be positive");
        if (n_steps < 2)
            throw ValidationError("TimeGrid: n_steps must be at least 2");
    }
};

} // namespace cavtherm
