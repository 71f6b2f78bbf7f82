#pragma once

#include <cstddef>
#include <vector>

#include "cavtherm/grid.hpp"

namespace cavtherm {

// Second-order finite differences on a uniform grid, evaluated piecewise:
// `breaks` lists interior indices where the series is allowed to jump
// (drive turn-on/off). Within each smooth piece the stencil is central,
// with one-sided second-order stencils at the piece boundaries.
template <typename T>
std::vector<T> differentiate(const std::vector<T>& s, double dt,
                             const std::vector<std::size_t>& breaks = {}) {
    const std::size_t n = s.size();
    std::vector<T> d(n);
    if (n < 2)
        return d;

    // piece boundaries: [0, b1), [b1, b2), ..., [bk, n)
    std::vector<std::size_t> edges;
    edges.push_back(0);
    for (std::size_t b : breaks)
        if (b > 0 && b < n)
            edges.push_back(b);
    edges.push_back(n);

    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const std::size_t lo = edges[p];
        const std::size_t hi = edges[p + 1]; // exclusive
        const std::size_t len = hi - lo;
        if (len == 1) {
            d[lo] = T{};
            continue;
        }
        if (len == 2) {
            d[lo] = (s[lo + 1] - s[lo]) / dt;
            d[lo + 1] = d[lo];
            continue;
        }
        d[lo] = (-3.0 * s[lo] + 4.0 * s[lo + 1] - s[lo + 2]) / (2.0 * dt);
        for (std::size_t i = lo + 1; i + 1 < hi; ++i)
            d[i] = (s[i + 1] - s[i - 1]) / (2.0 * dt);
        d[hi - 1] = (3.0 * s[hi - 1] - 4.0 * s[hi - 2] + s[hi - 3]) / (2.0 * dt);
    }
    return d;
}

} // namespace cavtherm
