#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mde::num {

// Uniform 1D grid with node values.  Invariants: n >= 2, hi > lo,
// dx = (hi - lo)/(n - 1).
struct Grid1D {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 2;
    std::vector<double> values;

    Grid1D() = default;
    Grid1D(double lo_, double hi_, std::size_t n_) : lo(lo_), hi(hi_), n(n_) {
        if (n < 2) throw std::invalid_argument("Grid1D: n must be >= 2");
        if (!(hi > lo)) throw std::invalid_argument("Grid1D: hi must exceed lo");
        values.assign(n, 0.0);
    }

    double dx() const { return (hi - lo) / static_cast<double>(n - 1); }
    double x(std::size_t i) const { return lo + static_cast<double>(i) * dx(); }

    template <class F>
    void fill(F&& f) {
        for (std::size_t i = 0; i < n; ++i) values[i] = f(x(i));
    }
};

// Grid whose node set contains x = 0 exactly (needed by fft_convolve to map
// discrete offsets onto grid samples).  Node n/2 lands on 0.
inline Grid1D make_centered_grid(double halfwidth, std::size_t n) {
    if (n < 2 || halfwidth <= 0.0)
        throw std::invalid_argument("make_centered_grid: bad arguments");
    const double dx = 2.0 * halfwidth / static_cast<double>(n);
    Grid1D g;
    g.lo = -halfwidth;
    g.n = n;
    g.hi = g.lo + dx * static_cast<double>(n - 1);
    g.values.assign(n, 0.0);
    return g;
}

}  // namespace mde::num
