#pragma once

#include <cmath>
#include <cstddef>

#include "mkdv/grid.hpp"

namespace mkdv {

/// The traveling-wave sech solution used as the exact benchmark reference:
///   u(x,t) = √30 · sech(√5·x − 5√5·(t−1)).
/// The crest sits at x = 5(t−1): x = −5 at t = 0, x = +5 at t = 2.
inline double exact_solution(double x, double t) {
    const double arg = std::sqrt(5.0) * x - 5.0 * std::sqrt(5.0) * (t - 1.0);
    return std::sqrt(30.0) / std::cosh(arg);
}

/// Pointwise sample of the exact solution on a periodic grid (no projection).
inline GridFunction sample_exact(double a, double dx, std::size_t n, double t) {
    GridFunction g;
    g.values.resize(n);
    g.delta_x = dx;
    g.x0 = a;
    for (std::size_t i = 0; i < n; ++i)
        g.values[i] = exact_solution(a + dx * static_cast<double>(i), t);
    return g;
}

/// Closed-form continuum invariants of the soliton (line integrals over ℝ;
/// the periodic truncation to the benchmark domain changes them by < 1e-15).
inline double soliton_mass() { return M_PI * std::sqrt(6.0); }        // ∫ u
inline double soliton_momentum() { return 6.0 * std::sqrt(5.0); }     // ∫ u²/2
inline double soliton_energy() { return 10.0 * std::sqrt(5.0); }      // ∫ (u⁴/12 − u_x²/2)

}  // namespace mkdv
