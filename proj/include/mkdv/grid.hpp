#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mkdv/errors.hpp"

namespace mkdv {

/// Reduce an arbitrary integer index onto [0, n): the grid is periodic and
/// index arithmetic wraps, so stencils never need ghost cells and discrete
/// divergences telescope exactly over one period.
inline std::size_t wrap_index(long i, std::size_t n) {
    long m = static_cast<long>(n);
    long r = i % m;
    return static_cast<std::size_t>(r < 0 ? r + m : r);
}

/// One time level of the discrete solution on a uniform periodic grid:
/// sample i lives at x = x0 + i*delta_x, and index i means i mod N.
struct GridFunction {
    std::vector<double> values;
    double delta_x = 1.0;
    double x0 = 0.0;

    std::size_t size() const { return values.size(); }

    /// Periodic access: any integer index is reduced mod N.
    double at(long i) const { return values[wrap_index(i, values.size())]; }

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

/// A pair of consecutive time levels (the two rows of the scheme's stencil),
/// delta_t apart. level0 is time n, level1 is time n+1.
struct TwoLevelState {
    GridFunction level0;
    GridFunction level1;
    double delta_t = 1.0;
};

/// Construct a grid function with metadata shared from a template.
inline GridFunction like(const GridFunction& f) {
    GridFunction g;
    g.values.assign(f.size(), 0.0);
    g.delta_x = f.delta_x;
    g.x0 = f.x0;
    return g;
}

/// Pure index shift: result_i = f_{i+k} (periodic). Metadata unchanged —
/// the shift relabels samples, it does not move the coordinate frame.
inline GridFunction shift(const GridFunction& f, long k) {
    GridFunction g = like(f);
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i)
        g.values[i] = f.values[wrap_index(static_cast<long>(i) + k, n)];
    return g;
}

/// Forward difference in space: result_i = (f_{i+1} - f_i)/delta_x.
inline GridFunction diff_m(const GridFunction& f) {
    GridFunction g = like(f);
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i)
        g.values[i] = (f.values[wrap_index(static_cast<long>(i) + 1, n)] - f.values[i]) / f.delta_x;
    return g;
}

/// Forward average in space: result_i = (f_{i+1} + f_i)/2.
inline GridFunction avg_m(const GridFunction& f) {
    GridFunction g = like(f);
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i)
        g.values[i] = 0.5 * (f.values[wrap_index(static_cast<long>(i) + 1, n)] + f.values[i]);
    return g;
}

/// Centered second difference: result_i = (f_{i+1} - 2 f_i + f_{i-1})/delta_x².
/// Offset convention: this is the composition of two forward differences
/// applied one index to the left, re-centered so the result index matches the
/// sample it surrounds; every composite stencil in scheme.hpp states its net
/// offset against this convention.
inline GridFunction diff2_m(const GridFunction& f) {
    GridFunction g = like(f);
    const std::size_t n = f.size();
    const double h2 = f.delta_x * f.delta_x;
    for (std::size_t i = 0; i < n; ++i) {
        const long li = static_cast<long>(i);
        g.values[i] = (f.values[wrap_index(li + 1, n)] - 2.0 * f.values[i] +
                       f.values[wrap_index(li - 1, n)]) / h2;
    }
    return g;
}

/// Forward difference in time: result_i = (level1_i - level0_i)/delta_t.
inline GridFunction diff_n(const TwoLevelState& s) {
    GridFunction g = like(s.level0);
    for (std::size_t i = 0; i < g.size(); ++i)
        g.values[i] = (s.level1.values[i] - s.level0.values[i]) / s.delta_t;
    return g;
}

/// Forward average in time: result_i = (level1_i + level0_i)/2.
inline GridFunction avg_n(const TwoLevelState& s) {
    GridFunction g = like(s.level0);
    for (std::size_t i = 0; i < g.size(); ++i)
        g.values[i] = 0.5 * (s.level1.values[i] + s.level0.values[i]);
    return g;
}

/// Compensated (Neumaier) summation: keeps global invariant sums exact to a
/// few ulps even over thousands of recorded steps.
inline double compensated_sum(const std::vector<double>& v) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : v) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace mkdv
