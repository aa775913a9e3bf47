#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "mkdv/grid.hpp"
#include "mkdv/scheme.hpp"

namespace mkdv {

/// Global invariants recorded along a run: one entry per recorded time.
struct InvariantSeries {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> momentum;
    std::vector<double> energy;

    std::size_t size() const { return times.size(); }
};

/// One benchmark row: invariant error statistics plus the final-time
/// solution error, with the identifying run parameters.
struct ErrorReport {
    std::string method;
    double lambda = 0.0;
    double dx = 0.0;
    double dt = 0.0;
    double err1 = 0.0;     // mass
    double err2 = 0.0;     // momentum
    double err3 = 0.0;     // energy
    double sol_err = 0.0;  // relative l2 error at the final time
};

/// Density of the mass law: the solution itself.
inline GridFunction mass_density(const GridFunction& u) { return u; }

/// Density of the momentum monitor: ½u² pointwise. The scheme does not
/// preserve a discrete momentum law; this density is monitored, not conserved.
inline GridFunction momentum_density(const GridFunction& u) {
    GridFunction g = like(u);
    for (std::size_t i = 0; i < u.size(); ++i) g.values[i] = 0.5 * u.values[i] * u.values[i];
    return g;
}

/// Density of the discrete energy law: u⁴/12 + ½·u·(centered second difference).
inline GridFunction energy_density(const GridFunction& u) {
    GridFunction g = like(u);
    const std::size_t n = u.size();
    const double h2 = u.delta_x * u.delta_x;
    for (std::size_t i = 0; i < n; ++i) {
        const long li = static_cast<long>(i);
        const double d2 = (u.at(li + 1) - 2.0 * u.values[i] + u.at(li - 1)) / h2;
        const double ui = u.values[i];
        g.values[i] = ui * ui * ui * ui / 12.0 + 0.5 * ui * d2;
    }
    return g;
}

/// Global invariant: Δx times the compensated sum of a density. The plain
/// Riemann sum is exactly what periodic telescoping conserves.
inline double global_invariant(const GridFunction& density) {
    return density.delta_x * compensated_sum(density.values);
}

/// Flux of the discrete energy law. Entry i is the flux expression anchored
/// at spatial index i (its stencil reaches indices i-1, i and both levels):
///   ½[ φ_{i-1}φ_i + (D_m w)_{i-1}·avg(d)_{i-1} − avg(w)_{i-1}·(D_m d)_{i-1}
///      + λΔx²·d_i·d_{i-1} ]
/// with w the time-average of u and d the forward time difference of u.
inline GridFunction energy_flux(const TwoLevelState& s, const SchemeConfig& cfg) {
    check_compatible(s, cfg);
    const std::size_t n = cfg.n_points;
    const double dx = cfg.delta_x, lam = cfg.lambda;
    const PhiField ph = phi(s, cfg);
    const GridFunction w = avg_n(s);
    const GridFunction d = diff_n(s);
    GridFunction g = like(s.level0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t im = wrap_index(static_cast<long>(i) - 1, n);
        const double dm_w = (w.values[i] - w.values[im]) / dx;        // D_m w at i-1
        const double avg_d = 0.5 * (d.values[im] + d.values[i]);      // μ_m d at i-1
        const double avg_w = 0.5 * (w.values[im] + w.values[i]);      // μ_m w at i-1
        const double dm_d = (d.values[i] - d.values[im]) / dx;        // D_m d at i-1
        g.values[i] = 0.5 * (ph.values.values[im] * ph.values.values[i] + dm_w * avg_d -
                             avg_w * dm_d + lam * dx * dx * d.values[i] * d.values[im]);
    }
    return g;
}

/// Off-shell check of the energy law in characteristic form: entry i is
///   φ_i·residual_i − [forward space difference of the flux
///                     + forward time difference of the density]_i,
/// which must vanish identically in the grid values — for arbitrary states,
/// not only solved steps. The symbolic module proves the identity exactly;
/// this evaluates the floating-point transcription of both sides.
inline GridFunction divergence_identity_residual(const TwoLevelState& s,
                                                 const SchemeConfig& cfg) {
    check_compatible(s, cfg);
    const std::size_t n = cfg.n_points;
    const PhiField ph = phi(s, cfg);
    const GridFunction res = residual(s, cfg);
    const GridFunction flux = energy_flux(s, cfg);
    const GridFunction g0 = energy_density(s.level0);
    const GridFunction g1 = energy_density(s.level1);
    GridFunction out = like(s.level0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = wrap_index(static_cast<long>(i) + 1, n);
        const double div = (flux.values[ip] - flux.values[i]) / cfg.delta_x +
                           (g1.values[i] - g0.values[i]) / s.delta_t;
        out.values[i] = ph.values.values[i] * res.values[i] - div;
    }
    return out;
}

/// Append one sample of the three global invariants at time t.
inline InvariantSeries& record_invariants(const GridFunction& u, double t,
                                          InvariantSeries& series) {
    series.times.push_back(t);
    series.mass.push_back(global_invariant(mass_density(u)));
    series.momentum.push_back(global_invariant(momentum_density(u)));
    series.energy.push_back(global_invariant(energy_density(u)));
    return series;
}

namespace detail {

/// Invariant error statistic: half the peak absolute deviation of the series
/// from its initial value.
inline double half_peak_deviation(const std::vector<double>& v) {
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x - v.front()));
    return 0.5 * peak;
}

}  // namespace detail

/// Error metrics of a completed run: the invariant error statistic for each
/// of the three monitored quantities, plus the relative discrete l2 error of
/// the final state against the exact reference.
inline ErrorReport error_metrics(const InvariantSeries& series, const GridFunction& numeric_final,
                                 const GridFunction& exact_final) {
    if (series.size() == 0) throw ConfigError("error_metrics: empty invariant series");
    if (numeric_final.size() != exact_final.size())
        throw ConfigError("error_metrics: grid size mismatch");
    ErrorReport r;
    r.err1 = detail::half_peak_deviation(series.mass);
    r.err2 = detail::half_peak_deviation(series.momentum);
    r.err3 = detail::half_peak_deviation(series.energy);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < numeric_final.size(); ++i) {
        const double d = numeric_final.values[i] - exact_final.values[i];
        num += d * d;
        den += exact_final.values[i] * exact_final.values[i];
    }
    r.sol_err = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    return r;
}

inline std::string csv_header() { return "method,lambda,dx,dt,Err1,Err2,Err3,sol_err"; }

inline std::string to_csv_row(const ErrorReport& r) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << r.method << ',' << r.lambda << ',' << r.dx << ',' << r.dt << ',' << r.err1 << ','
       << r.err2 << ',' << r.err3 << ',' << r.sol_err;
    return os.str();
}

}  // namespace mkdv
