#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mkdv::sym {

/// Exact rational scalar. No floating point exists anywhere in this module:
/// every equality decided here is exact.
using Rational = boost::multiprecision::cpp_rational;

/// Exponents (p, q, r) of the formal symbols Δx^p · Δt^q · λ^r. The step
/// sizes may carry negative (Laurent) exponents; λ only nonnegative ones.
using StepExponents = std::array<int, 3>;

inline Rational rational_pow(const Rational& base, int e) {
    if (e == 0) return Rational(1);
    Rational b = e > 0 ? base : Rational(1) / base;
    int n = e > 0 ? e : -e;
    Rational acc(1);
    while (n > 0) {
        if (n & 1) acc *= b;
        b *= b;
        n >>= 1;
    }
    return acc;
}

/// A coefficient: a finite exact-rational combination of Δx^p Δt^q λ^r
/// monomials, kept canonical (no zero entries).
struct SymCoeff {
    std::map<StepExponents, Rational> terms;

    static SymCoeff zero() { return {}; }
    static SymCoeff constant(const Rational& c) { return monomial(c, 0, 0, 0); }
    static SymCoeff monomial(const Rational& c, int p, int q, int r) {
        SymCoeff s;
        if (c != 0) s.terms[{p, q, r}] = c;
        return s;
    }

    bool is_zero() const { return terms.empty(); }

    SymCoeff& operator+=(const SymCoeff& o) {
        for (const auto& [e, c] : o.terms) {
            auto it = terms.find(e);
            if (it == terms.end()) {
                terms.emplace(e, c);
            } else {
                it->second += c;
                if (it->second == 0) terms.erase(it);
            }
        }
        return *this;
    }

    SymCoeff operator-() const {
        SymCoeff s = *this;
        for (auto& [e, c] : s.terms) c = -c;
        return s;
    }

    SymCoeff operator*(const SymCoeff& o) const {
        SymCoeff s;
        for (const auto& [ea, ca] : terms)
            for (const auto& [eb, cb] : o.terms) {
                const StepExponents e = {ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]};
                auto it = s.terms.find(e);
                if (it == s.terms.end()) {
                    s.terms.emplace(e, ca * cb);
                } else {
                    it->second += ca * cb;
                    if (it->second == 0) s.terms.erase(it);
                }
            }
        return s;
    }

    bool operator==(const SymCoeff& o) const { return terms == o.terms; }

    /// Evaluate at exact rational step sizes and λ.
    Rational eval(const Rational& dx, const Rational& dt, const Rational& lam) const {
        Rational acc(0);
        for (const auto& [e, c] : terms)
            acc += c * rational_pow(dx, e[0]) * rational_pow(dt, e[1]) * rational_pow(lam, e[2]);
        return acc;
    }
};

/// Grid-variable offset (i, j): spatial shift i, time level shift j.
using Offset = std::pair<int, int>;

/// Power product of grid variables Π u_{(i,j)}^e, canonical: exponents
/// strictly positive, offsets sorted. The empty product is the constant 1.
using GridMonomial = std::map<Offset, int>;

/// Exact multivariate polynomial in the shifted grid variables u_{i,j} with
/// SymCoeff coefficients; the value type of every symbolic computation here.
struct GridPolynomial {
    std::map<GridMonomial, SymCoeff> terms;

    bool is_zero() const { return terms.empty(); }

    void add_term(const GridMonomial& m, const SymCoeff& c) {
        if (c.is_zero()) return;
        auto it = terms.find(m);
        if (it == terms.end()) {
            terms.emplace(m, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    bool operator==(const GridPolynomial& o) const { return terms == o.terms; }
};

/// The variable u_{i,j} as a polynomial.
inline GridPolynomial sym_var(int i, int j) {
    GridPolynomial p;
    GridMonomial m;
    m[{i, j}] = 1;
    p.add_term(m, SymCoeff::constant(Rational(1)));
    return p;
}

/// A constant polynomial with the given coefficient.
inline GridPolynomial sym_const(const SymCoeff& c) {
    GridPolynomial p;
    p.add_term(GridMonomial{}, c);
    return p;
}

inline GridPolynomial poly_add(const GridPolynomial& a, const GridPolynomial& b) {
    GridPolynomial p = a;
    for (const auto& [m, c] : b.terms) p.add_term(m, c);
    return p;
}

inline GridPolynomial poly_neg(const GridPolynomial& a) {
    GridPolynomial p;
    for (const auto& [m, c] : a.terms) p.terms.emplace(m, -c);
    return p;
}

inline GridPolynomial poly_sub(const GridPolynomial& a, const GridPolynomial& b) {
    return poly_add(a, poly_neg(b));
}

/// Multiply by a pure coefficient (e.g. 1/Δx, λΔx², a rational constant).
inline GridPolynomial poly_scale(const GridPolynomial& a, const SymCoeff& c) {
    GridPolynomial p;
    for (const auto& [m, k] : a.terms) {
        const SymCoeff prod = k * c;
        if (!prod.is_zero()) p.terms.emplace(m, prod);
    }
    return p;
}

inline GridPolynomial poly_mul(const GridPolynomial& a, const GridPolynomial& b) {
    GridPolynomial p;
    for (const auto& [ma, ca] : a.terms)
        for (const auto& [mb, cb] : b.terms) {
            GridMonomial m = ma;
            for (const auto& [off, e] : mb) m[off] += e;
            p.add_term(m, ca * cb);
        }
    return p;
}

/// Apply the shift S_m^a S_n^b to every variable: offsets (i,j) -> (i+a, j+b).
inline GridPolynomial sym_shift(const GridPolynomial& p, int a, int b) {
    GridPolynomial q;
    for (const auto& [m, c] : p.terms) {
        GridMonomial sm;
        for (const auto& [off, e] : m) sm[{off.first + a, off.second + b}] = e;
        q.terms.emplace(std::move(sm), c);
    }
    return q;
}

/// Forward difference in space: D_m = (S_m - I)/Δx.
inline GridPolynomial sym_diff_m(const GridPolynomial& p) {
    return poly_scale(poly_sub(sym_shift(p, 1, 0), p), SymCoeff::monomial(Rational(1), -1, 0, 0));
}

/// Forward difference in time: D_n = (S_n - I)/Δt.
inline GridPolynomial sym_diff_n(const GridPolynomial& p) {
    return poly_scale(poly_sub(sym_shift(p, 0, 1), p), SymCoeff::monomial(Rational(1), 0, -1, 0));
}

/// Forward average in space: μ_m = (S_m + I)/2.
inline GridPolynomial sym_avg_m(const GridPolynomial& p) {
    return poly_scale(poly_add(sym_shift(p, 1, 0), p),
                      SymCoeff::constant(Rational(1) / 2));
}

/// Forward average in time: μ_n = (S_n + I)/2.
inline GridPolynomial sym_avg_n(const GridPolynomial& p) {
    return poly_scale(poly_add(sym_shift(p, 0, 1), p),
                      SymCoeff::constant(Rational(1) / 2));
}

/// The difference Euler operator E = Σ_{(i,j)} S_m^{-i} S_n^{-j} ∂/∂u_{i,j}.
/// Its kernel is exactly the set of discrete divergences, so E certifies
/// conservation-law structure: E(p) = 0 iff p is a discrete divergence.
inline GridPolynomial euler(const GridPolynomial& p) {
    GridPolynomial acc;
    for (const auto& [m, c] : p.terms) {
        for (const auto& [off, e] : m) {
            // d/du_{off} of the monomial: exponent e -> e-1, coefficient *= e.
            GridMonomial dm = m;
            if (e == 1)
                dm.erase(off);
            else
                dm[off] = e - 1;
            GridPolynomial contrib;
            contrib.add_term(dm, c * SymCoeff::constant(Rational(e)));
            acc = poly_add(acc, sym_shift(contrib, -off.first, -off.second));
        }
    }
    return acc;
}

/// Total degree in the grid variables of the highest-degree monomial.
inline int total_degree(const GridPolynomial& p) {
    int deg = 0;
    for (const auto& [m, c] : p.terms) {
        int d = 0;
        for (const auto& [off, e] : m) d += e;
        deg = std::max(deg, d);
    }
    return deg;
}

/// Keep only monomials of total degree <= maxdeg.
inline GridPolynomial degree_truncate(const GridPolynomial& p, int maxdeg) {
    GridPolynomial q;
    for (const auto& [m, c] : p.terms) {
        int d = 0;
        for (const auto& [off, e] : m) d += e;
        if (d <= maxdeg) q.terms.emplace(m, c);
    }
    return q;
}

/// Substitute λ = 0: drop every coefficient entry with a positive λ power.
inline GridPolynomial substitute_lambda_zero(const GridPolynomial& p) {
    GridPolynomial q;
    for (const auto& [m, c] : p.terms) {
        SymCoeff kept;
        for (const auto& [e, r] : c.terms)
            if (e[2] == 0) kept.terms.emplace(e, r);
        q.add_term(m, kept);
    }
    return q;
}

/// The set of variable offsets appearing in p.
inline std::vector<Offset> variable_span(const GridPolynomial& p) {
    std::map<Offset, bool> seen;
    for (const auto& [m, c] : p.terms)
        for (const auto& [off, e] : m) seen[off] = true;
    std::vector<Offset> out;
    for (const auto& [off, b] : seen) out.push_back(off);
    return out;
}

// --------------------------------------------------------------------------
// Builders: the conservative scheme family, its energy characteristic, and
// the energy law's flux/density, all as exact polynomials anchored at offset
// (0,0) with symbolic λ, Δx, Δt.
// --------------------------------------------------------------------------

/// Stencil function φ anchored at (0,0):
///   (1/3)·μ_n(u²)·μ_n(u) + μ_n(D_m² u at -1) + λΔx²·D_m D_n μ_m (u at -1).
inline GridPolynomial build_phi_symbolic() {
    const GridPolynomial u = sym_var(0, 0);
    const GridPolynomial um1 = sym_var(-1, 0);
    const GridPolynomial cubic = poly_scale(poly_mul(sym_avg_n(poly_mul(u, u)), sym_avg_n(u)),
                                            SymCoeff::constant(Rational(1) / 3));
    const GridPolynomial second = sym_avg_n(sym_diff_m(sym_diff_m(um1)));
    const GridPolynomial cross = poly_scale(sym_diff_m(sym_diff_n(sym_avg_m(um1))),
                                            SymCoeff::monomial(Rational(1), 2, 0, 1));
    return poly_add(poly_add(cubic, second), cross);
}

/// The scheme polynomial Ã anchored at (0,0): D_m(μ_m φ at -1) + D_n(u).
inline GridPolynomial build_scheme_symbolic() {
    const GridPolynomial phi_m1 = sym_shift(build_phi_symbolic(), -1, 0);
    return poly_add(sym_diff_m(sym_avg_m(phi_m1)), sym_diff_n(sym_var(0, 0)));
}

/// The energy characteristic: φ itself, anchored at (0,0).
inline GridPolynomial build_characteristic_symbolic() { return build_phi_symbolic(); }

/// Energy density at time level 0, anchored at (0,0):
///   (1/12)u⁴ + (1/2)·u·(D_m² u at -1).
inline GridPolynomial build_energy_density_symbolic() {
    const GridPolynomial u = sym_var(0, 0);
    const GridPolynomial u4 = poly_mul(poly_mul(u, u), poly_mul(u, u));
    return poly_add(poly_scale(u4, SymCoeff::constant(Rational(1) / 12)),
                    poly_scale(poly_mul(u, sym_diff_m(sym_diff_m(sym_var(-1, 0)))),
                               SymCoeff::constant(Rational(1) / 2)));
}

/// Energy flux anchored at (0,0):
///   (1/2)[ φ_{-1}·φ + (D_m μ_n u_{-1})(D_n μ_m u_{-1})
///          − (μ_m μ_n u_{-1})(D_m D_n u_{-1}) + λΔx²(D_n u)(D_n u_{-1}) ].
inline GridPolynomial build_energy_flux_symbolic() {
    const GridPolynomial phi0 = build_phi_symbolic();
    const GridPolynomial um1 = sym_var(-1, 0);
    const GridPolynomial t1 = poly_mul(sym_shift(phi0, -1, 0), phi0);
    const GridPolynomial t2 =
        poly_mul(sym_diff_m(sym_avg_n(um1)), sym_diff_n(sym_avg_m(um1)));
    const GridPolynomial t3 =
        poly_mul(sym_avg_m(sym_avg_n(um1)), sym_diff_m(sym_diff_n(um1)));
    const GridPolynomial t4 = poly_scale(poly_mul(sym_diff_n(sym_var(0, 0)), sym_diff_n(um1)),
                                         SymCoeff::monomial(Rational(1), 2, 0, 1));
    return poly_scale(poly_add(poly_sub(poly_add(t1, t2), t3), t4),
                      SymCoeff::constant(Rational(1) / 2));
}

/// Result of a kernel check: ok iff the Euler operator annihilates the input;
/// otherwise the nonzero image is returned as the witness.
struct KernelCheck {
    bool ok = false;
    GridPolynomial witness;
};

/// Verify that p lies in the kernel of the difference Euler operator, i.e.
/// that p is a discrete divergence.
inline KernelCheck verify_kernel(const GridPolynomial& p) {
    KernelCheck r;
    r.witness = euler(p);
    r.ok = r.witness.is_zero();
    return r;
}

/// The defect Q̃·Ã − D_m(F̃) − D_n(G̃) for a candidate flux/density pair;
/// the zero polynomial certifies the energy conservation law off-shell.
inline GridPolynomial energy_divergence_defect(const GridPolynomial& flux,
                                               const GridPolynomial& density) {
    const GridPolynomial lhs =
        poly_mul(build_characteristic_symbolic(), build_scheme_symbolic());
    return poly_sub(lhs, poly_add(sym_diff_m(flux), sym_diff_n(density)));
}

/// Verify the energy conservation law in characteristic form with the
/// built-in flux and density.
inline bool verify_energy_divergence() {
    return energy_divergence_defect(build_energy_flux_symbolic(),
                                    build_energy_density_symbolic())
        .is_zero();
}

// --------------------------------------------------------------------------
// Deterministic serialization and exact evaluation.
// --------------------------------------------------------------------------

inline std::string serialize(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << '/' << denominator(r);
    return os.str();
}

inline std::string serialize(const SymCoeff& c) {
    if (c.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, r] : c.terms) {
        if (!first) os << " + ";
        first = false;
        os << serialize(r);
        if (e[0] != 0) os << "*dx^" << e[0];
        if (e[1] != 0) os << "*dt^" << e[1];
        if (e[2] != 0) os << "*lam^" << e[2];
    }
    return os.str();
}

inline std::string serialize(const GridMonomial& m) {
    if (m.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (const auto& [off, e] : m) {
        if (!first) os << ' ';
        first = false;
        os << "u[" << off.first << ',' << off.second << ']';
        if (e != 1) os << '^' << e;
    }
    return os.str();
}

/// Plain-text form: one term per line, terms in canonical (sorted) order —
/// stable across runs and platforms, suitable for golden-file comparison.
inline std::string serialize(const GridPolynomial& p) {
    if (p.is_zero()) return "0\n";
    std::ostringstream os;
    for (const auto& [m, c] : p.terms) os << '(' << serialize(c) << ") * " << serialize(m) << '\n';
    return os.str();
}

/// Exact evaluation at a rational state: vars maps offsets to values; any
/// offset absent from the map evaluates to zero.
inline Rational eval_exact(const GridPolynomial& p, const std::map<Offset, Rational>& vars,
                           const Rational& dx, const Rational& dt, const Rational& lam) {
    Rational acc(0);
    for (const auto& [m, c] : p.terms) {
        Rational mono(1);
        bool vanished = false;
        for (const auto& [off, e] : m) {
            const auto it = vars.find(off);
            if (it == vars.end() || it->second == 0) {
                vanished = true;
                break;
            }
            mono *= rational_pow(it->second, e);
        }
        if (!vanished) acc += mono * c.eval(dx, dt, lam);
    }
    return acc;
}

}  // namespace mkdv::sym
