// Exact symbolic layer: polynomial ring, shift/difference/average operators,
// the difference Euler operator, and the kernel verification of the scheme's
// conservation structure. Everything here is exact rational arithmetic.
#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mkdv/grid.hpp"
#include "mkdv/scheme.hpp"
#include "mkdv/symbolic.hpp"
#include "test_util.hpp"

using namespace mkdv::sym;

namespace {

using Rng = std::mt19937_64;

// Random polynomial: degree <= 3, offsets in {-2..2} x {0,1}, small rational
// coefficients with random Laurent exponents in dx, dt and powers of lambda.
GridPolynomial random_poly(Rng& rng, int n_terms = 4) {
    std::uniform_int_distribution<int> off(-2, 2), lvl(0, 1), deg(0, 3), num(-6, 6),
        den(1, 5), expo(-2, 2), lexpo(0, 2);
    GridPolynomial p;
    for (int t = 0; t < n_terms; ++t) {
        GridMonomial m;
        const int d = deg(rng);
        for (int k = 0; k < d; ++k) m[{off(rng), lvl(rng)}] += 1;
        const int a = num(rng);
        if (a == 0) continue;
        p.add_term(m, SymCoeff::monomial(Rational(a, den(rng)), expo(rng), expo(rng),
                                         lexpo(rng)));
    }
    return p;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    EXPECT_TRUE(in.good()) << "cannot open " << path;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST(Ring, AdditiveIdentityAndNegation) {
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const GridPolynomial p = random_poly(rng);
        EXPECT_TRUE(poly_add(p, GridPolynomial{}) == p);
        EXPECT_TRUE(poly_sub(p, p).is_zero());
        EXPECT_TRUE(poly_add(p, poly_neg(p)).is_zero());
    }
}

TEST(Ring, MultiplicativeIdentity) {
    Rng rng(11);
    const GridPolynomial one = sym_const(SymCoeff::constant(Rational(1)));
    for (int rep = 0; rep < 20; ++rep) {
        const GridPolynomial p = random_poly(rng);
        EXPECT_TRUE(poly_mul(p, one) == p);
        EXPECT_TRUE(poly_mul(one, p) == p);
    }
}

TEST(Ring, AssociativityCommutativityDistributivity) {
    Rng rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        const GridPolynomial a = random_poly(rng, 3);
        const GridPolynomial b = random_poly(rng, 3);
        const GridPolynomial c = random_poly(rng, 3);
        EXPECT_TRUE(poly_add(poly_add(a, b), c) == poly_add(a, poly_add(b, c)));
        EXPECT_TRUE(poly_mul(a, b) == poly_mul(b, a));
        EXPECT_TRUE(poly_mul(poly_mul(a, b), c) == poly_mul(a, poly_mul(b, c)));
        EXPECT_TRUE(poly_mul(a, poly_add(b, c)) == poly_add(poly_mul(a, b), poly_mul(a, c)));
    }
}

TEST(Ring, Binomial) {
    const GridPolynomial s = poly_add(sym_var(0, 0), sym_var(1, 0));
    const GridPolynomial sq = poly_mul(s, s);
    GridPolynomial expected;
    GridMonomial m00sq, m_cross, m10sq;
    m00sq[{0, 0}] = 2;
    m_cross[{0, 0}] = 1;
    m_cross[{1, 0}] = 1;
    m10sq[{1, 0}] = 2;
    expected.add_term(m00sq, SymCoeff::constant(Rational(1)));
    expected.add_term(m_cross, SymCoeff::constant(Rational(2)));
    expected.add_term(m10sq, SymCoeff::constant(Rational(1)));
    EXPECT_TRUE(sq == expected);
}

TEST(Shift, BasicAndGroupAction) {
    EXPECT_TRUE(sym_shift(sym_var(0, 0), 1, 0) == sym_var(1, 0));
    Rng rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        const GridPolynomial p = random_poly(rng);
        EXPECT_TRUE(sym_shift(p, 0, 0) == p);
        EXPECT_TRUE(sym_shift(sym_shift(p, 1, 0), -1, 0) == p);
        EXPECT_TRUE(sym_shift(sym_shift(p, 2, 1), -2, -1) == p);
    }
}

TEST(Operators, DiffMOfVariable) {
    GridPolynomial expected;
    GridMonomial m10, m00;
    m10[{1, 0}] = 1;
    m00[{0, 0}] = 1;
    expected.add_term(m10, SymCoeff::monomial(Rational(1), -1, 0, 0));
    expected.add_term(m00, SymCoeff::monomial(Rational(-1), -1, 0, 0));
    EXPECT_TRUE(sym_diff_m(sym_var(0, 0)) == expected);
}

TEST(Operators, AvgNPreservesConstants) {
    const GridPolynomial c = sym_const(SymCoeff::monomial(Rational(5, 3), 1, -1, 2));
    EXPECT_TRUE(sym_avg_n(c) == c);
}

TEST(Operators, DiffAvgCommute) {
    Rng rng(19);
    for (int rep = 0; rep < 10; ++rep) {
        const GridPolynomial p = random_poly(rng);
        EXPECT_TRUE(sym_diff_m(sym_avg_m(p)) == sym_avg_m(sym_diff_m(p)));
        EXPECT_TRUE(sym_diff_n(sym_avg_m(p)) == sym_avg_m(sym_diff_n(p)));
    }
}

TEST(Euler, SquareOfVariable) {
    const GridPolynomial p = poly_mul(sym_var(0, 0), sym_var(0, 0));
    const GridPolynomial expected = poly_scale(sym_var(0, 0), SymCoeff::constant(Rational(2)));
    EXPECT_TRUE(euler(p) == expected);
}

TEST(Euler, ProductOfShiftedVariables) {
    // E(u00 * u10): d/du00 -> u10 (no shift); d/du10 -> u00 shifted by (-1,0).
    const GridPolynomial p = poly_mul(sym_var(0, 0), sym_var(1, 0));
    const GridPolynomial expected = poly_add(sym_var(1, 0), sym_var(-1, 0));
    EXPECT_TRUE(euler(p) == expected);
}

TEST(Euler, DivergencesLieInKernel) {
    Rng rng(23);
    for (int rep = 0; rep < 100; ++rep) {
        const GridPolynomial p = random_poly(rng);
        const GridPolynomial q = random_poly(rng);
        const GridPolynomial div = poly_add(sym_diff_m(p), sym_diff_n(q));
        EXPECT_TRUE(euler(div).is_zero()) << "rep " << rep;
    }
}

TEST(Scheme, VariableSpanIsTenPointStencil) {
    const GridPolynomial scheme = build_scheme_symbolic();
    const std::vector<Offset> span = variable_span(scheme);
    std::vector<Offset> expected;
    for (int i = -2; i <= 2; ++i)
        for (int j = 0; j <= 1; ++j) expected.push_back({i, j});
    EXPECT_EQ(span, expected);
    EXPECT_EQ(total_degree(scheme), 3);
}

TEST(Scheme, LambdaZeroRemovesAllLambdaTerms) {
    const GridPolynomial scheme = build_scheme_symbolic();
    const GridPolynomial at0 = substitute_lambda_zero(scheme);
    for (const auto& [m, c] : at0.terms)
        for (const auto& [e, r] : c.terms) EXPECT_EQ(e[2], 0) << serialize(at0);
    // ... and something was actually removed.
    EXPECT_FALSE(scheme == at0);
}

namespace {

// Independent hand transcription of the linear part: the time-averaged
// centered third difference, the time difference, and the lambda cross term
//   (u2 - 2u1 + 2u(-1) - u(-2)) / (4 dx^3) summed over both levels
//   + (u[0,1] - u[0,0]) / dt
//   + lam/(4 dt) * [(u[2,1]-u[2,0]) - 2(u[0,1]-u[0,0]) + (u[-2,1]-u[-2,0])].
GridPolynomial hand_built_linear_part() {
    GridPolynomial p;
    const auto var = [](int i, int j) {
        GridMonomial m;
        m[{i, j}] = 1;
        return m;
    };
    for (int j = 0; j <= 1; ++j) {
        p.add_term(var(2, j), SymCoeff::monomial(Rational(1, 4), -3, 0, 0));
        p.add_term(var(1, j), SymCoeff::monomial(Rational(-1, 2), -3, 0, 0));
        p.add_term(var(-1, j), SymCoeff::monomial(Rational(1, 2), -3, 0, 0));
        p.add_term(var(-2, j), SymCoeff::monomial(Rational(-1, 4), -3, 0, 0));
    }
    p.add_term(var(0, 1), SymCoeff::monomial(Rational(1), 0, -1, 0));
    p.add_term(var(0, 0), SymCoeff::monomial(Rational(-1), 0, -1, 0));
    for (int i : {-2, 2}) {
        p.add_term(var(i, 1), SymCoeff::monomial(Rational(1, 4), 0, -1, 1));
        p.add_term(var(i, 0), SymCoeff::monomial(Rational(-1, 4), 0, -1, 1));
    }
    p.add_term(var(0, 1), SymCoeff::monomial(Rational(-1, 2), 0, -1, 1));
    p.add_term(var(0, 0), SymCoeff::monomial(Rational(1, 2), 0, -1, 1));
    return p;
}

}  // namespace

TEST(Scheme, DegreeOneTruncationMatchesHandBuiltLinearization) {
    const GridPolynomial truncated = degree_truncate(build_scheme_symbolic(), 1);
    EXPECT_TRUE(truncated == hand_built_linear_part()) << serialize(truncated);
}

TEST(Characteristic, ConstantEvaluation) {
    // Substituting u_{i,j} = c into the stencil function gives c^3/3.
    const GridPolynomial chi = build_characteristic_symbolic();
    const Rational c(7, 5);
    std::map<Offset, Rational> vars;
    for (int i = -2; i <= 2; ++i)
        for (int j = 0; j <= 1; ++j) vars[{i, j}] = c;
    const Rational val = eval_exact(chi, vars, Rational(1, 2), Rational(1, 4), Rational(3, 8));
    EXPECT_EQ(val, c * c * c / 3);
}

TEST(Characteristic, LambdaDerivativeIsPureCrossDifference) {
    const GridPolynomial chi = build_characteristic_symbolic();
    const GridPolynomial lam_part = poly_sub(chi, substitute_lambda_zero(chi));
    GridPolynomial expected;
    const auto var = [](int i, int j) {
        GridMonomial m;
        m[{i, j}] = 1;
        return m;
    };
    expected.add_term(var(1, 1), SymCoeff::monomial(Rational(1, 2), 1, -1, 1));
    expected.add_term(var(-1, 1), SymCoeff::monomial(Rational(-1, 2), 1, -1, 1));
    expected.add_term(var(1, 0), SymCoeff::monomial(Rational(-1, 2), 1, -1, 1));
    expected.add_term(var(-1, 0), SymCoeff::monomial(Rational(1, 2), 1, -1, 1));
    EXPECT_TRUE(lam_part == expected) << serialize(lam_part);
}

TEST(VerifyKernel, SchemeIsInKernel) {
    const KernelCheck check = verify_kernel(build_scheme_symbolic());
    EXPECT_TRUE(check.ok) << serialize(check.witness);
    EXPECT_TRUE(check.witness.is_zero());
}

TEST(VerifyKernel, EnergyProductIsInKernel) {
    const GridPolynomial product =
        poly_mul(build_characteristic_symbolic(), build_scheme_symbolic());
    const KernelCheck check = verify_kernel(product);
    EXPECT_TRUE(check.ok) << serialize(check.witness);
}

TEST(VerifyKernel, LambdaZeroSubFamilyIsInKernel) {
    EXPECT_TRUE(verify_kernel(substitute_lambda_zero(build_scheme_symbolic())).ok);
    const GridPolynomial product0 = substitute_lambda_zero(
        poly_mul(build_characteristic_symbolic(), build_scheme_symbolic()));
    EXPECT_TRUE(verify_kernel(product0).ok);
}

TEST(VerifyKernel, CubeOfVariableFailsWithWitness) {
    const GridPolynomial u3 =
        poly_mul(sym_var(0, 0), poly_mul(sym_var(0, 0), sym_var(0, 0)));
    const KernelCheck check = verify_kernel(u3);
    EXPECT_FALSE(check.ok);
    const GridPolynomial expected =
        poly_scale(poly_mul(sym_var(0, 0), sym_var(0, 0)), SymCoeff::constant(Rational(3)));
    EXPECT_TRUE(check.witness == expected) << serialize(check.witness);
}

TEST(VerifyKernel, CorruptedCoefficientFailsWithNonzeroWitness) {
    // Perturb one rational coefficient of the scheme by 1e-6: the perturbed
    // polynomial leaves the kernel and the witness is the exact defect.
    const GridPolynomial corrupted =
        poly_add(build_scheme_symbolic(),
                 poly_scale(sym_var(0, 0),
                            SymCoeff::constant(Rational(1, 1000000))));
    const KernelCheck check = verify_kernel(corrupted);
    EXPECT_FALSE(check.ok);
    EXPECT_FALSE(check.witness.is_zero());
    EXPECT_TRUE(check.witness ==
                sym_const(SymCoeff::constant(Rational(1, 1000000))));
}

TEST(EnergyDivergence, ExactIdentityHolds) { EXPECT_TRUE(verify_energy_divergence()); }

TEST(EnergyDivergence, DeletedLambdaFluxTermBreaksIdentity) {
    const GridPolynomial lam_flux_term = poly_scale(
        poly_mul(sym_diff_n(sym_var(0, 0)), sym_diff_n(sym_var(-1, 0))),
        SymCoeff::monomial(Rational(1, 2), 2, 0, 1));
    const GridPolynomial mutated =
        poly_sub(build_energy_flux_symbolic(), lam_flux_term);
    const GridPolynomial defect =
        energy_divergence_defect(mutated, build_energy_density_symbolic());
    EXPECT_FALSE(defect.is_zero());
}

TEST(EnergyDivergence, LambdaZeroSubFamilyHolds) {
    const GridPolynomial defect0 = substitute_lambda_zero(energy_divergence_defect(
        build_energy_flux_symbolic(), build_energy_density_symbolic()));
    EXPECT_TRUE(defect0.is_zero());
    // Built from the lambda=0 pieces directly, the identity also holds.
    const GridPolynomial lhs = poly_mul(substitute_lambda_zero(build_characteristic_symbolic()),
                                        substitute_lambda_zero(build_scheme_symbolic()));
    const GridPolynomial rhs =
        poly_add(sym_diff_m(substitute_lambda_zero(build_energy_flux_symbolic())),
                 sym_diff_n(build_energy_density_symbolic()));
    EXPECT_TRUE(poly_sub(lhs, rhs).is_zero());
}

TEST(Serialization, RationalForms) {
    EXPECT_EQ(serialize(Rational(1, 2)), "1/2");
    EXPECT_EQ(serialize(Rational(-3)), "-3");
    EXPECT_EQ(serialize(Rational(4, 2)), "2");
}

TEST(Serialization, DeterministicUnderInsertionOrder) {
    GridPolynomial a, b;
    const auto var = [](int i, int j) {
        GridMonomial m;
        m[{i, j}] = 1;
        return m;
    };
    a.add_term(var(0, 0), SymCoeff::monomial(Rational(1, 3), -1, 0, 0));
    a.add_term(var(1, 1), SymCoeff::monomial(Rational(2), 0, -1, 1));
    b.add_term(var(1, 1), SymCoeff::monomial(Rational(2), 0, -1, 1));
    b.add_term(var(0, 0), SymCoeff::monomial(Rational(1, 3), -1, 0, 0));
    EXPECT_TRUE(a == b);
    EXPECT_EQ(serialize(a), serialize(b));
}

TEST(Serialization, SchemeMatchesGoldenFile) {
    const std::string golden = read_file(std::string(MKDV_GOLDEN_DIR) + "/scheme_poly.txt");
    EXPECT_EQ(serialize(build_scheme_symbolic()), golden);
}

TEST(ExactEvaluation, MatchesFloatingResidual) {
    // Dyadic-rational states are exact in binary floating point, so the float
    // residual can be compared against the exact rational evaluation of the
    // scheme polynomial.
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> num(-96, 96);
    const std::size_t n = 8;
    const double dx = 0.5, dt = 0.25, lam = -0.0625;  // all exact dyadics
    const mkdv::SchemeConfig cfg = testutil::config_for(lam, dx, dt, n);
    const GridPolynomial scheme = build_scheme_symbolic();
    const Rational rdx(1, 2), rdt(1, 4), rlam(-1, 16);

    for (int rep = 0; rep < 20; ++rep) {
        mkdv::TwoLevelState s;
        s.level0 = testutil::make_grid(std::vector<double>(n, 0.0), dx);
        s.level1 = testutil::make_grid(std::vector<double>(n, 0.0), dx);
        s.delta_t = dt;
        for (std::size_t i = 0; i < n; ++i) {
            s.level0.values[i] = static_cast<double>(num(rng)) / 64.0;
            s.level1.values[i] = static_cast<double>(num(rng)) / 64.0;
        }
        const mkdv::GridFunction r = mkdv::residual(s, cfg);
        for (std::size_t i = 0; i < n; ++i) {
            std::map<Offset, Rational> vars;
            for (int a = -2; a <= 2; ++a) {
                const long idx = static_cast<long>(i) + a;
                vars[{a, 0}] = Rational(
                    static_cast<long long>(std::llround(s.level0.at(idx) * 64.0)), 64);
                vars[{a, 1}] = Rational(
                    static_cast<long long>(std::llround(s.level1.at(idx) * 64.0)), 64);
            }
            const double expected =
                static_cast<double>(eval_exact(scheme, vars, rdx, rdt, rlam));
            const double scale = std::max(1.0, std::abs(expected));
            EXPECT_NEAR(r.values[i], expected, 1e-13 * scale) << "rep " << rep << " i " << i;
        }
    }
}
