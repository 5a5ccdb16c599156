#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "qgp/algebra.hpp"
#include "qgp/rwa.hpp"
#include "test_util.hpp"

using namespace qgp;

TEST_SUITE("algebra") {

TEST_CASE("maximally mixed state is degenerate with an orthonormal pair") {
    const EigenPair2 e = eig_hermitian_2x2(Mat2::diag(0.5, 0.5));
    CHECK(e.eps_plus == doctest::Approx(0.5));
    CHECK(e.eps_minus == doctest::Approx(0.5));
    CHECK(e.degenerate);
    CHECK(e.v_plus.norm() == doctest::Approx(1.0));
    CHECK(std::abs(inner(e.v_plus, e.v_minus)) < 1e-14);
}

TEST_CASE("ground-state projector") {
    const EigenPair2 e = eig_hermitian_2x2(Mat2::diag(0.0, 1.0));
    CHECK(e.eps_plus == 1.0);
    CHECK(e.eps_minus == 0.0);
    CHECK(std::abs(e.v_plus.c0) == doctest::Approx(1.0));
    CHECK(std::abs(e.v_plus.c1) < 1e-15);
    CHECK_FALSE(e.degenerate);
}

TEST_CASE("eigenvalues of RWA states agree with the characteristic polynomial") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(0.0, kPi), env(-1.0, 1.0), time(0.0, kPeriod);
    for (int i = 0; i < 200; ++i) {
        const double theta = angle(rng), f = env(rng), t = time(rng);
        const Mat2 rho = rwa::rho_from_envelope(t, theta, f);
        const auto roots = oracle::charpoly_roots(rho);
        const EigenPair2 e = eig_hermitian_2x2(rho);
        CHECK(std::abs(e.eps_plus - roots[0]) < 1e-12);
        CHECK(std::abs(e.eps_minus - roots[1]) < 1e-12);
        const rwa::EigenFrame frame = rwa::eigenframe_from_envelope(theta, f);
        CHECK(std::abs(frame.eps_plus - roots[0]) < 1e-12);
    }
}

TEST_CASE("frozen eigenvalues of the RWA state at theta = pi/3, W = 0.5, lambda = 0.05, t = T") {
    // f(T) from the closed form in 30-digit arithmetic; eigenvalue from a
    // 30-digit Hermitian eigensolver on the same matrix.
    const double f = -0.8544612788818052;
    const Mat2 rho = rwa::rho_from_envelope(kPeriod, kPi / 3, f);
    const EigenPair2 e = eig_hermitian_2x2(rho);
    const double c2f2 = 0.75 * f * f;
    const double s = std::sin(kPi / 3) * f;
    const double expected = 0.5 + 0.5 * std::sqrt(s * s + (2 * c2f2 - 1) * (2 * c2f2 - 1));
    CHECK(e.eps_plus == doctest::Approx(expected).epsilon(1e-14));
    CHECK(std::abs(e.eps_plus - 0.8730391213328776695) < 1e-13);
    CHECK(std::abs(e.eps_minus - 0.1269608786671223305) < 1e-13);
}

TEST_CASE("property: trace, reconstruction, eigen-equation, orthogonality") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 2000; ++i) {
        const Mat2 rho = test::random_density(rng);
        const EigenPair2 e = eig_hermitian_2x2(rho);
        CHECK(std::abs(e.eps_plus + e.eps_minus - rho.trace().real()) < 1e-10);
        CHECK(e.eps_plus >= e.eps_minus);
        CHECK(std::abs(e.v_plus.norm() - 1.0) < 1e-12);
        CHECK(std::abs(e.v_minus.norm() - 1.0) < 1e-12);
        CHECK(std::abs(inner(e.v_plus, e.v_minus)) < 1e-10);
        const Mat2 rebuilt = Complex(e.eps_plus) * projector(e.v_plus) + Complex(e.eps_minus) * projector(e.v_minus);
        CHECK(test::max_abs(rebuilt - rho) < 1e-9);
        const Ket2 rv = rho * e.v_plus;
        CHECK(std::abs(rv.c1 - e.eps_plus * e.v_plus.c1) < 1e-10);
        CHECK(std::abs(rv.c0 - e.eps_plus * e.v_plus.c0) < 1e-10);
        // gauge: real non-negative ground amplitude
        CHECK(std::abs(e.v_plus.c0.imag()) < 1e-15);
        CHECK(e.v_plus.c0.real() >= 0.0);
    }
}

TEST_CASE("inner product") {
    const Ket2 one{1.0, 0.0}, zero{0.0, 1.0};
    CHECK(inner(zero, one) == Complex{});
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        const Ket2 a = test::random_ket(rng), b = test::random_ket(rng);
        CHECK(inner(a, b) == std::conj(inner(b, a)));  // exact
        CHECK(std::abs(inner(a, b)) <= 1.0 + 1e-12);
        CHECK(std::abs(inner(a, a) - 1.0) < 1e-14);
        const Complex s{0.3, -0.7};
        const Ket2 sb{s * b.c1, s * b.c0};
        CHECK(std::abs(inner(a, sb) - s * inner(a, b)) < 1e-14);
        const Ket2 sa{s * a.c1, s * a.c0};
        CHECK(std::abs(inner(sa, b) - std::conj(s) * inner(a, b)) < 1e-14);
    }
}

TEST_CASE("validate_density reports") {
    const DensityDiagnostics mixed = validate_density(Mat2::diag(0.5, 0.5));
    CHECK(mixed.hermiticity == 0.0);
    CHECK(mixed.trace == 0.0);
    CHECK(mixed.min_eigenvalue == doctest::Approx(0.5));
    CHECK(mixed.ok());

    const Ket2 psi{std::cos(0.4), Complex(0.0, std::sin(0.4))};
    const DensityDiagnostics pure = validate_density(projector(psi));
    CHECK(std::abs(pure.min_eigenvalue) < 1e-15);
    CHECK(pure.ok());

    Mat2 skew = Mat2::diag(0.5, 0.5);
    skew.m[1] = 0.1;
    const DensityDiagnostics bad = validate_density(skew);
    CHECK(bad.hermiticity == doctest::Approx(0.1));
    CHECK_FALSE(bad.ok());

    Mat2 nan = Mat2::diag(0.5, 0.5);
    nan.m[2] = std::nan("");
    CHECK_FALSE(validate_density(nan).finite);
}

TEST_CASE("eigensolver rejects invalid input") {
    Mat2 skew = Mat2::diag(0.5, 0.5);
    skew.m[1] = Complex(0.1, 0.0);
    CHECK_THROWS_AS(eig_hermitian_2x2(skew), std::invalid_argument);
    Mat2 inf = Mat2::diag(INFINITY, 0.0);
    CHECK_THROWS_AS(eig_hermitian_2x2(inf), std::invalid_argument);
}

}  // TEST_SUITE
