// Closed-form 2x2 Hermitian eigensolver and helpers

#include "qgp/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qgp {

double Ket2::norm() const noexcept {
    return std::sqrt(std::norm(c1) + std::norm(c0));
}

Mat2 Mat2::adjoint() const noexcept {
    return {{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}};
}

Mat2& Mat2::operator+=(const Mat2& o) noexcept {
    for (std::size_t i = 0; i < 4; ++i) m[i] += o.m[i];
    return *this;
}

Mat2& Mat2::operator-=(const Mat2& o) noexcept {
    for (std::size_t i = 0; i < 4; ++i) m[i] -= o.m[i];
    return *this;
}

Mat2& Mat2::operator*=(Complex s) noexcept {
    for (auto& x : m) x *= s;
    return *this;
}

Mat2 operator+(Mat2 a, const Mat2& b) noexcept { return a += b; }
Mat2 operator-(Mat2 a, const Mat2& b) noexcept { return a -= b; }
Mat2 operator*(Complex s, Mat2 a) noexcept { return a *= s; }

Mat2 operator*(const Mat2& a, const Mat2& b) noexcept {
    return {{a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
             a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]}};
}

Ket2 operator*(const Mat2& a, const Ket2& k) noexcept {
    return {a.m[0] * k.c1 + a.m[1] * k.c0, a.m[2] * k.c1 + a.m[3] * k.c0};
}

Mat2 projector(const Ket2& k) noexcept {
    return {{k.c1 * std::conj(k.c1), k.c1 * std::conj(k.c0), k.c0 * std::conj(k.c1),
             k.c0 * std::conj(k.c0)}};
}

Complex inner(const Ket2& a, const Ket2& b) noexcept {
    return std::conj(a.c1) * b.c1 + std::conj(a.c0) * b.c0;
}

Mat2 hermitian_part(const Mat2& rho) noexcept {
    Mat2 out = rho + rho.adjoint();
    out *= 0.5;
    return out;
}

Ket2 canonical_gauge(Ket2 k) noexcept {
    const double a0 = std::abs(k.c0);
    if (a0 > 0.0) {
        const Complex phase = std::conj(k.c0) / a0;
        k.c1 *= phase;
        k.c0 = a0;
    } else {
        const double a1 = std::abs(k.c1);
        if (a1 > 0.0) k.c1 = a1;
    }
    return k;
}

namespace {

bool all_finite(const Mat2& a) noexcept {
    return std::all_of(a.m.begin(), a.m.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

double hermiticity_deviation(const Mat2& a) noexcept {
    const Mat2 d = a - a.adjoint();
    double worst = 0.0;
    for (const auto& z : d.m) worst = std::max(worst, std::abs(z));
    return worst;
}

Ket2 normalized(Ket2 k) noexcept {
    const double n = k.norm();
    k.c1 /= n;
    k.c0 /= n;
    return k;
}

}  // namespace

EigenPair2 eig_hermitian_2x2(const Mat2& rho) {
    if (!all_finite(rho)) {
        throw std::invalid_argument("eig_hermitian_2x2: non-finite matrix entry");
    }
    if (const double dev = hermiticity_deviation(rho); dev > kHermiticityTol) {
        std::ostringstream msg;
        msg << "eig_hermitian_2x2: matrix is not Hermitian (deviation " << dev << ")";
        throw std::invalid_argument(msg.str());
    }

    const double a = rho.m[0].real();
    const double d = rho.m[3].real();
    const Complex b = 0.5 * (rho.m[1] + std::conj(rho.m[2]));

    const double half_sum = 0.5 * (a + d);
    const double half_diff = 0.5 * (a - d);
    const double r = std::hypot(half_diff, std::abs(b));

    EigenPair2 out;
    out.eps_plus = half_sum + r;
    out.eps_minus = half_sum - r;
    out.degenerate = (2.0 * r) < kDegeneracyGap;

    if (r == 0.0) {
        out.v_plus = {Complex{1.0}, Complex{}};
        out.v_minus = {Complex{}, Complex{1.0}};
        return out;
    }

    // Pick the row of (rho - eps_plus) whose null vector is best conditioned.
    Ket2 v;
    if (a >= d) {
        v = {Complex{out.eps_plus - d}, std::conj(b)};
    } else {
        v = {b, Complex{out.eps_plus - a}};
    }
    out.v_plus = canonical_gauge(normalized(v));
    out.v_minus = canonical_gauge({-std::conj(out.v_plus.c0), std::conj(out.v_plus.c1)});
    return out;
}

DensityDiagnostics validate_density(const Mat2& rho) noexcept {
    DensityDiagnostics out;
    if (!all_finite(rho)) {
        out.finite = false;
        out.hermiticity = out.trace = INFINITY;
        out.min_eigenvalue = -INFINITY;
        return out;
    }
    out.hermiticity = hermiticity_deviation(rho);
    out.trace = std::abs(rho.trace() - 1.0);
    const Mat2 h = hermitian_part(rho);
    const double a = h.m[0].real();
    const double d = h.m[3].real();
    out.min_eigenvalue = 0.5 * (a + d) - std::hypot(0.5 * (a - d), std::abs(h.m[1]));
    return out;
}

}  // namespace qgp
