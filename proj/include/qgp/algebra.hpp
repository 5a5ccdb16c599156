// 2x2 complex linear algebra for a single qubit
//
// Basis ordering is {|1>, |0>} throughout: index 0 is the excited state |1>,
// index 1 the ground state |0>. Entry (0,0) of a density matrix is therefore the
// excited-state population.

#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace qgp {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Pure qubit state c1|1> + c0|0>.
struct Ket2 {
    Complex c1{};  // excited
    Complex c0{};  // ground

    double norm() const noexcept;
};

// Row-major 2x2 complex matrix in the {|1>, |0>} basis.
struct Mat2 {
    std::array<Complex, 4> m{};

    Complex& operator()(std::size_t r, std::size_t c) noexcept { return m[2 * r + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const noexcept { return m[2 * r + c]; }

    static Mat2 zero() noexcept { return {}; }
    static Mat2 identity() noexcept { return {{Complex{1.0}, Complex{}, Complex{}, Complex{1.0}}}; }
    static Mat2 diag(Complex a, Complex d) noexcept { return {{a, Complex{}, Complex{}, d}}; }

    Complex trace() const noexcept { return m[0] + m[3]; }
    Mat2 adjoint() const noexcept;

    Mat2& operator+=(const Mat2& o) noexcept;
    Mat2& operator-=(const Mat2& o) noexcept;
    Mat2& operator*=(Complex s) noexcept;

    friend bool operator==(const Mat2&, const Mat2&) = default;
};

Mat2 operator+(Mat2 a, const Mat2& b) noexcept;
Mat2 operator-(Mat2 a, const Mat2& b) noexcept;
Mat2 operator*(Complex s, Mat2 a) noexcept;
Mat2 operator*(const Mat2& a, const Mat2& b) noexcept;

// A density matrix is stored as a plain Mat2; validity is a property checked by
// validate_density rather than enforced by the type.
using DensityMatrix2 = Mat2;

// |k><k|
Mat2 projector(const Ket2& k) noexcept;

// <a|b>, conjugate-linear in a.
Complex inner(const Ket2& a, const Ket2& b) noexcept;

Ket2 operator*(const Mat2& a, const Ket2& k) noexcept;

struct EigenPair2 {
    double eps_plus{};
    double eps_minus{};
    Ket2 v_plus{};
    Ket2 v_minus{};
    bool degenerate{};  // |eps_plus - eps_minus| < kDegeneracyGap
};

inline constexpr double kDegeneracyGap = 1e-9;

// Closed-form eigendecomposition of a Hermitian 2x2 matrix.
//
// Gauge: each eigenvector is rotated so that its ground-state (|0>) amplitude is
// real and non-negative; when that amplitude vanishes the excited amplitude is
// made real positive instead. Throws std::invalid_argument on non-finite or
// non-Hermitian input (tolerance kHermiticityTol).
EigenPair2 eig_hermitian_2x2(const Mat2& rho);

inline constexpr double kHermiticityTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = 1e-10;

struct DensityDiagnostics {
    double hermiticity{};   // max |rho - rho^dagger| elementwise
    double trace{};         // |tr rho - 1| (complex modulus)
    double min_eigenvalue{};
    bool finite{true};

    bool ok(double herm_tol = kHermiticityTol, double trace_tol = kTraceTol,
            double pos_tol = kPositivityTol) const noexcept {
        return finite && hermiticity <= herm_tol && trace <= trace_tol &&
               min_eigenvalue >= -pos_tol;
    }
};

DensityDiagnostics validate_density(const Mat2& rho) noexcept;

// (rho + rho^dagger) / 2
Mat2 hermitian_part(const Mat2& rho) noexcept;

// Multiply a ket by a unit phase so its gauge matches eig_hermitian_2x2.
Ket2 canonical_gauge(Ket2 k) noexcept;

}  // namespace qgp
