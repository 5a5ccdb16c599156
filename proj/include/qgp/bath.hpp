// Lorentzian zero-temperature bath description
//
// All frequencies are in units of the qubit splitting omega0 (omega0 = 1); times
// in units of 1/omega0.

#pragma once

#include <complex>
#include <string_view>

#include "qgp/algebra.hpp"

namespace qgp {

inline constexpr double kOmega0 = 1.0;
inline constexpr double kPeriod = kTwoPi / kOmega0;  // T = 2 pi / omega0

enum class Regime { Markovian, NonMarkovian };

std::string_view to_string(Regime r) noexcept;

// Lorentzian spectral density J(w) = (1/pi) W^2 lambda / ((omega0 - w)^2 + lambda^2).
struct BathParams {
    double W{0.5};        // coupling strength
    double lambda{0.05};  // spectral width, inverse correlation time

    // Throws std::invalid_argument unless W >= 0, lambda > 0, both finite.
    void validate() const;

    double correlation_time() const noexcept { return 1.0 / lambda; }
    double system_period() const noexcept { return kPeriod; }
    // Markovian iff the bath correlation time is short against the period,
    // operationally lambda >= omega0.
    Regime regime() const noexcept {
        return lambda >= kOmega0 ? Regime::Markovian : Regime::NonMarkovian;
    }

    double spectral_density(double omega) const noexcept;
};

// Bath correlation function. In the frame rotating with omega0 (the one used for
// the RWA amplitude equation) it is W^2 exp(-lambda t); in the lab frame
// C(t) = <B(t)B(0)> = W^2 exp(-(lambda + i omega0) t) for t >= 0, which splits
// into real and imaginary parts with exponents (lambda - i omega0, lambda + i omega0).
struct CorrelationFunction {
    double amplitude{};                    // W^2
    std::complex<double> exponent_minus{};  // lambda - i omega0
    std::complex<double> exponent_plus{};   // lambda + i omega0

    static CorrelationFunction from(const BathParams& p) noexcept;

    std::complex<double> lab(double t) const noexcept;
    double rotating(double t) const noexcept;
};

enum class DampingBranch { Overdamped, Critical, Underdamped };

std::string_view to_string(DampingBranch b) noexcept;

// Overdamped when lambda^2 > 4 W^2, underdamped when lambda^2 < 4 W^2.
DampingBranch damping_branch(const BathParams& p) noexcept;

}  // namespace qgp
