// Independent reference computations used only by the tests.

#pragma once

#include <array>
#include <complex>
#include <cstddef>

#include "qgp/algebra.hpp"
#include "qgp/bath.hpp"
#include "qgp/trajectory.hpp"

namespace oracle {

// Roots of x^2 - tr x + det for a Hermitian 2x2 matrix, in long double,
// largest first.
std::array<double, 2> charpoly_roots(const qgp::Mat2& m);

// Excited amplitude c1(t) of the single-excitation Schrodinger equation with
// `modes` bath oscillators of equal weight W^2/modes placed at Lorentzian
// quantiles omega_k = omega0 + lambda tan(u_k). Integrated by RK4 in the frame
// rotating at omega0, so the result approximates the real envelope f(t).
std::complex<double> mode_amplitude(double W, double lambda, double t, std::size_t modes, std::size_t steps);

// Exact non-RWA dynamics through a single damped pseudomode: qubit plus one
// oscillator at omega0 with coupling W sigma_x (b + b^dagger) and Lindblad
// damping 2 lambda D[b]. Its bath correlation equals W^2 exp(-(lambda + i omega0) t).
// Fock space cut at `fock` levels; RK4 with `steps` steps over one period,
// every step sampled.
qgp::Trajectory pseudomode_trajectory(double theta, double W, double lambda, std::size_t fock, std::size_t steps);

}  // namespace oracle
