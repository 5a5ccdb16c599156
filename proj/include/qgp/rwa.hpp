// Closed-form reduced dynamics of the qubit under the rotating-wave approximation
//
// With the qubit prepared in cos(theta/2)|1> + sin(theta/2)|0> and the bath in
// vacuum, the excited amplitude evolves as c1(t) = c1(0) exp(-i omega0 t) f(t)
// with a real envelope f. Everything in this header is a function of f, the
// initial angle theta and time.

#pragma once

#include <cstddef>
#include <functional>

#include "qgp/algebra.hpp"
#include "qgp/bath.hpp"
#include "qgp/gp_result.hpp"
#include "qgp/trajectory.hpp"

namespace qgp::rwa {

// Excited-state envelope f(t). f(0) = 1, |f| <= 1, real in every damping branch.
// Throws std::invalid_argument for t < 0 or invalid bath parameters.
double amplitude_f(double t, const BathParams& p);

// Envelope of the lossless Jaynes-Cummings limit, f(t) = cos(W t).
double amplitude_jc(double t, double W) noexcept;

using Envelope = std::function<double(double)>;

Envelope lorentzian_envelope(const BathParams& p);
Envelope jc_envelope(double W);

// Reduced density matrix at time t for a given envelope value.
DensityMatrix2 rho_from_envelope(double t, double theta, double f) noexcept;

// theta in [0, pi], t in [0, T]; throws std::invalid_argument otherwise.
DensityMatrix2 rho_rwa(double t, double theta, const BathParams& p);

// Analytic eigensystem of rho_rwa. Eigenvectors are
//   |eps_pm(t)> = exp(-i omega0 t) cos(Theta_pm) |1> + sin(Theta_pm) |0>.
struct EigenFrame {
    double eps_plus{};
    double eps_minus{};
    double theta_plus{};   // Theta_+ in [0, pi]
    double theta_minus{};  // Theta_+ - pi/2, so that |eps_-> is orthogonal to |eps_+>
    double norm_plus{};    // N_+
    double norm_minus{};   // N_-
    bool degenerate{};

    Ket2 v_plus(double t) const noexcept;
    Ket2 v_minus(double t) const noexcept;
};

EigenFrame eigenframe_from_envelope(double theta, double f);

EigenFrame eigensystem_rwa(double t, double theta, const BathParams& p);

// <psi(0)|psi(T)> for the dominant eigenvector, in the analytic gauge where it is
// real. theta must lie in (0, pi).
double overlap_from_envelope(double theta, double f_T);
double overlap_0T(double theta, const BathParams& p);

struct QuadratureConfig {
    std::size_t intervals{8192};      // composite Simpson, multiple of 4 (halved grid is Simpson too)
    double rel_tol{1e-8};             // Richardson estimate relative to the integral
    std::size_t max_intervals{1u << 22};
    double nodal_tol{1e-8};           // |cos(theta/2 - Theta_+(T))| below this is nodal
};

// Dynamic-phase integral of omega0 cos^2 Theta_+(t) over [0, T], converged by
// doubling. Throws std::runtime_error when max_intervals is reached.
struct PhaseIntegral {
    double value{};
    ConvergenceRecord meta;
};
PhaseIntegral dynamic_phase_integral(double theta, const Envelope& f, const QuadratureConfig& q);

// Geometric phase acquired over one period, principal value. At nodal points the
// result carries no phase (Undefined) and nodal = true.
GpResult gp_from_envelope(double theta, const Envelope& f, const QuadratureConfig& q = {});
GpResult gp_rwa_closed(double theta, const BathParams& p, const QuadratureConfig& q = {});
GpResult gp_jc_limit(double theta, double W, const QuadratureConfig& q = {});

// Necessary condition for a nodal point to exist at this initial angle:
// theta < 2 pi / 3.
bool nodal_bound_check(double theta);

inline constexpr double kCriticalAngle = 2.0 * kPi / 3.0;

// Sampled RWA trajectory on a uniform grid of `intervals` steps over [0, T].
Trajectory trajectory(double theta, const BathParams& p, std::size_t intervals);
Trajectory jc_trajectory(double theta, double W, std::size_t intervals);

}  // namespace qgp::rwa
