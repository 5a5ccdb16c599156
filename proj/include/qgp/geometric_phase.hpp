// Geometric phase of a sampled density-matrix trajectory
//
// The dynamic-phase integral is replaced by the consecutive-overlap (Bargmann)
// product  <psi(0)|psi(T)> prod_i <psi(t_i)|psi(t_{i-1})>,  whose argument is
// independent of the phase attached to each eigenvector by the eigensolver.
// For mixed states the eigenbranches are weighted by sqrt(eps_i(0) eps_i(T)).

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qgp/algebra.hpp"
#include "qgp/gp_result.hpp"
#include "qgp/trajectory.hpp"

namespace qgp::gp {

inline constexpr double kNodalTol = 1e-6;
inline constexpr double kPurityTol = 1e-9;

// Eigenbranches followed through time by maximal overlap with the previous
// step's eigenvector, so that branches keep their identity through near
// crossings of the eigenvalues.
struct BranchTrack {
    std::array<std::vector<Ket2>, 2> vectors;
    std::array<std::vector<double>, 2> eigenvalues;
    // Smallest |<psi(t_i)|psi(t_{i-1})>| over all links of either branch.
    double min_link{1.0};
    bool degenerate{};  // eigenvalue gap below kDegeneracyGap somewhere, or a vanishing link

    std::size_t size() const noexcept { return vectors[0].size(); }
};

// Branch 0 starts on the dominant eigenvector at t = 0.
BranchTrack track_branches(const Trajectory& traj);

// Argument of the link product prod_{i>=1} <psi(t_i)|psi(t_{i-1})> for one branch,
// accumulated as a sum of per-link arguments (unwrapped).
double link_phase(const BranchTrack& track, std::size_t branch);

// Pure-state route. Requires eps_plus(0) > 1 - kPurityTol; throws
// std::invalid_argument otherwise (use mixed_state_phase for mixed starts).
GpResult bargmann_phase(const Trajectory& traj, double nodal_tol = kNodalTol);

// Weighted sum over eigenbranches. When only one branch carries weight this is
// identical to bargmann_phase. A degenerate initial spectrum is flagged and
// left without a phase.
GpResult mixed_state_phase(const Trajectory& traj, double nodal_tol = kNodalTol);

// Marks the phase Undefined when |overlap| < tol. Returns the nodal flag.
bool detect_nodal(GpResult& result, double tol = kNodalTol);

// Removes 2 pi wraps along a one-dimensional sweep. Undefined entries are kept
// empty and split the series into independently unwrapped segments; a genuine
// jump of pi survives as a jump of magnitude pi.
std::vector<std::optional<double>> unwrap_phase(std::span<const GpResult> series);
std::vector<std::optional<double>> unwrap_phase(std::span<const std::optional<double>> series);

// Bargmann phase refined by doubling the sampling until successive phases differ
// by less than tol. `make` builds a trajectory with the given number of intervals.
struct RefinementConfig {
    std::size_t intervals{4000};
    double tol{1e-4};
    std::size_t max_intervals{256000};
};
GpResult refined_bargmann_phase(const std::function<Trajectory(std::size_t)>& make,
                                const RefinementConfig& cfg = {},
                                double nodal_tol = kNodalTol);

}  // namespace qgp::gp
