// Bargmann-product geometric phase with branch tracking

#include "qgp/geometric_phase.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qgp::gp {

namespace {

// Eigenvalues within roundoff of zero carry no weight.
constexpr double kZeroWeight = 1e-12;
// HEOM samples are re-symmetrized, external ones may carry CSV roundoff.
constexpr double kTrajectoryHermiticityTol = 1e-9;
constexpr double kVanishingLink = 1e-8;

EigenPair2 checked_eig(const DensityMatrix2& rho, std::size_t sample) {
    const DensityDiagnostics diag = validate_density(rho);
    if (!diag.finite || diag.hermiticity > kTrajectoryHermiticityTol) {
        std::ostringstream msg;
        msg << "trajectory sample " << sample << " is not a Hermitian finite matrix (deviation "
            << diag.hermiticity << ")";
        throw std::invalid_argument(msg.str());
    }
    return eig_hermitian_2x2(hermitian_part(rho));
}

double clamp_weight(double eps) noexcept { return eps > kZeroWeight ? eps : 0.0; }

GpResult single_branch(const BranchTrack& track, std::size_t branch, double nodal_tol) {
    const auto& vecs = track.vectors[branch];
    GpResult out;
    out.overlap = inner(vecs.front(), vecs.back());
    out.degenerate = track.degenerate;
    out.meta.samples = track.size() - 1;
    for (std::size_t b = 0; b < 2; ++b) {
        out.branch_weights.push_back(std::sqrt(clamp_weight(track.eigenvalues[b].front()) *
                                               clamp_weight(track.eigenvalues[b].back())));
    }
    out.phi = principal_value(std::arg(out.overlap) + link_phase(track, branch));
    detect_nodal(out, nodal_tol);
    return out;
}

}  // namespace

BranchTrack track_branches(const Trajectory& traj) {
    traj.check_grid();
    BranchTrack track;
    const std::size_t n = traj.size();
    for (auto& v : track.vectors) v.reserve(n);
    for (auto& e : track.eigenvalues) e.reserve(n);

    const EigenPair2 first = checked_eig(traj.states.front(), 0);
    track.vectors[0].push_back(first.v_plus);
    track.vectors[1].push_back(first.v_minus);
    track.eigenvalues[0].push_back(first.eps_plus);
    track.eigenvalues[1].push_back(first.eps_minus);
    track.degenerate = first.degenerate;

    for (std::size_t i = 1; i < n; ++i) {
        const EigenPair2 e = checked_eig(traj.states[i], i);
        const Ket2& prev = track.vectors[0].back();
        const bool keep = std::abs(inner(prev, e.v_plus)) >= std::abs(inner(prev, e.v_minus));
        const Ket2& v0 = keep ? e.v_plus : e.v_minus;
        const Ket2& v1 = keep ? e.v_minus : e.v_plus;

        const double link = std::min(std::abs(inner(v0, track.vectors[0].back())),
                                     std::abs(inner(v1, track.vectors[1].back())));
        track.min_link = std::min(track.min_link, link);
        if (e.degenerate || link < kVanishingLink) track.degenerate = true;

        track.vectors[0].push_back(v0);
        track.vectors[1].push_back(v1);
        track.eigenvalues[0].push_back(keep ? e.eps_plus : e.eps_minus);
        track.eigenvalues[1].push_back(keep ? e.eps_minus : e.eps_plus);
    }
    return track;
}

double link_phase(const BranchTrack& track, std::size_t branch) {
    const auto& vecs = track.vectors.at(branch);
    double sum = 0.0;
    for (std::size_t i = 1; i < vecs.size(); ++i) sum += std::arg(inner(vecs[i], vecs[i - 1]));
    return sum;
}

GpResult bargmann_phase(const Trajectory& traj, double nodal_tol) {
    const BranchTrack track = track_branches(traj);
    const double eps0 = track.eigenvalues[0].front();
    if (!(eps0 > 1.0 - kPurityTol)) {
        std::ostringstream msg;
        msg << "bargmann_phase: initial state is mixed (largest eigenvalue " << eps0
            << "); use mixed_state_phase";
        throw std::invalid_argument(msg.str());
    }
    return single_branch(track, 0, nodal_tol);
}

GpResult mixed_state_phase(const Trajectory& traj, double nodal_tol) {
    const BranchTrack track = track_branches(traj);

    if (track.eigenvalues[0].front() - track.eigenvalues[1].front() < kDegeneracyGap) {
        GpResult out;
        out.degenerate = true;
        out.meta.samples = traj.intervals();
        out.meta.note = "degenerate initial spectrum: branch assignment is ambiguous";
        return out;
    }

    std::array<double, 2> weight{};
    for (std::size_t b = 0; b < 2; ++b) {
        weight[b] = std::sqrt(clamp_weight(track.eigenvalues[b].front()) *
                              clamp_weight(track.eigenvalues[b].back()));
    }
    if (weight[1] == 0.0) return single_branch(track, 0, nodal_tol);
    if (weight[0] == 0.0) return single_branch(track, 1, nodal_tol);

    Complex total{};
    for (std::size_t b = 0; b < 2; ++b) {
        const Complex overlap = inner(track.vectors[b].front(), track.vectors[b].back());
        total += weight[b] * overlap * std::polar(1.0, link_phase(track, b));
    }

    GpResult out;
    out.overlap = total / (weight[0] + weight[1]);
    out.degenerate = track.degenerate;
    out.branch_weights = {weight[0], weight[1]};
    out.meta.samples = traj.intervals();
    out.phi = principal_value(std::arg(total));
    detect_nodal(out, nodal_tol);
    return out;
}

bool detect_nodal(GpResult& result, double tol) {
    result.nodal = std::abs(result.overlap) < tol;
    if (result.nodal) result.phi.reset();
    return result.nodal;
}

std::vector<std::optional<double>> unwrap_phase(std::span<const std::optional<double>> series) {
    std::vector<std::optional<double>> out(series.size());
    std::optional<double> prev_raw;
    double prev_out = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series[i]) {
            prev_raw.reset();
            continue;
        }
        const double raw = *series[i];
        prev_out = prev_raw ? prev_out + principal_value(raw - *prev_raw) : raw;
        out[i] = prev_out;
        prev_raw = raw;
    }
    return out;
}

std::vector<std::optional<double>> unwrap_phase(std::span<const GpResult> series) {
    std::vector<std::optional<double>> raw;
    raw.reserve(series.size());
    for (const auto& r : series) raw.push_back(r.phi);
    return unwrap_phase(std::span<const std::optional<double>>(raw));
}

GpResult refined_bargmann_phase(const std::function<Trajectory(std::size_t)>& make,
                                const RefinementConfig& cfg, double nodal_tol) {
    std::size_t n = cfg.intervals;
    GpResult prev = bargmann_phase(make(n), nodal_tol);
    std::size_t refinements = 0;
    while (prev.phi && 2 * n <= cfg.max_intervals) {
        n *= 2;
        ++refinements;
        GpResult next = bargmann_phase(make(n), nodal_tol);
        if (!next.phi) return next;
        const double delta = std::abs(circular_difference(*next.phi, *prev.phi));
        next.meta.refinements = refinements;
        next.meta.delta = delta;
        next.meta.converged = delta < cfg.tol;
        prev = std::move(next);
        if (prev.meta.converged) return prev;
    }
    // Only reached at the sampling cap, or at a nodal point where no phase exists.
    if (prev.phi) prev.meta.converged = false;
    return prev;
}

}  // namespace qgp::gp
