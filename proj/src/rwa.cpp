// Closed-form RWA envelope, eigensystem and geometric phase

#include "qgp/rwa.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qgp::rwa {

namespace {

void require_theta(double theta, bool allow_zero) {
    const bool ok = std::isfinite(theta) && theta <= kPi && (allow_zero ? theta >= 0.0 : theta > 0.0);
    if (!ok) {
        std::ostringstream msg;
        msg << "initial angle theta must lie in " << (allow_zero ? "[0, pi]" : "(0, pi]")
            << " (got " << theta << ")";
        throw std::invalid_argument(msg.str());
    }
}

void require_time(double t) {
    if (!std::isfinite(t) || t < 0.0) {
        std::ostringstream msg;
        msg << "time must be finite and >= 0 (got " << t << ")";
        throw std::invalid_argument(msg.str());
    }
}

// sinh(x)/x and sin(x)/x without cancellation near 0.
double sinhc(double x) noexcept {
    return std::abs(x) < 1e-4 ? 1.0 + x * x / 6.0 : std::sinh(x) / x;
}
double sinc(double x) noexcept {
    return std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

}  // namespace

double amplitude_f(double t, const BathParams& p) {
    require_time(t);
    p.validate();
    const double lambda = p.lambda;
    const double half_t = 0.5 * t;
    switch (damping_branch(p)) {
        case DampingBranch::Overdamped: {
            const double omega = std::sqrt(lambda * lambda - 4.0 * p.W * p.W);
            const double x = omega * half_t;
            if (x < 1.0) {
                return std::exp(-lambda * half_t) * (std::cosh(x) + lambda * half_t * sinhc(x));
            }
            // Split into decaying exponentials so large t cannot overflow.
            const double slow = std::exp(-(lambda - omega) * half_t);
            const double fast = std::exp(-(lambda + omega) * half_t);
            return 0.5 * ((1.0 + lambda / omega) * slow + (1.0 - lambda / omega) * fast);
        }
        case DampingBranch::Critical:
            return std::exp(-lambda * half_t) * (1.0 + lambda * half_t);
        case DampingBranch::Underdamped: {
            const double omega = std::sqrt(4.0 * p.W * p.W - lambda * lambda);
            const double x = omega * half_t;
            return std::exp(-lambda * half_t) * (std::cos(x) + lambda * half_t * sinc(x));
        }
    }
    return 0.0;
}

double amplitude_jc(double t, double W) noexcept { return std::cos(W * t); }

Envelope lorentzian_envelope(const BathParams& p) {
    p.validate();
    return [p](double t) { return amplitude_f(t, p); };
}

Envelope jc_envelope(double W) {
    return [W](double t) { return amplitude_jc(t, W); };
}

DensityMatrix2 rho_from_envelope(double t, double theta, double f) noexcept {
    const double c = std::cos(0.5 * theta);
    const double excited = c * c * f * f;
    const Complex coherence = 0.5 * std::sin(theta) * f * std::polar(1.0, -kOmega0 * t);
    return {{Complex{excited}, coherence, std::conj(coherence), Complex{1.0 - excited}}};
}

DensityMatrix2 rho_rwa(double t, double theta, const BathParams& p) {
    require_theta(theta, true);
    require_time(t);
    if (t > kPeriod * (1.0 + 1e-12)) {
        throw std::invalid_argument("rho_rwa: time must lie in [0, T]");
    }
    return rho_from_envelope(t, theta, amplitude_f(t, p));
}

Ket2 EigenFrame::v_plus(double t) const noexcept {
    return {std::polar(std::cos(theta_plus), -kOmega0 * t), Complex{std::sin(theta_plus)}};
}

Ket2 EigenFrame::v_minus(double t) const noexcept {
    return {std::polar(std::cos(theta_minus), -kOmega0 * t), Complex{std::sin(theta_minus)}};
}

EigenFrame eigenframe_from_envelope(double theta, double f) {
    const double c = std::cos(0.5 * theta);
    const double excited = c * c * f * f;
    const double coupling = std::sin(theta) * f;  // twice the coherence modulus
    const double disc = std::sqrt(coupling * coupling + (2.0 * excited - 1.0) * (2.0 * excited - 1.0));

    EigenFrame out;
    out.eps_plus = 0.5 + 0.5 * disc;
    out.eps_minus = 0.5 - 0.5 * disc;
    out.degenerate = disc < kDegeneracyGap;

    const double gap_plus = 2.0 * (out.eps_plus - excited);
    const double gap_minus = 2.0 * (out.eps_minus - excited);
    out.norm_plus = std::hypot(gap_plus, coupling);
    out.norm_minus = std::hypot(gap_minus, coupling);
    out.theta_plus = std::atan2(gap_plus, coupling);
    out.theta_minus = out.theta_plus - 0.5 * kPi;
    return out;
}

EigenFrame eigensystem_rwa(double t, double theta, const BathParams& p) {
    require_theta(theta, true);
    require_time(t);
    return eigenframe_from_envelope(theta, amplitude_f(t, p));
}

double overlap_from_envelope(double theta, double f_T) {
    const double c = std::cos(0.5 * theta);
    const EigenFrame frame = eigenframe_from_envelope(theta, f_T);
    return 2.0 * std::sin(0.5 * theta) * (c * c * (f_T - f_T * f_T) + frame.eps_plus) /
           frame.norm_plus;
}

double overlap_0T(double theta, const BathParams& p) {
    if (!(theta > 0.0 && theta < kPi)) {
        throw std::invalid_argument("overlap_0T: theta must lie in (0, pi); the phase is ill defined at 0");
    }
    return overlap_from_envelope(theta, amplitude_f(kPeriod, p));
}

PhaseIntegral dynamic_phase_integral(double theta, const Envelope& f, const QuadratureConfig& q) {
    if (q.intervals < 4 || q.intervals % 4 != 0) {
        throw std::invalid_argument("quadrature: interval count must be a positive multiple of 4");
    }
    const auto integrand = [&](double t) {
        const double ft = f(t);
        const EigenFrame frame = eigenframe_from_envelope(theta, ft);
        const double cos_theta = std::cos(frame.theta_plus);
        return kOmega0 * cos_theta * cos_theta;
    };

    PhaseIntegral out;
    std::size_t n = q.intervals;
    while (true) {
        const double h = kPeriod / static_cast<double>(n);
        double odd = 0.0;
        double even_inner = 0.0;     // nodes 2, 4, ..., n-2
        double quarter_odd = 0.0;    // nodes 2, 6, 10, ... (odd nodes of the half grid)
        for (std::size_t i = 1; i < n; ++i) {
            const double v = integrand(kPeriod * static_cast<double>(i) / static_cast<double>(n));
            if (i % 2 == 1) {
                odd += v;
            } else {
                even_inner += v;
                if (i % 4 == 2) quarter_odd += v;
            }
        }
        const double ends = integrand(0.0) + integrand(kPeriod);
        const double fine = h / 3.0 * (ends + 4.0 * odd + 2.0 * even_inner);
        const double coarse = 2.0 * h / 3.0 * (ends + 4.0 * quarter_odd + 2.0 * (even_inner - quarter_odd));
        const double estimate = std::abs(fine - coarse) / 15.0;

        out.value = fine;
        out.meta.samples = n;
        out.meta.delta = estimate;
        if (estimate <= q.rel_tol * std::abs(fine) + 1e-15) {
            out.meta.converged = true;
            return out;
        }
        if (2 * n > q.max_intervals) {
            std::ostringstream msg;
            msg << "dynamic phase quadrature did not converge: theta=" << theta << " intervals=" << n
                << " error estimate=" << estimate << " value=" << fine;
            throw std::runtime_error(msg.str());
        }
        n *= 2;
        ++out.meta.refinements;
    }
}

GpResult gp_from_envelope(double theta, const Envelope& f, const QuadratureConfig& q) {
    require_theta(theta, false);
    const EigenFrame final_frame = eigenframe_from_envelope(theta, f(kPeriod));
    const double overlap = std::cos(0.5 * theta - final_frame.theta_plus);

    GpResult out;
    out.overlap = overlap;
    out.degenerate = final_frame.degenerate;
    if (std::abs(overlap) < q.nodal_tol) {
        out.nodal = true;
        out.meta.note = "nodal point";
        return out;
    }
    const PhaseIntegral integral = dynamic_phase_integral(theta, f, q);
    out.meta = integral.meta;
    out.phi = principal_value(integral.value + (overlap < 0.0 ? kPi : 0.0));
    return out;
}

GpResult gp_rwa_closed(double theta, const BathParams& p, const QuadratureConfig& q) {
    return gp_from_envelope(theta, lorentzian_envelope(p), q);
}

GpResult gp_jc_limit(double theta, double W, const QuadratureConfig& q) {
    if (!std::isfinite(W) || W < 0.0) throw std::invalid_argument("gp_jc_limit: W must be >= 0");
    return gp_from_envelope(theta, jc_envelope(W), q);
}

bool nodal_bound_check(double theta) {
    return theta > 0.0 && theta < kCriticalAngle;
}

namespace {

Trajectory sample(double theta, const Envelope& f, std::size_t intervals) {
    require_theta(theta, true);
    if (intervals < 1) throw std::invalid_argument("trajectory: need at least one interval");
    Trajectory traj;
    traj.source = Source::Rwa;
    traj.picture = Picture::Schrodinger;
    traj.times.reserve(intervals + 1);
    traj.states.reserve(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double t = kPeriod * static_cast<double>(i) / static_cast<double>(intervals);
        traj.times.push_back(t);
        traj.states.push_back(rho_from_envelope(t, theta, f(t)));
    }
    return traj;
}

}  // namespace

Trajectory trajectory(double theta, const BathParams& p, std::size_t intervals) {
    return sample(theta, lorentzian_envelope(p), intervals);
}

Trajectory jc_trajectory(double theta, double W, std::size_t intervals) {
    return sample(theta, jc_envelope(W), intervals);
}

}  // namespace qgp::rwa
