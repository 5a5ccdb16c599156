// Lorentzian bath parameters and correlation function

#include "qgp/bath.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qgp {

std::string_view to_string(Regime r) noexcept {
    return r == Regime::Markovian ? "markovian" : "non-markovian";
}

std::string_view to_string(DampingBranch b) noexcept {
    switch (b) {
        case DampingBranch::Overdamped: return "overdamped";
        case DampingBranch::Critical: return "critical";
        case DampingBranch::Underdamped: return "underdamped";
    }
    return "unknown";
}

void BathParams::validate() const {
    if (!std::isfinite(W) || W < 0.0) {
        std::ostringstream msg;
        msg << "bath: coupling W must be finite and >= 0 (got " << W << ")";
        throw std::invalid_argument(msg.str());
    }
    if (!std::isfinite(lambda) || lambda <= 0.0) {
        std::ostringstream msg;
        msg << "bath: spectral width lambda must be finite and > 0 (got " << lambda << ")";
        throw std::invalid_argument(msg.str());
    }
}

double BathParams::spectral_density(double omega) const noexcept {
    const double detuning = kOmega0 - omega;
    return W * W * lambda / (kPi * (detuning * detuning + lambda * lambda));
}

CorrelationFunction CorrelationFunction::from(const BathParams& p) noexcept {
    return {p.W * p.W, {p.lambda, -kOmega0}, {p.lambda, kOmega0}};
}

std::complex<double> CorrelationFunction::lab(double t) const noexcept {
    return amplitude * std::exp(-exponent_plus * t);
}

double CorrelationFunction::rotating(double t) const noexcept {
    return amplitude * std::exp(-exponent_plus.real() * t);
}

DampingBranch damping_branch(const BathParams& p) noexcept {
    const double l2 = p.lambda * p.lambda;
    const double w2 = 4.0 * p.W * p.W;
    if (l2 > w2) return DampingBranch::Overdamped;
    if (l2 < w2) return DampingBranch::Underdamped;
    return DampingBranch::Critical;
}

}  // namespace qgp
