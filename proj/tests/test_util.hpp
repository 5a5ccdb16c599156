// Shared helpers for the unit tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "qgp/algebra.hpp"
#include "qgp/trajectory.hpp"

namespace test {

inline qgp::Ket2 random_ket(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    qgp::Ket2 k{{g(rng), g(rng)}, {g(rng), g(rng)}};
    const double n = k.norm();
    return {k.c1 / n, k.c0 / n};
}

// p |psi><psi| + (1 - p) |psi_perp><psi_perp| with uniform p.
inline qgp::Mat2 random_density(std::mt19937_64& rng) {
    const qgp::Ket2 psi = random_ket(rng);
    const qgp::Ket2 perp{-std::conj(psi.c0), std::conj(psi.c1)};
    const double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return qgp::Complex(p) * qgp::projector(psi) + qgp::Complex(1.0 - p) * qgp::projector(perp);
}

inline double max_abs(const qgp::Mat2& m) {
    double worst = 0.0;
    for (const auto& z : m.m) worst = std::max(worst, std::abs(z));
    return worst;
}

inline double max_deviation(const qgp::Trajectory& a, const qgp::Trajectory& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, max_abs(a.states[i] - b.states[i]));
    return worst;
}

inline double circ(double a, double b) {
    double d = std::remainder(a - b, qgp::kTwoPi);
    return std::abs(d);
}

}  // namespace test
