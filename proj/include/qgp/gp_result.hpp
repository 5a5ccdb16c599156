// Geometric phase result shared by the closed-form and numerical routes

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qgp/algebra.hpp"

namespace qgp {

struct ConvergenceRecord {
    std::size_t samples{};      // quadrature nodes or trajectory intervals actually used
    std::size_t refinements{};  // doubling passes performed
    double delta{};             // last refinement change (radians or relative)
    int depth{};                // HEOM truncation depth, 0 when not applicable
    bool converged{true};
    std::string note;
};

struct GpResult {
    std::optional<double> phi;  // principal value in (-pi, pi]; empty at nodal points
    Complex overlap{};          // <psi(0)|psi(T)>
    bool nodal{};
    bool degenerate{};
    std::vector<double> branch_weights;  // sqrt(eps_i(0) eps_i(T)), numerical routes only
    ConvergenceRecord meta;

    bool defined() const noexcept { return phi.has_value(); }
};

// Reduce an angle to (-pi, pi].
double principal_value(double angle) noexcept;

// Reduce an angle to [0, 2 pi); used for presentation (phase "mod 2 pi").
double wrap_positive(double angle) noexcept;

// Shortest signed distance a - b on the circle, in (-pi, pi].
double circular_difference(double a, double b) noexcept;

}  // namespace qgp
