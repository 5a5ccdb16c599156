// Zero-temperature hierarchy equations of motion for a qubit in a Lorentzian bath
//
// The lab-frame bath correlation W^2 exp(-(lambda + i omega0) t) splits into two
// exponentials with rates v = (lambda - i omega0, lambda + i omega0). Auxiliary
// density operators (ADOs) rho_(n1,n2) obey
//
//   d/dt rho_n = -(i H_S^x + n.v) rho_n - i sum_k V^x rho_{n+e_k}
//                - i (W^2/2) sum_k n_k [V^x + (-1)^k V^o] rho_{n-e_k}
//
// with H_S = omega0 |1><1|, V = sigma_x, A^x B = [A,B], A^o B = {A,B}. The
// hierarchy is cut at n1 + n2 <= depth with a zero terminator. Internally ADOs
// are stored rescaled by sqrt(prod_k n_k! (W^2/2)^n_k); rho_(0,0) is unaffected.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgp/algebra.hpp"
#include "qgp/bath.hpp"
#include "qgp/gp_result.hpp"
#include "qgp/trajectory.hpp"

namespace qgp::heom {

struct AdoIndex {
    int n1{};
    int n2{};

    int level() const noexcept { return n1 + n2; }
    friend bool operator==(const AdoIndex&, const AdoIndex&) = default;
};

// Dense triangular layout of all indices with n1 + n2 <= depth, ordered by level.
class Hierarchy {
public:
    explicit Hierarchy(int depth);

    int depth() const noexcept { return depth_; }
    std::size_t size() const noexcept { return indices_.size(); }
    const AdoIndex& at(std::size_t i) const { return indices_.at(i); }
    std::size_t index(AdoIndex n) const;  // throws std::out_of_range beyond the truncation

    static std::size_t count(int depth) noexcept;

private:
    int depth_;
    std::vector<AdoIndex> indices_;
};

struct AdoSet {
    int depth{};
    double time{};
    std::vector<Mat2> ados;  // laid out as Hierarchy(depth)

    const Mat2& physical() const { return ados.front(); }
    Mat2& physical() { return ados.front(); }
    const Mat2& operator[](AdoIndex n) const;
    Mat2& operator[](AdoIndex n);
};

struct HeomConfig {
    int depth{12};
    std::size_t steps{4000};         // RK4 steps over [0, t_final]
    double t_final{kPeriod};
    std::size_t sample_every{1};     // trajectory stride in steps
    double gp_tol{1e-4 * kPi};       // certification threshold on the phase change
    int depth_increment{5};
    int max_depth{150};              // ceiling for adaptive depth search
    bool parallel{false};            // OpenMP over ADOs inside each derivative evaluation

    double dt() const noexcept { return t_final / static_cast<double>(steps); }
    void validate() const;
};

// Starting depth for the adaptive search. Calibrated at lambda = 0.05 where
// strong coupling needs a deep hierarchy; broad baths converge almost at once.
int suggested_depth(const BathParams& p);

class BlowUpError : public std::runtime_error {
public:
    BlowUpError(AdoIndex where, double time, const std::string& what)
        : std::runtime_error(what), index(where), time(time) {}
    AdoIndex index;
    double time;
};

// rho_(0,0) = projector on cos(theta/2)|1> + sin(theta/2)|0>, every other ADO zero.
AdoSet init_ados(double theta, int depth);
AdoSet init_ados(const DensityMatrix2& rho0, int depth);

// Per-ADO rate tables for a given bath and truncation.
struct Coefficients {
    std::vector<Complex> decay;            // n.v
    std::vector<std::array<long, 2>> up;   // index of n + e_k, or -1
    std::vector<std::array<long, 2>> down; // index of n - e_k, or -1
    std::vector<std::array<double, 2>> up_scale;
    std::vector<std::array<double, 2>> down_scale;

    Coefficients(const Hierarchy& h, const BathParams& p);
};

// Derivative kernels over one ADO vector. The serial version is the reference;
// the OpenMP version distributes ADOs over threads and is bitwise identical.
void rhs_serial(const Coefficients& c, std::span<const Mat2> in, std::span<Mat2> out) noexcept;
void rhs_parallel(const Coefficients& c, std::span<const Mat2> in, std::span<Mat2> out) noexcept;

AdoSet heom_rhs(const AdoSet& ados, const BathParams& p);

// Classical fourth-order Runge-Kutta step. Throws BlowUpError naming the first
// non-finite ADO.
AdoSet step_rk4(const AdoSet& ados, double dt, const BathParams& p);

// Reusable integrator: owns the coefficient tables and RK4 workspace.
class Propagator {
public:
    Propagator(const BathParams& p, int depth, bool parallel = false);

    const Hierarchy& hierarchy() const noexcept { return hierarchy_; }
    void derivative(std::span<const Mat2> in, std::span<Mat2> out) const noexcept;
    void step(std::span<Mat2> state, double dt);
    // Throws BlowUpError if any entry is non-finite.
    void check_finite(std::span<const Mat2> state, double time) const;

private:
    Hierarchy hierarchy_;
    Coefficients coeffs_;
    bool parallel_;
    std::vector<Mat2> k1_, k2_, k3_, k4_, tmp_;
};

// rho_(0,0)(t) sampled every config.sample_every steps, re-symmetrized at output.
// No certification.
Trajectory propagate(const DensityMatrix2& rho0, const BathParams& p, const HeomConfig& config);
Trajectory propagate(double theta, const BathParams& p, const HeomConfig& config);

// Images of the four matrix units |i><j| under the reduced dynamics at each
// sample time. The hierarchy is linear, so any initial state follows by
// superposition.
struct DynamicalMap {
    std::vector<double> times;
    std::vector<std::array<Mat2, 4>> images;  // row-major unit order (11, 10, 01, 00)
    int depth{};
    std::size_t steps{};

    // `symmetrize` replaces each sample by its Hermitian part, as propagate does.
    Trajectory apply(const DensityMatrix2& rho0, bool symmetrize = true) const;
    Trajectory apply(double theta, bool symmetrize = true) const;
};

DynamicalMap evolve_map(const BathParams& p, const HeomConfig& config);

struct Certificate {
    int depth{};
    std::size_t steps{};
    double phi{};                // phase at (depth, steps); NaN if undefined
    double phi_deeper{};         // phase at (depth + increment, steps)
    double phi_finer{};          // phase at (depth, 2 steps)
    double delta_phi_depth{};    // circular |phi_deeper - phi|
    double delta_phi_step{};     // circular |phi_finer - phi|
    double max_dev_depth{};      // max elementwise trajectory change, deeper run
    double max_dev_step{};       // same, finer run on the shared samples
    double tolerance{};
    bool passed{};

    double delta_phi() const noexcept;
};

// Reruns with depth + increment and with half the step; passes iff both phase
// changes are below config.gp_tol. Never throws on failure.
Certificate certify_convergence(double theta, const BathParams& p, const HeomConfig& config);

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(Certificate c, const std::string& what)
        : std::runtime_error(what), certificate(c) {}
    Certificate certificate;
};

struct Evolution {
    Trajectory trajectory;
    GpResult gp;
    Certificate certificate;
};

// Certified evolution: throws ConvergenceError (carrying the phases of both
// runs) when the certificate fails.
Evolution evolve(double theta, const BathParams& p, const HeomConfig& config);

// Grows the depth by config.depth_increment from config.depth until the
// deeper rerun changes the phase by less than config.gp_tol for every theta,
// then checks step halving. Works on dynamical maps, so all angles share the
// cost of one propagation per setting.
struct MapSweep {
    std::vector<GpResult> results;   // one per theta, in input order
    std::vector<Certificate> certificates;
    std::vector<double> depth_history;   // max |delta phi| per tried depth
    DynamicalMap map;                // at the accepted depth and step
    int depth{};
    bool converged{};
};

MapSweep certified_sweep(std::span<const double> thetas, const BathParams& p,
                         const HeomConfig& config);

}  // namespace qgp::heom
