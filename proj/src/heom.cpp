// Hierarchy tables, derivative kernels, RK4 propagation and certification

#include "qgp/heom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qgp/geometric_phase.hpp"

namespace qgp::heom {

// ----------------------------------------------------------------- layout --

Hierarchy::Hierarchy(int depth) : depth_(depth) {
    if (depth < 0) throw std::invalid_argument("hierarchy depth must be >= 0");
    indices_.reserve(count(depth));
    for (int level = 0; level <= depth; ++level) {
        for (int n1 = 0; n1 <= level; ++n1) indices_.push_back({n1, level - n1});
    }
}

std::size_t Hierarchy::count(int depth) noexcept {
    const auto d = static_cast<std::size_t>(depth);
    return (d + 1) * (d + 2) / 2;
}

std::size_t Hierarchy::index(AdoIndex n) const {
    if (n.n1 < 0 || n.n2 < 0 || n.level() > depth_) {
        std::ostringstream msg;
        msg << "ADO index (" << n.n1 << "," << n.n2 << ") outside depth " << depth_;
        throw std::out_of_range(msg.str());
    }
    const auto level = static_cast<std::size_t>(n.level());
    return level * (level + 1) / 2 + static_cast<std::size_t>(n.n1);
}

const Mat2& AdoSet::operator[](AdoIndex n) const { return ados.at(Hierarchy(depth).index(n)); }
Mat2& AdoSet::operator[](AdoIndex n) { return ados.at(Hierarchy(depth).index(n)); }

void HeomConfig::validate() const {
    if (depth < 1) throw std::invalid_argument("heom: depth must be >= 1");
    if (steps < 1) throw std::invalid_argument("heom: steps must be >= 1");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("heom: t_final must be > 0");
    if (sample_every < 1 || steps % sample_every != 0) {
        throw std::invalid_argument("heom: sample_every must divide steps");
    }
    if (depth_increment < 1) throw std::invalid_argument("heom: depth_increment must be >= 1");
}

int suggested_depth(const BathParams& p) {
    p.validate();
    if (p.lambda >= 1.0) return 8;
    // (W, depth) pairs at which the depth + 5 check first passed for lambda = 0.05
    static constexpr std::array<std::array<double, 2>, 10> table{{
        {0.0, 5}, {0.25, 5}, {0.5, 15}, {0.75, 20}, {1.0, 30},
        {1.1, 40}, {1.2, 50}, {1.3, 60}, {1.4, 70}, {1.5, 80}}};
    double depth = table.back()[1] + 100.0 * (p.W - table.back()[0]);
    for (std::size_t i = 1; i < table.size(); ++i) {
        if (p.W <= table[i][0]) {
            const double s = (p.W - table[i - 1][0]) / (table[i][0] - table[i - 1][0]);
            depth = table[i - 1][1] + s * (table[i][1] - table[i - 1][1]);
            break;
        }
    }
    return 5 * static_cast<int>(std::ceil(depth / 5.0 - 1e-9));
}

AdoSet init_ados(const DensityMatrix2& rho0, int depth) {
    AdoSet set;
    set.depth = depth;
    set.ados.assign(Hierarchy::count(depth), Mat2::zero());
    set.ados.front() = rho0;
    return set;
}

AdoSet init_ados(double theta, int depth) {
    if (!(theta >= 0.0 && theta <= kPi)) throw std::invalid_argument("init_ados: theta must lie in [0, pi]");
    const Ket2 psi{Complex{std::cos(0.5 * theta)}, Complex{std::sin(0.5 * theta)}};
    return init_ados(projector(psi), depth);
}

// ----------------------------------------------------------------- kernels --

Coefficients::Coefficients(const Hierarchy& h, const BathParams& p) {
    p.validate();
    const CorrelationFunction corr = CorrelationFunction::from(p);
    const double half_amp = 0.5 * corr.amplitude;  // W^2 / 2
    const std::size_t n = h.size();
    decay.resize(n);
    up.resize(n);
    down.resize(n);
    up_scale.resize(n);
    down_scale.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const AdoIndex a = h.at(i);
        decay[i] = static_cast<double>(a.n1) * corr.exponent_minus +
                   static_cast<double>(a.n2) * corr.exponent_plus;
        const std::array<int, 2> nk{a.n1, a.n2};
        for (std::size_t k = 0; k < 2; ++k) {
            AdoIndex raised = a;
            AdoIndex lowered = a;
            (k == 0 ? raised.n1 : raised.n2) += 1;
            (k == 0 ? lowered.n1 : lowered.n2) -= 1;
            if (raised.level() <= h.depth()) {
                up[i][k] = static_cast<long>(h.index(raised));
                up_scale[i][k] = std::sqrt((nk[k] + 1) * half_amp);
            } else {
                up[i][k] = -1;
                up_scale[i][k] = 0.0;
            }
            if (nk[k] > 0) {
                down[i][k] = static_cast<long>(h.index(lowered));
                down_scale[i][k] = std::sqrt(nk[k] * half_amp);
            } else {
                down[i][k] = -1;
                down_scale[i][k] = 0.0;
            }
        }
    }
}

namespace {

// -i z, written out to keep the kernel free of general complex products.
inline Complex times_minus_i(Complex z) noexcept { return {z.imag(), -z.real()}; }

inline void rhs_one(const Coefficients& c, std::span<const Mat2> in, std::size_t i, Mat2& out) noexcept {
    const Mat2& r = in[i];
    const Complex g = c.decay[i];
    // -i [H_S, rho] - (n.v) rho with H_S = diag(omega0, 0)
    const Complex g_plus{g.real(), g.imag() + kOmega0};
    const Complex g_minus{g.real(), g.imag() - kOmega0};
    Complex o0 = -g * r.m[0];
    Complex o1 = -g_plus * r.m[1];
    Complex o2 = -g_minus * r.m[2];
    Complex o3 = -g * r.m[3];

    // -i sum_k s_k [sigma_x, rho_{n+e_k}]; both raised neighbours exist below the top level
    if (const auto& up = c.up[i]; up[0] >= 0) {
        const Mat2& a = in[static_cast<std::size_t>(up[0])];
        const Mat2& b = in[static_cast<std::size_t>(up[1])];
        const double sa = c.up_scale[i][0];
        const double sb = c.up_scale[i][1];
        const Complex d21 = times_minus_i(sa * (a.m[2] - a.m[1]) + sb * (b.m[2] - b.m[1]));
        const Complex d30 = times_minus_i(sa * (a.m[3] - a.m[0]) + sb * (b.m[3] - b.m[0]));
        o0 += d21;
        o3 -= d21;
        o1 += d30;
        o2 -= d30;
    }

    // k = 1: -i s [V^x - V^o] rho = 2 i s rho sigma_x   (columns swapped)
    if (const long j = c.down[i][0]; j >= 0) {
        const Mat2& a = in[static_cast<std::size_t>(j)];
        const double f = 2.0 * c.down_scale[i][0];
        o0 -= f * times_minus_i(a.m[1]);
        o1 -= f * times_minus_i(a.m[0]);
        o2 -= f * times_minus_i(a.m[3]);
        o3 -= f * times_minus_i(a.m[2]);
    }
    // k = 2: -i s [V^x + V^o] rho = -2 i s sigma_x rho  (rows swapped)
    if (const long j = c.down[i][1]; j >= 0) {
        const Mat2& a = in[static_cast<std::size_t>(j)];
        const double f = 2.0 * c.down_scale[i][1];
        o0 += f * times_minus_i(a.m[2]);
        o1 += f * times_minus_i(a.m[3]);
        o2 += f * times_minus_i(a.m[0]);
        o3 += f * times_minus_i(a.m[1]);
    }
    out.m = {o0, o1, o2, o3};
}

}  // namespace

void rhs_serial(const Coefficients& c, std::span<const Mat2> in, std::span<Mat2> out) noexcept {
    const std::size_t n = c.decay.size();
    for (std::size_t i = 0; i < n; ++i) rhs_one(c, in, i, out[i]);
}

void rhs_parallel(const Coefficients& c, std::span<const Mat2> in, std::span<Mat2> out) noexcept {
    const auto n = static_cast<long>(c.decay.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) rhs_one(c, in, static_cast<std::size_t>(i), out[static_cast<std::size_t>(i)]);
}

AdoSet heom_rhs(const AdoSet& ados, const BathParams& p) {
    const Hierarchy h(ados.depth);
    if (ados.ados.size() != h.size()) throw std::invalid_argument("heom_rhs: ADO count does not match depth");
    const Coefficients c(h, p);
    AdoSet out;
    out.depth = ados.depth;
    out.time = ados.time;
    out.ados.resize(h.size());
    rhs_serial(c, ados.ados, out.ados);
    return out;
}

// -------------------------------------------------------------- propagator --

Propagator::Propagator(const BathParams& p, int depth, bool parallel)
    : hierarchy_(depth), coeffs_(hierarchy_, p), parallel_(parallel) {}

void Propagator::derivative(std::span<const Mat2> in, std::span<Mat2> out) const noexcept {
    const std::size_t n = hierarchy_.size();
    for (std::size_t off = 0; off < in.size(); off += n) {
        if (parallel_) {
            rhs_parallel(coeffs_, in.subspan(off, n), out.subspan(off, n));
        } else {
            rhs_serial(coeffs_, in.subspan(off, n), out.subspan(off, n));
        }
    }
}

void Propagator::step(std::span<Mat2> state, double dt) {
    const std::size_t n = state.size();
    if (n % hierarchy_.size() != 0) throw std::invalid_argument("propagator: state size does not match hierarchy");
    for (auto* w : {&k1_, &k2_, &k3_, &k4_, &tmp_}) w->resize(n);

    const auto axpy = [&](const std::vector<Mat2>& k, double h) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t e = 0; e < 4; ++e) tmp_[i].m[e] = state[i].m[e] + h * k[i].m[e];
        }
    };
    derivative(state, k1_);
    axpy(k1_, 0.5 * dt);
    derivative(tmp_, k2_);
    axpy(k2_, 0.5 * dt);
    derivative(tmp_, k3_);
    axpy(k3_, dt);
    derivative(tmp_, k4_);
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = 0; e < 4; ++e) {
            state[i].m[e] += w * (k1_[i].m[e] + 2.0 * k2_[i].m[e] + 2.0 * k3_[i].m[e] + k4_[i].m[e]);
        }
    }
}

void Propagator::check_finite(std::span<const Mat2> state, double time) const {
    const std::size_t n = hierarchy_.size();
    for (std::size_t i = 0; i < state.size(); ++i) {
        for (const auto& z : state[i].m) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                const AdoIndex where = hierarchy_.at(i % n);
                std::ostringstream msg;
                msg << "HEOM blow-up: non-finite ADO (" << where.n1 << "," << where.n2 << ") at t=" << time;
                throw BlowUpError(where, time, msg.str());
            }
        }
    }
}

AdoSet step_rk4(const AdoSet& ados, double dt, const BathParams& p) {
    Propagator prop(p, ados.depth);
    AdoSet out = ados;
    prop.step(out.ados, dt);
    out.time += dt;
    prop.check_finite(out.ados, out.time);
    return out;
}

// ------------------------------------------------------------- trajectories --

namespace {

bool physical_finite(std::span<const Mat2> state, std::size_t stride) {
    for (std::size_t off = 0; off < state.size(); off += stride) {
        for (const auto& z : state[off].m) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
    }
    return true;
}

// Runs `batch` initial physical states side by side; `record(t, state)` gets
// every sampled configuration.
template <class Record>
void run(const BathParams& p, const HeomConfig& config, std::span<const DensityMatrix2> initial,
         Record&& record) {
    config.validate();
    Propagator prop(p, config.depth, config.parallel);
    const std::size_t n = prop.hierarchy().size();
    std::vector<Mat2> state(n * initial.size(), Mat2::zero());
    for (std::size_t b = 0; b < initial.size(); ++b) state[b * n] = initial[b];

    const double dt = config.dt();
    record(0.0, std::span<const Mat2>(state));
    for (std::size_t s = 1; s <= config.steps; ++s) {
        prop.step(state, dt);
        const double t = config.t_final * static_cast<double>(s) / static_cast<double>(config.steps);
        if (s % config.sample_every == 0) {
            if (!physical_finite(state, n)) prop.check_finite(state, t);
            record(t, std::span<const Mat2>(state));
        }
    }
    prop.check_finite(state, config.t_final);
}

}  // namespace

Trajectory propagate(const DensityMatrix2& rho0, const BathParams& p, const HeomConfig& config) {
    Trajectory traj;
    traj.source = Source::Heom;
    traj.picture = Picture::Schrodinger;
    const std::array<DensityMatrix2, 1> init{rho0};
    run(p, config, init, [&](double t, std::span<const Mat2> s) {
        traj.times.push_back(t);
        traj.states.push_back(hermitian_part(s[0]));
    });
    return traj;
}

Trajectory propagate(double theta, const BathParams& p, const HeomConfig& config) {
    return propagate(init_ados(theta, 1).physical(), p, config);
}

DynamicalMap evolve_map(const BathParams& p, const HeomConfig& config) {
    DynamicalMap map;
    map.depth = config.depth;
    map.steps = config.steps;
    // sigma_x flips diagonal and off-diagonal entries and moves one level, so
    // starting from a diagonal unit the level-L ADOs are diagonal for even L
    // and off-diagonal for odd L, and the reverse for an off-diagonal unit.
    // The two sectors occupy disjoint entries and can share one run.
    std::array<DensityMatrix2, 2> packed{};
    packed[0].m[0] = packed[0].m[1] = 1.0;  // |1><1| + |1><0|
    packed[1].m[3] = packed[1].m[2] = 1.0;  // |0><0| + |0><1|
    const std::size_t n = Hierarchy::count(config.depth);
    run(p, config, packed, [&](double t, std::span<const Mat2> s) {
        const auto diagonal = [](const Mat2& a) { return Mat2::diag(a.m[0], a.m[3]); };
        const auto off_diagonal = [](const Mat2& a) { return Mat2{{Complex{}, a.m[1], a.m[2], Complex{}}}; };
        map.times.push_back(t);
        map.images.push_back({diagonal(s[0]), off_diagonal(s[0]), off_diagonal(s[n]), diagonal(s[n])});
    });
    return map;
}

Trajectory DynamicalMap::apply(const DensityMatrix2& rho0, bool symmetrize) const {
    Trajectory traj;
    traj.source = Source::Heom;
    traj.picture = Picture::Schrodinger;
    traj.times = times;
    traj.states.reserve(images.size());
    for (const auto& img : images) {
        Mat2 rho{};
        for (std::size_t u = 0; u < 4; ++u) rho += rho0.m[u] * img[u];
        traj.states.push_back(symmetrize ? hermitian_part(rho) : rho);
    }
    return traj;
}

Trajectory DynamicalMap::apply(double theta, bool symmetrize) const {
    return apply(init_ados(theta, 1).physical(), symmetrize);
}

// ------------------------------------------------------------ certification --

double Certificate::delta_phi() const noexcept { return std::max(delta_phi_depth, delta_phi_step); }

namespace {

double phase_or_nan(const GpResult& r) {
    return r.phi ? *r.phi : std::numeric_limits<double>::quiet_NaN();
}

// Both undefined counts as agreement (same nodal verdict), one undefined as
// an infinite change.
double phase_change(const GpResult& a, const GpResult& b) {
    if (!a.phi && !b.phi) return 0.0;
    if (!a.phi || !b.phi) return std::numeric_limits<double>::infinity();
    return std::abs(circular_difference(*a.phi, *b.phi));
}

double max_deviation(const Trajectory& a, const Trajectory& b, std::size_t stride_b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Mat2 d = a.states[i] - b.states[i * stride_b];
        for (const auto& z : d.m) worst = std::max(worst, std::abs(z));
    }
    return worst;
}

struct Runs {
    Trajectory base, deeper, finer;
};

Certificate compare(const Runs& r, const HeomConfig& config, GpResult* base_gp) {
    Certificate c;
    c.depth = config.depth;
    c.steps = config.steps;
    c.tolerance = config.gp_tol;
    const GpResult g0 = gp::bargmann_phase(r.base);
    const GpResult g1 = gp::bargmann_phase(r.deeper);
    const GpResult g2 = gp::bargmann_phase(r.finer);
    c.phi = phase_or_nan(g0);
    c.phi_deeper = phase_or_nan(g1);
    c.phi_finer = phase_or_nan(g2);
    c.delta_phi_depth = phase_change(g0, g1);
    c.delta_phi_step = phase_change(g0, g2);
    c.max_dev_depth = max_deviation(r.base, r.deeper, 1);
    c.max_dev_step = max_deviation(r.base, r.finer, 2);
    c.passed = c.delta_phi_depth < c.tolerance && c.delta_phi_step < c.tolerance;
    if (base_gp) *base_gp = g0;
    return c;
}

HeomConfig deeper_config(HeomConfig c) {
    c.depth += c.depth_increment;
    return c;
}

HeomConfig finer_config(HeomConfig c) {
    c.steps *= 2;
    return c;
}

}  // namespace

Certificate certify_convergence(double theta, const BathParams& p, const HeomConfig& config) {
    Runs r{propagate(theta, p, config), propagate(theta, p, deeper_config(config)),
           propagate(theta, p, finer_config(config))};
    return compare(r, config, nullptr);
}

Evolution evolve(double theta, const BathParams& p, const HeomConfig& config) {
    Evolution out;
    Runs r{propagate(theta, p, config), propagate(theta, p, deeper_config(config)),
           propagate(theta, p, finer_config(config))};
    out.certificate = compare(r, config, &out.gp);
    out.gp.meta.depth = config.depth;
    out.gp.meta.delta = out.certificate.delta_phi();
    out.gp.meta.converged = out.certificate.passed;
    out.trajectory = std::move(r.base);
    if (!out.certificate.passed) {
        std::ostringstream msg;
        msg << "HEOM convergence failure at theta=" << theta << " W=" << p.W << " lambda=" << p.lambda
            << " depth=" << config.depth << ": phi=" << out.certificate.phi
            << " phi(depth+" << config.depth_increment << ")=" << out.certificate.phi_deeper
            << " phi(dt/2)=" << out.certificate.phi_finer << " tolerance=" << config.gp_tol;
        throw ConvergenceError(out.certificate, msg.str());
    }
    return out;
}

MapSweep certified_sweep(std::span<const double> thetas, const BathParams& p, const HeomConfig& config) {
    config.validate();
    MapSweep out;
    const auto phases = [&](const DynamicalMap& m) {
        std::vector<GpResult> g;
        g.reserve(thetas.size());
        for (double th : thetas) g.push_back(gp::bargmann_phase(m.apply(th)));
        return g;
    };

    HeomConfig cfg = config;
    DynamicalMap current = evolve_map(p, cfg);
    std::vector<GpResult> current_gp = phases(current);
    std::vector<GpResult> deeper_gp;
    bool depth_ok = false;
    while (true) {
        const HeomConfig deeper_cfg = deeper_config(cfg);
        DynamicalMap deeper = evolve_map(p, deeper_cfg);
        deeper_gp = phases(deeper);
        double worst = 0.0;
        for (std::size_t i = 0; i < thetas.size(); ++i) {
            worst = std::max(worst, phase_change(current_gp[i], deeper_gp[i]));
        }
        out.depth_history.push_back(worst);
        if (worst < cfg.gp_tol) {
            depth_ok = true;
            break;
        }
        if (deeper_cfg.depth + cfg.depth_increment > cfg.max_depth) {
            // Keep the deepest run; the certificate records the failure.
            cfg = deeper_cfg;
            current = std::move(deeper);
            current_gp = std::move(deeper_gp);
            deeper_gp = current_gp;
            break;
        }
        cfg = deeper_cfg;
        current = std::move(deeper);
        current_gp = std::move(deeper_gp);
    }

    const HeomConfig finer_cfg = finer_config(cfg);
    const DynamicalMap finer = evolve_map(p, finer_cfg);
    const std::vector<GpResult> finer_gp = phases(finer);

    out.depth = cfg.depth;
    bool all_pass = depth_ok;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        Certificate c;
        c.depth = cfg.depth;
        c.steps = cfg.steps;
        c.tolerance = cfg.gp_tol;
        c.phi = phase_or_nan(current_gp[i]);
        c.phi_deeper = phase_or_nan(deeper_gp[i]);
        c.phi_finer = phase_or_nan(finer_gp[i]);
        c.delta_phi_depth = depth_ok ? phase_change(current_gp[i], deeper_gp[i])
                                     : std::numeric_limits<double>::infinity();
        c.delta_phi_step = phase_change(current_gp[i], finer_gp[i]);
        c.passed = c.delta_phi_depth < c.tolerance && c.delta_phi_step < c.tolerance;
        all_pass = all_pass && c.passed;

        GpResult g = current_gp[i];
        g.meta.depth = cfg.depth;
        g.meta.delta = c.delta_phi();
        g.meta.converged = c.passed;
        out.results.push_back(std::move(g));
        out.certificates.push_back(c);
    }
    out.converged = all_pass;
    out.map = std::move(current);
    return out;
}

}  // namespace qgp::heom
