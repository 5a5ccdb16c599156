// Acceptance checks A1..A10

#include "qgp/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "qgp/geometric_phase.hpp"
#include "qgp/heom.hpp"
#include "qgp/rwa.hpp"
#include "qgp/sweep.hpp"

namespace qgp::validation {

namespace {

using sweep::Method;
using sweep::SweepRow;
using sweep::SweepSpec;
using sweep::SweepTable;

double unitary_phase(double theta) {
    const double c = std::cos(0.5 * theta);
    return wrap_positive(kTwoPi * c * c);
}

double circ(double a, double b) { return std::abs(circular_difference(a, b)); }

std::string fmt(double x, int digits = 3) {
    std::ostringstream s;
    s.precision(digits);
    s << x;
    return s.str();
}

// A certified HEOM sweep over theta at one bath, with the accepted map kept for
// the physicality audit.
struct HeomRun {
    BathParams bath;
    std::vector<double> thetas;
    heom::MapSweep sweep;
};

HeomRun heom_run(const BathParams& p, std::vector<double> thetas) {
    heom::HeomConfig cfg;
    cfg.depth = heom::suggested_depth(p);
    HeomRun r{p, std::move(thetas), {}};
    r.sweep = heom::certified_sweep(r.thetas, p, cfg);
    return r;
}

class Suite {
public:
    explicit Suite(const SuiteOptions& o) : opt_(o) {}

    CheckResult a1();
    CheckResult a2();
    CheckResult a3();
    CheckResult a4();
    CheckResult a5();
    CheckResult a6();
    CheckResult a7();
    CheckResult a8();
    CheckResult a9();
    CheckResult a10();

private:
    const HeomRun& weak();    // lambda = 5, W = 0.05, 50 angles
    const HeomRun& strong();  // lambda = 0.05, W = 0.5, 200 angles
    const SweepTable& rwa_map(double lambda);

    SuiteOptions opt_;
    std::optional<HeomRun> weak_, strong_;
    std::optional<heom::Certificate> unitary_cert_;
    std::map<double, SweepTable> rwa_maps_;
};

const HeomRun& Suite::weak() {
    if (!weak_) weak_ = heom_run({0.05, 5.0}, sweep::open_grid(0.0, kPi, 50));
    return *weak_;
}

const HeomRun& Suite::strong() {
    if (!strong_) strong_ = heom_run({0.5, 0.05}, sweep::open_grid(0.0, kPi, sweep::kLinePoints));
    return *strong_;
}

const SweepTable& Suite::rwa_map(double lambda) {
    auto it = rwa_maps_.find(lambda);
    if (it == rwa_maps_.end()) {
        const auto fig = sweep::figure_preset(1);
        const SweepSpec& spec = lambda > 1.0 ? fig.panels[0] : fig.panels[1];
        it = rwa_maps_.emplace(lambda, sweep::run_grid(spec, opt_.workers)).first;
    }
    return it->second;
}

CheckResult Suite::a1() {
    CheckResult r{"A1", "unitary limit W = 0", false, "", 0.0};
    const auto start = std::chrono::steady_clock::now();
    const BathParams bath{0.0, 0.05};
    double closed = 0.0, barg = 0.0, heom_dev = 0.0;
    heom::HeomConfig cfg;
    cfg.depth = 1;
    for (double theta : {kPi / 6, kPi / 4, kPi / 3, kPi / 2, 3 * kPi / 4}) {
        const double exact = unitary_phase(theta);
        const GpResult g = rwa::gp_rwa_closed(theta, bath);
        closed = std::max(closed, g.phi ? circ(*g.phi, exact) : kPi);
        const GpResult b = gp::bargmann_phase(rwa::trajectory(theta, bath, 4000));
        barg = std::max(barg, b.phi ? circ(*b.phi, exact) : kPi);
        const heom::Evolution e = heom::evolve(theta, bath, cfg);
        heom_dev = std::max(heom_dev, e.gp.phi ? circ(*e.gp.phi, exact) : kPi);
        if (!unitary_cert_ || e.certificate.delta_phi() > unitary_cert_->delta_phi()) unitary_cert_ = e.certificate;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.passed = closed < 1e-6 && barg < 1e-3 && heom_dev < 1e-3 && r.seconds < 60.0;
    r.detail = "max |dphi| closed=" + fmt(closed) + " (<1e-6), bargmann N=4000 " + fmt(barg) +
               " (<1e-3), heom " + fmt(heom_dev) + " (<1e-3), " + fmt(r.seconds, 2) + " s (<60)";
    return r;
}

CheckResult Suite::a2() {
    CheckResult r{"A2", "Bargmann discretization order", false, "", 0.0};
    const double theta = kPi / 3;
    const BathParams bath{0.5, 0.05};
    const GpResult ref = rwa::gp_rwa_closed(theta, bath);
    std::vector<double> x, y;
    std::string errs;
    for (std::size_t n = 500; n <= 16000; n *= 2) {
        const GpResult g = gp::bargmann_phase(rwa::trajectory(theta, bath, n));
        const double err = circ(*g.phi, *ref.phi);
        x.push_back(std::log(1.0 / static_cast<double>(n)));
        y.push_back(std::log(err));
        errs += (errs.empty() ? "" : " ") + fmt(err, 2);
    }
    // least-squares slope of log error against log(1/N)
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.passed = order >= 0.9;
    r.detail = "fitted order " + fmt(order) + " (>=0.9), errors N=500..16000: " + errs;
    return r;
}

// Adjacent grid pair where the overlap changes sign and the phase jumps by pi.
struct Jump {
    std::size_t sign_changes{};
    std::size_t pi_jumps{};
    double at{};
    double size{};
};

Jump find_jump(const std::vector<double>& xs, const std::vector<GpResult>& gs) {
    Jump j;
    for (std::size_t i = 1; i < gs.size(); ++i) {
        const double a = gs[i - 1].overlap.real();
        const double b = gs[i].overlap.real();
        if (!(a * b < 0.0)) continue;
        ++j.sign_changes;
        if (!gs[i - 1].phi || !gs[i].phi) continue;
        const double d = circ(*gs[i].phi, *gs[i - 1].phi);
        if (std::abs(d - kPi) <= 0.05 * kPi) {
            if (j.pi_jumps == 0) {
                j.at = 0.5 * (xs[i - 1] + xs[i]);
                j.size = d;
            }
            ++j.pi_jumps;
        }
    }
    return j;
}

CheckResult Suite::a3() {
    CheckResult r{"A3", "nodal jump at theta = pi/3, lambda = 0.05", false, "", 0.0};
    const auto ws = sweep::upper_grid(1.5, 300);
    std::vector<GpResult> gs;
    for (double w : ws) gs.push_back(rwa::gp_rwa_closed(kPi / 3, {w, 0.05}));
    const Jump j = find_jump(ws, gs);
    r.passed = j.pi_jumps > 0;
    r.detail = std::to_string(j.sign_changes) + " sign changes, " + std::to_string(j.pi_jumps) +
               " with |dphi| = pi +- 0.05 pi; first near W=" + fmt(j.at, 4) + " |dphi|/pi=" + fmt(j.size / kPi, 4);
    return r;
}

CheckResult Suite::a4() {
    CheckResult r{"A4", "no nodal point at theta >= 2pi/3", false, "", 0.0};
    std::size_t nodal_total = 0, violations = 0, rows = 0, failed = 0;
    const auto audit = [&](const SweepTable& t) {
        for (const SweepRow& row : t.rows) {
            ++rows;
            failed += row.failed;
            nodal_total += row.nodal;
            if (row.nodal && row.theta >= rwa::kCriticalAngle) ++violations;
        }
    };
    // On the real RWA overlap a node between two W neighbours shows as a sign change.
    std::size_t crossings = 0, crossings_above = 0;
    for (double lambda : {5.0, 0.05}) {
        const SweepTable& t = rwa_map(lambda);
        audit(t);
        const std::size_t nw = sweep::kHeatmapPoints;
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            if (i % nw == 0) continue;
            if (t.rows[i - 1].overlap.real() * t.rows[i].overlap.real() < 0.0) {
                ++crossings;
                crossings_above += t.rows[i].theta >= rwa::kCriticalAngle;
            }
        }
    }
    violations += crossings_above;
    const std::size_t rwa_nodal = nodal_total;

    const SweepTable heom_map = sweep::run_figure(sweep::figure_preset(4), opt_.workers);
    audit(heom_map);
    std::size_t unconverged = 0;
    for (const auto& row : heom_map.rows) unconverged += !row.converged;

    // Random draws with theta in [2pi/3, pi], where the bound forbids nodes.
    std::mt19937_64 rng(opt_.seed);
    std::uniform_real_distribution<double> theta_dist(rwa::kCriticalAngle, kPi);
    std::uniform_real_distribution<double> w_dist(0.0, 1.5);
    std::uniform_real_distribution<double> log_lambda(std::log(1e-3), std::log(10.0));
    double min_overlap = 1.0;
    for (int i = 0; i < 10000; ++i) {
        const double theta = theta_dist(rng);
        const BathParams p{w_dist(rng), std::exp(log_lambda(rng))};
        const GpResult g = rwa::gp_rwa_closed(theta, p);
        violations += g.nodal;
        min_overlap = std::min(min_overlap, g.overlap.real());
    }
    r.passed = violations == 0 && failed == 0 && min_overlap > 0.0;
    r.detail = "violations " + std::to_string(violations) + " over " + std::to_string(rows) +
               " grid rows + 1e4 draws (rwa overlap sign changes along W: " + std::to_string(crossings) +
               ", rwa nodal rows: " + std::to_string(rwa_nodal) + ", heom nodal rows: " +
               std::to_string(nodal_total - rwa_nodal) + ", heom unconverged: " + std::to_string(unconverged) +
               ", failed rows: " + std::to_string(failed) + ", min draw overlap " + fmt(min_overlap) + ")";
    return r;
}

CheckResult Suite::a5() {
    CheckResult r{"A5", "Markovian regularity lambda = 5", false, "", 0.0};
    const SweepTable& t = rwa_map(5.0);
    const auto fig = sweep::figure_preset(1);
    const std::size_t nw = fig.panels[0].couplings.size();
    double min_overlap = 1.0, worst_rise = 0.0;
    std::size_t undefined = 0;
    for (std::size_t it = 0; it * nw < t.rows.size(); ++it) {
        std::vector<std::optional<double>> series;
        for (std::size_t iw = 0; iw < nw; ++iw) {
            const SweepRow& row = t.rows[it * nw + iw];
            min_overlap = std::min(min_overlap, row.overlap.real());
            if (!row.phi_over_pi) ++undefined;
            series.push_back(row.phi_over_pi ? std::optional<double>(*row.phi_over_pi * kPi) : std::nullopt);
        }
        const auto unwrapped = gp::unwrap_phase(std::span<const std::optional<double>>(series));
        for (std::size_t iw = 1; iw < nw; ++iw) {
            if (unwrapped[iw] && unwrapped[iw - 1]) {
                worst_rise = std::max(worst_rise, *unwrapped[iw] - *unwrapped[iw - 1]);
            }
        }
    }
    r.passed = min_overlap > 0.0 && undefined == 0 && worst_rise <= 1e-6;
    r.detail = "min overlap " + fmt(min_overlap) + " (>0), largest increase of phi along W " +
               fmt(worst_rise) + " (<=1e-6), undefined " + std::to_string(undefined);
    return r;
}

CheckResult Suite::a6() {
    CheckResult r{"A6", "HEOM vs RWA at W = 0.05, lambda = 5", false, "", 0.0};
    const HeomRun& run = weak();
    double worst = 0.0;
    for (std::size_t i = 0; i < run.thetas.size(); ++i) {
        const GpResult rw = rwa::gp_rwa_closed(run.thetas[i], run.bath);
        const GpResult& he = run.sweep.results[i];
        worst = std::max(worst, rw.phi && he.phi ? circ(*rw.phi, *he.phi) : kPi);
    }
    r.passed = worst <= 0.02 * kPi && run.sweep.converged;
    r.detail = "max |phi_heom - phi_rwa|/pi = " + fmt(worst / kPi) + " (<=0.02), certified " +
               (run.sweep.converged ? "yes" : "no") + " at depth " + std::to_string(run.sweep.depth);
    return r;
}

CheckResult Suite::a7() {
    CheckResult r{"A7", "non-RWA continuity at W = 0.5, lambda = 0.05", false, "", 0.0};
    const HeomRun& run = strong();
    double min_abs = 1.0;
    std::size_t nodal = 0;
    for (const auto& g : run.sweep.results) {
        min_abs = std::min(min_abs, std::abs(g.overlap));
        nodal += g.nodal;
    }
    const auto unwrapped = gp::unwrap_phase(std::span<const GpResult>(run.sweep.results));
    double max_step = 0.0;
    for (std::size_t i = 1; i < unwrapped.size(); ++i) {
        max_step = unwrapped[i] && unwrapped[i - 1] ? std::max(max_step, std::abs(*unwrapped[i] - *unwrapped[i - 1]))
                                                   : kPi;
    }
    r.passed = min_abs > 0.05 && max_step < 0.2 * kPi && nodal == 0;
    r.detail = "min |overlap| " + fmt(min_abs) + " (>0.05), max adjacent |dphi|/pi " + fmt(max_step / kPi) +
               " (<0.2), nodal " + std::to_string(nodal);
    return r;
}

CheckResult Suite::a8() {
    CheckResult r{"A8", "HEOM physicality", false, "", 0.0};
    double trace = 0.0, herm = 0.0, min_eig = 1.0;
    bool finite = true;
    for (const HeomRun* run : {&weak(), &strong()}) {
        for (double theta : run->thetas) {
            const Trajectory traj = run->sweep.map.apply(theta, false);
            for (const auto& rho : traj.states) {
                const DensityDiagnostics d = validate_density(rho);
                finite = finite && d.finite;
                trace = std::max(trace, d.trace);
                herm = std::max(herm, d.hermiticity);
                min_eig = std::min(min_eig, d.min_eigenvalue);
            }
        }
    }
    r.passed = finite && trace < 1e-8 && herm < 1e-9 && min_eig >= -1e-7;
    r.detail = "max |tr-1| " + fmt(trace) + " (<1e-8), max hermiticity " + fmt(herm) +
               " (<1e-9), min eigenvalue " + fmt(min_eig) + " (>=-1e-7), unsymmetrized samples";
    return r;
}

CheckResult Suite::a9() {
    CheckResult r{"A9", "HEOM self-convergence", false, "", 0.0};
    if (!unitary_cert_) a1();
    double depth = unitary_cert_->delta_phi_depth, step = unitary_cert_->delta_phi_step;
    bool all = unitary_cert_->passed;
    for (const HeomRun* run : {&weak(), &strong()}) {
        for (const auto& c : run->sweep.certificates) {
            depth = std::max(depth, c.delta_phi_depth);
            step = std::max(step, c.delta_phi_step);
            all = all && c.passed;
        }
    }
    r.passed = all && depth < 1e-4 * kPi && step < 1e-4 * kPi;
    r.detail = "max |dphi|/pi depth+5 " + fmt(depth / kPi) + ", dt/2 " + fmt(step / kPi) +
               " (<1e-4); depths " + std::to_string(weak().sweep.depth) + " (W=0.05) and " +
               std::to_string(strong().sweep.depth) + " (W=0.5)";
    return r;
}

CheckResult Suite::a10() {
    CheckResult r{"A10", "Jaynes-Cummings jump at theta = pi/4", false, "", 0.0};
    const auto ws = sweep::upper_grid(1.5, sweep::kLinePoints);
    std::vector<GpResult> gs;
    for (double w : ws) gs.push_back(rwa::gp_jc_limit(kPi / 4, w));
    const Jump j = find_jump(ws, gs);
    r.passed = j.pi_jumps > 0;
    r.detail = std::to_string(j.sign_changes) + " sign changes, " + std::to_string(j.pi_jumps) +
               " pi jumps; first near W=" + fmt(j.at, 4) + " |dphi|/pi=" + fmt(j.size / kPi, 4);
    return r;
}

}  // namespace

std::vector<CheckResult> run_suite(const SuiteOptions& options,
                                   const std::function<void(const CheckResult&)>& report) {
    Suite suite(options);
    using Check = CheckResult (Suite::*)();
    const std::vector<std::pair<std::string, Check>> checks{
        {"A1", &Suite::a1}, {"A2", &Suite::a2}, {"A3", &Suite::a3}, {"A4", &Suite::a4},
        {"A5", &Suite::a5}, {"A6", &Suite::a6}, {"A7", &Suite::a7}, {"A8", &Suite::a8},
        {"A9", &Suite::a9}, {"A10", &Suite::a10}};
    std::vector<CheckResult> out;
    for (const auto& [id, check] : checks) {
        if (!options.only.empty() &&
            std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        CheckResult res;
        try {
            res = (suite.*check)();
        } catch (const std::exception& e) {
            res = {id, "", false, std::string("exception: ") + e.what(), 0.0};
        }
        if (res.seconds == 0.0) {
            res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        if (report) report(res);
        out.push_back(std::move(res));
    }
    return out;
}

std::string format_line(const CheckResult& r) {
    std::ostringstream s;
    s << r.id << (r.id.size() < 3 ? "  " : " ") << (r.passed ? "PASS" : "FAIL") << "  " << r.title << ": "
      << r.detail;
    s.precision(3);
    s << "  [" << std::fixed << r.seconds << " s]";
    return s.str();
}

}  // namespace qgp::validation
