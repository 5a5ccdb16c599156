#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qgp/geometric_phase.hpp"
#include "qgp/heom.hpp"
#include "qgp/rwa.hpp"
#include "test_util.hpp"

using namespace qgp;
using namespace qgp::heom;

namespace {

std::vector<Mat2> random_ados(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<Mat2> out(n);
    for (auto& a : out) {
        for (auto& z : a.m) z = {g(rng), g(rng)};
    }
    return out;
}

// The hierarchy written literally on unscaled ADOs.
std::vector<Mat2> literal_rhs(const Hierarchy& h, const BathParams& p, const std::vector<Mat2>& rho) {
    const Complex I{0.0, 1.0};
    const Mat2 H = Mat2::diag(kOmega0, 0.0);
    const Mat2 V{{Complex{}, Complex{1.0}, Complex{1.0}, Complex{}}};
    const std::array<Complex, 2> v{Complex{p.lambda, -kOmega0}, Complex{p.lambda, kOmega0}};
    const double a = 0.5 * p.W * p.W;
    const auto comm = [](const Mat2& x, const Mat2& y) { return x * y - y * x; };
    const auto anti = [](const Mat2& x, const Mat2& y) { return x * y + y * x; };
    std::vector<Mat2> out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const AdoIndex n = h.at(i);
        const std::array<int, 2> nk{n.n1, n.n2};
        Mat2 d = -I * comm(H, rho[i]) - (static_cast<double>(nk[0]) * v[0] + static_cast<double>(nk[1]) * v[1]) * rho[i];
        for (int k = 0; k < 2; ++k) {
            AdoIndex up = n, down = n;
            (k == 0 ? up.n1 : up.n2) += 1;
            (k == 0 ? down.n1 : down.n2) -= 1;
            if (up.level() <= h.depth()) d -= I * comm(V, rho[h.index(up)]);
            if (nk[k] > 0) {
                const Mat2& r = rho[h.index(down)];
                const double sign = k == 0 ? -1.0 : 1.0;
                d -= (I * a * static_cast<double>(nk[k])) * (comm(V, r) + Complex(sign) * anti(V, r));
            }
        }
        out[i] = d;
    }
    return out;
}

double scale(AdoIndex n, double a) {
    double s = 1.0;
    for (int k : {n.n1, n.n2}) s *= std::tgamma(k + 1.0) * std::pow(a, k);
    return std::sqrt(s);
}

HeomConfig config(int depth, std::size_t steps) {
    HeomConfig c;
    c.depth = depth;
    c.steps = steps;
    return c;
}

}  // namespace

TEST_SUITE("heom") {

TEST_CASE("hierarchy layout") {
    CHECK(Hierarchy::count(0) == 1);
    CHECK(Hierarchy::count(3) == 10);
    const Hierarchy h(3);
    CHECK(h.at(0) == AdoIndex{0, 0});
    CHECK(h.at(1) == AdoIndex{0, 1});
    CHECK(h.at(2) == AdoIndex{1, 0});
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(h.index(h.at(i)) == i);
    CHECK_THROWS_AS(h.index({2, 2}), std::out_of_range);
    CHECK_THROWS_AS(h.index({-1, 0}), std::out_of_range);
    CHECK_THROWS_AS(Hierarchy(-1), std::invalid_argument);

    const Coefficients c(h, {0.5, 0.05});
    CHECK(c.up[h.index({1, 2})][0] == -1);
    CHECK(c.down[h.index({0, 2})][0] == -1);
    CHECK(c.down[h.index({0, 2})][1] == static_cast<long>(h.index({0, 1})));
    CHECK(c.decay[h.index({1, 2})] == Complex(3 * 0.05, kOmega0));
}

TEST_CASE("initial ADOs") {
    const AdoSet s = init_ados(kPi / 2, 4);
    CHECK(s.ados.size() == 15);
    CHECK(test::max_abs(s.physical() - Mat2{{Complex{0.5}, Complex{0.5}, Complex{0.5}, Complex{0.5}}}) < 1e-15);
    for (std::size_t i = 1; i < s.ados.size(); ++i) CHECK(s.ados[i] == Mat2::zero());
    CHECK(init_ados(0.0, 2).physical() == Mat2::diag(1.0, 0.0));
    CHECK_THROWS_AS(init_ados(4.0, 2), std::invalid_argument);
    CHECK_NOTHROW(HeomConfig{}.validate());
    HeomConfig bad;
    bad.steps = 1000;
    bad.sample_every = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(0, 100).validate(), std::invalid_argument);
}

TEST_CASE("scaled kernel equals the literal hierarchy") {
    std::mt19937_64 rng(41);
    for (const BathParams p : {BathParams{0.7, 0.3}, BathParams{1.4, 0.05}, BathParams{0.05, 5.0}}) {
        const Hierarchy h(5);
        const Coefficients c(h, p);
        const double a = 0.5 * p.W * p.W;
        const std::vector<Mat2> s = random_ados(h.size(), rng);
        std::vector<Mat2> rho(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) rho[i] = Complex(scale(h.at(i), a)) * s[i];
        std::vector<Mat2> ds(h.size());
        rhs_serial(c, s, ds);
        const std::vector<Mat2> ref = literal_rhs(h, p, rho);
        for (std::size_t i = 0; i < h.size(); ++i) {
            const Mat2 back = Complex(1.0 / scale(h.at(i), a)) * ref[i];
            CHECK(test::max_abs(ds[i] - back) < 1e-12 * (1.0 + test::max_abs(back)));
        }
    }
}

TEST_CASE("trace of the physical ADO is conserved and zero stays zero") {
    std::mt19937_64 rng(43);
    const Hierarchy h(6);
    const Coefficients c(h, {0.9, 0.2});
    const std::vector<Mat2> s = random_ados(h.size(), rng);
    std::vector<Mat2> ds(h.size());
    rhs_serial(c, s, ds);
    CHECK(std::abs(ds[0].trace()) < 1e-14);

    std::vector<Mat2> zero(h.size()), out(h.size(), Mat2::identity());
    rhs_serial(c, zero, out);
    for (const auto& m : out) CHECK(m == Mat2::zero());
}

TEST_CASE("uncoupled qubit precesses freely with an inert hierarchy") {
    AdoSet s = init_ados(1.1, 6);
    for (int i = 0; i < 100; ++i) s = step_rk4(s, kPeriod / 4000, {0.0, 0.3});
    for (std::size_t i = 1; i < s.ados.size(); ++i) CHECK(s.ados[i] == Mat2::zero());
    const Trajectory traj = propagate(1.1, {0.0, 0.3}, config(4, 4000));
    for (std::size_t i = 0; i < traj.size(); i += 400) {
        CHECK(test::max_abs(traj.states[i] - rwa::rho_rwa(traj.times[i], 1.1, {0.0, 0.3})) < 1e-12);
    }
}

TEST_CASE("fourth-order time stepping") {
    const BathParams p{0.1, 5.0};
    const Mat2 ref = propagate(1.0, p, config(8, 8000)).states.back();
    const double e1 = test::max_abs(propagate(1.0, p, config(8, 250)).states.back() - ref);
    const double e2 = test::max_abs(propagate(1.0, p, config(8, 500)).states.back() - ref);
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
}

TEST_CASE("weak coupling approaches the rotating-wave populations") {
    const BathParams p{0.05, 5.0};
    const Trajectory traj = propagate(kPi / 3, p, config(8, 4000));
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); i += 40) {
        const double exact = rwa::rho_rwa(traj.times[i], kPi / 3, p)(0, 0).real();
        worst = std::max(worst, std::abs(traj.states[i](0, 0).real() - exact));
    }
    CHECK(worst < 2e-3);
}

TEST_CASE("strong coupling agrees with an explicit damped pseudomode") {
    const BathParams p{0.5, 0.05};
    const Trajectory pm = oracle::pseudomode_trajectory(1.0, p.W, p.lambda, 18, 4000);
    const Trajectory hm = propagate(1.0, p, config(25, 4000));
    CHECK(test::max_deviation(pm, hm) < 1e-7);
    const GpResult a = gp::bargmann_phase(pm);
    const GpResult b = gp::bargmann_phase(hm);
    REQUIRE(a.phi);
    REQUIRE(b.phi);
    CHECK(test::circ(*a.phi, *b.phi) < 1e-7);
}

TEST_CASE("frozen pseudomode references") {
    // Pseudomode dynamics propagated with exact one-step matrix exponentials on
    // the same 4000-step sampling, oscillator cut converged to all digits shown.
    const Trajectory hm = propagate(1.0, {0.5, 0.05}, config(25, 4000));
    const GpResult g = gp::bargmann_phase(hm);
    REQUIRE(g.phi);
    CHECK(std::abs(*g.phi / kPi - -0.1653860685) < 1e-8);
    CHECK(std::abs(std::abs(g.overlap) - 0.37749525) < 1e-7);
    CHECK(std::abs(hm.states.back()(0, 0).real() - 0.5400147014) < 1e-8);

    const Trajectory weak = propagate(1.0, {0.05, 5.0}, config(8, 4000));
    const GpResult w = gp::bargmann_phase(weak);
    REQUIRE(w.phi);
    CHECK(std::abs(*w.phi / kPi - -0.4609825554) < 1e-8);
    CHECK(std::abs(weak.states.back()(0, 0).real() - 0.7667021275) < 1e-8);
}

TEST_CASE("parallel kernel is bitwise identical to the serial one") {
    std::mt19937_64 rng(47);
    const Hierarchy h(30);
    const Coefficients c(h, {1.2, 0.05});
    const std::vector<Mat2> s = random_ados(h.size(), rng);
    std::vector<Mat2> a(h.size()), b(h.size());
    rhs_serial(c, s, a);
    rhs_parallel(c, s, b);
    CHECK(a == b);

    HeomConfig cfg = config(10, 400);
    const Trajectory t1 = propagate(2.0, {0.8, 0.1}, cfg);
    cfg.parallel = true;
    const Trajectory t2 = propagate(2.0, {0.8, 0.1}, cfg);
    CHECK(t1.states == t2.states);
    CHECK(propagate(2.0, {0.8, 0.1}, cfg).states == t2.states);
}

TEST_CASE("dynamical map reproduces direct propagation") {
    std::mt19937_64 rng(53);
    const BathParams p{0.6, 0.1};
    const HeomConfig cfg = config(12, 1000);
    const DynamicalMap map = evolve_map(p, cfg);
    CHECK(map.times.size() == 1001);
    for (double theta : {0.3, 1.7, kPi}) {
        CHECK(test::max_deviation(map.apply(theta), propagate(theta, p, cfg)) < 1e-12);
    }
    const Mat2 rho = test::random_density(rng);
    CHECK(test::max_deviation(map.apply(rho), propagate(rho, p, cfg)) < 1e-12);
}

TEST_CASE("certificates") {
    const Certificate ok = certify_convergence(1.0, {0.05, 5.0}, config(8, 4000));
    CHECK(ok.passed);
    CHECK(ok.delta_phi() < 1e-4 * kPi);

    HeomConfig shallow = config(1, 1000);
    CHECK_THROWS_AS(evolve(1.0, {1.0, 0.05}, shallow), ConvergenceError);
    try {
        evolve(1.0, {1.0, 0.05}, shallow);
    } catch (const ConvergenceError& e) {
        CHECK_FALSE(e.certificate.passed);
        CHECK(e.certificate.delta_phi_depth > 1e-4 * kPi);
    }

    const double thetas[] = {0.5, 1.5, 2.5};
    HeomConfig cfg = config(5, 2000);
    const MapSweep sweep = certified_sweep(thetas, {0.1, 0.05}, cfg);
    CHECK(sweep.converged);
    CHECK(sweep.results.size() == 3);
    CHECK_FALSE(sweep.depth_history.empty());
    for (const auto& c : sweep.certificates) CHECK(c.passed);
}

TEST_CASE("blow-up is reported with its time") {
    AdoSet s = init_ados(1.0, 3);
    s.ados[4].m[2] = NAN;
    try {
        step_rk4(s, 0.01, {0.5, 0.05});
        FAIL("expected BlowUpError");
    } catch (const BlowUpError& e) {
        CHECK(e.index.level() <= 3);
        CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
        CHECK(e.time == doctest::Approx(0.01));
    }
}

TEST_CASE("starting depth heuristic") {
    CHECK(suggested_depth({0.5, 5.0}) == 8);
    CHECK(suggested_depth({0.1, 0.05}) == 5);
    CHECK(suggested_depth({0.5, 0.05}) == 15);
    CHECK(suggested_depth({0.6, 0.05}) == 20);
    CHECK(suggested_depth({1.5, 0.05}) == 80);
    CHECK(suggested_depth({1.6, 0.05}) == 90);
    CHECK_THROWS_AS(suggested_depth({0.5, 0.0}), std::invalid_argument);
}

}  // TEST_SUITE
