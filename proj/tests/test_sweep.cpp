#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qgp/rwa.hpp"
#include "qgp/sweep.hpp"

using namespace qgp;
using namespace qgp::sweep;

namespace {

SweepSpec small(Method m) {
    SweepSpec s;
    s.label = "t";
    s.method = m;
    s.thetas = open_grid(0.0, kPi, 7);
    s.couplings = {0.0, 0.4, 1.1};
    s.widths = {0.05, 5.0};
    s.heom.steps = 1000;
    return s;
}

std::string csv(const SweepTable& t) {
    std::ostringstream out;
    write_table(t, out, Format::Csv);
    return out.str();
}

}  // namespace

TEST_SUITE("sweep") {

TEST_CASE("grids") {
    const auto t = open_grid(0.0, kPi, 3);
    REQUIRE(t.size() == 3);
    CHECK(t[0] == doctest::Approx(kPi / 4));
    CHECK(t[2] == doctest::Approx(3 * kPi / 4));
    const auto w = upper_grid(1.5, 100);
    CHECK(w.front() == doctest::Approx(0.015));
    CHECK(w.back() == 1.5);
}

TEST_CASE("figure presets") {
    const FigurePreset f1 = figure_preset(1);
    REQUIRE(f1.panels.size() == 2);
    CHECK(f1.panels[0].size() == 10000);
    CHECK(f1.panels[0].widths == std::vector<double>{5.0});
    CHECK(f1.panels[1].widths == std::vector<double>{0.05});
    for (const auto& p : f1.panels) {
        CHECK_NOTHROW(p.validate());
        for (double w : p.couplings) CHECK(w <= kMaxCoupling);
    }
    const FigurePreset f3 = figure_preset(3);
    REQUIRE(f3.panels.size() == 1);
    CHECK(f3.panels[0].method == Method::JcLimit);
    CHECK(f3.panels[0].thetas == std::vector<double>{kPi / 4});
    CHECK(f3.panels[0].size() == kLinePoints);
    const FigurePreset f4 = figure_preset(4);
    CHECK(f4.panels[1].method == Method::Heom);
    const FigurePreset f5 = figure_preset(5);
    REQUIRE(f5.panels.size() == 1);
    CHECK(f5.panels[0].couplings == std::vector<double>{0.5});
    CHECK(f5.panels[0].widths == std::vector<double>{0.05});
    CHECK(f5.panels[0].size() == 200);
    CHECK(figure_preset(6).panels.size() == 8);
    CHECK(figure_preset(2).panels.size() == 4);
    CHECK_THROWS_AS(figure_preset(7), std::out_of_range);
}

TEST_CASE("method and format names") {
    for (Method m : {Method::RwaClosed, Method::RwaBargmann, Method::Heom, Method::JcLimit}) {
        CHECK(parse_method(to_string(m)) == m);
    }
    CHECK(parse_format("json") == Format::Json);
    CHECK_THROWS_AS(parse_method("exact"), std::invalid_argument);
    CHECK_THROWS_AS(parse_format("xml"), std::invalid_argument);
}

TEST_CASE("validation of grids") {
    SweepSpec s = small(Method::RwaClosed);
    s.thetas.push_back(0.0);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = small(Method::RwaClosed);
    s.couplings.push_back(1.6);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = small(Method::RwaClosed);
    s.widths = {};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = small(Method::JcLimit);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.widths = {0.0};
    CHECK_NOTHROW(s.validate());
    CHECK_THROWS_AS(run_grid(small(Method::JcLimit)), std::invalid_argument);
}

TEST_CASE("row order and agreement with direct calls") {
    const SweepSpec s = small(Method::RwaClosed);
    const SweepTable t = run_grid(s);
    REQUIRE(t.rows.size() == s.size());
    CHECK(t.errors.empty());
    std::size_t r = 0;
    for (double theta : s.thetas) {
        for (double w : s.couplings) {
            for (double l : s.widths) {
                const SweepRow& row = t.rows[r++];
                CHECK(row.theta == theta);
                CHECK(row.W == w);
                CHECK(row.lambda == l);
                const GpResult g = rwa::gp_rwa_closed(theta, {w, l});
                CHECK(row == make_row(theta, {w, l}, Method::RwaClosed, g));
                if (row.phi_over_pi) {
                    CHECK(*row.phi_over_pi >= 0.0);
                    CHECK(*row.phi_over_pi < 2.0);
                }
            }
        }
    }
}

TEST_CASE("parallel sweeps match the serial reference byte for byte") {
    for (Method m : {Method::RwaClosed, Method::RwaBargmann, Method::Heom}) {
        SweepSpec s = small(m);
        if (m == Method::Heom) s.couplings = {0.1, 0.3};
        const SweepTable a = run_grid_serial(s);
        const SweepTable b = run_grid(s, 4);
        CHECK(a.rows == b.rows);
        CHECK(csv(a) == csv(b));
        CHECK(csv(run_grid(s, 2)) == csv(b));
        if (m == Method::Heom) {
            REQUIRE(b.heom_groups.size() == 4);
            for (const auto& g : b.heom_groups) CHECK(g.converged);
        }
    }
}

TEST_CASE("Jaynes-Cummings rows carry lambda = 0") {
    SweepSpec s = small(Method::JcLimit);
    s.widths = {0.0};
    const SweepTable t = run_grid(s);
    CHECK(t.errors.empty());
    for (const auto& r : t.rows) CHECK(r.lambda == 0.0);
}

TEST_CASE("CSV round trip") {
    {
        std::stringstream ss;
        write_table(SweepTable{}, ss, Format::Csv);
        const std::string text = ss.str();
        CHECK(text.rfind("# units:", 0) == 0);
        CHECK(text.find(kCsvHeader) != std::string::npos);
        CHECK(read_table_csv(ss).empty());
    }
    SweepTable one;
    SweepRow r;
    r.theta = 0.1;
    r.W = 1.0 / 3.0;
    r.lambda = 0.05;
    r.method = Method::Heom;
    r.phi_over_pi = 1.9999999999999998;
    r.overlap = {-0.25, 1e-300};
    r.nodal = false;
    r.converged = true;
    one.rows.push_back(r);
    SweepRow nodal = r;
    nodal.phi_over_pi.reset();
    nodal.nodal = true;
    one.rows.push_back(nodal);
    SweepRow failed = r;
    failed.phi_over_pi.reset();
    failed.failed = true;
    failed.converged = false;
    failed.overlap = {};
    one.rows.push_back(failed);
    std::stringstream ss;
    write_table(one, ss, Format::Csv);
    CHECK(ss.str().find(",undefined,") != std::string::npos);
    CHECK(ss.str().find(",error,") != std::string::npos);
    CHECK(read_table_csv(ss) == one.rows);

    SweepSpec s = figure_preset(1).panels[1];
    s.thetas = open_grid(0.0, kPi, 20);
    const SweepTable t = run_grid(s);
    std::stringstream big;
    write_table(t, big, Format::Csv);
    CHECK(read_table_csv(big) == t.rows);

    std::stringstream bad("theta,W\n");
    CHECK_THROWS_AS(read_table_csv(bad), std::runtime_error);
}

TEST_CASE("JSON output and manifest") {
    const SweepSpec s = small(Method::RwaClosed);
    const SweepTable t = run_grid(s);
    std::ostringstream out;
    write_table(t, out, Format::Json);
    const auto j = nlohmann::json::parse(out.str());
    REQUIRE(j.is_array());
    CHECK(j.size() == t.rows.size());
    CHECK(j[0].contains("phi_over_pi"));
    CHECK(j[0]["method"] == "rwa-closed");

    const auto m = manifest({s}, t);
    CHECK(m["rows"] == t.rows.size());
    CHECK(m.contains("units"));
}

TEST_CASE("necessary condition holds across the closed-form sweep") {
    SweepSpec s = figure_preset(1).panels[1];
    s.thetas = open_grid(0.0, kPi, 40);
    s.couplings = upper_grid(kMaxCoupling, 60);
    const SweepTable t = run_grid(s);
    std::size_t nodal_like = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const SweepRow& r = t.rows[i];
        if (r.nodal) {
            ++nodal_like;
            CHECK(rwa::nodal_bound_check(r.theta));
        }
        if (r.theta >= rwa::kCriticalAngle) CHECK(r.overlap.real() > 0.0);
    }
    CHECK(nodal_like == 0);  // a finite grid does not land on the nodal curve
}

TEST_CASE("solver failures become error rows") {
    SweepSpec s = small(Method::RwaClosed);
    s.quadrature.rel_tol = 1e-17;
    s.quadrature.intervals = 8;
    s.quadrature.max_intervals = 16;
    const SweepTable t = run_grid(s);
    CHECK(t.errors.size() > 0);
    for (const auto& e : t.errors) {
        CHECK(t.rows[e.row].failed);
        CHECK_FALSE(t.rows[e.row].phi_over_pi);
        CHECK_FALSE(e.message.empty());
    }
}

}  // TEST_SUITE
