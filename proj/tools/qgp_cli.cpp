// Command-line front end
//
// Exit codes: 0 success, 2 parameter validation or convergence failure (JSON
// diagnostics on stderr), 64 usage error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgp/geometric_phase.hpp"
#include "qgp/heom.hpp"
#include "qgp/rwa.hpp"
#include "qgp/sweep.hpp"
#include "qgp/validation.hpp"

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kExitFailure = 2;
constexpr int kExitUsage = 64;
constexpr const char* kOutDirEnv = "QGP_OUT_DIR";

// Raised for failures that map to exit code 2.
struct Failure {
    std::string kind;
    std::string message;
    ordered_json extra = ordered_json::object();
};

double parse_fraction(const std::string& s) {
    const auto slash = s.find('/');
    std::size_t used = 0;
    try {
        if (slash == std::string::npos) {
            const double v = std::stod(s, &used);
            if (used == s.size()) return v;
        } else {
            const double num = std::stod(s.substr(0, slash), &used);
            if (used == slash) {
                const std::string den_text = s.substr(slash + 1);
                const double den = std::stod(den_text, &used);
                if (used == den_text.size() && den != 0.0) return num / den;
            }
        }
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError("--theta-frac", "expected a number or a ratio like 1/3, got '" + s + "'");
}

struct PointArgs {
    double theta{qgp::kPi / 3.0};
    std::string theta_frac;
    double W{0.5};
    double lambda{0.05};
    bool json{false};
    std::string trajectory;

    double angle() const { return theta_frac.empty() ? theta : parse_fraction(theta_frac) * qgp::kPi; }
};

struct HeomArgs {
    std::optional<int> depth;
    std::optional<double> dt;
    std::optional<std::size_t> steps;

    qgp::heom::HeomConfig config(const qgp::BathParams& p) const {
        qgp::heom::HeomConfig c;
        c.depth = depth ? *depth : qgp::heom::suggested_depth(p);
        if (steps) c.steps = *steps;
        if (dt) {
            if (!(*dt > 0.0)) throw Failure{"validation", "--dt must be > 0"};
            c.steps = static_cast<std::size_t>(std::llround(c.t_final / *dt));
        }
        return c;
    }
};

struct OutputArgs {
    std::string out;
    std::string format{"csv"};
    int workers{0};
};

void add_point_options(CLI::App* app, PointArgs& a, bool with_lambda) {
    auto* theta = app->add_option("--theta", a.theta, "initial angle in radians, (0, pi]");
    app->add_option("--theta-frac", a.theta_frac, "initial angle as a fraction of pi, e.g. 1/3")->excludes(theta);
    app->add_option("--w", a.W, "coupling strength W / omega0");
    if (with_lambda) app->add_option("--lambda", a.lambda, "spectral width lambda / omega0");
    app->add_flag("--json", a.json, "print the result as one JSON object");
}

void add_heom_options(CLI::App* app, HeomArgs& h) {
    app->add_option("--depth", h.depth, "hierarchy depth (default: calibrated from W and lambda)")
        ->check(CLI::PositiveNumber);
    auto* dt = app->add_option("--dt", h.dt, "RK4 step in 1/omega0");
    app->add_option("--steps", h.steps, "RK4 steps per period (default 4000)")->excludes(dt);
}

void add_output_options(CLI::App* app, OutputArgs& o) {
    app->add_option("--out", o.out, std::string("output file; relative paths resolve under $") + kOutDirEnv);
    app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--workers", o.workers, "worker threads (0 = all available)")->check(CLI::NonNegativeNumber);
}

fs::path resolve_output(const std::string& given, const std::string& fallback) {
    fs::path p = given.empty() ? fs::path(fallback) : fs::path(given);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) p = fs::path(dir) / p;
    }
    return p;
}

std::string phase_text(const qgp::GpResult& g) {
    if (!g.phi) return "undefined";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8f", qgp::wrap_positive(*g.phi) / qgp::kPi);
    return buf;
}

ordered_json result_json(const char* method, double theta, const qgp::BathParams& p, const qgp::GpResult& g) {
    ordered_json j;
    j["method"] = method;
    j["theta"] = theta;
    j["W"] = p.W;
    j["lambda"] = p.lambda;
    j["phi_over_pi"] = g.phi ? ordered_json(qgp::wrap_positive(*g.phi) / qgp::kPi) : ordered_json("undefined");
    j["overlap_re"] = g.overlap.real();
    j["overlap_im"] = g.overlap.imag();
    j["overlap_abs"] = std::abs(g.overlap);
    j["nodal"] = g.nodal;
    j["degenerate"] = g.degenerate;
    j["converged"] = g.meta.converged;
    return j;
}

void print_result(const PointArgs& a, const char* method, double theta, const qgp::BathParams& p,
                  const qgp::GpResult& g, ordered_json extra = ordered_json::object()) {
    if (a.json) {
        ordered_json j = result_json(method, theta, p, g);
        for (auto& [k, v] : extra.items()) j[k] = v;
        std::cout << j.dump() << '\n';
        return;
    }
    char abs_buf[32];
    std::snprintf(abs_buf, sizeof abs_buf, "%.8f", std::abs(g.overlap));
    std::cout << "phi/pi=" << phase_text(g) << " overlap_abs=" << abs_buf << " nodal=" << (g.nodal ? "true" : "false")
              << '\n';
}

void write_trajectory(const std::string& path, const qgp::Trajectory& t) {
    if (!path.empty()) qgp::write_trajectory_csv(t, resolve_output(path, path));
}

int cmd_gp_rwa(const PointArgs& a) {
    const double theta = a.angle();
    const qgp::BathParams p{a.W, a.lambda};
    const qgp::GpResult g = qgp::rwa::gp_rwa_closed(theta, p);
    write_trajectory(a.trajectory, qgp::rwa::trajectory(theta, p, 4000));
    print_result(a, "rwa-closed", theta, p, g);
    return 0;
}

int cmd_gp_jc(const PointArgs& a) {
    const double theta = a.angle();
    const qgp::GpResult g = qgp::rwa::gp_jc_limit(theta, a.W);
    print_result(a, "jc-limit", theta, {a.W, 0.0}, g);
    return 0;
}

ordered_json certificate_json(const qgp::heom::Certificate& c) {
    return {{"depth", c.depth},
            {"steps", c.steps},
            {"phi", c.phi},
            {"phi_deeper", c.phi_deeper},
            {"phi_finer", c.phi_finer},
            {"delta_phi_depth", c.delta_phi_depth},
            {"delta_phi_step", c.delta_phi_step},
            {"tolerance", c.tolerance},
            {"passed", c.passed}};
}

int cmd_gp_heom(const PointArgs& a, const HeomArgs& h) {
    const double theta = a.angle();
    const qgp::BathParams p{a.W, a.lambda};
    p.validate();
    try {
        const qgp::heom::Evolution e = qgp::heom::evolve(theta, p, h.config(p));
        write_trajectory(a.trajectory, e.trajectory);
        print_result(a, "heom", theta, p, e.gp, {{"certificate", certificate_json(e.certificate)}});
    } catch (const qgp::heom::ConvergenceError& e) {
        throw Failure{"convergence", e.what(), {{"certificate", certificate_json(e.certificate)}}};
    }
    return 0;
}

// Writes the table and its manifest; exit 2 when rows failed or did not certify.
int finish_table(const std::vector<qgp::sweep::SweepSpec>& specs, const qgp::sweep::SweepTable& table,
                 const OutputArgs& o, const std::string& fallback) {
    const auto format = qgp::sweep::parse_format(o.format);
    const fs::path path = resolve_output(o.out, fallback + "." + o.format);
    qgp::sweep::write_table(table, path, format);
    const ordered_json m = qgp::sweep::manifest(specs, table);
    fs::path manifest_path = path;
    manifest_path += ".manifest.json";
    qgp::sweep::write_manifest(m, manifest_path);
    std::cout << "wrote " << table.rows.size() << " rows to " << path.string() << " (nodal " << m["nodal_rows"]
              << ", failed " << m["failed_rows"] << ", unconverged " << m["unconverged_rows"] << ")\n";
    if (m["failed_rows"].get<std::size_t>() > 0 || m["unconverged_rows"].get<std::size_t>() > 0) {
        throw Failure{"convergence", "some rows failed or did not converge; see " + manifest_path.string(),
                      {{"failed_rows", m["failed_rows"]}, {"unconverged_rows", m["unconverged_rows"]},
                       {"errors", m["errors"]}}};
    }
    return 0;
}

struct SweepArgs {
    std::string method{"rwa-closed"};
    std::vector<double> thetas;
    std::size_t theta_points{0};
    std::vector<double> couplings;
    std::size_t w_points{0};
    std::vector<double> widths;
};

int cmd_sweep(const SweepArgs& s, const HeomArgs& h, const OutputArgs& o) {
    qgp::sweep::SweepSpec spec;
    spec.label = "sweep";
    spec.method = qgp::sweep::parse_method(s.method);
    spec.thetas = s.theta_points ? qgp::sweep::open_grid(0.0, qgp::kPi, s.theta_points) : s.thetas;
    spec.couplings = s.w_points ? qgp::sweep::upper_grid(qgp::sweep::kMaxCoupling, s.w_points) : s.couplings;
    spec.widths = s.widths;
    if (spec.thetas.empty()) spec.thetas = {qgp::kPi / 3.0};
    if (spec.couplings.empty()) spec.couplings = {0.5};
    if (spec.widths.empty()) spec.widths = {spec.method == qgp::sweep::Method::JcLimit ? 0.0 : 0.05};
    if (h.depth || h.steps || h.dt) {
        spec.heom = h.config({spec.couplings.front(), spec.widths.front() > 0.0 ? spec.widths.front() : 1.0});
        spec.auto_depth = !h.depth;
    }
    const auto table = qgp::sweep::run_grid(spec, o.workers);
    return finish_table({spec}, table, o, "sweep");
}

int cmd_figure(int id, const OutputArgs& o) {
    const auto fig = qgp::sweep::figure_preset(id);
    const auto table = qgp::sweep::run_figure(fig, o.workers);
    return finish_table(fig.panels, table, o, "figure" + std::to_string(id));
}

int cmd_validate(const std::vector<std::string>& only, int workers) {
    qgp::validation::SuiteOptions opt;
    opt.only = only;
    opt.workers = workers;
    int failed = 0;
    qgp::validation::run_suite(opt, [&](const qgp::validation::CheckResult& r) {
        std::cout << qgp::validation::format_line(r) << std::endl;
        failed += !r.passed;
    });
    if (failed > 0) throw Failure{"validation", std::to_string(failed) + " acceptance checks failed"};
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric phase of a qubit in a Lorentzian bath: closed-form RWA and exact hierarchy dynamics"};
    app.require_subcommand(1);

    PointArgs rwa_args, jc_args, heom_args;
    HeomArgs heom_opts, sweep_heom;
    OutputArgs sweep_out, fig_out;
    SweepArgs sweep_args;
    int figure_id = 0;
    std::vector<std::string> only;
    int validate_workers = 0;

    auto* gp_rwa = app.add_subcommand("gp-rwa", "closed-form RWA geometric phase at one point");
    add_point_options(gp_rwa, rwa_args, true);
    gp_rwa->add_option("--trajectory", rwa_args.trajectory, "also write rho(t) as CSV");

    auto* gp_heom = app.add_subcommand("gp-heom", "certified hierarchy (non-RWA) geometric phase at one point");
    add_point_options(gp_heom, heom_args, true);
    add_heom_options(gp_heom, heom_opts);
    gp_heom->add_option("--trajectory", heom_args.trajectory, "also write rho(t) as CSV");

    auto* gp_jc = app.add_subcommand("gp-jc", "Jaynes-Cummings limit f(t) = cos(W t)");
    add_point_options(gp_jc, jc_args, false);

    auto* sweep = app.add_subcommand("sweep", "run a (theta, W, lambda) grid");
    sweep->add_option("--method", sweep_args.method, "rwa-closed, rwa-bargmann, heom or jc-limit")
        ->check(CLI::IsMember({"rwa-closed", "rwa-bargmann", "heom", "jc-limit"}));
    auto* th = sweep->add_option("--theta", sweep_args.thetas, "angles in radians");
    sweep->add_option("--theta-points", sweep_args.theta_points, "n evenly spaced angles inside (0, pi)")
        ->excludes(th);
    auto* w = sweep->add_option("--w", sweep_args.couplings, "coupling values");
    sweep->add_option("--w-points", sweep_args.w_points, "n evenly spaced couplings in (0, 1.5]")->excludes(w);
    sweep->add_option("--lambda", sweep_args.widths, "spectral widths");
    add_heom_options(sweep, sweep_heom);
    add_output_options(sweep, sweep_out);

    auto* figure = app.add_subcommand("figure", "regenerate the data of one figure preset");
    figure->add_option("id", figure_id, "figure number 1..6")->required()->check(CLI::Range(1, 6));
    add_output_options(figure, fig_out);

    auto* validate = app.add_subcommand("validate", "run the acceptance suite A1..A10");
    validate->add_option("--only", only, "restrict to these ids, e.g. A1 A6");
    validate->add_option("--workers", validate_workers, "worker threads (0 = all available)")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*gp_rwa) return cmd_gp_rwa(rwa_args);
        if (*gp_heom) return cmd_gp_heom(heom_args, heom_opts);
        if (*gp_jc) return cmd_gp_jc(jc_args);
        if (*sweep) return cmd_sweep(sweep_args, sweep_heom, sweep_out);
        if (*figure) return cmd_figure(figure_id, fig_out);
        if (*validate) return cmd_validate(only, validate_workers);
    } catch (const CLI::ValidationError& e) {
        std::cerr << ordered_json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
        return kExitUsage;
    } catch (const Failure& f) {
        ordered_json j{{"error", f.kind}, {"message", f.message}};
        for (auto& [k, v] : f.extra.items()) j[k] = v;
        std::cerr << j.dump() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        // parameter range checks and solver errors
        std::cerr << ordered_json{{"error", "failure"}, {"message", e.what()}}.dump() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
