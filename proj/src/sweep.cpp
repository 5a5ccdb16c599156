// Grid orchestration, figure presets, CSV/JSON tables

#include "qgp/sweep.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qgp::sweep {

using nlohmann::ordered_json;

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::RwaClosed: return "rwa-closed";
        case Method::RwaBargmann: return "rwa-bargmann";
        case Method::Heom: return "heom";
        case Method::JcLimit: return "jc-limit";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (Method m : {Method::RwaClosed, Method::RwaBargmann, Method::Heom, Method::JcLimit}) {
        if (name == to_string(m)) return m;
    }
    throw std::invalid_argument("unknown method '" + std::string(name) +
                                "' (expected rwa-closed, rwa-bargmann, heom or jc-limit)");
}

std::string_view to_string(Format f) noexcept { return f == Format::Csv ? "csv" : "json"; }

Format parse_format(std::string_view name) {
    if (name == "csv") return Format::Csv;
    if (name == "json") return Format::Json;
    throw std::invalid_argument("unknown format '" + std::string(name) + "' (expected csv or json)");
}

void SweepSpec::validate() const {
    if (thetas.empty() || couplings.empty() || widths.empty()) {
        throw std::invalid_argument("sweep '" + label + "': every grid needs at least one point");
    }
    for (double t : thetas) {
        if (!(t > 0.0 && t <= kPi)) {
            throw std::invalid_argument("sweep '" + label + "': theta " + format_number(t) + " outside (0, pi]");
        }
    }
    for (double w : couplings) {
        if (!(w >= 0.0 && w <= kMaxCoupling)) {
            throw std::invalid_argument("sweep '" + label + "': W " + format_number(w) + " outside [0, 1.5]");
        }
    }
    for (double l : widths) {
        // The Jaynes-Cummings limit is lambda -> 0 and carries lambda = 0.
        const bool ok = method == Method::JcLimit ? l == 0.0 : (l > 0.0 && std::isfinite(l));
        if (!ok) {
            throw std::invalid_argument("sweep '" + label + "': lambda " + format_number(l) +
                                        (method == Method::JcLimit ? " must be 0 for jc-limit" : " must be > 0"));
        }
    }
    heom.validate();
}

void SweepTable::append(SweepTable other) {
    const std::size_t offset = rows.size();
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    for (auto& e : other.errors) errors.push_back({e.row + offset, std::move(e.message)});
    heom_groups.insert(heom_groups.end(), other.heom_groups.begin(), other.heom_groups.end());
}

SweepRow make_row(double theta, const BathParams& p, Method m, const GpResult& g) {
    SweepRow row;
    row.theta = theta;
    row.W = p.W;
    row.lambda = p.lambda;
    row.method = m;
    if (g.phi) row.phi_over_pi = wrap_positive(*g.phi) / kPi;
    row.overlap = g.overlap;
    row.nodal = g.nodal;
    row.degenerate = g.degenerate;
    row.converged = g.meta.converged;
    return row;
}

namespace {

struct Grid {
    const SweepSpec& spec;
    std::size_t n_w, n_l;

    std::size_t row_index(std::size_t it, std::size_t iw, std::size_t il) const {
        return (it * n_w + iw) * n_l + il;
    }
    SweepRow blank(std::size_t r) const {
        SweepRow row;
        row.theta = spec.thetas[r / (n_w * n_l)];
        row.W = spec.couplings[(r / n_l) % n_w];
        row.lambda = spec.widths[r % n_l];
        row.method = spec.method;
        return row;
    }
};

struct Scratch {
    std::vector<SweepRow> rows;
    std::vector<std::string> errors;  // empty string: no error
    std::vector<HeomGroup> groups;
};

GpResult evaluate(const SweepSpec& spec, double theta, const BathParams& p) {
    switch (spec.method) {
        case Method::RwaClosed:
            return rwa::gp_rwa_closed(theta, p, spec.quadrature);
        case Method::JcLimit:
            return rwa::gp_jc_limit(theta, p.W, spec.quadrature);
        case Method::RwaBargmann:
            return gp::refined_bargmann_phase(
                [&](std::size_t n) { return rwa::trajectory(theta, p, n); }, spec.refinement, spec.nodal_tol);
        case Method::Heom:
            break;
    }
    throw std::logic_error("heom points are evaluated per (W, lambda) group");
}

void run_point(const Grid& grid, std::size_t r, Scratch& s) {
    const SweepRow base = grid.blank(r);
    try {
        // BathParams rejects lambda = 0; the JC envelope ignores it.
        const BathParams p{base.W, grid.spec.method == Method::JcLimit ? 1.0 : base.lambda};
        SweepRow row = make_row(base.theta, p, grid.spec.method, evaluate(grid.spec, base.theta, p));
        row.lambda = base.lambda;
        s.rows[r] = row;
    } catch (const std::exception& e) {
        s.rows[r] = base;
        s.rows[r].failed = true;
        s.errors[r] = e.what();
    }
}

void run_group(const Grid& grid, std::size_t g, Scratch& s) {
    const std::size_t iw = g / grid.n_l;
    const std::size_t il = g % grid.n_l;
    const BathParams p{grid.spec.couplings[iw], grid.spec.widths[il]};
    heom::HeomConfig cfg = grid.spec.heom;
    cfg.parallel = false;
    HeomGroup& report = s.groups[g];
    report.W = p.W;
    report.lambda = p.lambda;
    const auto& thetas = grid.spec.thetas;
    try {
        if (grid.spec.auto_depth) cfg.depth = heom::suggested_depth(p);
        heom::MapSweep m = heom::certified_sweep(thetas, p, cfg);
        report.depth = m.depth;
        report.converged = m.converged;
        report.depth_history = m.depth_history;
        for (std::size_t it = 0; it < thetas.size(); ++it) {
            GpResult& gp = m.results[it];
            gp::detect_nodal(gp, grid.spec.nodal_tol);
            s.rows[grid.row_index(it, iw, il)] = make_row(thetas[it], p, Method::Heom, gp);
            report.max_delta_phi = std::max(report.max_delta_phi, m.certificates[it].delta_phi());
        }
    } catch (const std::exception& e) {
        for (std::size_t it = 0; it < thetas.size(); ++it) {
            const std::size_t r = grid.row_index(it, iw, il);
            s.rows[r] = grid.blank(r);
            s.rows[r].failed = true;
            s.errors[r] = e.what();
        }
    }
}

SweepTable collect(Scratch&& s, bool heom) {
    SweepTable out;
    out.rows = std::move(s.rows);
    for (std::size_t r = 0; r < s.errors.size(); ++r) {
        if (!s.errors[r].empty()) out.errors.push_back({r, std::move(s.errors[r])});
    }
    if (heom) out.heom_groups = std::move(s.groups);
    return out;
}

SweepTable run(const SweepSpec& spec, int workers, bool serial) {
    spec.validate();
    const Grid grid{spec, spec.couplings.size(), spec.widths.size()};
    Scratch s;
    s.rows.resize(spec.size());
    s.errors.resize(spec.size());
    const bool heom = spec.method == Method::Heom;
    const std::size_t tasks = heom ? grid.n_w * grid.n_l : spec.size();
    if (heom) s.groups.resize(tasks);

    const auto task = [&](std::size_t i) {
        if (heom) {
            run_group(grid, i, s);
        } else {
            run_point(grid, i, s);
        }
    };
    if (serial) {
        for (std::size_t i = 0; i < tasks; ++i) task(i);
    } else {
        const int threads = workers > 0 ? workers : omp_get_max_threads();
        const auto n = static_cast<long>(tasks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (long i = 0; i < n; ++i) task(static_cast<std::size_t>(i));
    }
    return collect(std::move(s), heom);
}

}  // namespace

SweepTable run_grid(const SweepSpec& spec, int workers) { return run(spec, workers, false); }

SweepTable run_grid_serial(const SweepSpec& spec) { return run(spec, 1, true); }

std::vector<double> open_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(n + 1);
    }
    return g;
}

std::vector<double> upper_grid(double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j) g[j] = hi * static_cast<double>(j + 1) / static_cast<double>(n);
    return g;
}

// ------------------------------------------------------------------ presets --

namespace {

SweepSpec panel(std::string label, Method m, std::vector<double> thetas, std::vector<double> couplings,
                std::vector<double> widths) {
    SweepSpec s;
    s.label = std::move(label);
    s.method = m;
    s.thetas = std::move(thetas);
    s.couplings = std::move(couplings);
    s.widths = std::move(widths);
    return s;
}

}  // namespace

FigurePreset figure_preset(int id) {
    const auto theta_map = open_grid(0.0, kPi, kHeatmapPoints);
    const auto w_map = upper_grid(kMaxCoupling, kHeatmapPoints);
    const auto theta_line = open_grid(0.0, kPi, kLinePoints);
    const auto w_line = upper_grid(kMaxCoupling, kLinePoints);

    FigurePreset f;
    f.id = id;
    switch (id) {
        case 1:
        case 4: {
            const Method m = id == 1 ? Method::RwaClosed : Method::Heom;
            f.title = id == 1 ? "RWA phase over (theta, W)" : "non-RWA phase over (theta, W)";
            f.panels.push_back(panel(std::to_string(id) + "a", m, theta_map, w_map, {5.0}));
            f.panels.push_back(panel(std::to_string(id) + "b", m, theta_map, w_map, {0.05}));
            break;
        }
        case 2:
            f.title = "RWA phase and overlap at lambda = 0.05";
            f.panels.push_back(panel("2a", Method::RwaClosed, theta_line, {0.1}, {0.05}));
            f.panels.push_back(panel("2b", Method::RwaClosed, theta_line, {0.5}, {0.05}));
            f.panels.push_back(panel("2c", Method::RwaClosed, {kPi / 3.0}, w_line, {0.05}));
            f.panels.push_back(panel("2d", Method::RwaClosed, {kPi / 10.0}, w_line, {0.05}));
            break;
        case 3:
            f.title = "Jaynes-Cummings limit at theta = pi/4";
            f.panels.push_back(panel("3", Method::JcLimit, {kPi / 4.0}, w_line, {0.0}));
            break;
        case 5:
            f.title = "non-RWA phase and overlap modulus at W = 0.5, lambda = 0.05";
            f.panels.push_back(panel("5", Method::Heom, theta_line, {0.5}, {0.05}));
            break;
        case 6: {
            f.title = "RWA against non-RWA";
            const std::array<std::pair<const char*, std::pair<double, double>>, 4> cases{{
                {"6a", {0.05, 5.0}}, {"6b", {0.5, 5.0}}, {"6c", {0.05, 0.05}}, {"6d", {0.5, 0.05}}}};
            for (const auto& [name, wl] : cases) {
                for (Method m : {Method::RwaClosed, Method::Heom}) {
                    f.panels.push_back(panel(name, m, theta_line, {wl.first}, {wl.second}));
                }
            }
            break;
        }
        default:
            throw std::out_of_range("figure id must be 1..6 (got " + std::to_string(id) + ")");
    }
    return f;
}

SweepTable run_figure(const FigurePreset& fig, int workers) {
    SweepTable out;
    for (const auto& p : fig.panels) out.append(run_grid(p, workers));
    return out;
}

// ------------------------------------------------------------------ writers --

std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string_view flag(bool b) { return b ? "true" : "false"; }

std::string phase_field(const SweepRow& r) {
    if (r.failed) return "error";
    if (!r.phi_over_pi) return "undefined";
    return format_number(*r.phi_over_pi);
}

ordered_json row_json(const SweepRow& r) {
    ordered_json j;
    j["theta"] = r.theta;
    j["W"] = r.W;
    j["lambda"] = r.lambda;
    j["method"] = to_string(r.method);
    if (r.phi_over_pi && !r.failed) {
        j["phi_over_pi"] = *r.phi_over_pi;
    } else {
        j["phi_over_pi"] = r.failed ? "error" : "undefined";
    }
    j["overlap_re"] = r.overlap.real();
    j["overlap_im"] = r.overlap.imag();
    j["overlap_abs"] = r.overlap_abs();
    j["nodal"] = r.nodal;
    j["degenerate"] = r.degenerate;
    j["converged"] = r.converged;
    return j;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) return out;
        start = comma + 1;
    }
}

double parse_number(std::string_view s, std::size_t line) {
    double v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("sweep table line " + std::to_string(line) + ": bad number '" +
                                 std::string(s) + "'");
    }
    return v;
}

bool parse_flag(std::string_view s, std::size_t line) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw std::runtime_error("sweep table line " + std::to_string(line) + ": bad flag '" + std::string(s) + "'");
}

}  // namespace

void write_table(const SweepTable& table, std::ostream& out, Format format) {
    if (format == Format::Json) {
        ordered_json rows = ordered_json::array();
        for (const auto& r : table.rows) rows.push_back(row_json(r));
        out << rows.dump(1) << '\n';
        return;
    }
    out << "# units: omega0 = 1; theta in rad; W, lambda in omega0; phi_over_pi = (phase mod 2 pi)/pi\n";
    out << kCsvHeader << '\n';
    for (const auto& r : table.rows) {
        out << format_number(r.theta) << ',' << format_number(r.W) << ',' << format_number(r.lambda) << ','
            << to_string(r.method) << ',' << phase_field(r) << ',' << format_number(r.overlap.real()) << ','
            << format_number(r.overlap.imag()) << ',' << format_number(r.overlap_abs()) << ','
            << flag(r.nodal) << ',' << flag(r.degenerate) << ',' << flag(r.converged) << '\n';
    }
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

void write_table(const SweepTable& table, const std::filesystem::path& path, Format format) {
    std::ofstream out = open_output(path);
    write_table(table, out, format);
    if (!out.flush()) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::vector<SweepRow> read_table_csv(std::istream& in) {
    std::vector<SweepRow> rows;
    std::string line;
    std::size_t number = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty() || line.front() == '#') continue;
        if (!header) {
            if (line != kCsvHeader) {
                throw std::runtime_error("sweep table line " + std::to_string(number) + ": unexpected header");
            }
            header = true;
            continue;
        }
        const auto f = split(line);
        if (f.size() != 11) {
            throw std::runtime_error("sweep table line " + std::to_string(number) + ": expected 11 fields");
        }
        SweepRow r;
        r.theta = parse_number(f[0], number);
        r.W = parse_number(f[1], number);
        r.lambda = parse_number(f[2], number);
        r.method = parse_method(f[3]);
        if (f[4] == "error") {
            r.failed = true;
        } else if (f[4] != "undefined") {
            r.phi_over_pi = parse_number(f[4], number);
        }
        r.overlap = {parse_number(f[5], number), parse_number(f[6], number)};
        r.nodal = parse_flag(f[8], number);
        r.degenerate = parse_flag(f[9], number);
        r.converged = parse_flag(f[10], number);
        rows.push_back(r);
    }
    if (!header) throw std::runtime_error("sweep table: missing header");
    return rows;
}

std::vector<SweepRow> read_table_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    return read_table_csv(in);
}

ordered_json spec_json(const SweepSpec& spec) {
    ordered_json j;
    j["label"] = spec.label;
    j["method"] = to_string(spec.method);
    j["theta"] = spec.thetas;
    j["W"] = spec.couplings;
    j["lambda"] = spec.widths;
    j["quadrature"] = {{"intervals", spec.quadrature.intervals},
                       {"rel_tol", spec.quadrature.rel_tol},
                       {"max_intervals", spec.quadrature.max_intervals},
                       {"nodal_tol", spec.quadrature.nodal_tol}};
    j["bargmann"] = {{"intervals", spec.refinement.intervals},
                     {"tol", spec.refinement.tol},
                     {"max_intervals", spec.refinement.max_intervals},
                     {"nodal_tol", spec.nodal_tol}};
    j["heom"] = {{"depth", spec.auto_depth ? ordered_json("auto") : ordered_json(spec.heom.depth)},
                 {"steps", spec.heom.steps},
                 {"dt", spec.heom.dt()},
                 {"t_final", spec.heom.t_final},
                 {"gp_tol", spec.heom.gp_tol},
                 {"depth_increment", spec.heom.depth_increment},
                 {"max_depth", spec.heom.max_depth}};
    return j;
}

ordered_json manifest(const std::vector<SweepSpec>& specs, const SweepTable& table) {
    ordered_json j;
    j["generator"] = "qgp";
    j["units"] = "omega0 = 1; times in 1/omega0; phases as phi/pi in [0, 2)";
    j["panels"] = ordered_json::array();
    for (const auto& s : specs) j["panels"].push_back(spec_json(s));
    std::size_t nodal = 0, failed = 0, unconverged = 0;
    for (const auto& r : table.rows) {
        nodal += r.nodal;
        failed += r.failed;
        unconverged += !r.converged;
    }
    j["rows"] = table.rows.size();
    j["nodal_rows"] = nodal;
    j["failed_rows"] = failed;
    j["unconverged_rows"] = unconverged;
    j["errors"] = ordered_json::array();
    for (const auto& e : table.errors) j["errors"].push_back({{"row", e.row}, {"message", e.message}});
    j["heom_groups"] = ordered_json::array();
    for (const auto& g : table.heom_groups) {
        j["heom_groups"].push_back({{"W", g.W},
                                    {"lambda", g.lambda},
                                    {"depth", g.depth},
                                    {"converged", g.converged},
                                    {"max_delta_phi", g.max_delta_phi},
                                    {"depth_history", g.depth_history}});
    }
    return j;
}

void write_manifest(const ordered_json& m, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << m.dump(1) << '\n';
    if (!out.flush()) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace qgp::sweep
