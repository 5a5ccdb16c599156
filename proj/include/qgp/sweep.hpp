// Parameter grids, figure presets and table output
//
// Rows are ordered theta-major, then W, then lambda, whatever the worker count.
// Frequencies are in units of omega0, phases as phi/pi reduced to [0, 2).

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qgp/geometric_phase.hpp"
#include "qgp/heom.hpp"
#include "qgp/rwa.hpp"

namespace qgp::sweep {

enum class Method { RwaClosed, RwaBargmann, Heom, JcLimit };
enum class Format { Csv, Json };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view name);  // throws std::invalid_argument
std::string_view to_string(Format f) noexcept;
Format parse_format(std::string_view name);

inline constexpr double kMaxCoupling = 1.5;

struct SweepSpec {
    std::string label;
    Method method{Method::RwaClosed};
    std::vector<double> thetas;
    std::vector<double> couplings;  // W
    std::vector<double> widths;     // lambda
    rwa::QuadratureConfig quadrature;
    gp::RefinementConfig refinement;  // rwa-bargmann sampling
    heom::HeomConfig heom;
    bool auto_depth{true};            // start each (W, lambda) at heom::suggested_depth
    double nodal_tol{gp::kNodalTol};  // numerical routes; rwa-closed uses quadrature.nodal_tol

    // Grids non-empty, theta in (0, pi], W in [0, 1.5], lambda > 0.
    void validate() const;
    std::size_t size() const noexcept { return thetas.size() * couplings.size() * widths.size(); }
};

struct SweepRow {
    double theta{};
    double W{};
    double lambda{};
    Method method{};
    std::optional<double> phi_over_pi;  // empty when nodal or failed
    Complex overlap{};
    bool nodal{};
    bool degenerate{};
    bool converged{};
    bool failed{};  // solver error; phi_over_pi is written as "error"

    double overlap_abs() const noexcept { return std::abs(overlap); }
    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct RowError {
    std::size_t row{};
    std::string message;
};

// One entry per (W, lambda) pair of an heom sweep.
struct HeomGroup {
    double W{};
    double lambda{};
    int depth{};
    bool converged{};
    double max_delta_phi{};
    std::vector<double> depth_history;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<RowError> errors;
    std::vector<HeomGroup> heom_groups;

    void append(SweepTable other);
};

SweepRow make_row(double theta, const BathParams& p, Method m, const GpResult& g);

// Grid points run on an OpenMP team of `workers` threads (0 = runtime default).
// heom sweeps distribute (W, lambda) pairs; each pair evolves one dynamical map
// shared by all angles.
SweepTable run_grid(const SweepSpec& spec, int workers = 0);
// Single-threaded reference with the same output.
SweepTable run_grid_serial(const SweepSpec& spec);

// n interior points of (lo, hi): lo + (hi - lo) i / (n + 1), i = 1..n.
std::vector<double> open_grid(double lo, double hi, std::size_t n);
// n points of (0, hi]: hi j / n, j = 1..n.
std::vector<double> upper_grid(double hi, std::size_t n);

struct FigurePreset {
    int id{};
    std::string title;
    std::vector<SweepSpec> panels;  // rows of all panels are concatenated in this order
};

inline constexpr std::size_t kHeatmapPoints = 100;
inline constexpr std::size_t kLinePoints = 200;

FigurePreset figure_preset(int id);  // id in 1..6, throws std::out_of_range otherwise
SweepTable run_figure(const FigurePreset& fig, int workers = 0);

// Byte-deterministic writers. The CSV starts with one '#' comment line stating
// units, then the header.
inline constexpr std::string_view kCsvHeader =
    "theta,W,lambda,method,phi_over_pi,overlap_re,overlap_im,overlap_abs,nodal,degenerate,converged";

void write_table(const SweepTable& table, std::ostream& out, Format format);
void write_table(const SweepTable& table, const std::filesystem::path& path, Format format);
std::vector<SweepRow> read_table_csv(std::istream& in);
std::vector<SweepRow> read_table_csv(const std::filesystem::path& path);

nlohmann::ordered_json spec_json(const SweepSpec& spec);
nlohmann::ordered_json manifest(const std::vector<SweepSpec>& specs, const SweepTable& table);
void write_manifest(const nlohmann::ordered_json& manifest, const std::filesystem::path& path);

// Shortest text that reads back to the same double.
std::string format_number(double x);

}  // namespace qgp::sweep
