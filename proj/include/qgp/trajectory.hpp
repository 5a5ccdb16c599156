// Time-ordered samples of the reduced density matrix

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "qgp/algebra.hpp"

namespace qgp {

enum class Picture { Schrodinger, Interaction };
enum class Source { Rwa, Heom, External };

std::string_view to_string(Picture p) noexcept;
std::string_view to_string(Source s) noexcept;

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix2> states;
    Picture picture{Picture::Schrodinger};
    Source source{Source::External};

    std::size_t size() const noexcept { return states.size(); }
    std::size_t intervals() const noexcept { return states.empty() ? 0 : states.size() - 1; }

    // Throws std::invalid_argument unless times are ascending, uniform to `rel_tol`
    // of the step, start at 0, and match the number of states (>= 2).
    void check_grid(double rel_tol = 1e-9) const;
};

// CSV export: a '# picture=..., source=...' comment line, a header
// t,rho11_re,rho11_im,rho10_re,rho10_im,rho01_re,rho01_im,rho00_re,rho00_im
// and one row per sample. Labels 1 and 0 refer to the excited and ground state.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_trajectory_csv(std::istream& in);

}  // namespace qgp
