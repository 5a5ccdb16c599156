// Trajectory grid checks and CSV round trip

#include "qgp/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qgp {

std::string_view to_string(Picture p) noexcept {
    return p == Picture::Schrodinger ? "schrodinger" : "interaction";
}

std::string_view to_string(Source s) noexcept {
    switch (s) {
        case Source::Rwa: return "rwa";
        case Source::Heom: return "heom";
        case Source::External: return "external";
    }
    return "external";
}

void Trajectory::check_grid(double rel_tol) const {
    if (times.size() != states.size()) {
        throw std::invalid_argument("trajectory: times and states differ in length");
    }
    if (states.size() < 2) {
        throw std::invalid_argument("trajectory: need at least two samples");
    }
    if (times.front() != 0.0) {
        throw std::invalid_argument("trajectory: grid must start at t = 0");
    }
    const double step = (times.back() - times.front()) / static_cast<double>(intervals());
    if (!(step > 0.0)) {
        throw std::invalid_argument("trajectory: times must be ascending");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double d = times[i] - times[i - 1];
        if (std::abs(d - step) > rel_tol * step + 1e-12) {
            std::ostringstream msg;
            msg << "trajectory: non-uniform grid at sample " << i;
            throw std::invalid_argument(msg.str());
        }
    }
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    out << "# picture=" << to_string(traj.picture) << ", source=" << to_string(traj.source)
        << ", units: t in 1/omega0\n";
    out << "t,rho11_re,rho11_im,rho10_re,rho10_im,rho01_re,rho01_im,rho00_re,rho00_im\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << traj.times[i];
        for (const auto& z : traj.states[i].m) out << ',' << z.real() << ',' << z.imag();
        out << '\n';
    }
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_trajectory_csv(traj, out);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

double parse_double(std::string_view s) {
    double v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::runtime_error("trajectory csv: bad number '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

Trajectory read_trajectory_csv(std::istream& in) {
    Trajectory traj;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (line.find("picture=interaction") != std::string::npos) traj.picture = Picture::Interaction;
            if (line.find("source=rwa") != std::string::npos) traj.source = Source::Rwa;
            if (line.find("source=heom") != std::string::npos) traj.source = Source::Heom;
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        double v[9];
        std::size_t field = 0;
        std::size_t start = 0;
        while (field < 9) {
            const auto comma = line.find(',', start);
            const auto end = comma == std::string::npos ? line.size() : comma;
            v[field++] = parse_double(std::string_view(line).substr(start, end - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (field != 9) throw std::runtime_error("trajectory csv: expected 9 columns");
        traj.times.push_back(v[0]);
        DensityMatrix2 rho;
        for (std::size_t k = 0; k < 4; ++k) rho.m[k] = {v[1 + 2 * k], v[2 + 2 * k]};
        traj.states.push_back(rho);
    }
    return traj;
}

}  // namespace qgp
