#include "coherence/passivity.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "coherence/csv.hpp"
#include "coherence/error.hpp"

namespace coherence {

namespace {

constexpr double kAxisTol = 1e-9;

bool on_axis(const Complex& p) { return std::abs(p.real()) <= kAxisTol * std::max(1.0, std::abs(p)); }
bool in_open_rhp(const Complex& p) { return p.real() > kAxisTol * std::max(1.0, std::abs(p)); }

std::vector<Complex> sample_points(const PassivityGrid& grid) {
    std::vector<Complex> pts;
    const double         lo = std::log10(grid.omega_min);
    const double         hi = std::log10(grid.omega_max);
    for (double sigma : {0.0, grid.offset}) {
        for (int k = 0; k < grid.frequencies; ++k) {
            const double t = grid.frequencies == 1 ? 0.0 : static_cast<double>(k) / (grid.frequencies - 1);
            pts.emplace_back(sigma, std::pow(10.0, lo + t * (hi - lo)));
        }
    }
    pts.emplace_back(grid.offset, 0.0);
    for (int k = 0; k < grid.arc_points; ++k) {
        const double theta = -std::numbers::pi / 2 + std::numbers::pi * (k + 0.5) / grid.arc_points;
        pts.push_back(std::polar(grid.omega_max, theta));
    }
    return pts;
}

std::string describe(const PassivityGrid& grid) {
    return "omega: " + std::to_string(grid.frequencies) + " log-spaced in [" + format_number(grid.omega_min) + "," +
           format_number(grid.omega_max) + "] on Re(s) in {0," + format_number(grid.offset) + "}; real point " +
           format_number(grid.offset) + "; " + std::to_string(grid.arc_points) + " points on the right arc |s|=" +
           format_number(grid.omega_max);
}

PassivityCertificate failure(const Complex& witness, std::string grid) {
    PassivityCertificate cert;
    cert.kind            = PassivityKind::fails;
    cert.witness         = witness;
    cert.grid_resolution = std::move(grid);
    return cert;
}

// Re(1/g) turns negative somewhere on a small circle around a zero of g.
std::optional<Complex> zero_witness(const RationalFunction& g, const Complex& z) {
    const double radius = std::min(0.5 * z.real(), 1e-3 * std::max(1.0, std::abs(z)));
    for (int k = 0; k < 32; ++k) {
        const Complex s = z + std::polar(radius, 2.0 * std::numbers::pi * k / 32.0);
        const Complex v = g.eval(s);
        if (v != 0.0 && !is_infinite(v) && v.real() < 0.0) return s;
    }
    return std::nullopt;
}

}  // namespace

PassivityCertificate passivity_check(const RationalFunction& r, PassivityMode mode, const PassivityGrid& grid) {
    if (!r.is_proper()) throw Error(ErrorKind::Improper, "passivity check needs a proper transfer function");
    const std::string desc = describe(grid);

    const auto poles = r.poles();
    for (const auto& p : poles) {
        if (in_open_rhp(p)) return failure(p, desc);
    }
    for (const auto& p : poles) {
        if (!on_axis(p)) continue;
        if (mode == PassivityMode::osp) return failure(p, desc);
        int repeats = 0;
        for (const auto& q : poles) repeats += std::abs(q - p) <= 1e-6 * std::max(1.0, std::abs(p)) ? 1 : 0;
        if (repeats > 1) return failure(p, desc);
        const Complex residue = r.num()(p) / r.den().derivative()(p);
        if (!(residue.real() > 0.0) || std::abs(residue.imag()) > 1e-8 * std::abs(residue)) return failure(p, desc);
    }
    if (mode == PassivityMode::osp) {
        for (const auto& z : r.zeros()) {
            if (!in_open_rhp(z)) continue;
            if (auto w = zero_witness(r, z)) return failure(*w, desc);
        }
    }

    double  min_ratio = std::numeric_limits<double>::infinity();
    Complex argmin    = 0.0;
    for (const Complex& s : sample_points(grid)) {
        const Complex v = r.eval(s);
        if (is_infinite(v)) continue;
        if (mode == PassivityMode::positive_real) {
            if (v.real() < -1e-12 * std::abs(v)) return failure(s, desc);
        } else if (v != 0.0) {
            const double ratio = v.real() / std::norm(v);
            if (ratio < min_ratio) {
                min_ratio = ratio;
                argmin    = s;
            }
        }
    }

    PassivityCertificate cert;
    cert.grid_resolution = desc;
    if (mode == PassivityMode::positive_real) {
        cert.kind = PassivityKind::positive_real;
        return cert;
    }
    if (!(min_ratio > 0.0) || std::isinf(min_ratio)) return failure(argmin, desc);
    cert.kind    = PassivityKind::output_strictly_passive;
    cert.epsilon = min_ratio;
    return cert;
}

}  // namespace coherence
