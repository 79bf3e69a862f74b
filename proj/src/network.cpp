#include "coherence/network.hpp"

#include <algorithm>
#include <cmath>

#include "coherence/csv.hpp"
#include "coherence/error.hpp"

namespace coherence {

namespace {

constexpr double kSingularRcond   = 1e-14;
constexpr double kMajorantSlack   = 1e-12;
constexpr double kZeroRootTol     = 1e-7;
constexpr double kCoherentPoleTol = 1e-13;

std::string point_text(const Complex& s) { return format_number(s.real()) + (s.imag() < 0 ? "" : "+") + format_number(s.imag()) + "j"; }

struct NodeValues {
    std::vector<Complex> inverse;  // g_i^-1(s); infinite where g_i(s) = 0
    bool                 any_node_zero = false;
};

NodeValues node_inverses(const NetworkModel& net, Complex s) {
    NodeValues out;
    out.inverse.reserve(net.nodes().size());
    for (const auto& g : net.nodes()) {
        const Complex num = g.num()(s);
        if (num == 0.0) {
            out.inverse.push_back(kComplexInfinity);
            out.any_node_zero = true;
        } else {
            out.inverse.push_back(g.den()(s) / num);
        }
    }
    return out;
}

Complex coupling_value(const NetworkModel& net, Complex s) {
    const Complex f = net.coupling().eval(s);
    if (is_infinite(f)) throw Error(ErrorKind::SingularAtS, "s=" + point_text(s) + " is a pole of the coupling f");
    return f;
}

// Attaches the bound for the given majorants; assumes they were validated.
void attach_bound(IncoherenceReport& report, double M1, double M2) {
    report.M1              = M1;
    report.M2              = M2;
    const double threshold = M2 + M1 * M2 * M2;
    report.bound_valid     = report.effective_connectivity > threshold;
    if (report.bound_valid) {
        const double top = M1 * M2 + 1.0;
        report.bound     = top * top / (report.effective_connectivity - threshold);
    } else {
        report.bound.reset();
    }
}

}  // namespace

NetworkModel::NetworkModel(std::vector<RationalFunction> nodes, RationalFunction coupling, LaplacianMatrix laplacian)
    : nodes_(std::move(nodes)), coupling_(std::move(coupling)), laplacian_(std::move(laplacian)) {
    if (nodes_.size() < 2) throw Error(ErrorKind::InvalidNetwork, "a network needs at least two nodes");
    if (laplacian_.order() != size()) {
        throw Error(ErrorKind::InvalidNetwork, "Laplacian order " + std::to_string(laplacian_.order()) +
                                                   " does not match " + std::to_string(size()) + " nodes");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].is_zero()) throw Error(ErrorKind::InvalidNetwork, "node " + std::to_string(i) + " is identically zero");
        if (!nodes_[i].is_proper()) throw Error(ErrorKind::Improper, "node " + std::to_string(i) + " is improper");
    }
    if (!coupling_.is_proper()) throw Error(ErrorKind::Improper, "coupling is improper");
}

FrequencyRegion FrequencyRegion::segment(double sigma, double omega_min, double omega_max, int resolution) {
    FrequencyRegion r;
    r.kind       = RegionKind::vertical_segment;
    r.sigma      = sigma;
    r.sigma_max  = sigma;
    r.omega_min  = omega_min;
    r.omega_max  = omega_max;
    r.resolution = resolution;
    r.validate();
    return r;
}

FrequencyRegion FrequencyRegion::rect(double sigma_min, double sigma_max, double omega_min, double omega_max, int resolution) {
    FrequencyRegion r;
    r.kind       = RegionKind::rect_grid;
    r.sigma      = sigma_min;
    r.sigma_max  = sigma_max;
    r.omega_min  = omega_min;
    r.omega_max  = omega_max;
    r.resolution = resolution;
    r.validate();
    return r;
}

void FrequencyRegion::validate() const {
    if (resolution < 2) throw Error(ErrorKind::InvalidArgument, "region resolution must be at least 2");
    if (!(omega_min < omega_max)) throw Error(ErrorKind::InvalidArgument, "region needs omega_min < omega_max");
    if (kind == RegionKind::rect_grid && !(sigma < sigma_max)) {
        throw Error(ErrorKind::InvalidArgument, "rectangular region needs sigma < sigma_max");
    }
    if (log_omega && !(omega_min > 0.0)) throw Error(ErrorKind::InvalidArgument, "log-spaced omega needs omega_min > 0");
}

std::vector<Complex> FrequencyRegion::points() const {
    validate();
    auto axis = [](double lo, double hi, int count, bool log) {
        std::vector<double> v(static_cast<std::size_t>(count));
        for (int k = 0; k < count; ++k) {
            const double t = static_cast<double>(k) / (count - 1);
            v[static_cast<std::size_t>(k)] =
                log ? std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo))) : lo + t * (hi - lo);
        }
        v.back() = hi;
        return v;
    };
    const auto           omegas = axis(omega_min, omega_max, resolution, log_omega);
    std::vector<Complex> pts;
    if (kind == RegionKind::vertical_segment) {
        for (double w : omegas) pts.emplace_back(sigma, w);
    } else {
        for (double x : axis(sigma, sigma_max, resolution, false))
            for (double w : omegas) pts.emplace_back(x, w);
    }
    return pts;
}

bool FrequencyRegion::contains(const Complex& z) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(z));
    const bool   in_omega = z.imag() >= omega_min - tol && z.imag() <= omega_max + tol;
    if (kind == RegionKind::vertical_segment) return in_omega && std::abs(z.real() - sigma) <= tol;
    return in_omega && z.real() >= sigma - tol && z.real() <= sigma_max + tol;
}

double spectral_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() <= 16) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
        return svd.singularValues()(0);
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

Eigen::MatrixXcd eval_T(const NetworkModel& net, Complex s) {
    const int        n = net.size();
    const Complex    f = coupling_value(net, s);
    const NodeValues h = node_inverses(net, s);
    const Eigen::MatrixXcd fl = f * net.laplacian().entries().cast<Complex>();

    if (!h.any_node_zero) {
        Eigen::MatrixXcd m = fl;
        for (int i = 0; i < n; ++i) m(i, i) += h.inverse[static_cast<std::size_t>(i)];
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
        if (!(lu.rcond() > kSingularRcond)) {
            throw Error(ErrorKind::SingularAtS, "T(s) is singular at s=" + point_text(s));
        }
        return lu.inverse();
    }

    Eigen::VectorXcd g(n);
    for (int i = 0; i < n; ++i) {
        const Complex gi = net.nodes()[static_cast<std::size_t>(i)].eval(s);
        if (is_infinite(gi)) throw Error(ErrorKind::NodeZeroAtS, "node zeros and poles coincide at s=" + point_text(s));
        g(i) = gi;
    }
    Eigen::MatrixXcd k = g.asDiagonal() * fl;
    k.diagonal().array() += 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(k);
    if (!(lu.rcond() > kSingularRcond)) {
        throw Error(ErrorKind::NodeZeroAtS, "node zero at s=" + point_text(s) + " and I + GfL is singular");
    }
    return lu.solve(Eigen::MatrixXcd(g.asDiagonal()));
}

Eigen::MatrixXcd eval_T_eigenform(const NetworkModel& net, Complex s) {
    const Complex    f = coupling_value(net, s);
    const NodeValues h = node_inverses(net, s);
    if (h.any_node_zero) throw Error(ErrorKind::NodeZeroAtS, "eigenform route needs finite g_i^-1 at s=" + point_text(s));
    const Eigen::MatrixXcd v = net.laplacian().eigenvectors().cast<Complex>();
    Eigen::VectorXcd       hv(net.size());
    for (int i = 0; i < net.size(); ++i) hv(i) = h.inverse[static_cast<std::size_t>(i)];
    Eigen::MatrixXcd inner = v.transpose() * hv.asDiagonal() * v;
    inner.diagonal() += f * net.laplacian().eigenvalues().cast<Complex>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(inner);
    if (!(lu.rcond() > kSingularRcond)) throw Error(ErrorKind::SingularAtS, "T(s) is singular at s=" + point_text(s));
    return v * lu.inverse() * v.transpose();
}

RationalFunction coherent_dynamics(const NetworkModel& net) { return harmonic_mean(net.nodes()); }

RationalFunction aggregate_dynamics(const NetworkModel& net) { return inverse_sum(net.nodes()); }

Complex coherent_value(const NetworkModel& net, Complex s) {
    const NodeValues h = node_inverses(net, s);
    if (h.any_node_zero) return 0.0;
    Complex sum   = 0.0;
    double  scale = 0.0;
    for (const auto& x : h.inverse) {
        sum += x;
        scale += std::abs(x);
    }
    if (std::abs(sum) <= kCoherentPoleTol * scale) {
        throw Error(ErrorKind::CoherentPoleAtS, "s=" + point_text(s) + " is a pole of the coherent dynamics");
    }
    return static_cast<double>(net.size()) / sum;
}

IncoherenceReport incoherence(const NetworkModel& net, Complex s) {
    const int        n    = net.size();
    const Complex    gbar = coherent_value(net, s);
    Eigen::MatrixXcd gap  = eval_T(net, s);
    gap.array() -= gbar / static_cast<double>(n);

    IncoherenceReport report;
    report.s                      = s;
    report.measured               = spectral_norm(gap);
    report.effective_connectivity = std::abs(coupling_value(net, s)) * net.laplacian().lambda2();
    return report;
}

IncoherenceReport lemma_bound(const NetworkModel& net, Complex s, double M1, double M2) {
    if (!net.laplacian().connected()) {
        throw Error(ErrorKind::Disconnected, "the bound needs lambda2 > 0 but the graph is disconnected");
    }
    if (!(M1 > 0.0) || !(M2 > 0.0)) throw Error(ErrorKind::InvalidMajorants, "majorants must be positive");
    IncoherenceReport report = incoherence(net, s);

    const double     gbar_abs = std::abs(coherent_value(net, s));
    const NodeValues h        = node_inverses(net, s);
    double           inv_max  = 0.0;
    for (const auto& x : h.inverse) inv_max = std::max(inv_max, std::abs(x));
    if (M1 < gbar_abs * (1.0 - kMajorantSlack) || M2 < inv_max * (1.0 - kMajorantSlack)) {
        throw Error(ErrorKind::InvalidMajorants, "M1=" + format_number(M1) + ", M2=" + format_number(M2) +
                                                     " do not dominate |gbar|=" + format_number(gbar_abs) +
                                                     ", max|g_i^-1|=" + format_number(inv_max));
    }
    attach_bound(report, M1, M2);
    return report;
}

Majorants estimate_majorants(const NetworkModel& net, const FrequencyRegion& region) {
    region.validate();
    const RationalFunction gbar = coherent_dynamics(net);
    for (const auto& p : gbar.poles()) {
        if (region.contains(p)) {
            throw Error(ErrorKind::RegionContainsSingularity, "region contains pole " + point_text(p) + " of gbar");
        }
    }
    for (std::size_t i = 0; i < net.nodes().size(); ++i) {
        for (const auto& z : net.nodes()[i].zeros()) {
            if (region.contains(z)) {
                throw Error(ErrorKind::RegionContainsSingularity,
                            "region contains zero " + point_text(z) + " of node " + std::to_string(i));
            }
        }
    }
    Majorants m;
    for (const Complex& s : region.points()) {
        m.M1                = std::max(m.M1, std::abs(coherent_value(net, s)));
        const NodeValues h  = node_inverses(net, s);
        for (const auto& x : h.inverse) m.M2 = std::max(m.M2, std::abs(x));
    }
    m.M1 *= kMajorantSafety;
    m.M2 *= kMajorantSafety;
    return m;
}

namespace {

void summarize(const std::vector<IncoherenceReport>& reports, double& sup_measured, std::optional<double>& sup_bound) {
    sup_measured   = 0.0;
    bool all_valid = !reports.empty();
    double top     = 0.0;
    for (const auto& r : reports) {
        sup_measured = std::max(sup_measured, r.measured);
        if (r.bound) {
            top = std::max(top, *r.bound);
        } else {
            all_valid = false;
        }
    }
    if (all_valid) {
        sup_bound = top;
    } else {
        sup_bound.reset();
    }
}

std::vector<IncoherenceReport> sweep_points(const NetworkModel& net, const std::vector<Complex>& points, const Majorants& m) {
    std::vector<IncoherenceReport> reports;
    reports.reserve(points.size());
    for (const Complex& s : points) {
        IncoherenceReport r = incoherence(net, s);
        if (net.laplacian().connected()) {
            attach_bound(r, m.M1, m.M2);
        } else {
            r.M1 = m.M1;
            r.M2 = m.M2;
        }
        reports.push_back(r);
    }
    return reports;
}

}  // namespace

RegionSweep sweep_region(const NetworkModel& net, const FrequencyRegion& region) {
    RegionSweep out;
    out.majorants = estimate_majorants(net, region);
    out.reports   = sweep_points(net, region.points(), out.majorants);
    summarize(out.reports, out.sup_measured, out.sup_bound);
    return out;
}

std::vector<ConnectivityRow> connectivity_sweep(const NetworkModel& net, const FrequencyRegion& region,
                                                std::span<const double> alphas) {
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        if (!(alphas[k] > 0.0) || (k > 0 && !(alphas[k] > alphas[k - 1]))) {
            throw Error(ErrorKind::NotIncreasing, "connectivity scalings must be positive and strictly increasing");
        }
    }
    const Majorants              m      = estimate_majorants(net, region);
    const std::vector<Complex>   points = region.points();
    std::vector<ConnectivityRow> rows;
    for (double alpha : alphas) {
        const NetworkModel scaled = net.scaled(alpha);
        ConnectivityRow    row;
        row.alpha   = alpha;
        row.lambda2 = scaled.laplacian().lambda2();
        row.reports = sweep_points(scaled, points, m);
        summarize(row.reports, row.sup_incoherence, row.sup_bound);
        rows.push_back(std::move(row));
    }
    return rows;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InvalidArgument, "slope needs two or more paired samples");
    const double n  = static_cast<double>(x.size());
    double       mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "log-log slope needs positive data");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw Error(ErrorKind::InvalidArgument, "log-log slope needs distinct abscissae");
    return sxy / sxx;
}

std::vector<PoleApproachRow> pole_approach_sweep(const NetworkModel& net, Complex pole_of_f, std::span<const double> radii,
                                                 Complex direction) {
    if (!net.laplacian().connected()) throw Error(ErrorKind::Disconnected, "pole approach needs lambda2 > 0");
    const Polynomial& fden  = net.coupling().den();
    double            scale = 0.0;
    for (std::size_t k = 0; k < fden.coeffs().size(); ++k) scale += std::abs(fden[k]) * std::pow(std::abs(pole_of_f), k);
    if (fden.degree() < 1 || std::abs(fden(pole_of_f)) > 1e-9 * scale) {
        throw Error(ErrorKind::NotAPoleOfF, point_text(pole_of_f) + " is not a pole of the coupling f");
    }
    const RationalFunction gbar = coherent_dynamics(net);
    const Complex          gv   = gbar.eval(pole_of_f);
    if (is_infinite(gv) || std::abs(gbar.num()(pole_of_f)) <= 1e-9 * gbar.num().max_abs()) {
        throw Error(ErrorKind::PreconditionNotMet, point_text(pole_of_f) + " is a pole or zero of gbar");
    }
    if (direction == 0.0) throw Error(ErrorKind::InvalidArgument, "approach direction must be nonzero");
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] < radii[k - 1]))) {
            throw Error(ErrorKind::InvalidArgument, "radii must be positive and strictly decreasing");
        }
    }
    const Complex                unit = direction / std::abs(direction);
    std::vector<PoleApproachRow> rows;
    for (double r : radii) {
        const Complex s = pole_of_f + r * unit;
        rows.push_back({r, s, incoherence(net, s).measured});
    }
    return rows;
}

double homogeneous_decomposition_check(const RationalFunction& g, const RationalFunction& f, const LaplacianMatrix& L,
                                       Complex s) {
    const int          n = L.order();
    const NetworkModel net(std::vector<RationalFunction>(static_cast<std::size_t>(n), g), f, L);
    const Eigen::MatrixXcd t = eval_T(net, s);

    const Complex gs = g.eval(s);
    const Complex fs = f.eval(s);
    if (is_infinite(gs) || is_infinite(fs)) throw Error(ErrorKind::SingularAtS, "g or f has a pole at s=" + point_text(s));
    const Complex ginv = g.reciprocal().eval(s);

    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Constant(n, n, gs / static_cast<double>(n));
    const auto&      v   = L.eigenvectors();
    for (int i = 1; i < n; ++i) {
        const Complex weight = 1.0 / (ginv + fs * L.eigenvalues()(i));
        rhs += weight * (v.col(i) * v.col(i).transpose()).cast<Complex>();
    }
    return spectral_norm(t - rhs);
}

int nodal_multiplicity(const NetworkModel& net, Complex s0) {
    int count = 0;
    for (const auto& g : net.nodes()) {
        const auto zs = g.zeros();
        count += std::any_of(zs.begin(), zs.end(),
                             [&](const Complex& z) { return std::abs(z - s0) <= kZeroRootTol * std::max(1.0, std::abs(s0)); })
                     ? 1
                     : 0;
    }
    return count;
}

}  // namespace coherence
