#include "coherence/time_domain.hpp"

#include <algorithm>
#include <cmath>

#include "coherence/error.hpp"

namespace coherence {

namespace {

constexpr double kUnstableTol   = 1e-6;
constexpr double kHurwitzMargin = 1e-9;
constexpr double kMarginalTol   = 1e-9;

void check_signal(const InputSignal& input) {
    if (!(input.alpha >= 0.0) || !std::isfinite(input.alpha)) {
        throw Error(ErrorKind::InvalidArgument, "input alpha must be finite and non-negative");
    }
}

StateSpaceModel block_diagonal(const std::vector<StateSpaceModel>& parts) {
    Eigen::Index states = 0;
    for (const auto& p : parts) states += p.states();
    const auto      n = static_cast<Eigen::Index>(parts.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(states, states);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(states, n);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, states);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    Eigen::Index    offset = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = parts[static_cast<std::size_t>(i)];
        const auto  k = p.states();
        A.block(offset, offset, k, k) = p.A;
        B.block(offset, i, k, 1)      = p.B;
        C.block(i, offset, 1, k)      = p.C;
        D(i, i)                       = p.D(0, 0);
        offset += k;
    }
    return {A, B, C, D};
}

// Orthonormal basis of the null space of m (columns), by SVD.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& m) {
    if (m.cols() == 0) return Eigen::MatrixXd(0, 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto&  sv  = svd.singularValues();
    const double tol = kMarginalTol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > tol) ++rank;
    return svd.matrixV().rightCols(m.cols() - rank);
}

// Dimension of {v in span(basis) : m v = 0}.
Eigen::Index annihilated_dimension(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& m) {
    if (basis.cols() == 0) return 0;
    if (m.rows() == 0) return basis.cols();
    return null_space(m * basis).cols();
}

}  // namespace

double InputSignal::profile(double t) const {
    switch (family) {
        case InputFamily::step: return 1.0;
        case InputFamily::sinusoid: return std::sin(alpha * t);
        case InputFamily::exp_approach: return -std::expm1(-alpha * t);
    }
    return 0.0;
}

StateSpaceModel assemble_closed_loop(const NetworkModel& net) {
    const int n = net.size();
    std::vector<StateSpaceModel> nodes;
    for (const auto& g : net.nodes()) nodes.push_back(to_state_space(g));
    const StateSpaceModel G = block_diagonal(nodes);
    if (net.laplacian().is_zero()) return G;

    const Eigen::MatrixXd& L = net.laplacian().entries();
    const StateSpaceModel  f = to_state_space(net.coupling());
    const StateSpaceModel  F = block_diagonal(std::vector<StateSpaceModel>(static_cast<std::size_t>(n), f));
    const double           d_f = f.D(0, 0);

    Eigen::MatrixXd loop = Eigen::MatrixXd::Identity(n, n) + G.D * d_f * L;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(loop);
    if (!(lu.rcond() > 1e-12)) throw Error(ErrorKind::AlgebraicLoopSingular, "I + D_G D_F L is singular");
    const Eigen::MatrixXd E = lu.inverse();

    const Eigen::Index ng = G.states();
    const Eigen::Index nf = F.states();
    const Eigen::Index ns = ng + nf;

    Eigen::MatrixXd Cy(n, ns);
    Cy << E * G.C, -E * G.D * F.C;
    const Eigen::MatrixXd Dy = E * G.D;

    Eigen::MatrixXd Wx = d_f * L * Cy;
    Wx.rightCols(nf) += F.C;
    const Eigen::MatrixXd Wu = d_f * L * Dy;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ns, ns);
    A.topLeftCorner(ng, ng)     = G.A;
    A.bottomRightCorner(nf, nf) = F.A;
    A.topRows(ng) -= G.B * Wx;
    A.bottomRows(nf) += F.B * L * Cy;

    Eigen::MatrixXd B(ns, n);
    B << G.B * (Eigen::MatrixXd::Identity(n, n) - Wu), F.B * L * Dy;
    return {A, B, Cy, Dy};
}

double default_time_step(const StateSpaceModel& model) {
    const Eigen::VectorXcd eig     = model.eigenvalues();
    const double           largest = eig.size() > 0 ? eig.cwiseAbs().maxCoeff() : 0.0;
    return largest > 0.0 ? std::min(1e-2, 0.1 / largest) : 1e-2;
}

SimulationResult simulate(const StateSpaceModel& model, const InputSignal& input, double t_end, double dt) {
    check_signal(input);
    if (!(dt > 0.0) || !(t_end > dt)) throw Error(ErrorKind::InvalidArgument, "simulation needs dt > 0 and t_end > dt");
    if (input.shape.size() != model.inputs()) {
        throw Error(ErrorKind::LengthMismatch, "input shape has " + std::to_string(input.shape.size()) +
                                                   " entries, model has " + std::to_string(model.inputs()) + " inputs");
    }
    const Eigen::VectorXcd eig = model.eigenvalues();
    for (Eigen::Index k = 0; k < eig.size(); ++k) {
        if (eig(k).real() > kUnstableTol) {
            throw Error(ErrorKind::UnstableModel, "eigenvalue with real part " + std::to_string(eig(k).real()));
        }
    }

    const auto            steps = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
    const Eigen::VectorXd bu    = model.B * input.shape;
    const Eigen::VectorXd du    = model.D * input.shape;

    SimulationResult result;
    result.times.resize(steps + 1);
    result.node_outputs.resize(model.outputs(), static_cast<Eigen::Index>(steps + 1));

    Eigen::VectorXd x = Eigen::VectorXd::Zero(model.states());
    auto rhs = [&](const Eigen::VectorXd& state, double t) -> Eigen::VectorXd { return model.A * state + bu * input.profile(t); };
    for (std::size_t k = 0;; ++k) {
        const double t  = static_cast<double>(k) * dt;
        result.times[k] = t;
        result.node_outputs.col(static_cast<Eigen::Index>(k)) = model.C * x + du * input.profile(t);
        if (k == steps) break;
        const Eigen::VectorXd k1 = rhs(x, t);
        const Eigen::VectorXd k2 = rhs(x + 0.5 * dt * k1, t + 0.5 * dt);
        const Eigen::VectorXd k3 = rhs(x + 0.5 * dt * k2, t + 0.5 * dt);
        const Eigen::VectorXd k4 = rhs(x + dt * k3, t + dt);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return result;
}

Eigen::VectorXd coherent_reference(const NetworkModel& net, const InputSignal& input, double t_end, double dt) {
    if (input.shape.size() != net.size()) throw Error(ErrorKind::LengthMismatch, "input shape does not match network size");
    InputSignal averaged = input;
    averaged.shape       = Eigen::VectorXd::Constant(1, input.shape.mean());
    const SimulationResult r = simulate(to_state_space(coherent_dynamics(net)), averaged, t_end, dt);
    return r.node_outputs.row(0).transpose();
}

SimulationResult run_experiment(const NetworkModel& net, const InputSignal& input, double t_end, double dt,
                                std::optional<Eigen::VectorXd> inertias) {
    SimulationResult result = simulate(assemble_closed_loop(net), input, t_end, dt);
    result.coherent_output  = coherent_reference(net, input, t_end, dt);
    result.deviation_linf   = deviation_metrics(result).first;
    if (inertias) result.coi_output = coi_frequency(result, *inertias);
    return result;
}

std::pair<double, Eigen::VectorXd> deviation_metrics(const SimulationResult& result) {
    if (!result.coherent_output) throw Error(ErrorKind::MissingReference, "simulation has no coherent reference");
    const Eigen::VectorXd& ybar = *result.coherent_output;
    if (ybar.size() != result.node_outputs.cols()) {
        throw Error(ErrorKind::LengthMismatch, "coherent reference length differs from the node outputs");
    }
    Eigen::VectorXd per_node(result.node_outputs.rows());
    for (Eigen::Index i = 0; i < per_node.size(); ++i) {
        per_node(i) = per_node.size() == 0 || ybar.size() == 0
                          ? 0.0
                          : (result.node_outputs.row(i).transpose() - ybar).cwiseAbs().maxCoeff();
    }
    const double linf = per_node.size() > 0 ? per_node.maxCoeff() : 0.0;
    return {linf, per_node};
}

Eigen::VectorXd coi_frequency(const SimulationResult& result, const Eigen::VectorXd& inertias) {
    if (inertias.size() != result.node_outputs.rows()) {
        throw Error(ErrorKind::LengthMismatch, "expected " + std::to_string(result.node_outputs.rows()) + " inertias");
    }
    if (!(inertias.array() > 0.0).all()) throw Error(ErrorKind::InvalidArgument, "inertias must be positive");
    return result.node_outputs.transpose() * inertias / inertias.sum();
}

double hinf_estimate(const StateSpaceModel& model, const FrequencyRegion& grid) {
    double gamma = 0.0;
    for (const Complex& s : grid.points()) {
        if (model.states() > 0) {
            Eigen::MatrixXcd resolvent = -model.A.cast<Complex>();
            resolvent.diagonal().array() += s;
            if (!(resolvent.partialPivLu().rcond() > 1e-13)) continue;
        }
        gamma = std::max(gamma, spectral_norm(model.response(s)));
    }
    return gamma;
}

StabilityCertificate stability_check(const StateSpaceModel& model, const std::optional<FrequencyRegion>& grid) {
    StabilityCertificate cert;
    const Eigen::VectorXcd eig = model.eigenvalues();

    std::vector<Complex> values(eig.data(), eig.data() + eig.size());
    std::sort(values.begin(), values.end(), [](const Complex& a, const Complex& b) { return std::abs(a) < std::abs(b); });
    Eigen::Index marginal = 0;
    while (marginal < static_cast<Eigen::Index>(values.size()) && std::abs(values[static_cast<std::size_t>(marginal)]) < kMarginalTol) {
        ++marginal;
    }
    if (marginal > 0) {
        // Left null vectors with w B = 0 are uncontrollable, right ones with C v = 0 unobservable.
        const Eigen::MatrixXd right = null_space(model.A);
        const Eigen::MatrixXd left  = null_space(model.A.transpose());
        const Eigen::Index    hidden =
            std::max(annihilated_dimension(left, model.B.transpose()), annihilated_dimension(right, model.C));
        cert.hidden_modes = static_cast<int>(std::min(marginal, hidden));
    }
    cert.max_re_eigenvalue = -std::numeric_limits<double>::infinity();
    for (std::size_t k = static_cast<std::size_t>(cert.hidden_modes); k < values.size(); ++k) {
        cert.max_re_eigenvalue = std::max(cert.max_re_eigenvalue, values[k].real());
    }
    cert.stable = cert.max_re_eigenvalue < -kHurwitzMargin;
    if (grid && cert.stable) cert.gamma_hinf = hinf_estimate(model, *grid);
    return cert;
}

std::vector<FrequencyDependenceRow> frequency_dependence_experiment(const NetworkModel& net, std::span<const double> alphas,
                                                                    const Eigen::VectorXd& shape, double t_end, double dt) {
    if (!(net.coupling() == RationalFunction({1.0}, {0.0, 1.0}))) {
        throw Error(ErrorKind::PreconditionNotMet, "the frequency-dependence experiment needs f(s) = 1/s");
    }
    if (!net.laplacian().connected()) throw Error(ErrorKind::Disconnected, "the frequency-dependence experiment needs lambda2 > 0");
    const StateSpaceModel model = assemble_closed_loop(net);
    const auto            cert  = stability_check(model);
    if (!cert.stable) {
        throw Error(ErrorKind::UnstableModel, "closed loop has max Re(eig) = " + std::to_string(cert.max_re_eigenvalue));
    }
    std::vector<FrequencyDependenceRow> rows;
    for (double alpha : alphas) {
        const InputSignal input{InputFamily::sinusoid, alpha, shape};
        SimulationResult  result = simulate(model, input, t_end, dt);
        result.coherent_output   = coherent_reference(net, input, t_end, dt);
        rows.push_back({alpha, deviation_metrics(result).first});
    }
    return rows;
}

}  // namespace coherence
