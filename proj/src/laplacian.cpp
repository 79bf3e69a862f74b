#include "coherence/laplacian.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "coherence/error.hpp"

namespace coherence {

LaplacianMatrix::LaplacianMatrix(Eigen::MatrixXd base, Eigen::VectorXd base_eigenvalues, Eigen::MatrixXd eigenvectors,
                                 int zero_multiplicity, double scale)
    : base_(std::move(base)),
      base_eigenvalues_(std::move(base_eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      zero_multiplicity_(zero_multiplicity),
      scale_(scale),
      entries_(scale_ * base_),
      eigenvalues_(scale_ * base_eigenvalues_) {}

LaplacianMatrix LaplacianMatrix::from_matrix(Eigen::MatrixXd entries) {
    const Eigen::Index n = entries.rows();
    if (n < 1 || entries.cols() != n) throw Error(ErrorKind::InvalidArgument, "Laplacian must be square and nonempty");
    const double norm = entries.norm();
    if ((entries - entries.transpose()).norm() > 1e-12 * norm) {
        throw Error(ErrorKind::InvalidArgument, "Laplacian is not symmetric");
    }
    if ((entries * Eigen::VectorXd::Ones(n)).norm() > 1e-10 * norm) {
        throw Error(ErrorKind::InvalidArgument, "Laplacian rows do not sum to zero");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::InvalidArgument, "Laplacian eigensolve failed");
    Eigen::VectorXd values  = solver.eigenvalues();
    Eigen::MatrixXd vectors = solver.eigenvectors();

    const double lambda_max = values(n - 1);
    if (values(0) < -1e-10 * std::max(1.0, lambda_max)) {
        throw Error(ErrorKind::InvalidArgument, "Laplacian is not positive semidefinite");
    }
    int zeros = 0;
    while (zeros < n && values(zeros) <= kZeroClusterTol * lambda_max) ++zeros;
    zeros = std::max(zeros, 1);
    values.head(zeros).setZero();

    // Rotate the null-space basis so its first vector is exactly 1/sqrt(n).
    const double    unit = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::MatrixXd stacked(n, zeros + 1);
    stacked.col(0).setConstant(unit);
    stacked.rightCols(zeros) = vectors.leftCols(zeros);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, zeros);
    vectors.leftCols(zeros) = q;
    vectors.col(0).setConstant(unit);

    return LaplacianMatrix(std::move(entries), std::move(values), std::move(vectors), zeros, 1.0);
}

LaplacianMatrix LaplacianMatrix::from_edge_list(const std::vector<Edge>& edges, int n) {
    if (n < 1) throw Error(ErrorKind::TooFewNodes, "graph needs at least one node");
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : edges) {
        if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
            throw Error(ErrorKind::NodeOutOfRange,
                        "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") outside 0.." + std::to_string(n - 1));
        }
        if (e.i == e.j) throw Error(ErrorKind::SelfLoop, "self loop at node " + std::to_string(e.i));
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw Error(ErrorKind::NonPositiveWeight, "edge weight must be positive and finite");
        }
        l(e.i, e.j) -= e.weight;
        l(e.j, e.i) -= e.weight;
        l(e.i, e.i) += e.weight;
        l(e.j, e.j) += e.weight;
    }
    return from_matrix(std::move(l));
}

LaplacianMatrix LaplacianMatrix::build(Topology kind, int n, double weight) {
    if (n < 2) throw Error(ErrorKind::TooFewNodes, "topology builders need n >= 2");
    std::vector<Edge> edges;
    switch (kind) {
        case Topology::complete:
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) edges.push_back({i, j, weight});
            break;
        case Topology::ring:
            for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight});
            if (n > 2) edges.push_back({n - 1, 0, weight});
            break;
        case Topology::star:
            for (int i = 1; i < n; ++i) edges.push_back({0, i, weight});
            break;
        case Topology::path:
            for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight});
            break;
    }
    return from_edge_list(edges, n);
}

LaplacianMatrix LaplacianMatrix::scaled(double alpha) const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::NonPositiveAlpha, "scale factor must be positive");
    return LaplacianMatrix(base_, base_eigenvalues_, eigenvectors_, zero_multiplicity_, scale_ * alpha);
}

LaplacianMatrix parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::string        line;
    std::vector<Edge>  edges;
    int                declared = -1;
    int                max_index = -1;
    int                lineno    = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        while (!view.empty() && std::isspace(static_cast<unsigned char>(view.front()))) view.remove_prefix(1);
        bool comment = false;
        if (!view.empty() && view.front() == '#') {
            comment = true;
            view.remove_prefix(1);
            while (!view.empty() && std::isspace(static_cast<unsigned char>(view.front()))) view.remove_prefix(1);
        }
        if (view.starts_with("n=")) {
            view.remove_prefix(2);
            auto [ptr, ec] = std::from_chars(view.data(), view.data() + view.size(), declared);
            if (ec != std::errc() || declared < 1) {
                throw Error(ErrorKind::ConfigParse, "bad node-count header on line " + std::to_string(lineno));
            }
            continue;
        }
        if (comment || view.empty()) continue;
        std::istringstream fields{std::string(view)};
        Edge               e;
        if (!(fields >> e.i >> e.j >> e.weight)) {
            throw Error(ErrorKind::ConfigParse, "expected 'i j w' on line " + std::to_string(lineno));
        }
        std::string extra;
        if (fields >> extra && !extra.starts_with('#')) {
            throw Error(ErrorKind::ConfigParse, "trailing data on line " + std::to_string(lineno));
        }
        max_index = std::max({max_index, e.i, e.j});
        edges.push_back(e);
    }
    const int n = declared > 0 ? declared : max_index + 1;
    if (n < 1) throw Error(ErrorKind::ConfigParse, "edge list defines no nodes");
    return LaplacianMatrix::from_edge_list(edges, n);
}

LaplacianMatrix read_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read edge list '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_edge_list(buf.str());
}

}  // namespace coherence
