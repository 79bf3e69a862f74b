#include "coherence/state_space.hpp"

#include "coherence/error.hpp"

namespace coherence {

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c, Eigen::MatrixXd d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    const auto n = A.rows();
    if (A.cols() != n || B.rows() != n || C.cols() != n || D.rows() != C.rows() || D.cols() != B.cols()) {
        throw Error(ErrorKind::InvalidArgument, "inconsistent state-space dimensions");
    }
}

Eigen::MatrixXcd StateSpaceModel::response(Complex s) const {
    Eigen::MatrixXcd out = D.cast<Complex>();
    if (states() == 0) return out;
    Eigen::MatrixXcd resolvent = -A.cast<Complex>();
    resolvent.diagonal().array() += s;
    out += C.cast<Complex>() * resolvent.partialPivLu().solve(B.cast<Complex>());
    return out;
}

Eigen::VectorXcd StateSpaceModel::eigenvalues() const {
    if (states() == 0) return {};
    Eigen::EigenSolver<Eigen::MatrixXd> solver(A, false);
    return solver.eigenvalues();
}

StateSpaceModel to_state_space(const RationalFunction& r) {
    if (!r.is_proper()) throw Error(ErrorKind::Improper, "cannot realize an improper transfer function");
    const auto [num, den] = r.monic();
    const int n           = den.degree();

    Eigen::MatrixXd D(1, 1);
    D(0, 0) = num.degree() == n ? num.leading() : 0.0;
    if (n == 0) return {Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 1), Eigen::MatrixXd(1, 0), D};

    // Strictly proper remainder num - D * den.
    const Polynomial rest = num - den.scaled(D(0, 0));

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
    for (int k = 0; k < n; ++k) A(n - 1, k) = -den[static_cast<std::size_t>(k)];
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, 1);
    B(n - 1, 0)       = 1.0;
    Eigen::MatrixXd C(1, n);
    for (int k = 0; k < n; ++k) C(0, k) = rest[static_cast<std::size_t>(k)];
    return {A, B, C, D};
}

}  // namespace coherence
