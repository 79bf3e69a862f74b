#pragma once

#include <Eigen/Dense>

#include "coherence/rational_function.hpp"

namespace coherence {

/// Continuous-time realization x' = Ax + Bu, y = Cx + Du.
struct StateSpaceModel {
    Eigen::MatrixXd A, B, C, D;

    StateSpaceModel() = default;
    /// Throws InvalidArgument unless A is n x n, B n x m, C p x n and D p x m.
    StateSpaceModel(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c, Eigen::MatrixXd d);

    Eigen::Index states() const noexcept { return A.rows(); }
    Eigen::Index inputs() const noexcept { return B.cols(); }
    Eigen::Index outputs() const noexcept { return C.rows(); }

    /// C (sI - A)^-1 B + D.
    Eigen::MatrixXcd response(Complex s) const;

    Eigen::VectorXcd eigenvalues() const;
};

/// Controllable canonical realization of a proper function; throws Improper.
StateSpaceModel to_state_space(const RationalFunction& r);

}  // namespace coherence
