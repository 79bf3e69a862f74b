#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace coherence {

struct Edge {
    int    i = 0;
    int    j = 0;
    double weight = 1.0;
};

enum class Topology { complete, ring, star, path };

/**
 * @brief Weighted symmetric graph Laplacian with its spectrum cached.
 *
 * Eigenvalues are ascending; the first eigenvector is exactly 1/sqrt(n).
 * Eigenvalues below 1e-10 * lambda_max form the zero cluster and are stored as
 * exact zeros, so lambda2() == 0 whenever the graph is disconnected.
 *
 * Scaling keeps the unscaled data and a cumulative factor, which makes
 * scale(scale(L, a), b) and scale(L, a * b) identical.
 */
class LaplacianMatrix {
   public:
    static constexpr double kZeroClusterTol = 1e-10;

    /// Throws SelfLoop, NonPositiveWeight or NodeOutOfRange. Duplicate edges add up.
    static LaplacianMatrix from_edge_list(const std::vector<Edge>& edges, int n);
    /// Throws TooFewNodes for n < 2.
    static LaplacianMatrix build(Topology kind, int n, double weight = 1.0);

    /// alpha * L; throws NonPositiveAlpha.
    LaplacianMatrix scaled(double alpha) const;

    int                    order() const noexcept { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const noexcept { return entries_; }
    const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
    const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }
    double                 lambda2() const noexcept { return order() > 1 ? eigenvalues_(1) : 0.0; }
    double                 scale() const noexcept { return scale_; }
    /// Size of the zero eigenvalue cluster (1 for a connected graph).
    int  zero_multiplicity() const noexcept { return zero_multiplicity_; }
    bool connected() const noexcept { return zero_multiplicity_ == 1; }
    bool is_zero() const noexcept { return base_.isZero(0.0); }

   private:
    LaplacianMatrix(Eigen::MatrixXd base, Eigen::VectorXd base_eigenvalues, Eigen::MatrixXd eigenvectors,
                    int zero_multiplicity, double scale);
    static LaplacianMatrix from_matrix(Eigen::MatrixXd entries);

    Eigen::MatrixXd base_;
    Eigen::VectorXd base_eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
    int             zero_multiplicity_ = 1;
    double          scale_             = 1.0;
    Eigen::MatrixXd entries_;
    Eigen::VectorXd eigenvalues_;
};

/**
 * Parses an edge-list file body: one `i j w` triple per line, `#` comments,
 * optional `n=<count>` header (also accepted as `# n=<count>`). Without a
 * header the node count is the largest index plus one. Throws ConfigParse.
 */
LaplacianMatrix parse_edge_list(const std::string& text);
LaplacianMatrix read_edge_list(const std::string& path);

}  // namespace coherence
