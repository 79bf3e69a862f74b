#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "coherence/laplacian.hpp"
#include "coherence/rational_function.hpp"

namespace coherence {

/**
 * @brief Heterogeneous SISO network: node dynamics g_i, coupling f and a
 * Laplacian L, with closed loop T(s) = (I + G(s) f(s) L)^-1 G(s).
 */
class NetworkModel {
   public:
    /// Throws InvalidNetwork (n < 2, order mismatch, zero node) or Improper.
    NetworkModel(std::vector<RationalFunction> nodes, RationalFunction coupling, LaplacianMatrix laplacian);

    const std::vector<RationalFunction>& nodes() const noexcept { return nodes_; }
    const RationalFunction&              coupling() const noexcept { return coupling_; }
    const LaplacianMatrix&               laplacian() const noexcept { return laplacian_; }
    int                                  size() const noexcept { return static_cast<int>(nodes_.size()); }

    /// Same nodes and coupling on alpha * L.
    NetworkModel scaled(double alpha) const { return {nodes_, coupling_, laplacian_.scaled(alpha)}; }

   private:
    std::vector<RationalFunction> nodes_;
    RationalFunction              coupling_;
    LaplacianMatrix               laplacian_;
};

enum class RegionKind { rect_grid, vertical_segment };

/**
 * Sampled stand-in for a compact set S of complex frequencies. A vertical
 * segment is s = sigma + j*omega for omega in [omega_min, omega_max]; a
 * rectangular grid additionally spans Re(s) in [sigma, sigma_max]. Sampling is
 * uniform with `resolution` points per axis (log-spaced in omega when
 * log_omega is set, which needs omega_min > 0).
 */
struct FrequencyRegion {
    RegionKind kind       = RegionKind::vertical_segment;
    double     sigma      = 0.0;
    double     sigma_max  = 0.0;
    double     omega_min  = -1.0;
    double     omega_max  = 1.0;
    int        resolution = 21;
    bool       log_omega  = false;

    static FrequencyRegion segment(double sigma, double omega_min, double omega_max, int resolution);
    static FrequencyRegion rect(double sigma_min, double sigma_max, double omega_min, double omega_max, int resolution);

    /// Throws InvalidArgument when the parameters do not describe a region.
    void                 validate() const;
    std::vector<Complex> points() const;
    bool                 contains(const Complex& z) const;
};

/// Incoherence ||T(s) - (1/n) gbar(s) 11^T|| at one point, optionally with the
/// connectivity bound evaluated for majorants M1 >= |gbar(s)|, M2 >= max|g_i^-1(s)|.
struct IncoherenceReport {
    Complex               s;
    double                measured = 0.0;
    std::optional<double> bound;
    double                M1                     = 0.0;
    double                M2                     = 0.0;
    double                effective_connectivity = 0.0;
    bool                  bound_valid            = false;
};

struct Majorants {
    double M1 = 0.0;
    double M2 = 0.0;
};

/// Grid suprema are inflated by this factor before use as majorants.
inline constexpr double kMajorantSafety = 1.05;

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXcd& m);

/**
 * T(s) = (diag{g_i^-1(s)} + f(s) L)^-1 by direct solve. When some g_i vanishes
 * at s the equivalent (I + G f L)^-1 G form is used instead. Throws SingularAtS
 * at poles of T (or of f), NodeZeroAtS if the fallback is singular too.
 */
Eigen::MatrixXcd eval_T(const NetworkModel& net, Complex s);

/// V (V^T diag{g_i^-1} V + f Lambda)^-1 V^T, the eigenbasis route to T(s).
Eigen::MatrixXcd eval_T_eigenform(const NetworkModel& net, Complex s);

/// gbar(s) as a rational function (harmonic mean of the node dynamics).
RationalFunction coherent_dynamics(const NetworkModel& net);

/// gbar(s) evaluated pointwise as n / sum_i g_i^-1(s). Throws CoherentPoleAtS.
Complex coherent_value(const NetworkModel& net, Complex s);

IncoherenceReport incoherence(const NetworkModel& net, Complex s);

/**
 * Incoherence together with (M1 M2 + 1)^2 / (|f(s)| lambda2 - M2 - M1 M2^2),
 * present only when |f(s)| lambda2 exceeds M2 + M1 M2^2. Throws
 * InvalidMajorants if M1, M2 do not dominate the actual values at s and
 * Disconnected if lambda2 is zero.
 */
IncoherenceReport lemma_bound(const NetworkModel& net, Complex s, double M1, double M2);

/// Grid suprema of |gbar| and max_i |g_i^-1| over the region, times
/// kMajorantSafety. Throws RegionContainsSingularity if the region holds a pole
/// of gbar or a zero of some g_i.
Majorants estimate_majorants(const NetworkModel& net, const FrequencyRegion& region);

struct RegionSweep {
    std::vector<IncoherenceReport> reports;
    Majorants                      majorants;
    double                         sup_measured = 0.0;
    std::optional<double>          sup_bound;  // only when the bound holds at every grid point
};

RegionSweep sweep_region(const NetworkModel& net, const FrequencyRegion& region);

struct ConnectivityRow {
    double                         alpha   = 1.0;
    double                         lambda2 = 0.0;
    double                         sup_incoherence = 0.0;
    std::optional<double>          sup_bound;
    std::vector<IncoherenceReport> reports;
};

/// Sweep of alpha * L with majorants fixed from the unscaled region estimate.
/// Throws NotIncreasing unless alphas are positive and strictly increasing.
std::vector<ConnectivityRow> connectivity_sweep(const NetworkModel& net, const FrequencyRegion& region,
                                                std::span<const double> alphas);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct PoleApproachRow {
    double  radius      = 0.0;
    Complex s           = 0.0;
    double  incoherence = 0.0;
};

/// Incoherence at s = pole + radius * direction/|direction| for each radius.
/// Throws Disconnected, NotAPoleOfF, or PreconditionNotMet when the pole is a
/// pole or zero of gbar.
std::vector<PoleApproachRow> pole_approach_sweep(const NetworkModel& net, Complex pole_of_f,
                                                 std::span<const double> radii, Complex direction = 1.0);

/// Spectral-norm gap between T(s) of the homogeneous network and
/// (1/n) g 11^T + V_perp diag{1/(g^-1 + f lambda_i)} V_perp^T.
double homogeneous_decomposition_check(const RationalFunction& g, const RationalFunction& f,
                                       const LaplacianMatrix& L, Complex s);

/// Number of nodes with a zero at s0 (numerator root within 1e-7).
int nodal_multiplicity(const NetworkModel& net, Complex s0);

/// (sum_i g_i^-1)^-1 = gbar / n.
RationalFunction aggregate_dynamics(const NetworkModel& net);

}  // namespace coherence
