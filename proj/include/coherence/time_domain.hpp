#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coherence/network.hpp"
#include "coherence/state_space.hpp"

namespace coherence {

enum class InputFamily { step, sinusoid, exp_approach };

/**
 * u(t) = v(t) * shape with v = 1 (step), sin(alpha t) (sinusoid) or
 * 1 - exp(-alpha t) (exp_approach, Laplace form alpha/(s(s+alpha))).
 * alpha = 0 turns the last two families into the zero signal.
 */
struct InputSignal {
    InputFamily     family = InputFamily::step;
    double          alpha  = 0.0;
    Eigen::VectorXd shape;

    double profile(double t) const;
};

struct SimulationResult {
    std::vector<double>            times;
    Eigen::MatrixXd                node_outputs;  // outputs x samples
    std::optional<Eigen::VectorXd> coherent_output;
    std::optional<Eigen::VectorXd> coi_output;
    double                         deviation_linf = 0.0;
};

struct StabilityCertificate {
    bool                  stable            = false;
    double                max_re_eigenvalue = 0.0;
    int                   hidden_modes      = 0;  // near-zero modes dropped as uncontrollable or unobservable
    std::optional<double> gamma_hinf;
};

/**
 * Realization of u -> y for y = G (u - f L y). Node realizations are stacked
 * block-diagonally, f is realized once per channel of z = L y and the direct
 * feedthrough loop is eliminated. With L = 0 the f states are left out.
 * Throws AlgebraicLoopSingular when I + D_G D_F L is singular.
 */
StateSpaceModel assemble_closed_loop(const NetworkModel& net);

/// min(1e-2, 0.1 / max|eig(A)|).
double default_time_step(const StateSpaceModel& model);

/**
 * Fixed-step RK4 from the zero state, sampled at k*dt for k = 0..floor(t_end/dt).
 * Throws UnstableModel when some eigenvalue has real part above 1e-6,
 * LengthMismatch when the input shape does not fit the model.
 */
SimulationResult simulate(const StateSpaceModel& model, const InputSignal& input, double t_end, double dt);

/// Response of gbar to the scalar input (1^T u(t)) / n on the simulation grid.
Eigen::VectorXd coherent_reference(const NetworkModel& net, const InputSignal& input, double t_end, double dt);

/// Closed-loop simulation with the coherent reference and, when inertias are
/// given, the center-of-inertia output filled in.
SimulationResult run_experiment(const NetworkModel& net, const InputSignal& input, double t_end, double dt,
                                std::optional<Eigen::VectorXd> inertias = std::nullopt);

/// (max_i sup_t |y_i - ybar|, per-node sup). Throws MissingReference.
std::pair<double, Eigen::VectorXd> deviation_metrics(const SimulationResult& result);

/// sum_i m_i y_i(t) / sum_i m_i. Throws LengthMismatch or InvalidArgument.
Eigen::VectorXd coi_frequency(const SimulationResult& result, const Eigen::VectorXd& inertias);

/// Eigenvalue check with hidden near-zero modes removed (PBH test), and when
/// a grid is given the largest singular value of the response over it.
StabilityCertificate stability_check(const StateSpaceModel& model,
                                     const std::optional<FrequencyRegion>& grid = std::nullopt);

/// Largest singular value of a response over the grid; points where sI - A is
/// numerically singular are skipped.
double hinf_estimate(const StateSpaceModel& model, const FrequencyRegion& grid);

struct FrequencyDependenceRow {
    double alpha          = 0.0;
    double linf_deviation = 0.0;
};

/**
 * Sinusoidal inputs sin(alpha t) * shape for each alpha. Needs f = 1/s
 * (PreconditionNotMet), lambda2 > 0 (Disconnected) and a stable loop
 * (UnstableModel).
 */
std::vector<FrequencyDependenceRow> frequency_dependence_experiment(const NetworkModel& net, std::span<const double> alphas,
                                                                    const Eigen::VectorXd& shape, double t_end, double dt);

}  // namespace coherence
