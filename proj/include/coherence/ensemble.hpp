#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coherence/csv.hpp"
#include "coherence/network.hpp"

namespace coherence {

enum class DistributionKind { uniform, truncated_normal, point };

/// Bounded parameter law. A truncated normal with sd = 0 acts as a point mass.
struct Distribution {
    DistributionKind kind = DistributionKind::point;
    double           lo   = 0.0;  // support bounds (uniform, truncated normal)
    double           hi   = 0.0;
    double           mu   = 0.0;  // normal location, or the point value
    double           sd   = 0.0;

    static Distribution uniform(double lo, double hi) { return {DistributionKind::uniform, lo, hi, 0.0, 0.0}; }
    static Distribution normal(double mean, double sd, double lo, double hi) {
        return {DistributionKind::truncated_normal, lo, hi, mean, sd};
    }
    static Distribution point(double v) { return {DistributionKind::point, v, v, v, 0.0}; }

    /// Throws InvalidDistribution for empty or non-finite supports and sd < 0.
    void   validate() const;
    bool   is_point() const noexcept;
    double mean() const;
    double support_min() const noexcept;
};

/**
 * Node families with random coefficients:
 *   swing          g = 1/(m s + d)                       params m, d
 *   swing_turbine  g = 1/(m s + d + r/(tau s + 1))       params m, d, r, tau
 *   custom_coeffs  g = sum b_k s^k / sum a_k s^k         params num0.., den0..
 */
enum class EnsembleFamily { swing, swing_turbine, custom_coeffs };

struct EnsembleSpec {
    EnsembleFamily                      family = EnsembleFamily::swing;
    std::map<std::string, Distribution> params;
    std::uint64_t                       seed = 0;

    /// Throws InvalidDistribution when a parameter is missing, unknown, or
    /// could produce an improper node or a non-positive leading coefficient.
    void validate() const;
    /// g^-1 is affine in the random parameters (and so E g^-1 has closed form).
    bool is_affine() const;
};

/// Stream index used for trial `trial` of network size n.
inline std::uint64_t trial_stream(std::uint64_t n, std::uint64_t trial) { return (n << 32) | trial; }

/// n independent nodes; the same (seed, stream) always gives the same draws.
std::vector<RationalFunction> sample_nodes(const EnsembleSpec& spec, int n, std::uint64_t stream);

/// ghat = (E g^-1)^-1 with the expectations substituted. Throws NotAffine.
RationalFunction expected_coherent_analytic(const EnsembleSpec& spec);

/// ghat estimated pointwise from M fresh draws of g^-1.
class MonteCarloCoherent {
   public:
    MonteCarloCoherent(const EnsembleSpec& spec, int draws, std::uint64_t stream);

    int     draws() const noexcept { return static_cast<int>(inverses_.size()); }
    Complex mean_inverse(Complex s) const;
    /// Standard error of mean_inverse(s) (per component, combined as a modulus).
    double  inverse_stderr(Complex s) const;
    Complex eval(Complex s) const { return 1.0 / mean_inverse(s); }

   private:
    std::vector<RationalFunction> inverses_;
};

/// Stream reserved for the Monte-Carlo ghat inside the concentration experiments.
inline constexpr std::uint64_t kReferenceStream   = 0xffffffffffffffffULL;
inline constexpr int           kReferenceMcDraws  = 20000;

struct ConcentrationResult {
    std::vector<int>                 sizes;
    std::vector<std::vector<double>> deviations;  // [size][trial]
    double                           epsilon = 0.0;
    std::vector<double>              medians;
    std::vector<double>              prob_estimates;
    std::string                      reference;  // "analytic_affine" or "monte_carlo(M)"
    bool                             uniform_continuity_certified = false;
};

/**
 * Per (n, trial): sup over the region grid of |gbar_n(s) - ghat(s)|. gbar_n is
 * formed symbolically when the family is affine (so point masses give exactly
 * zero) and pointwise otherwise. Sizes must be positive and strictly increasing.
 */
ConcentrationResult concentration_experiment(const EnsembleSpec& spec, const FrequencyRegion& region,
                                             std::span<const int> sizes, int trials, double epsilon);

/// Same protocol with deviation sup_S ||T_n(s) - (1/n) ghat(s) 11^T||, f = 1 and
/// the complete graph on n nodes.
ConcentrationResult full_network_concentration(const EnsembleSpec& spec, const FrequencyRegion& region,
                                               std::span<const int> sizes, int trials, double epsilon);

/// Recomputes medians and prob_estimates for a new epsilon.
void set_epsilon(ConcentrationResult& result, double epsilon);

double median(std::vector<double> values);

/// `n,trial,sup_deviation` rows.
CsvDocument concentration_csv(const ConcentrationResult& result);
/// `n,median_dev,prob_ge_eps` rows.
CsvDocument concentration_summary_csv(const ConcentrationResult& result);

}  // namespace coherence
