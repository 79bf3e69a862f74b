#include "coherence/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "coherence/error.hpp"

namespace coherence {

namespace {

/// Per-stream generator. The engine and seed_seq algorithms are fixed by the
/// standard; the conversions to double and normal are written out here because
/// the std distributions are implementation-defined.
class Stream {
   public:
    Stream(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double standard_normal() {
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

   private:
    std::mt19937_64 engine_;
};

constexpr int kMaxRejections = 10000;

double draw(const Distribution& d, Stream& rng) {
    switch (d.kind) {
        case DistributionKind::point: return d.mu;
        case DistributionKind::uniform: return d.lo + (d.hi - d.lo) * rng.uniform01();
        case DistributionKind::truncated_normal:
            if (d.sd == 0.0) return d.mu;
            for (int k = 0; k < kMaxRejections; ++k) {
                const double x = d.mu + d.sd * rng.standard_normal();
                if (x >= d.lo && x <= d.hi) return x;
            }
            throw Error(ErrorKind::InvalidDistribution, "truncated normal rejected " + std::to_string(kMaxRejections) +
                                                            " draws; the truncation window is too far in the tail");
    }
    return d.mu;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Index k of a custom-family key "num<k>" / "den<k>", or -1.
int coefficient_index(const std::string& key, std::string_view prefix) {
    if (!key.starts_with(prefix) || key.size() == prefix.size()) return -1;
    int k = 0;
    for (std::size_t i = prefix.size(); i < key.size(); ++i) {
        if (key[i] < '0' || key[i] > '9') return -1;
        k = k * 10 + (key[i] - '0');
    }
    return k;
}

int coefficient_count(const EnsembleSpec& spec, std::string_view prefix) {
    int count = 0;
    while (spec.params.contains(std::string(prefix) + std::to_string(count))) ++count;
    return count;
}

const Distribution& param(const EnsembleSpec& spec, const std::string& key) {
    auto it = spec.params.find(key);
    if (it == spec.params.end()) throw Error(ErrorKind::InvalidDistribution, "missing ensemble parameter '" + key + "'");
    return it->second;
}

RationalFunction build_node(const EnsembleSpec& spec, const std::map<std::string, double>& v) {
    switch (spec.family) {
        case EnsembleFamily::swing: return RationalFunction({1.0}, {v.at("d"), v.at("m")});
        case EnsembleFamily::swing_turbine: {
            const double m = v.at("m"), d = v.at("d"), r = v.at("r"), tau = v.at("tau");
            return RationalFunction({1.0, tau}, {d + r, m + d * tau, m * tau});
        }
        case EnsembleFamily::custom_coeffs: {
            std::vector<double> num(static_cast<std::size_t>(coefficient_count(spec, "num")));
            std::vector<double> den(static_cast<std::size_t>(coefficient_count(spec, "den")));
            for (std::size_t k = 0; k < num.size(); ++k) num[k] = v.at("num" + std::to_string(k));
            for (std::size_t k = 0; k < den.size(); ++k) den[k] = v.at("den" + std::to_string(k));
            return RationalFunction(Polynomial(num), Polynomial(den));
        }
    }
    throw Error(ErrorKind::InvalidDistribution, "unknown ensemble family");
}

void check_sizes(std::span<const int> sizes, int trials) {
    if (sizes.empty()) throw Error(ErrorKind::InvalidArgument, "concentration experiment needs at least one size");
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (sizes[k] < 1 || (k > 0 && sizes[k] <= sizes[k - 1])) {
            throw Error(ErrorKind::NotIncreasing, "network sizes must be positive and strictly increasing");
        }
    }
    if (trials < 1) throw Error(ErrorKind::InvalidArgument, "concentration experiment needs trials >= 1");
}

struct Reference {
    std::vector<Complex> values;
    std::string          label;
    bool                 continuity_certified = false;
};

Reference reference_values(const EnsembleSpec& spec, const std::vector<Complex>& points, const FrequencyRegion& region) {
    Reference ref;
    if (spec.is_affine()) {
        const RationalFunction ghat = expected_coherent_analytic(spec);
        for (const auto& p : ghat.poles()) {
            if (region.contains(p)) {
                throw Error(ErrorKind::RegionContainsSingularity, "region contains a pole of the expected coherent dynamics");
            }
        }
        for (const Complex& s : points) ref.values.push_back(ghat.eval(s));
        ref.label                = "analytic_affine";
        ref.continuity_certified = true;
    } else {
        const MonteCarloCoherent mc(spec, kReferenceMcDraws, kReferenceStream);
        for (const Complex& s : points) ref.values.push_back(mc.eval(s));
        ref.label = "monte_carlo(" + std::to_string(kReferenceMcDraws) + ")";
    }
    return ref;
}

template <class Deviation>
ConcentrationResult run_trials(const EnsembleSpec& spec, const FrequencyRegion& region, std::span<const int> sizes, int trials,
                               double epsilon, Deviation&& deviation) {
    spec.validate();
    check_sizes(sizes, trials);
    const std::vector<Complex> points = region.points();
    const Reference            ref    = reference_values(spec, points, region);

    ConcentrationResult result;
    result.sizes.assign(sizes.begin(), sizes.end());
    result.reference                    = ref.label;
    result.uniform_continuity_certified = ref.continuity_certified;
    for (int n : sizes) {
        std::vector<double> devs;
        devs.reserve(static_cast<std::size_t>(trials));
        for (int t = 0; t < trials; ++t) {
            const auto nodes = sample_nodes(spec, n, trial_stream(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)));
            devs.push_back(deviation(nodes, points, ref.values));
        }
        result.deviations.push_back(std::move(devs));
    }
    set_epsilon(result, epsilon);
    return result;
}

}  // namespace

void Distribution::validate() const {
    const bool finite = std::isfinite(lo) && std::isfinite(hi) && std::isfinite(mu) && std::isfinite(sd);
    if (!finite) throw Error(ErrorKind::InvalidDistribution, "distribution parameters must be finite");
    switch (kind) {
        case DistributionKind::point: return;
        case DistributionKind::uniform:
            if (!(lo <= hi)) throw Error(ErrorKind::InvalidDistribution, "uniform needs lo <= hi");
            return;
        case DistributionKind::truncated_normal:
            if (!(sd >= 0.0)) throw Error(ErrorKind::InvalidDistribution, "normal needs sd >= 0");
            if (!(lo <= hi)) throw Error(ErrorKind::InvalidDistribution, "truncation needs lo <= hi");
            if (sd == 0.0 && (mu < lo || mu > hi)) {
                throw Error(ErrorKind::InvalidDistribution, "degenerate normal lies outside its truncation window");
            }
            return;
    }
}

bool Distribution::is_point() const noexcept {
    switch (kind) {
        case DistributionKind::point: return true;
        case DistributionKind::uniform: return lo == hi;
        case DistributionKind::truncated_normal: return sd == 0.0 || lo == hi;
    }
    return false;
}

double Distribution::mean() const {
    validate();
    switch (kind) {
        case DistributionKind::point: return mu;
        case DistributionKind::uniform: return 0.5 * (lo + hi);
        case DistributionKind::truncated_normal: {
            if (sd == 0.0) return mu;
            if (lo == hi) return lo;
            const double a    = (lo - mu) / sd;
            const double b    = (hi - mu) / sd;
            const double mass = normal_cdf(b) - normal_cdf(a);
            if (!(mass > 1e-300)) throw Error(ErrorKind::InvalidDistribution, "truncation window carries no mass");
            return std::clamp(mu + sd * (normal_pdf(a) - normal_pdf(b)) / mass, lo, hi);
        }
    }
    return mu;
}

double Distribution::support_min() const noexcept {
    if (kind == DistributionKind::point || (kind == DistributionKind::truncated_normal && sd == 0.0)) return mu;
    return lo;
}

void EnsembleSpec::validate() const {
    for (const auto& [key, dist] : params) dist.validate();
    auto require_positive = [&](const std::string& key) {
        if (!(param(*this, key).support_min() > 0.0)) {
            throw Error(ErrorKind::InvalidDistribution, "parameter '" + key + "' must be supported on positive values");
        }
    };
    switch (family) {
        case EnsembleFamily::swing:
        case EnsembleFamily::swing_turbine: {
            const std::vector<std::string> keys = family == EnsembleFamily::swing
                                                      ? std::vector<std::string>{"d", "m"}
                                                      : std::vector<std::string>{"d", "m", "r", "tau"};
            for (const auto& [key, dist] : params) {
                if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                    throw Error(ErrorKind::InvalidDistribution, "unknown parameter '" + key + "' for this family");
                }
            }
            for (const auto& key : keys) param(*this, key);
            require_positive("m");
            if (family == EnsembleFamily::swing_turbine) require_positive("tau");
            return;
        }
        case EnsembleFamily::custom_coeffs: {
            const int nn = coefficient_count(*this, "num");
            const int nd = coefficient_count(*this, "den");
            for (const auto& [key, dist] : params) {
                const int k_num = coefficient_index(key, "num");
                const int k_den = coefficient_index(key, "den");
                if (!((k_num >= 0 && k_num < nn) || (k_den >= 0 && k_den < nd))) {
                    throw Error(ErrorKind::InvalidDistribution, "unexpected custom parameter '" + key + "'");
                }
            }
            if (nn < 1 || nd < 1) throw Error(ErrorKind::InvalidDistribution, "custom family needs num0.. and den0..");
            if (nn > nd) throw Error(ErrorKind::InvalidDistribution, "custom family would be improper");
            require_positive("den" + std::to_string(nd - 1));
            return;
        }
    }
}

bool EnsembleSpec::is_affine() const {
    switch (family) {
        case EnsembleFamily::swing: return true;
        case EnsembleFamily::swing_turbine: return param(*this, "tau").is_point();
        case EnsembleFamily::custom_coeffs:
            for (int k = 0, nn = coefficient_count(*this, "num"); k < nn; ++k) {
                if (!param(*this, "num" + std::to_string(k)).is_point()) return false;
            }
            return true;
    }
    return false;
}

std::vector<RationalFunction> sample_nodes(const EnsembleSpec& spec, int n, std::uint64_t stream) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "sample_nodes needs n >= 1");
    spec.validate();
    Stream                        rng(spec.seed, stream);
    std::vector<RationalFunction> nodes;
    nodes.reserve(static_cast<std::size_t>(n));
    std::map<std::string, double> values;
    for (int i = 0; i < n; ++i) {
        for (const auto& [key, dist] : spec.params) values[key] = draw(dist, rng);
        RationalFunction g = build_node(spec, values);
        if (g.is_zero()) throw Error(ErrorKind::InvalidDistribution, "sampled node is identically zero");
        nodes.push_back(std::move(g));
    }
    return nodes;
}

RationalFunction expected_coherent_analytic(const EnsembleSpec& spec) {
    spec.validate();
    if (!spec.is_affine()) throw Error(ErrorKind::NotAffine, "g^-1 is not affine in the random parameters");
    std::map<std::string, double> means;
    for (const auto& [key, dist] : spec.params) means[key] = dist.mean();
    return build_node(spec, means);
}

MonteCarloCoherent::MonteCarloCoherent(const EnsembleSpec& spec, int draws, std::uint64_t stream) {
    if (draws < 2) throw Error(ErrorKind::InvalidArgument, "Monte-Carlo estimate needs at least two draws");
    for (const auto& g : sample_nodes(spec, draws, stream)) inverses_.push_back(g.reciprocal());
}

Complex MonteCarloCoherent::mean_inverse(Complex s) const {
    Complex sum = 0.0;
    for (const auto& h : inverses_) sum += h.eval(s);
    return sum / static_cast<double>(inverses_.size());
}

double MonteCarloCoherent::inverse_stderr(Complex s) const {
    const Complex mean = mean_inverse(s);
    double        ss   = 0.0;
    for (const auto& h : inverses_) ss += std::norm(h.eval(s) - mean);
    const double m = static_cast<double>(inverses_.size());
    return std::sqrt(ss / (m - 1.0) / m);
}

ConcentrationResult concentration_experiment(const EnsembleSpec& spec, const FrequencyRegion& region,
                                             std::span<const int> sizes, int trials, double epsilon) {
    const bool symbolic = spec.is_affine();
    return run_trials(spec, region, sizes, trials, epsilon,
                      [symbolic](const std::vector<RationalFunction>& nodes, const std::vector<Complex>& points,
                                 const std::vector<Complex>& ghat) {
                          double sup = 0.0;
                          if (symbolic) {
                              const RationalFunction gbar = harmonic_mean(nodes);
                              for (std::size_t k = 0; k < points.size(); ++k) {
                                  sup = std::max(sup, std::abs(gbar.eval(points[k]) - ghat[k]));
                              }
                              return sup;
                          }
                          const double n = static_cast<double>(nodes.size());
                          for (std::size_t k = 0; k < points.size(); ++k) {
                              Complex sum = 0.0;
                              for (const auto& g : nodes) sum += g.den()(points[k]) / g.num()(points[k]);
                              sup = std::max(sup, std::abs(n / sum - ghat[k]));
                          }
                          return sup;
                      });
}

ConcentrationResult full_network_concentration(const EnsembleSpec& spec, const FrequencyRegion& region,
                                               std::span<const int> sizes, int trials, double epsilon) {
    const RationalFunction unit = RationalFunction::constant(1.0);
    return run_trials(spec, region, sizes, trials, epsilon,
                      [&unit](const std::vector<RationalFunction>& nodes, const std::vector<Complex>& points,
                              const std::vector<Complex>& ghat) {
                          const int          n = static_cast<int>(nodes.size());
                          const NetworkModel net(nodes, unit, LaplacianMatrix::build(Topology::complete, n));
                          double             sup = 0.0;
                          for (std::size_t k = 0; k < points.size(); ++k) {
                              Eigen::MatrixXcd gap = eval_T(net, points[k]);
                              gap.array() -= ghat[k] / static_cast<double>(n);
                              sup = std::max(sup, spectral_norm(gap));
                          }
                          return sup;
                      });
}

double median(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorKind::InvalidArgument, "median of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

void set_epsilon(ConcentrationResult& result, double epsilon) {
    if (!(epsilon >= 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be non-negative");
    result.epsilon = epsilon;
    result.medians.clear();
    result.prob_estimates.clear();
    for (const auto& devs : result.deviations) {
        result.medians.push_back(median(devs));
        const auto hits = std::count_if(devs.begin(), devs.end(), [epsilon](double d) { return d >= epsilon; });
        result.prob_estimates.push_back(static_cast<double>(hits) / static_cast<double>(devs.size()));
    }
}

namespace {

void describe(CsvDocument& doc, const ConcentrationResult& result) {
    doc.meta("epsilon", format_number(result.epsilon));
    doc.meta("reference", result.reference);
    doc.meta("uniform_continuity_certified", result.uniform_continuity_certified ? "true" : "false");
}

}  // namespace

CsvDocument concentration_csv(const ConcentrationResult& result) {
    CsvDocument doc;
    describe(doc, result);
    doc.header({"n", "trial", "sup_deviation"});
    for (std::size_t k = 0; k < result.sizes.size(); ++k) {
        for (std::size_t t = 0; t < result.deviations[k].size(); ++t) doc.row() << result.sizes[k] << t << result.deviations[k][t];
    }
    return doc;
}

CsvDocument concentration_summary_csv(const ConcentrationResult& result) {
    CsvDocument doc;
    describe(doc, result);
    doc.header({"n", "median_dev", "prob_ge_eps"});
    for (std::size_t k = 0; k < result.sizes.size(); ++k) {
        doc.row() << result.sizes[k] << result.medians[k] << result.prob_estimates[k];
    }
    return doc;
}

}  // namespace coherence
