#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coherence/ensemble.hpp"
#include "coherence/error.hpp"
#include "coherence/network.hpp"
#include "coherence/time_domain.hpp"

namespace coherence::cli {

inline constexpr std::string_view kToolVersion = "netcoh 1.0.0";

enum class Command { analyze, bound, simulate, freqdep, concentrate, aggregate };

struct SweepConfig {
    std::vector<double>    alphas;  // connectivity scalings
    std::vector<double>    radii;   // pole-approach radii
    std::optional<Complex> pole;
    Complex                direction = 1.0;
};

struct BoundConfig {
    std::vector<Complex>  points;
    std::optional<double> M1;
    std::optional<double> M2;
};

struct EnsembleConfig {
    EnsembleSpec          spec;
    std::vector<int>      sizes;
    int                   trials = 100;
    std::optional<double> epsilon;  // default: a quarter of the median deviation at the smallest size
    bool                  full_network = false;
};

/// A fully parsed and validated run description.
struct RunConfig {
    Command                         command = Command::analyze;
    std::optional<NetworkModel>     network;
    std::optional<Eigen::VectorXd>  inertias;
    std::optional<FrequencyRegion>  region;
    SweepConfig                     sweep;
    BoundConfig                     bound;
    InputSignal                     input;
    std::vector<double>             input_alphas;  // sinusoid frequencies for freqdep
    double                          t_end = 60.0;
    std::optional<double>           dt;
    std::optional<EnsembleConfig>   ensemble;
    std::uint64_t                   seed = 0;
    std::string                     output_dir = "netcoh_out";
    std::string                     config_hash;
};

struct Overrides {
    std::optional<double>        alpha;
    std::optional<std::uint64_t> seed;
    std::optional<std::string>   out;
};

Command parse_command(std::string_view name);

/**
 * Parses a JSON config. Relative file references resolve against base_dir.
 * Throws ConfigParse for malformed input, Io for missing referenced files, and
 * the structural module errors (SelfLoop, Improper, ...) for invalid content.
 */
RunConfig parse_config(Command command, const std::string& text, const std::string& base_dir, const Overrides& overrides);

/// Runs one command, writing CSV artifacts into config.output_dir. Throws Error.
void run(const RunConfig& config, std::ostream& log);

/// 0 success, 2 config/structure, 3 singularity or precondition, 4 instability, 5 I/O.
int exit_code(ErrorKind kind) noexcept;

/// Full command-line entry point: parses argv, runs, reports `error: kind=...`
/// on stderr and returns the exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace coherence::cli
