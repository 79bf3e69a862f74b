#pragma once

#include <optional>
#include <string>

#include "coherence/rational_function.hpp"

namespace coherence {

enum class PassivityMode { positive_real, osp };

enum class PassivityKind { positive_real, output_strictly_passive, fails };

/**
 * Outcome of a sampled passivity test. This is a numerical certificate: the
 * defining inequality is only checked on the grid described in grid_resolution
 * (pole locations are checked exactly via roots).
 */
struct PassivityCertificate {
    PassivityKind          kind    = PassivityKind::fails;
    double                 epsilon = 0.0;
    std::optional<Complex> witness;
    std::string            grid_resolution;
};

/// Sampling used by passivity_check.
struct PassivityGrid {
    int    frequencies = 64;
    double omega_min   = 1e-3;
    double omega_max   = 1e3;
    double offset      = 1e-6;  // Re(s) of the shifted boundary line and the DC sample
    int    arc_points  = 16;    // samples on the right half arc |s| = omega_max
};

/// Positive-real (Re f >= 0) or output-strict-passivity (Re g >= eps |g|^2)
/// test over the closed right half plane. Throws Improper for improper r.
PassivityCertificate passivity_check(const RationalFunction& r, PassivityMode mode, const PassivityGrid& grid = {});

}  // namespace coherence
