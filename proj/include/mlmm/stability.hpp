#pragma once

#include <stdexcept>
#include <vector>

#include "mlmm/core.hpp"
#include "mlmm/methods.hpp"

// Stability-region analysis: boundary locus curves (generic and closed-form),
// deterministic polynomial root finding, point stability verdicts, and
// region rasters.

namespace mlmm {

/// Boundary-of-stability curve s(theta) = A(e^{-i theta}) / B(e^{-i theta})
/// sampled uniformly over [-pi, pi]. Samples where |B| < 1e-14 are flagged
/// rather than interpolated and carry NaN values.
struct LocusCurve {
    std::vector<double> thetas;
    std::vector<Complex> values;
    std::vector<bool> valid;
};

struct RootSet {
    std::vector<Complex> roots;
    std::vector<double> residuals;
};

struct StabilityVerdict {
    bool stable = false;
    double max_root_modulus = 0.0;
    bool boundary = false;  // max modulus within 1e-9 of 1
};

/// Thrown when the simultaneous iteration fails to reach the residual bound
/// within the iteration cap; carries the best residuals found.
class RootFindingError : public std::runtime_error {
public:
    RootFindingError(const std::string& msg, std::vector<double> residuals)
        : std::runtime_error(msg), best_residuals(std::move(residuals)) {}
    std::vector<double> best_residuals;
};

/// Samples the boundary locus of a method form at n_samples >= 2 uniformly
/// spaced angles in [-pi, pi] (endpoints included).
[[nodiscard]] LocusCurve locus(const MethodForm& form, int n_samples);

/// The exact printed locus formula for a (family, order) pair, independent of
/// the MethodForm machinery. Supports AB orders 1-4 (beta ignored), HB-on-PLMS
/// orders 1-4, and GHVB orders 1-4; rejects anything else.
[[nodiscard]] Complex closed_form_locus(Family family, int order, double beta, double theta);

/// All complex roots of a real-coefficient polynomial c_0 + c_1 r + ... by a
/// deterministic simultaneous (Durand-Kerner) iteration. Initial guesses sit
/// on a circle sized by the Cauchy coefficient bound; iteration cap 500.
[[nodiscard]] RootSet find_roots(const std::vector<double>& coefficients);

/// Complex-coefficient variant used for characteristic polynomials at
/// complex z.
[[nodiscard]] RootSet find_roots(const std::vector<Complex>& coefficients);

/// Root-condition verdict at z = delta * lambda: forms the characteristic
/// polynomial r^s (A(1/r) - z B(1/r)) and requires every root modulus
/// <= 1 + 1e-9, with near-unit-circle roots simple.
[[nodiscard]] StabilityVerdict is_stable(const MethodForm& form, Complex z);

/// Row-major raster of is_stable verdicts; grid[i * n_re + j] covers the
/// point (re_j, im_i). Rows are computed in parallel, capped by the
/// MOMENTUM_LMM_THREADS environment variable, and assembled
/// deterministically. A single-row (or single-column) raster degenerates to
/// a line of samples at re0 (or im0).
[[nodiscard]] std::vector<bool> stability_raster(const MethodForm& form, double re0, double re1,
                                                 int n_re, double im0, double im1, int n_im);

}  // namespace mlmm
