#pragma once

#include <functional>
#include <vector>

#include "mlmm/core.hpp"

// Order-of-convergence machinery: formal order from coefficient moment
// conditions, empirical order from error ratios, error norms, and the
// latent magnitude score.

namespace mlmm {

struct OrderReport {
    int formal_order = 0;
    int first_violated_k = 0;  // 0 when the consistency condition itself fails
    double defect = 0.0;       // magnitude of the first violated condition
};

/// Largest p <= max_k such that sum a_m = 0 and, for k = 1..p,
/// sum a_m m^k / k! + sum b_m m^{k-1} / (k-1)! = 0 within 1e-10
/// (with the 0^0 = 1 convention in the b-sum at k = 1).
/// An inconsistent form reports order 0 with first_violated_k = 0.
[[nodiscard]] OrderReport formal_order(const MethodForm& form, int max_k);

/// Per-pair order estimates q_i = log(e_{i+1}/e_i) / log(d_{i+1}/d_i) for
/// strictly decreasing step sizes and positive errors.
[[nodiscard]] std::vector<double> empirical_order(const std::vector<double>& errors,
                                                  const std::vector<double>& deltas);

/// L2 norm of (final state - exact(final time)); +infinity for a diverged
/// trajectory.
[[nodiscard]] double global_error(const Trajectory& traj,
                                  const std::function<Vec(double)>& exact);

/// Same against a reference trajectory with matching final time.
[[nodiscard]] double global_error(const Trajectory& traj, const Trajectory& reference);

/// Mean of global_error over a batch of trajectories.
[[nodiscard]] double mean_global_error(const std::vector<Trajectory>& batch,
                                       const std::function<Vec(double)>& exact);

struct MagnitudeConfig {
    double tau = 3.0;  // threshold in std-dev units
    int pool_k = 1;    // non-overlapping max-pool kernel (stride = kernel)
    std::vector<double> channel_means;
    std::vector<double> channel_stds;
};

/// Row-major H x W x C grid of latent values.
struct LatentGrid {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    [[nodiscard]] double at(int i, int j, int c) const {
        return data[(static_cast<std::size_t>(i) * width + j) * channels + c];
    }
    double& at(int i, int j, int c) {
        return data[(static_cast<std::size_t>(i) * width + j) * channels + c];
    }
};

/// Normalizes each channel by the configured mean and std, takes the
/// per-pixel Euclidean magnitude across channels, max-pools with a
/// non-overlapping pool_k kernel, and sums the pooled values that reach tau.
[[nodiscard]] double magnitude_score(const LatentGrid& grid, const MagnitudeConfig& cfg);

}  // namespace mlmm
