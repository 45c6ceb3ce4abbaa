#include "mlmm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mlmm {

namespace {

constexpr double kConditionTol = 1e-10;

double power(double base, int k) {
    // 0^0 = 1 by convention; relevant for the b-sum at k = 1 where m = 0.
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= base;
    return p;
}

}  // namespace

OrderReport formal_order(const MethodForm& form, int max_k) {
    if (max_k < 1 || max_k > 12)
        throw std::invalid_argument("formal_order: max_k must be in 1..12");

    const int s = std::max(form.a_poly.degree(), form.b_poly.degree());
    OrderReport report;

    double a_sum = 0.0;
    for (int m = 0; m <= s; ++m) a_sum += form.a_poly.coeff(static_cast<std::size_t>(m));
    if (std::abs(a_sum) > kConditionTol) {
        report.formal_order = 0;
        report.first_violated_k = 0;
        report.defect = std::abs(a_sum);
        return report;
    }

    double factorial_k = 1.0;  // k!
    for (int k = 1; k <= max_k; ++k) {
        factorial_k *= k;
        const double factorial_km1 = factorial_k / k;
        double condition = 0.0;
        for (int m = 0; m <= s; ++m) {
            condition += form.a_poly.coeff(static_cast<std::size_t>(m)) * power(m, k) / factorial_k;
            condition +=
                form.b_poly.coeff(static_cast<std::size_t>(m)) * power(m, k - 1) / factorial_km1;
        }
        if (std::abs(condition) > kConditionTol) {
            report.formal_order = k - 1;
            report.first_violated_k = k;
            report.defect = std::abs(condition);
            return report;
        }
    }
    report.formal_order = max_k;
    report.first_violated_k = max_k + 1;
    report.defect = 0.0;
    return report;
}

std::vector<double> empirical_order(const std::vector<double>& errors,
                                    const std::vector<double>& deltas) {
    if (errors.size() != deltas.size() || errors.size() < 2)
        throw std::invalid_argument("empirical_order: need equal-length sequences of >= 2");
    for (double e : errors) {
        if (!(e > 0.0)) throw std::invalid_argument("empirical_order: errors must be positive");
    }
    for (std::size_t i = 1; i < deltas.size(); ++i) {
        if (!(deltas[i] < deltas[i - 1]))
            throw std::invalid_argument("empirical_order: deltas must be strictly decreasing");
    }
    std::vector<double> q(errors.size() - 1);
    for (std::size_t i = 0; i + 1 < errors.size(); ++i)
        q[i] = std::log(errors[i + 1] / errors[i]) / std::log(deltas[i + 1] / deltas[i]);
    return q;
}

double global_error(const Trajectory& traj, const std::function<Vec(double)>& exact) {
    if (traj.diverged) return std::numeric_limits<double>::infinity();
    return vec_norm2(vec_sub(traj.final_state(), exact(traj.final_time())));
}

double global_error(const Trajectory& traj, const Trajectory& reference) {
    if (std::abs(traj.final_time() - reference.final_time()) >
        1e-9 * std::max(1.0, std::abs(reference.final_time())))
        throw std::invalid_argument("global_error: final times do not match");
    if (traj.diverged) return std::numeric_limits<double>::infinity();
    return vec_norm2(vec_sub(traj.final_state(), reference.final_state()));
}

double mean_global_error(const std::vector<Trajectory>& batch,
                         const std::function<Vec(double)>& exact) {
    if (batch.empty()) throw std::invalid_argument("mean_global_error: empty batch");
    double sum = 0.0;
    for (const Trajectory& traj : batch) sum += global_error(traj, exact);
    return sum / static_cast<double>(batch.size());
}

double magnitude_score(const LatentGrid& grid, const MagnitudeConfig& cfg) {
    if (grid.height < 1 || grid.width < 1 || grid.channels < 1)
        throw std::invalid_argument("magnitude_score: empty grid");
    if (grid.data.size() !=
        static_cast<std::size_t>(grid.height) * grid.width * grid.channels)
        throw std::invalid_argument("magnitude_score: data size does not match dimensions");
    if (cfg.channel_means.size() != static_cast<std::size_t>(grid.channels) ||
        cfg.channel_stds.size() != static_cast<std::size_t>(grid.channels))
        throw std::invalid_argument("magnitude_score: channel stats length mismatch");
    if (cfg.pool_k < 1 || grid.height % cfg.pool_k != 0 || grid.width % cfg.pool_k != 0)
        throw std::invalid_argument("magnitude_score: dimensions must divide by pool kernel");
    if (cfg.tau < 0.0) throw std::invalid_argument("magnitude_score: tau must be >= 0");
    for (double s : cfg.channel_stds) {
        if (!(s > 0.0)) throw std::invalid_argument("magnitude_score: stds must be positive");
    }

    const int ph = grid.height / cfg.pool_k;
    const int pw = grid.width / cfg.pool_k;
    double score = 0.0;
    for (int bi = 0; bi < ph; ++bi) {
        for (int bj = 0; bj < pw; ++bj) {
            double pooled = 0.0;
            for (int di = 0; di < cfg.pool_k; ++di) {
                for (int dj = 0; dj < cfg.pool_k; ++dj) {
                    const int i = bi * cfg.pool_k + di;
                    const int j = bj * cfg.pool_k + dj;
                    double mag2 = 0.0;
                    for (int c = 0; c < grid.channels; ++c) {
                        const double z = (grid.at(i, j, c) - cfg.channel_means[static_cast<std::size_t>(c)]) /
                                         cfg.channel_stds[static_cast<std::size_t>(c)];
                        mag2 += z * z;
                    }
                    pooled = std::max(pooled, std::sqrt(mag2));
                }
            }
            if (pooled >= cfg.tau) score += pooled;
        }
    }
    return score;
}

}  // namespace mlmm
