#include "mlmm/diffusion.hpp"

#include <cmath>
#include <stdexcept>

namespace mlmm {

namespace {

void check_alpha_open_unit(double alpha, const char* who) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument(std::string(who) + ": alpha must be in (0,1]");
}

}  // namespace

AlphaSchedule::AlphaSchedule(std::vector<double> alphas_most_noised_first)
    : alphas_(std::move(alphas_most_noised_first)) {
    if (alphas_.size() < 2)
        throw std::invalid_argument("AlphaSchedule: need at least 2 entries");
    for (std::size_t i = 0; i < alphas_.size(); ++i) {
        check_alpha_open_unit(alphas_[i], "AlphaSchedule");
        if (i > 0 && !(alphas_[i] > alphas_[i - 1]))
            throw std::invalid_argument(
                "AlphaSchedule: alphas must increase strictly toward the clean end");
    }
}

std::vector<double> AlphaSchedule::sigma_bar_grid() const {
    std::vector<double> grid(alphas_.size());
    for (int t = 0; t < size(); ++t) grid[static_cast<std::size_t>(t)] = sigma_bar(alpha(t));
    return grid;
}

double sigma_bar(double alpha) {
    check_alpha_open_unit(alpha, "sigma_bar");
    return std::sqrt(1.0 - alpha) / std::sqrt(alpha);
}

double alpha_from_sigma_bar(double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("alpha_from_sigma_bar: sigma must be >= 0");
    return 1.0 / (1.0 + sigma * sigma);
}

Vec x_bar(const Vec& x, double alpha) {
    check_alpha_open_unit(alpha, "x_bar");
    return vec_scale(1.0 / std::sqrt(alpha), x);
}

Vec x_from_x_bar(const Vec& xb, double alpha) {
    check_alpha_open_unit(alpha, "x_from_x_bar");
    return vec_scale(std::sqrt(alpha), xb);
}

double sigma_tilde(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("sigma_tilde: alpha must be in (0,1)");
    return std::sqrt(alpha) / std::sqrt(1.0 - alpha);
}

double alpha_from_sigma_tilde(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("alpha_from_sigma_tilde: sigma must be > 0");
    return sigma * sigma / (1.0 + sigma * sigma);
}

Vec x_tilde(const Vec& x, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("x_tilde: alpha must be in (0,1)");
    return vec_scale(1.0 / std::sqrt(1.0 - alpha), x);
}

Vec x_from_x_tilde(const Vec& xt, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("x_from_x_tilde: alpha must be in (0,1)");
    return vec_scale(std::sqrt(1.0 - alpha), xt);
}

Vec ddim_step(const Vec& x_t, int t, const AlphaSchedule& schedule, const NoiseModel& noise) {
    if (t < 1 || t >= schedule.size())
        throw std::out_of_range("ddim_step: t and t-1 must be valid schedule indices");
    const double a_t = schedule.alpha(t);
    const double a_prev = schedule.alpha(t - 1);

    const Vec eps = noise.predict(x_bar(x_t, a_t), sigma_bar(a_t));
    const double carry = std::sqrt(a_prev / a_t);
    Vec out(x_t.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = carry * (x_t[i] - std::sqrt(1.0 - a_t) * eps[i]) +
                 std::sqrt(1.0 - a_prev) * eps[i];
    return out;
}

std::vector<Vec> ddim_sample(const Vec& x_start, const AlphaSchedule& schedule,
                             const NoiseModel& noise) {
    std::vector<Vec> chain;
    chain.reserve(static_cast<std::size_t>(schedule.size()));
    chain.push_back(x_start);
    for (int t = schedule.size() - 1; t >= 1; --t)
        chain.push_back(ddim_step(chain.back(), t, schedule, noise));
    return chain;
}

NoiseModel guide(const NoiseModel& noise, const GuidanceSpec& spec) {
    if (!spec.auxiliary) throw std::invalid_argument("guide: auxiliary function is required");
    NoiseModel out;
    if (spec.mode == GuidanceMode::Classifier) {
        out.predict = [base = noise.predict, aux = spec.auxiliary, s = spec.scale](
                          const Vec& x, double sigma) {
            Vec eps = base(x, sigma);
            vec_axpy(-s, aux(x, sigma), eps);
            return eps;
        };
    } else {
        out.predict = [cond = noise.predict, uncond = spec.auxiliary, s = spec.scale](
                          const Vec& x, double sigma) {
            Vec eps = uncond(x, sigma);
            Vec delta = vec_sub(cond(x, sigma), eps);
            vec_axpy(s, delta, eps);
            return eps;
        };
    }
    return out;
}

VectorField ode_field_from_noise(const NoiseModel& noise, OdeCoords coords) {
    if (coords == OdeCoords::Bar) {
        return [predict = noise.predict](const Vec& x, double sigma) {
            return predict(x, sigma);
        };
    }
    // Tilde coordinates: s(x_tilde, sigma_tilde) = (x_tilde - eps) / sigma_tilde
    // with eps evaluated at the corresponding bar coordinates.
    return [predict = noise.predict](const Vec& x, double sigma) {
        const Vec eps = predict(vec_scale(1.0 / sigma, x), 1.0 / sigma);
        Vec out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - eps[i]) / sigma;
        return out;
    };
}

std::vector<Vec> sample_ode_bar(const Vec& x_start, const AlphaSchedule& schedule,
                                const NoiseModel& noise, Stepper& stepper) {
    const std::vector<double> grid = schedule.sigma_bar_grid();
    const int top = schedule.size() - 1;

    // sigma_bar decreases toward the clean end; steppers take positive
    // deltas, so integrate in tau = sigma_top - sigma with a sign-flipped
    // field.
    const double sigma_top = grid[static_cast<std::size_t>(top)];
    const VectorField bar = ode_field_from_noise(noise, OdeCoords::Bar);
    const VectorField flipped = [&bar, sigma_top](const Vec& x, double tau) {
        return vec_scale(-1.0, bar(x, sigma_top - tau));
    };

    std::vector<Vec> chain;
    chain.reserve(static_cast<std::size_t>(schedule.size()));
    chain.push_back(x_start);

    Vec xb = x_bar(x_start, schedule.alpha(top));
    for (int t = top; t >= 1; --t) {
        const double sigma_t = grid[static_cast<std::size_t>(t)];
        const double sigma_next = grid[static_cast<std::size_t>(t - 1)];
        xb = stepper.step(flipped, xb, sigma_top - sigma_t, sigma_t - sigma_next);
        chain.push_back(x_from_x_bar(xb, schedule.alpha(t - 1)));
    }
    return chain;
}

Vec lie_trotter_step(const Vec& x, double sigma, double delta, Stepper& stepper1,
                     Stepper& stepper2, const VectorField& field1, const VectorField& field2) {
    Vec mid = stepper1.step(field1, x, sigma, delta);
    return stepper2.step(field2, mid, sigma, delta);
}

}  // namespace mlmm
