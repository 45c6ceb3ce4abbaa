#pragma once

#include <functional>
#include <vector>

#include "mlmm/core.hpp"
#include "mlmm/methods.hpp"

// Diffusion-ODE layer: alpha schedules, the two sigma reparameterizations,
// the DDIM step, guidance combinators, and a split-step composer, all over a
// pluggable noise-prediction function so the momentum solvers apply
// unchanged.

namespace mlmm {

/// Discrete alpha schedule stored most-noised first (index 0 = alpha_T).
/// The discrete time t counts down during sampling: alpha(size-1) is the
/// most-noised entry and alpha(0) the cleanest.
class AlphaSchedule {
public:
    explicit AlphaSchedule(std::vector<double> alphas_most_noised_first);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(alphas_.size()); }
    [[nodiscard]] double alpha(int t) const { return alphas_.at(alphas_.size() - 1 - static_cast<std::size_t>(t)); }
    [[nodiscard]] const std::vector<double>& raw() const noexcept { return alphas_; }

    /// sigma_bar values along the schedule, indexed like alpha(t).
    [[nodiscard]] std::vector<double> sigma_bar_grid() const;

private:
    std::vector<double> alphas_;
};

/// Pure noise-prediction function in (x_bar, sigma_bar) coordinates.
struct NoiseModel {
    std::function<Vec(const Vec&, double)> predict;
};

enum class GuidanceMode { Classifier, ClassifierFree };

struct GuidanceSpec {
    double scale = 0.0;
    GuidanceMode mode = GuidanceMode::ClassifierFree;
    /// grad log p for Classifier mode; the unconditional noise prediction for
    /// ClassifierFree mode. Same (x_bar, sigma_bar) signature as predict.
    std::function<Vec(const Vec&, double)> auxiliary;
};

// --- reparameterizations (alpha in (0,1]; the tilde pair needs alpha < 1) --

[[nodiscard]] double sigma_bar(double alpha);
[[nodiscard]] double alpha_from_sigma_bar(double sigma);
[[nodiscard]] Vec x_bar(const Vec& x, double alpha);
[[nodiscard]] Vec x_from_x_bar(const Vec& xb, double alpha);

[[nodiscard]] double sigma_tilde(double alpha);
[[nodiscard]] double alpha_from_sigma_tilde(double sigma);
[[nodiscard]] Vec x_tilde(const Vec& x, double alpha);
[[nodiscard]] Vec x_from_x_tilde(const Vec& xt, double alpha);

/// One deterministic sampling step from time t to t - 1:
/// sqrt(alpha_{t-1}/alpha_t) (x_t - sqrt(1-alpha_t) eps) + sqrt(1-alpha_{t-1}) eps.
[[nodiscard]] Vec ddim_step(const Vec& x_t, int t, const AlphaSchedule& schedule,
                            const NoiseModel& noise);

/// Full deterministic chain from t = size-1 down to 0; returns all states,
/// most-noised first.
[[nodiscard]] std::vector<Vec> ddim_sample(const Vec& x_start, const AlphaSchedule& schedule,
                                           const NoiseModel& noise);

/// Composes the guided noise prediction: eps - s grad log p for classifier
/// guidance, eps_uncond + s (eps_cond - eps_uncond) for classifier-free.
[[nodiscard]] NoiseModel guide(const NoiseModel& noise, const GuidanceSpec& spec);

enum class OdeCoords { Bar, Tilde };

/// The sampling ODE right-hand side as a VectorField usable by any stepper.
/// In Bar coordinates the field is literally the noise prediction; in Tilde
/// coordinates it is the denoised estimate (x_t - sqrt(1-alpha) eps)/sqrt(alpha)
/// computed through the noise model.
[[nodiscard]] VectorField ode_field_from_noise(const NoiseModel& noise, OdeCoords coords);

/// Drives a stepper across the schedule's sigma_bar grid (integrating toward
/// lower noise); states are reported in plain x coordinates so the result is
/// directly comparable with ddim_sample. With an Euler stepper this
/// reproduces the DDIM chain.
[[nodiscard]] std::vector<Vec> sample_ode_bar(const Vec& x_start, const AlphaSchedule& schedule,
                                              const NoiseModel& noise, Stepper& stepper);

/// Lie-Trotter composition: advances x by delta under field1 with stepper1,
/// then by delta under field2 with stepper2, each stepper keeping its own
/// history.
[[nodiscard]] Vec lie_trotter_step(const Vec& x, double sigma, double delta, Stepper& stepper1,
                                   Stepper& stepper2, const VectorField& field1,
                                   const VectorField& field2);

}  // namespace mlmm
