#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlmm/core.hpp"

// Solver construction and stepping: Adams-Bashforth (orders 1-5), AB with
// Heavy Ball momentum, Generalized Heavy Ball (fractional momentum numbers),
// Nesterov-wrapped methods, aggregated momentum, and the direct-interpolation
// method that serves as a low-order counterexample.

namespace mlmm {

/// Right-hand side f(x, t) of an ODE x' = f(x, t).
using VectorField = std::function<Vec(const Vec&, double)>;

enum class Family {
    AB,          ///< Adams-Bashforth / PLMS, orders 1-5
    HB,          ///< AB with Heavy Ball momentum (EMA after the AB combination)
    GHVB,        ///< Generalized Heavy Ball (EMA before the combination)
    Nesterov,    ///< Nesterov momentum wrapped around an AB base
    Aggregated,  ///< multiple velocities with distinct damping coefficients
    InterpAB     ///< direct interpolation of two adjacent AB orders
};

/// Classical Adams-Bashforth coefficient row for the given order (1-5),
/// most recent evaluation first.
[[nodiscard]] const std::vector<double>& ab_coefficients(int order);

/// Velocity-combination row of the order-r generalized heavy ball update,
/// most recent velocity first. Reduces to ab_coefficients(order) at beta = 1.
[[nodiscard]] std::vector<double> ghvb_coefficients(int order, double beta);

struct MethodSpec {
    Family family = Family::AB;
    int order = 1;           // 1..5 (ceiling of the momentum number for GHVB)
    double beta = 1.0;       // damping coefficient in (0,1]; 1 disables momentum
    std::optional<double> momentum_number;  // GHVB only, in (0,5]
    std::vector<double> agg_betas;          // Aggregated only
    std::vector<double> agg_weights;        // Aggregated only

    static MethodSpec ab(int order);
    static MethodSpec hb(int order, double beta);
    /// GHVB identified by its momentum number m: order = ceil(m),
    /// beta = m - (order - 1). Integer m means beta = 1.
    static MethodSpec ghvb(double momentum_number);
    static MethodSpec nesterov(int order, double beta);
    static MethodSpec aggregated(std::vector<double> betas, std::vector<double> weights,
                                 int base_order);
    static MethodSpec interp_ab(int order, double beta);

    /// Throws std::invalid_argument if any field is out of contract.
    void validate() const;

    [[nodiscard]] std::string name() const;
};

/// Owns the evolving per-method state (evaluation or velocity history plus
/// momentum velocities) and advances a state one step at a time. Requires
/// exclusive access; distinct steppers run in parallel freely.
class Stepper {
public:
    explicit Stepper(MethodSpec spec);

    [[nodiscard]] const MethodSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] int step_index() const noexcept { return step_index_; }
    [[nodiscard]] bool diverged() const noexcept { return diverged_; }

    /// Advances x by one step of size delta > 0. During warm-up the
    /// effective order is min(order, step_index + 1); the velocity is seeded
    /// with the first field evaluation, so the very first step of every
    /// method is a plain Euler step. A non-finite field output or state
    /// marks the stepper diverged but the (non-finite) state is still
    /// returned.
    Vec step(const VectorField& field, const Vec& x, double t, double delta);

    /// Clears history, velocities and the divergence flag.
    void reset();

private:
    Vec combine_history(int effective_order) const;

    MethodSpec spec_;
    int step_index_ = 0;
    bool diverged_ = false;
    std::deque<Vec> history_;           // f-evaluations (AB/HB/Nesterov/InterpAB)
                                        // or velocities v_{n+1},v_n,... (GHVB)
    Vec velocity_;                      // v_n for HB, y_n for Nesterov
    std::vector<Vec> agg_velocities_;   // one per aggregated damping coefficient
};

/// Builds a stepper with empty state for the given spec.
[[nodiscard]] Stepper make_method(const MethodSpec& spec);

/// Convenience constructor for aggregated momentum.
[[nodiscard]] Stepper make_aggregated(std::vector<double> agg_betas,
                                      std::vector<double> agg_weights, int base_order);

struct Problem;  // defined in problems.hpp

/// Fixed uniform step size delta = (t1 - t0) / n_steps; returns n_steps + 1
/// states. The diverged flag is set once any state norm exceeds 1e12 or
/// becomes non-finite; integration keeps recording afterwards.
[[nodiscard]] Trajectory integrate(const MethodSpec& spec, const Problem& problem, int n_steps);

/// State norm beyond which a trajectory is flagged diverged.
inline constexpr double kDivergenceNorm = 1e12;

/// The (A, B) shift-operator pair whose recurrence A(E) x_n = delta B(E) f(x_n)
/// matches the stepper exactly after warm-up. Rejects Family::Aggregated,
/// which has no single-recurrence form for distinct damping coefficients.
[[nodiscard]] MethodForm linear_multistep_form(const MethodSpec& spec);

}  // namespace mlmm
