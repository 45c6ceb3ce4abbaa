#include "mlmm/methods.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mlmm/problems.hpp"

namespace mlmm {

namespace {

const std::array<std::vector<double>, 5> kAbRows = {{
    {1.0},
    {3.0 / 2.0, -1.0 / 2.0},
    {23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0},
    {55.0 / 24.0, -59.0 / 24.0, 37.0 / 24.0, -9.0 / 24.0},
    {1901.0 / 720.0, -2774.0 / 720.0, 2616.0 / 720.0, -1274.0 / 720.0, 251.0 / 720.0},
}};

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

std::string trim_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

const std::vector<double>& ab_coefficients(int order) {
    require(order >= 1 && order <= 5, "ab_coefficients: order must be in 1..5");
    return kAbRows[static_cast<std::size_t>(order - 1)];
}

std::vector<double> ghvb_coefficients(int order, double beta) {
    require(order >= 1 && order <= 5, "ghvb_coefficients: order must be in 1..5");
    require(beta > 0.0 && beta <= 1.0, "ghvb_coefficients: beta must be in (0,1]");
    const double b = beta;
    switch (order) {
        case 1:
            return {1.0};
        case 2:
            return {(2 + b) / (2 * b), -(2 - b) / (2 * b)};
        case 3:
            return {(18 + 5 * b) / (12 * b), -(24 - 8 * b) / (12 * b), (6 - b) / (12 * b)};
        case 4:
            return {(46 + 9 * b) / (24 * b), -(78 - 19 * b) / (24 * b), (42 - 5 * b) / (24 * b),
                    -(10 - b) / (24 * b)};
        default:
            return {(1650 + 251 * b) / (720 * b), -(3420 - 646 * b) / (720 * b),
                    (2880 - 264 * b) / (720 * b), -(1380 - 106 * b) / (720 * b),
                    (270 - 19 * b) / (720 * b)};
    }
}

MethodSpec MethodSpec::ab(int order) {
    MethodSpec s;
    s.family = Family::AB;
    s.order = order;
    s.validate();
    return s;
}

MethodSpec MethodSpec::hb(int order, double beta) {
    MethodSpec s;
    s.family = Family::HB;
    s.order = order;
    s.beta = beta;
    s.validate();
    return s;
}

MethodSpec MethodSpec::ghvb(double momentum_number) {
    MethodSpec s;
    s.family = Family::GHVB;
    s.momentum_number = momentum_number;
    s.order = static_cast<int>(std::ceil(momentum_number));
    s.beta = momentum_number - (s.order - 1);
    s.validate();
    return s;
}

MethodSpec MethodSpec::nesterov(int order, double beta) {
    MethodSpec s;
    s.family = Family::Nesterov;
    s.order = order;
    s.beta = beta;
    s.validate();
    return s;
}

MethodSpec MethodSpec::aggregated(std::vector<double> betas, std::vector<double> weights,
                                  int base_order) {
    MethodSpec s;
    s.family = Family::Aggregated;
    s.order = base_order;
    s.agg_betas = std::move(betas);
    s.agg_weights = std::move(weights);
    s.validate();
    return s;
}

MethodSpec MethodSpec::interp_ab(int order, double beta) {
    MethodSpec s;
    s.family = Family::InterpAB;
    s.order = order;
    s.beta = beta;
    s.validate();
    return s;
}

void MethodSpec::validate() const {
    require(order >= 1 && order <= 5, "method order must be in 1..5");
    require(beta > 0.0 && beta <= 1.0, "beta must be in (0,1]");
    if (family == Family::GHVB) {
        require(momentum_number.has_value(), "GHVB requires a momentum number");
        const double m = *momentum_number;
        require(m > 0.0 && m <= 5.0, "GHVB momentum number must be in (0,5]");
        require(order == static_cast<int>(std::ceil(m)),
                "GHVB order must equal ceil(momentum number)");
        require(std::abs(beta - (m - (order - 1))) <= 1e-12,
                "GHVB beta must equal momentum number - (order - 1)");
    }
    if (family == Family::Aggregated) {
        require(!agg_betas.empty() && agg_betas.size() == agg_weights.size(),
                "aggregated betas and weights must be equal-length and non-empty");
        double sum = 0.0;
        for (double w : agg_weights) sum += w;
        require(std::abs(sum - 1.0) <= 1e-12, "aggregated weights must sum to 1");
        for (double b : agg_betas)
            require(b > 0.0 && b <= 1.0, "each aggregated beta must be in (0,1]");
    }
    if (family == Family::InterpAB) {
        require(order >= 2, "direct interpolation needs order >= 2 (blends AB(r-1) and AB(r))");
    }
}

std::string MethodSpec::name() const {
    switch (family) {
        case Family::AB:
            return "ab" + std::to_string(order);
        case Family::HB:
            return "hb" + trim_number(beta) + "-ab" + std::to_string(order);
        case Family::GHVB:
            return "ghvb" + trim_number(momentum_number.value_or(order - 1 + beta));
        case Family::Nesterov:
            return "nesterov" + trim_number(beta) + "-ab" + std::to_string(order);
        case Family::Aggregated:
            return "aggregated-ab" + std::to_string(order);
        case Family::InterpAB:
            return "interp" + trim_number(beta) + "-ab" + std::to_string(order);
    }
    return "unknown";
}

Stepper::Stepper(MethodSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

Stepper make_method(const MethodSpec& spec) { return Stepper(spec); }

Stepper make_aggregated(std::vector<double> agg_betas, std::vector<double> agg_weights,
                        int base_order) {
    return Stepper(MethodSpec::aggregated(std::move(agg_betas), std::move(agg_weights),
                                          base_order));
}

void Stepper::reset() {
    step_index_ = 0;
    diverged_ = false;
    history_.clear();
    velocity_.clear();
    agg_velocities_.clear();
}

Vec Stepper::combine_history(int effective_order) const {
    const std::vector<double> row = spec_.family == Family::GHVB
                                        ? ghvb_coefficients(effective_order, spec_.beta)
                                        : ab_coefficients(effective_order);
    Vec out(history_.front().size(), 0.0);
    for (int i = 0; i < effective_order; ++i) vec_axpy(row[static_cast<std::size_t>(i)], history_[static_cast<std::size_t>(i)], out);
    return out;
}

Vec Stepper::step(const VectorField& field, const Vec& x, double t, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("step: delta must be positive");
    Vec eval = field(x, t);
    if (eval.size() != x.size())
        throw std::invalid_argument("step: field dimension does not match state");
    if (!vec_finite(eval)) diverged_ = true;

    const int c = std::min(spec_.order, step_index_ + 1);
    Vec next = x;

    switch (spec_.family) {
        case Family::AB: {
            history_.push_front(std::move(eval));
            vec_axpy(delta, combine_history(c), next);
            break;
        }
        case Family::HB: {
            history_.push_front(std::move(eval));
            Vec combined = combine_history(c);
            if (step_index_ == 0) velocity_ = history_.front();  // seed v_0 = f(x_0)
            for (std::size_t i = 0; i < velocity_.size(); ++i)
                velocity_[i] = (1.0 - spec_.beta) * velocity_[i] + spec_.beta * combined[i];
            vec_axpy(delta, velocity_, next);
            break;
        }
        case Family::GHVB: {
            if (step_index_ == 0) velocity_ = eval;  // seed v_0 = f(x_0)
            for (std::size_t i = 0; i < velocity_.size(); ++i)
                velocity_[i] = (1.0 - spec_.beta) * velocity_[i] + spec_.beta * eval[i];
            history_.push_front(velocity_);  // history holds v_{n+1}, v_n, ...
            vec_axpy(delta, combine_history(c), next);
            break;
        }
        case Family::Nesterov: {
            history_.push_front(std::move(eval));
            Vec combined = combine_history(c);
            Vec y_next = x;
            vec_axpy(delta * spec_.beta, combined, y_next);
            if (step_index_ == 0) {
                vec_axpy(delta, combined, next);  // plain Euler first step
            } else {
                next = y_next;
                for (std::size_t i = 0; i < next.size(); ++i)
                    next[i] += (1.0 - spec_.beta) * (y_next[i] - velocity_[i]);
            }
            velocity_ = std::move(y_next);  // velocity_ plays the role of y_n
            break;
        }
        case Family::Aggregated: {
            history_.push_front(std::move(eval));
            Vec combined = combine_history(c);
            if (step_index_ == 0)
                agg_velocities_.assign(spec_.agg_betas.size(), history_.front());
            for (std::size_t k = 0; k < agg_velocities_.size(); ++k) {
                const double b = spec_.agg_betas[k];
                Vec& v = agg_velocities_[k];
                for (std::size_t i = 0; i < v.size(); ++i)
                    v[i] = (1.0 - b) * v[i] + b * combined[i];
                vec_axpy(delta * spec_.agg_weights[k], v, next);
            }
            break;
        }
        case Family::InterpAB: {
            history_.push_front(std::move(eval));
            if (c == 1) {
                vec_axpy(delta, combine_history(1), next);
            } else {
                vec_axpy(delta * (1.0 - spec_.beta), combine_history(c - 1), next);
                vec_axpy(delta * spec_.beta, combine_history(c), next);
            }
            break;
        }
    }

    while (history_.size() > static_cast<std::size_t>(spec_.order)) history_.pop_back();
    ++step_index_;
    if (!vec_finite(next)) diverged_ = true;
    return next;
}

Trajectory integrate(const MethodSpec& spec, const Problem& problem, int n_steps) {
    if (n_steps < 1) throw std::invalid_argument("integrate: n_steps must be >= 1");
    if (!(problem.t1 > problem.t0))
        throw std::invalid_argument("integrate: degenerate time interval");

    const double delta = (problem.t1 - problem.t0) / n_steps;
    Stepper stepper(spec);
    Trajectory traj;
    traj.times.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.times.push_back(problem.t0);
    traj.states.push_back(problem.x0);

    Vec x = problem.x0;
    for (int k = 0; k < n_steps; ++k) {
        const double t = problem.t0 + k * delta;
        x = stepper.step(problem.field, x, t, delta);
        traj.times.push_back(problem.t0 + (k + 1) * delta);
        traj.states.push_back(x);
        if (!vec_finite(x) || vec_norm2(x) > kDivergenceNorm) traj.diverged = true;
    }
    if (stepper.diverged()) traj.diverged = true;
    return traj;
}

MethodForm linear_multistep_form(const MethodSpec& spec) {
    spec.validate();
    if (spec.family == Family::Aggregated)
        throw std::invalid_argument(
            "linear_multistep_form: aggregated momentum has no single (A,B) form");

    // B rows below are indexed so that coefficient k multiplies E^k, i.e. the
    // evaluation f(x_{n-k}); explicit methods leave the constant term zero.
    auto shifted = [](const std::vector<double>& row, double scale) {
        std::vector<double> b(row.size() + 1, 0.0);
        for (std::size_t i = 0; i < row.size(); ++i) b[i + 1] = scale * row[i];
        return ShiftPolynomial(std::move(b));
    };

    const ShiftPolynomial one_minus_e{1.0, -1.0};
    MethodForm form;
    form.name = spec.name();
    form.beta = spec.beta;

    switch (spec.family) {
        case Family::AB:
            form.a_poly = one_minus_e;
            form.b_poly = shifted(ab_coefficients(spec.order), 1.0);
            break;
        case Family::HB:
            form.a_poly = poly_mul(one_minus_e, ShiftPolynomial{1.0, -(1.0 - spec.beta)});
            form.b_poly = shifted(ab_coefficients(spec.order), spec.beta);
            break;
        case Family::GHVB:
            form.a_poly = poly_mul(one_minus_e, ShiftPolynomial{1.0, -(1.0 - spec.beta)});
            form.b_poly = shifted(ghvb_coefficients(spec.order, spec.beta), spec.beta);
            break;
        case Family::Nesterov: {
            // Eliminating y from the two-line update leaves the HB left side
            // and a right side filtered by beta*((2-beta) - (1-beta)E).
            form.a_poly = poly_mul(one_minus_e, ShiftPolynomial{1.0, -(1.0 - spec.beta)});
            const ShiftPolynomial filter{spec.beta * (2.0 - spec.beta),
                                         -spec.beta * (1.0 - spec.beta)};
            form.b_poly = poly_mul(filter, shifted(ab_coefficients(spec.order), 1.0));
            break;
        }
        case Family::InterpAB: {
            form.a_poly = one_minus_e;
            const auto& lo = ab_coefficients(spec.order - 1);
            const auto& hi = ab_coefficients(spec.order);
            std::vector<double> b(hi.size() + 1, 0.0);
            for (std::size_t i = 0; i < hi.size(); ++i) b[i + 1] = spec.beta * hi[i];
            for (std::size_t i = 0; i < lo.size(); ++i) b[i + 1] += (1.0 - spec.beta) * lo[i];
            form.b_poly = ShiftPolynomial(std::move(b));
            break;
        }
        case Family::Aggregated:
            break;  // unreachable
    }
    return form;
}

}  // namespace mlmm
