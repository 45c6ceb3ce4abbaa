#pragma once

#include <complex>
#include <initializer_list>
#include <string>
#include <vector>

// Core value types shared by every module: real state vectors, complex
// scalars, shift-operator polynomials, and linear-multistep method forms.
// All types here are plain immutable values; copying is cheap and safe
// across threads.

namespace mlmm {

using Vec = std::vector<double>;
using Complex = std::complex<double>;

// --- small vector helpers -------------------------------------------------

[[nodiscard]] Vec vec_add(const Vec& a, const Vec& b);
[[nodiscard]] Vec vec_sub(const Vec& a, const Vec& b);
[[nodiscard]] Vec vec_scale(double s, const Vec& a);

/// y += s * x
void vec_axpy(double s, const Vec& x, Vec& y);

[[nodiscard]] double vec_norm2(const Vec& a);
[[nodiscard]] double vec_norm_inf(const Vec& a);
[[nodiscard]] bool vec_finite(const Vec& a);

// --- shift polynomials ----------------------------------------------------

/// Polynomial c_0 + c_1 E + ... + c_s E^s in the shift operator E
/// (E maps x_k to x_{k-1}). Coefficients are real; complex values only
/// appear at evaluation points such as e^{-i theta}.
class ShiftPolynomial {
public:
    /// Coefficients below this magnitude are stripped from the tail so
    /// that degree() stays meaningful for root counting.
    static constexpr double kDegreeEps = 1e-15;

    ShiftPolynomial() = default;
    ShiftPolynomial(std::initializer_list<double> coeffs);
    explicit ShiftPolynomial(std::vector<double> coeffs);

    /// Degree after normalization; -1 for the zero polynomial.
    [[nodiscard]] int degree() const noexcept;

    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return coeffs_; }

    /// Coefficient of E^k, zero beyond the stored degree.
    [[nodiscard]] double coeff(std::size_t k) const noexcept;

    [[nodiscard]] bool is_zero() const noexcept { return coeffs_.empty(); }

    bool operator==(const ShiftPolynomial& other) const = default;

private:
    void normalize();
    std::vector<double> coeffs_;
};

/// Horner evaluation of p at a complex point u. Total function.
[[nodiscard]] Complex eval_shift_poly(const ShiftPolynomial& p, Complex u);

/// Expanded product of two shift polynomials.
[[nodiscard]] ShiftPolynomial poly_mul(const ShiftPolynomial& a, const ShiftPolynomial& b);

// --- method forms -----------------------------------------------------------

/// The (A, B) pair of a linear multistep recurrence A(E) x_n = delta B(E) f(x_n).
/// Explicit methods have b_0 = 0 (only past evaluations are used).
struct MethodForm {
    std::string name;
    double beta = 1.0;
    ShiftPolynomial a_poly;
    ShiftPolynomial b_poly;
};

/// True iff |A(1)| <= 1e-12, the zeroth-order consistency condition
/// (the a-coefficients sum to zero).
[[nodiscard]] bool check_consistency(const MethodForm& form);

// --- trajectories -----------------------------------------------------------

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    bool diverged = false;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] const Vec& final_state() const { return states.back(); }
    [[nodiscard]] double final_time() const { return times.back(); }
};

}  // namespace mlmm
