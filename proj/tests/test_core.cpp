#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mlmm/core.hpp"

using namespace mlmm;

namespace {

// Independent oracle: plain power-sum evaluation, no Horner.
Complex naive_poly_eval(const std::vector<double>& coeffs, Complex u) {
    Complex sum{0.0, 0.0};
    for (std::size_t k = 0; k < coeffs.size(); ++k) sum += coeffs[k] * std::pow(u, static_cast<double>(k));
    return sum;
}

}  // namespace

TEST_CASE("eval_shift_poly pinned values") {
    const ShiftPolynomial euler_a{1.0, -1.0};
    CHECK(eval_shift_poly(euler_a, {1.0, 0.0}) == Complex{0.0, 0.0});
    CHECK(eval_shift_poly(euler_a, {-1.0, 0.0}) == Complex{2.0, 0.0});

    // AB2's B polynomial at e^{-i pi} = -1.
    const ShiftPolynomial ab2_b{0.0, 1.5, -0.5};
    const Complex v = eval_shift_poly(ab2_b, {-1.0, 0.0});
    CHECK(v.real() == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("eval_shift_poly agrees with naive power-sum evaluation") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    std::uniform_real_distribution<double> radius(0.0, 2.0);
    std::uniform_real_distribution<double> angle(-3.141592653589793, 3.141592653589793);

    for (int trial = 0; trial < 200; ++trial) {
        const int degree = static_cast<int>(rng() % 9);
        std::vector<double> coeffs(static_cast<std::size_t>(degree) + 1);
        for (double& c : coeffs) c = coeff(rng);
        if (std::abs(coeffs.back()) < 0.1) coeffs.back() = 0.5;  // keep the degree
        const Complex u = std::polar(radius(rng), angle(rng));

        const Complex fast = eval_shift_poly(ShiftPolynomial(coeffs), u);
        const Complex slow = naive_poly_eval(coeffs, u);
        const double scale = std::max(1.0, std::abs(slow));
        CHECK(std::abs(fast - slow) <= 1e-14 * scale);
    }
}

TEST_CASE("degree normalization strips tiny trailing coefficients") {
    CHECK(ShiftPolynomial({1.0, 2.0, 1e-16}).degree() == 1);
    CHECK(ShiftPolynomial({0.0, 0.0}).degree() == -1);
    CHECK(ShiftPolynomial({0.0, 0.0}).is_zero());
    CHECK(ShiftPolynomial({5.0}).degree() == 0);
    CHECK(ShiftPolynomial({1.0, -1.0}).coeff(7) == 0.0);
}

TEST_CASE("check_consistency") {
    MethodForm euler{"euler", 1.0, ShiftPolynomial{1.0, -1.0}, ShiftPolynomial{0.0, 1.0}};
    CHECK(check_consistency(euler));

    MethodForm bad{"bad", 1.0, ShiftPolynomial{1.0, -0.5}, ShiftPolynomial{0.0, 1.0}};
    CHECK_FALSE(check_consistency(bad));

    // GHVB order-2 beta = 0.3: A = (1-E)(1-0.7E) expanded by hand.
    MethodForm ghvb{"ghvb1.3", 0.3, ShiftPolynomial{1.0, -1.7, 0.7},
                    ShiftPolynomial{0.0, 2.3 / 0.6, -1.7 / 0.6}};
    CHECK(check_consistency(ghvb));
}

TEST_CASE("poly_mul expands products") {
    const ShiftPolynomial p = poly_mul(ShiftPolynomial{1.0, -1.0}, ShiftPolynomial{1.0, -0.5});
    CHECK(p.degree() == 2);
    CHECK(p.coeff(0) == doctest::Approx(1.0));
    CHECK(p.coeff(1) == doctest::Approx(-1.5));
    CHECK(p.coeff(2) == doctest::Approx(0.5));
    CHECK(poly_mul(p, ShiftPolynomial{}).is_zero());
}

TEST_CASE("vector helpers") {
    const Vec a{1.0, 2.0};
    const Vec b{-3.0, 0.5};
    CHECK(vec_add(a, b) == Vec{-2.0, 2.5});
    CHECK(vec_sub(a, b) == Vec{4.0, 1.5});
    CHECK(vec_scale(2.0, a) == Vec{2.0, 4.0});
    CHECK(vec_norm2(Vec{3.0, 4.0}) == doctest::Approx(5.0));
    CHECK(vec_norm_inf(b) == doctest::Approx(3.0));
    CHECK(vec_finite(a));
    CHECK_FALSE(vec_finite(Vec{1.0, std::nan("")}));
}
