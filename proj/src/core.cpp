#include "mlmm/core.hpp"

#include <cmath>
#include <cstdlib>

namespace mlmm {

Vec vec_add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec vec_sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec vec_scale(double s, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

void vec_axpy(double s, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

double vec_norm2(const Vec& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

double vec_norm_inf(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

bool vec_finite(const Vec& a) {
    for (double v : a) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

ShiftPolynomial::ShiftPolynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) {
    normalize();
}

ShiftPolynomial::ShiftPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    normalize();
}

void ShiftPolynomial::normalize() {
    while (!coeffs_.empty() && std::abs(coeffs_.back()) < kDegreeEps) coeffs_.pop_back();
}

int ShiftPolynomial::degree() const noexcept {
    return static_cast<int>(coeffs_.size()) - 1;
}

double ShiftPolynomial::coeff(std::size_t k) const noexcept {
    return k < coeffs_.size() ? coeffs_[k] : 0.0;
}

Complex eval_shift_poly(const ShiftPolynomial& p, Complex u) {
    const auto& c = p.coefficients();
    Complex acc{0.0, 0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
}

ShiftPolynomial poly_mul(const ShiftPolynomial& a, const ShiftPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    const auto& ca = a.coefficients();
    const auto& cb = b.coefficients();
    std::vector<double> out(ca.size() + cb.size() - 1, 0.0);
    for (std::size_t i = 0; i < ca.size(); ++i) {
        for (std::size_t j = 0; j < cb.size(); ++j) out[i + j] += ca[i] * cb[j];
    }
    return ShiftPolynomial(std::move(out));
}

bool check_consistency(const MethodForm& form) {
    return std::abs(eval_shift_poly(form.a_poly, Complex{1.0, 0.0})) <= 1e-12;
}

}  // namespace mlmm
