#include "mlmm/expm.hpp"

#include <cmath>
#include <stdexcept>

namespace mlmm {

Matrix Matrix::identity(int n) {
    Matrix m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Vec Matrix::apply(const Vec& x) const {
    if (static_cast<int>(x.size()) != n_)
        throw std::invalid_argument("Matrix::apply: dimension mismatch");
    Vec y(x.size(), 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += at(i, j) * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

Matrix Matrix::multiply(const Matrix& other) const {
    Matrix out(n_);
    for (int i = 0; i < n_; ++i) {
        for (int k = 0; k < n_; ++k) {
            const double aik = at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n_; ++j) out.at(i, j) += aik * other.at(k, j);
        }
    }
    return out;
}

Matrix Matrix::scaled(double s) const {
    Matrix out = *this;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) out.at(i, j) *= s;
    return out;
}

Matrix Matrix::plus(const Matrix& other) const {
    Matrix out = *this;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) out.at(i, j) += other.at(i, j);
    return out;
}

double Matrix::norm_inf() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        for (int j = 0; j < n_; ++j) row += std::abs(at(i, j));
        m = std::max(m, row);
    }
    return m;
}

Matrix expm(const Matrix& a) {
    const int n = a.size();
    if (n == 0) return a;

    // Scale so the Taylor argument has norm <= 1/2.
    int squarings = 0;
    double norm = a.norm_inf();
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    const Matrix b = a.scaled(std::ldexp(1.0, -squarings));

    Matrix result = Matrix::identity(n);
    Matrix term = Matrix::identity(n);
    for (int k = 1; k <= 64; ++k) {
        term = term.multiply(b).scaled(1.0 / k);
        result = result.plus(term);
        if (term.norm_inf() <= 1e-16 * std::max(1.0, result.norm_inf())) break;
    }
    for (int s = 0; s < squarings; ++s) result = result.multiply(result);
    return result;
}

}  // namespace mlmm
