#pragma once

#include <vector>

#include "mlmm/core.hpp"

// Dense matrix exponential used as the independent solution oracle for
// linear problems. Deliberately shares no numerical kernels with the
// steppers beyond plain vector arithmetic.

namespace mlmm {

/// Small dense row-major square matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(int n, double fill = 0.0) : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {}
    static Matrix identity(int n);

    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
    [[nodiscard]] double at(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * n_ + j];
    }

    [[nodiscard]] Vec apply(const Vec& x) const;
    [[nodiscard]] Matrix multiply(const Matrix& other) const;
    [[nodiscard]] Matrix scaled(double s) const;
    [[nodiscard]] Matrix plus(const Matrix& other) const;

    /// Maximum absolute row sum (infinity norm).
    [[nodiscard]] double norm_inf() const;

private:
    int n_ = 0;
    std::vector<double> data_;
};

/// exp(A) by scaling and squaring around a truncated Taylor series; the
/// series is extended until the appended term falls below 1e-16 relative
/// to the running sum, which keeps the overall error comfortably under
/// the 1e-12 oracle target for desk-scale matrices.
[[nodiscard]] Matrix expm(const Matrix& a);

}  // namespace mlmm
