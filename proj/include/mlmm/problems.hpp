#pragma once

#include <functional>
#include <optional>
#include <string>

#include "mlmm/core.hpp"
#include "mlmm/expm.hpp"
#include "mlmm/methods.hpp"

// Analytically solvable test problems: the scalar test equation x' = lambda x
// (complex lambda realified as a 2-D rotation-scaling system), the 2x2 stiff
// toy problem, and general linear systems backed by the expm oracle.

namespace mlmm {

struct Problem {
    int dimension = 1;
    VectorField field;
    std::optional<std::function<Vec(double)>> exact;  // closed-form solution when known
    double t0 = 0.0;
    double t1 = 1.0;
    Vec x0;
    std::string label;
};

/// x' = lambda x with real lambda; exact solution x0 e^{lambda (t - t0)}.
[[nodiscard]] Problem test_equation(double lambda, double x0, double t0, double t1);

/// x' = lambda x with complex lambda, realified as the 2x2 system
/// [[re,-im],[im,re]] so every stepper operates on real vectors only.
[[nodiscard]] Problem test_equation(Complex lambda, Complex x0, double t0, double t1);

/// The stiff 2-D toy problem x' = [[0,1],[-9,-10]] x, x(0) = (-1,0) on [0,3],
/// with eigenvalues -9 and -1 and the closed-form solution
/// x(t) = (1/8)(1,-9) e^{-9t} + (9/8)(-1,1) e^{-t}.
[[nodiscard]] Problem toy_2x2();

/// x' = M x with the exact solution expm(M (t - t0)) x0 supplied by the
/// independent matrix-exponential oracle.
[[nodiscard]] Problem linear_system(const Matrix& m, const Vec& x0, double t0, double t1);

}  // namespace mlmm
