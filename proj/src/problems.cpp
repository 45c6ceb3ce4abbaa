#include "mlmm/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace mlmm {

Problem test_equation(double lambda, double x0, double t0, double t1) {
    Problem p;
    p.dimension = 1;
    p.t0 = t0;
    p.t1 = t1;
    p.x0 = {x0};
    p.label = "test-eq";
    p.field = [lambda](const Vec& x, double) { return Vec{lambda * x[0]}; };
    p.exact = [lambda, x0, t0](double t) { return Vec{x0 * std::exp(lambda * (t - t0))}; };
    return p;
}

Problem test_equation(Complex lambda, Complex x0, double t0, double t1) {
    Problem p;
    p.dimension = 2;
    p.t0 = t0;
    p.t1 = t1;
    p.x0 = {x0.real(), x0.imag()};
    p.label = "test-eq-complex";
    const double a = lambda.real();
    const double b = lambda.imag();
    p.field = [a, b](const Vec& x, double) {
        return Vec{a * x[0] - b * x[1], b * x[0] + a * x[1]};
    };
    p.exact = [lambda, x0, t0](double t) {
        const Complex z = x0 * std::exp(lambda * (t - t0));
        return Vec{z.real(), z.imag()};
    };
    return p;
}

Problem toy_2x2() {
    Problem p;
    p.dimension = 2;
    p.t0 = 0.0;
    p.t1 = 3.0;
    p.x0 = {-1.0, 0.0};
    p.label = "toy2x2";
    p.field = [](const Vec& x, double) { return Vec{x[1], -9.0 * x[0] - 10.0 * x[1]}; };
    p.exact = [](double t) {
        const double fast = std::exp(-9.0 * t) / 8.0;
        const double slow = 9.0 * std::exp(-t) / 8.0;
        return Vec{fast - slow, -9.0 * fast + slow};
    };
    return p;
}

Problem linear_system(const Matrix& m, const Vec& x0, double t0, double t1) {
    if (m.size() != static_cast<int>(x0.size()))
        throw std::invalid_argument("linear_system: matrix and x0 dimensions differ");
    Problem p;
    p.dimension = m.size();
    p.t0 = t0;
    p.t1 = t1;
    p.x0 = x0;
    p.label = "linear-system";
    p.field = [m](const Vec& x, double) { return m.apply(x); };
    p.exact = [m, x0, t0](double t) { return expm(m.scaled(t - t0)).apply(x0); };
    return p;
}

}  // namespace mlmm
