#include "mlmm/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

namespace mlmm {

namespace {

constexpr double kStableTol = 1e-9;
constexpr double kUnitBand = 1e-7;   // roots this close to the unit circle must be simple
constexpr double kSeparation = 1e-6;

Complex horner(const std::vector<Complex>& c, Complex u) {
    Complex acc{0.0, 0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
}

int thread_cap() {
    if (const char* env = std::getenv("MOMENTUM_LMM_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

LocusCurve locus(const MethodForm& form, int n_samples) {
    if (n_samples < 2) throw std::invalid_argument("locus: need at least 2 samples");
    if (form.b_poly.is_zero()) throw std::invalid_argument("locus: B is identically zero");

    LocusCurve curve;
    curve.thetas.reserve(static_cast<std::size_t>(n_samples));
    curve.values.reserve(static_cast<std::size_t>(n_samples));
    curve.valid.reserve(static_cast<std::size_t>(n_samples));

    const double pi = std::numbers::pi;
    for (int i = 0; i < n_samples; ++i) {
        const double theta = -pi + 2.0 * pi * i / (n_samples - 1);
        const Complex u = std::polar(1.0, -theta);
        const Complex b = eval_shift_poly(form.b_poly, u);
        curve.thetas.push_back(theta);
        if (std::abs(b) < 1e-14) {
            curve.values.emplace_back(std::nan(""), std::nan(""));
            curve.valid.push_back(false);
        } else {
            curve.values.push_back(eval_shift_poly(form.a_poly, u) / b);
            curve.valid.push_back(true);
        }
    }
    return curve;
}

Complex closed_form_locus(Family family, int order, double beta, double theta) {
    if (order < 1 || order > 4)
        throw std::invalid_argument("closed_form_locus: printed formulas cover orders 1-4");
    if (family != Family::AB && (beta <= 0.0 || beta > 1.0))
        throw std::invalid_argument("closed_form_locus: beta must be in (0,1]");

    const Complex u = std::polar(1.0, -theta);
    const Complex u2 = u * u;
    const Complex u3 = u2 * u;
    const Complex u4 = u3 * u;

    // AB denominators share the pattern C_r^{-1} (b_1 u + b_2 u^2 + ...) with
    // the classical integer numerators; C_r is the common denominator of the
    // AB row.
    Complex ab_den;
    double scale = 1.0;
    switch (order) {
        case 1:
            ab_den = u;
            scale = 1.0;
            break;
        case 2:
            ab_den = 3.0 * u - u2;
            scale = 2.0;
            break;
        case 3:
            ab_den = 23.0 * u - 16.0 * u2 + 5.0 * u3;
            scale = 12.0;
            break;
        default:
            ab_den = 55.0 * u - 59.0 * u2 + 37.0 * u3 - 9.0 * u4;
            scale = 24.0;
            break;
    }

    const Complex one{1.0, 0.0};
    switch (family) {
        case Family::AB:
            return scale * (one - u) / ab_den;
        case Family::HB:
            return scale * (one - u) * (one - (1.0 - beta) * u) / (beta * ab_den);
        case Family::GHVB: {
            const Complex num = scale * (one - u) * (one - (1.0 - beta) * u);
            Complex den;
            switch (order) {
                case 1:
                    den = beta * u;
                    break;
                case 2:
                    den = (2.0 + beta) * u - (2.0 - beta) * u2;
                    break;
                case 3:
                    den = (18.0 + 5.0 * beta) * u - (24.0 - 8.0 * beta) * u2 +
                          (6.0 - beta) * u3;
                    break;
                default:
                    den = (46.0 + 9.0 * beta) * u - (78.0 - 19.0 * beta) * u2 +
                          (42.0 - 5.0 * beta) * u3 - (10.0 - beta) * u4;
                    break;
            }
            return num / den;
        }
        default:
            throw std::invalid_argument(
                "closed_form_locus: only AB, HB and GHVB formulas are printed");
    }
}

RootSet find_roots(const std::vector<double>& coefficients) {
    std::vector<Complex> c(coefficients.size());
    for (std::size_t i = 0; i < coefficients.size(); ++i) c[i] = coefficients[i];
    return find_roots(c);
}

RootSet find_roots(const std::vector<Complex>& coefficients) {
    std::vector<Complex> c = coefficients;
    double max_abs = 0.0;
    for (const Complex& v : c) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) throw std::invalid_argument("find_roots: zero polynomial");

    while (!c.empty() && std::abs(c.back()) <= 1e-14 * max_abs) c.pop_back();
    const int degree = static_cast<int>(c.size()) - 1;
    if (degree < 1) throw std::invalid_argument("find_roots: degree must be >= 1");

    // Monic normalization keeps the iteration and residual scales sane.
    const Complex lead = c.back();
    for (Complex& v : c) v /= lead;

    // Cauchy bound: all roots lie within 1 + max |c_k|.
    double bound = 0.0;
    for (int k = 0; k < degree; ++k) bound = std::max(bound, std::abs(c[static_cast<std::size_t>(k)]));
    const double radius = std::min(1.0 + bound, 1e6);

    const int n = degree;
    std::vector<Complex> z(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        // Fixed angular offset keeps the start asymmetric to the real axis.
        const double angle = 2.0 * std::numbers::pi * k / n + 0.4;
        z[static_cast<std::size_t>(k)] = std::polar(radius, angle);
    }

    constexpr int kMaxIterations = 500;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        double max_step = 0.0;
        for (int k = 0; k < n; ++k) {
            Complex denom{1.0, 0.0};
            for (int j = 0; j < n; ++j) {
                if (j != k) denom *= z[static_cast<std::size_t>(k)] - z[static_cast<std::size_t>(j)];
            }
            if (std::abs(denom) == 0.0) {  // coincident iterates; nudge apart
                z[static_cast<std::size_t>(k)] += Complex{1e-8, 1e-8};
                max_step = std::max(max_step, 2e-8);
                continue;
            }
            const Complex delta = horner(c, z[static_cast<std::size_t>(k)]) / denom;
            z[static_cast<std::size_t>(k)] -= delta;
            max_step = std::max(max_step, std::abs(delta));
        }
        if (max_step <= 1e-14 * std::max(1.0, radius)) break;
    }

    RootSet out;
    out.roots = z;
    out.residuals.resize(static_cast<std::size_t>(n));
    const double residual_bound = 1e-10 * std::max(1.0, max_abs);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        // Residual is reported against the caller's coefficients.
        Complex p = horner(coefficients, z[static_cast<std::size_t>(k)]);
        out.residuals[static_cast<std::size_t>(k)] = std::abs(p);
        worst = std::max(worst, std::abs(p));
    }
    if (!(worst <= residual_bound))
        throw RootFindingError("find_roots: iteration cap reached without convergence",
                               out.residuals);
    return out;
}

StabilityVerdict is_stable(const MethodForm& form, Complex z) {
    const int s = std::max(form.a_poly.degree(), form.b_poly.degree());
    if (s < 0) throw std::invalid_argument("is_stable: degenerate method form");

    // r^s (A(1/r) - z B(1/r)): coefficient of r^{s-k} is a_k - z b_k.
    std::vector<Complex> poly(static_cast<std::size_t>(s) + 1);
    for (int k = 0; k <= s; ++k)
        poly[static_cast<std::size_t>(s - k)] =
            Complex{form.a_poly.coeff(static_cast<std::size_t>(k)), 0.0} -
            z * form.b_poly.coeff(static_cast<std::size_t>(k));

    double max_abs = 0.0;
    for (const Complex& v : poly) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs <= 1e-300) throw std::invalid_argument("is_stable: all coefficients vanish");

    const RootSet roots = find_roots(poly);

    StabilityVerdict verdict;
    for (const Complex& r : roots.roots)
        verdict.max_root_modulus = std::max(verdict.max_root_modulus, std::abs(r));
    verdict.boundary = std::abs(verdict.max_root_modulus - 1.0) <= kStableTol;
    verdict.stable = verdict.max_root_modulus <= 1.0 + kStableTol;

    if (verdict.stable) {
        // Roots sitting on the unit circle must be simple or the recurrence
        // admits polynomially growing solutions.
        for (std::size_t i = 0; i < roots.roots.size() && verdict.stable; ++i) {
            if (std::abs(std::abs(roots.roots[i]) - 1.0) > kUnitBand) continue;
            for (std::size_t j = 0; j < roots.roots.size(); ++j) {
                if (j == i) continue;
                if (std::abs(roots.roots[i] - roots.roots[j]) <= kSeparation) {
                    verdict.stable = false;
                    break;
                }
            }
        }
    }
    return verdict;
}

std::vector<bool> stability_raster(const MethodForm& form, double re0, double re1, int n_re,
                                   double im0, double im1, int n_im) {
    if (n_re < 1 || n_im < 1 || (n_re < 2 && n_im < 2))
        throw std::invalid_argument("stability_raster: resolution must be >= 2");
    if ((n_re > 1 && !(re1 > re0)) || (n_im > 1 && !(im1 > im0)))
        throw std::invalid_argument("stability_raster: degenerate range");

    const auto coord = [](double lo, double hi, int n, int k) {
        return n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
    };

    // Byte buffer while threads run; vector<bool> packs bits and would race.
    std::vector<unsigned char> cells(static_cast<std::size_t>(n_re) * n_im, 0);
    const int workers = std::min(thread_cap(), n_im);

    auto run_rows = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            const double im = coord(im0, im1, n_im, i);
            for (int j = 0; j < n_re; ++j) {
                const double re = coord(re0, re1, n_re, j);
                cells[static_cast<std::size_t>(i) * n_re + j] =
                    is_stable(form, Complex{re, im}).stable ? 1 : 0;
            }
        }
    };

    if (workers <= 1) {
        run_rows(0, n_im);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        const int rows_per = (n_im + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int begin = w * rows_per;
            const int end = std::min(n_im, begin + rows_per);
            if (begin >= end) break;
            pool.emplace_back(run_rows, begin, end);
        }
        for (auto& t : pool) t.join();
    }
    return std::vector<bool>(cells.begin(), cells.end());
}

}  // namespace mlmm
