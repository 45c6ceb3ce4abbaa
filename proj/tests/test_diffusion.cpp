#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mlmm/diffusion.hpp"
#include "mlmm/problems.hpp"

using namespace mlmm;

namespace {

AlphaSchedule random_schedule(std::mt19937& rng, int length) {
    std::uniform_real_distribution<double> dist(0.02, 0.999);
    std::vector<double> alphas(static_cast<std::size_t>(length));
    for (double& a : alphas) a = dist(rng);
    std::sort(alphas.begin(), alphas.end());
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (alphas[i] <= alphas[i - 1]) alphas[i] = std::nextafter(alphas[i - 1], 1.0);
    return AlphaSchedule(std::move(alphas));
}

NoiseModel linear_noise(double k00, double k01, double k10, double k11, double c0, double c1) {
    NoiseModel m;
    m.predict = [=](const Vec& x, double) {
        return Vec{k00 * x[0] + k01 * x[1] + c0, k10 * x[0] + k11 * x[1] + c1};
    };
    return m;
}

}  // namespace

TEST_CASE("sigma and state reparameterizations") {
    CHECK(sigma_bar(0.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sigma_bar(1.0) == doctest::Approx(0.0));
    CHECK(x_bar({2.0, 2.0}, 0.25) == Vec{4.0, 4.0});

    CHECK(sigma_tilde(0.5) == doctest::Approx(1.0).epsilon(1e-14));
    const Vec xt = x_tilde({3.0, 0.0}, 0.91);
    CHECK(xt[0] == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(xt[1] == doctest::Approx(0.0));

    CHECK_THROWS_AS((void)sigma_bar(0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)sigma_bar(-0.1), std::invalid_argument);
    CHECK_THROWS_AS((void)sigma_tilde(1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)x_tilde({1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("reparameterizations round-trip and are mutually reciprocal") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> adist(0.01, 0.99);
    for (int k = 0; k < 100; ++k) {
        const double alpha = adist(rng);
        CHECK(sigma_bar(alpha) * sigma_tilde(alpha) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(alpha_from_sigma_bar(sigma_bar(alpha)) == doctest::Approx(alpha).epsilon(1e-14));
        CHECK(alpha_from_sigma_tilde(sigma_tilde(alpha)) ==
              doctest::Approx(alpha).epsilon(1e-14));

        const Vec x{1.7, -0.3};
        const Vec xb = x_from_x_bar(x_bar(x, alpha), alpha);
        const Vec xt = x_from_x_tilde(x_tilde(x, alpha), alpha);
        CHECK(vec_norm_inf(vec_sub(xb, x)) <= 1e-14);
        CHECK(vec_norm_inf(vec_sub(xt, x)) <= 1e-14);
    }
}

TEST_CASE("alpha schedules validate their ordering") {
    CHECK_THROWS_AS(AlphaSchedule({0.5}), std::invalid_argument);
    CHECK_THROWS_AS(AlphaSchedule({0.9, 0.5}), std::invalid_argument);  // wrong direction
    CHECK_THROWS_AS(AlphaSchedule({0.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(AlphaSchedule({0.5, 1.2}), std::invalid_argument);

    const AlphaSchedule s({0.1, 0.4, 0.9});
    CHECK(s.size() == 3);
    CHECK(s.alpha(0) == doctest::Approx(0.9));   // cleanest
    CHECK(s.alpha(2) == doctest::Approx(0.1));   // most noised
    CHECK(s.sigma_bar_grid()[0] == doctest::Approx(sigma_bar(0.9)));
}

TEST_CASE("ddim_step pinned behaviour") {
    const AlphaSchedule schedule({0.2, 0.5, 0.8});
    NoiseModel zero;
    zero.predict = [](const Vec& x, double) { return Vec(x.size(), 0.0); };

    // Zero noise: pure rescaling by sqrt(alpha_{t-1}/alpha_t).
    const Vec next = ddim_step({1.0, -2.0}, 2, schedule, zero);
    const double carry = std::sqrt(0.5 / 0.2);
    CHECK(next[0] == doctest::Approx(carry).epsilon(1e-14));
    CHECK(next[1] == doctest::Approx(-2.0 * carry).epsilon(1e-14));

    // Equal alphas: identity for any noise model.
    const AlphaSchedule flatish({0.5, std::nextafter(0.5, 1.0), 0.9});
    NoiseModel big;
    big.predict = [](const Vec& x, double) { return Vec(x.size(), 7.0); };
    const Vec same = ddim_step({0.3, 0.4}, 2, flatish, big);
    CHECK(same[0] == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(same[1] == doctest::Approx(0.4).epsilon(1e-9));

    CHECK_THROWS_AS((void)ddim_step({1.0}, 0, schedule, zero), std::out_of_range);
    CHECK_THROWS_AS((void)ddim_step({1.0}, 3, schedule, zero), std::out_of_range);
}

TEST_CASE("one ddim_step equals one Euler step of the bar ODE") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    for (int trial = 0; trial < 20; ++trial) {
        const AlphaSchedule schedule = random_schedule(rng, 6);
        const NoiseModel noise = linear_noise(dist(rng), dist(rng), dist(rng), dist(rng),
                                              dist(rng), dist(rng));
        const Vec x_t{1.0 + dist(rng), dist(rng)};
        const int t = schedule.size() - 1;

        const Vec via_ddim = ddim_step(x_t, t, schedule, noise);

        // x_bar_{t-1} = x_bar_t + (sigma_{t-1} - sigma_t) eps(x_bar_t, sigma_t)
        const double a_t = schedule.alpha(t);
        const double a_prev = schedule.alpha(t - 1);
        Vec xb = x_bar(x_t, a_t);
        const Vec eps = noise.predict(xb, sigma_bar(a_t));
        vec_axpy(sigma_bar(a_prev) - sigma_bar(a_t), eps, xb);
        const Vec via_euler = x_from_x_bar(xb, a_prev);

        const double scale = std::max(1.0, vec_norm_inf(via_ddim));
        CHECK(vec_norm_inf(vec_sub(via_ddim, via_euler)) <= 1e-12 * scale);
    }
}

TEST_CASE("guide composes noise models per the guidance equations") {
    NoiseModel cond;
    cond.predict = [](const Vec& x, double) { return Vec{x[0] + 1.0}; };
    const auto uncond = [](const Vec& x, double) { return Vec{x[0] - 1.0}; };
    const auto gradlogp = [](const Vec&, double) { return Vec{0.25}; };

    GuidanceSpec cf{1.0, GuidanceMode::ClassifierFree, uncond};
    CHECK(guide(cond, cf).predict({2.0}, 0.1)[0] == doctest::Approx(3.0));  // s=1: conditional
    cf.scale = 0.0;
    CHECK(guide(cond, cf).predict({2.0}, 0.1)[0] == doctest::Approx(1.0));  // s=0: unconditional

    GuidanceSpec cls{0.0, GuidanceMode::Classifier, gradlogp};
    CHECK(guide(cond, cls).predict({2.0}, 0.1)[0] == doctest::Approx(3.0));  // s=0: unchanged
    cls.scale = 2.0;
    CHECK(guide(cond, cls).predict({2.0}, 0.1)[0] == doctest::Approx(2.5));  // eps - s grad

    GuidanceSpec missing{1.0, GuidanceMode::Classifier, nullptr};
    CHECK_THROWS_AS((void)guide(cond, missing), std::invalid_argument);
}

TEST_CASE("classifier-free guidance is affine in the scale") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    NoiseModel cond = linear_noise(dist(rng), dist(rng), dist(rng), dist(rng), 0.3, -0.1);
    NoiseModel uncond = linear_noise(dist(rng), dist(rng), dist(rng), dist(rng), -0.2, 0.4);

    const Vec x{0.7, -1.3};
    const Vec eps_c = cond.predict(x, 1.0);
    const Vec eps_u = uncond.predict(x, 1.0);
    for (double s : {0.0, 0.5, 1.0, 2.5, 7.0}) {
        GuidanceSpec spec{s, GuidanceMode::ClassifierFree, uncond.predict};
        const Vec got = guide(cond, spec).predict(x, 1.0);
        for (std::size_t i = 0; i < got.size(); ++i) {
            const double expect = (1.0 - s) * eps_u[i] + s * eps_c[i];
            CHECK(got[i] == doctest::Approx(expect).epsilon(1e-13));
        }
    }
}

TEST_CASE("bar field is the noise prediction; constant noise integrates exactly") {
    NoiseModel constant;
    constant.predict = [](const Vec&, double) { return Vec{0.7, -0.2}; };
    const VectorField bar = ode_field_from_noise(constant, OdeCoords::Bar);
    CHECK(bar({0.0, 0.0}, 2.0) == Vec{0.7, -0.2});

    // Any consistent method reproduces a linear-in-sigma solution exactly
    // after warm-up; GHVB across orders included.
    for (double momentum : {0.8, 1.5, 2.5, 3.5}) {
        Stepper stepper = make_method(MethodSpec::ghvb(momentum));
        Vec x{1.0, 1.0};
        double sigma = 0.0;
        for (int k = 0; k < 8; ++k) {
            x = stepper.step(bar, x, sigma, 0.25);
            sigma += 0.25;
        }
        CHECK(x[0] == doctest::Approx(1.0 + 0.7 * 2.0).epsilon(1e-13));
        CHECK(x[1] == doctest::Approx(1.0 - 0.2 * 2.0).epsilon(1e-13));
    }
}

TEST_CASE("tilde field computes the denoised estimate through the identity") {
    // eps(xbar, sigma) = k*xbar + c; s(xtilde, sigmatilde) = (xtilde - eps)/sigmatilde.
    const NoiseModel noise = linear_noise(0.3, 0.0, 0.0, 0.3, 0.1, 0.1);
    const VectorField tilde = ode_field_from_noise(noise, OdeCoords::Tilde);

    const double alpha = 0.64;
    const Vec x{1.2, -0.8};
    const double st = sigma_tilde(alpha);
    const Vec xt = x_tilde(x, alpha);
    const Vec eps = noise.predict(x_bar(x, alpha), sigma_bar(alpha));
    const Vec got = tilde(xt, st);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx((xt[i] - eps[i]) / st).epsilon(1e-13));
}

TEST_CASE("full-chain ddim equals Euler on the induced sigma grid") {
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> dist(-0.4, 0.4);
    for (int trial = 0; trial < 25; ++trial) {
        const AlphaSchedule schedule = random_schedule(rng, 4 + static_cast<int>(rng() % 8));
        const NoiseModel noise = linear_noise(dist(rng), dist(rng), dist(rng), dist(rng),
                                              dist(rng), dist(rng));
        const Vec x_start{1.0 + dist(rng), -1.0 + dist(rng)};

        const std::vector<Vec> chain = ddim_sample(x_start, schedule, noise);
        Stepper euler = make_method(MethodSpec::ab(1));
        const std::vector<Vec> ode = sample_ode_bar(x_start, schedule, noise, euler);

        REQUIRE(chain.size() == ode.size());
        for (std::size_t i = 0; i < chain.size(); ++i) {
            const double scale = std::max(1.0, vec_norm_inf(chain[i]));
            CHECK(vec_norm_inf(vec_sub(chain[i], ode[i])) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("lie_trotter_step composes the two sub-flows") {
    const VectorField f1 = [](const Vec& x, double) { return Vec{-x[0], 0.0}; };
    const VectorField f2 = [](const Vec& x, double) { return Vec{0.0, -2.0 * x[1]}; };
    const VectorField zero = [](const Vec& x, double) { return Vec(x.size(), 0.0); };
    const double delta = 0.125;

    // Commuting diagonal fields: the split Euler step multiplies componentwise.
    {
        Stepper s1 = make_method(MethodSpec::ab(1));
        Stepper s2 = make_method(MethodSpec::ab(1));
        const Vec got = lie_trotter_step({1.0, 1.0}, 0.0, delta, s1, s2, f1, f2);
        CHECK(got[0] == doctest::Approx(1.0 - delta).epsilon(1e-14));
        CHECK(got[1] == doctest::Approx(1.0 - 2.0 * delta).epsilon(1e-14));
    }

    // An identically zero second field leaves a plain stepper1 step.
    {
        Stepper s1 = make_method(MethodSpec::ghvb(1.5));
        Stepper s2 = make_method(MethodSpec::ab(1));
        Stepper reference = make_method(MethodSpec::ghvb(1.5));
        Vec split{1.0, 1.0};
        Vec plain{1.0, 1.0};
        for (int k = 0; k < 5; ++k) {
            split = lie_trotter_step(split, k * delta, delta, s1, s2, f1, zero);
            plain = reference.step(f1, plain, k * delta, delta);
        }
        CHECK(vec_norm_inf(vec_sub(split, plain)) <= 1e-14);
    }

    // An identically zero first field leaves a plain stepper2 step.
    {
        Stepper s1 = make_method(MethodSpec::ab(2));
        Stepper s2 = make_method(MethodSpec::hb(1, 0.5));
        Stepper reference = make_method(MethodSpec::hb(1, 0.5));
        Vec split{0.5, 2.0};
        Vec plain{0.5, 2.0};
        for (int k = 0; k < 5; ++k) {
            split = lie_trotter_step(split, k * delta, delta, s1, s2, zero, f2);
            plain = reference.step(f2, plain, k * delta, delta);
        }
        CHECK(vec_norm_inf(vec_sub(split, plain)) <= 1e-14);
    }
}
