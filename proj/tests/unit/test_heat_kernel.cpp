#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "kpzlab/heat_kernel.hpp"

using namespace kpzlab;

namespace {

GridSpec unit_grid(std::size_t nx, double half_width)
{
    return make_grid(-half_width, half_width, nx, 0, 1, 1, {.override_boundary_guard = true});
}

FieldState field_from(const GridSpec& g, auto f)
{
    FieldState s;
    s.grid = g;
    s.values.resize(g.nx());
    for (std::size_t i = 0; i < g.nx(); ++i) s.values[i] = f(g.x(i));
    return s;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// E[(V_{t+eps}(0) - V_t(0))^2] as the space-time integral of the squared
// kernel difference, integrated numerically in both variables:
//   int_0^{t+eps} int_R (p_{t+eps-s}(y) - 1{s<t} p_{t-s}(y))^2 dy ds.
// The y integrals are done after rescaling y by the narrower kernel width.
double increment_variance_by_quadrature(double t, double eps)
{
    using boost::math::quadrature::gauss_kronrod;
    using boost::math::quadrature::tanh_sinh;
    const auto p = [](double a, double y) { return heat_kernel(a, y); };

    // int p_a(y) p_b(y) dy with y = sqrt(min(a, b)) u.
    const auto overlap = [&](double a, double b) {
        const double lo = std::min(a, b);
        const double hi = std::max(a, b);
        const double r = std::sqrt(lo);
        const auto g = [&](double u) { return p(1.0, u) * p(hi, r * u); };
        return gauss_kronrod<double, 61>::integrate(g, -12.0, 12.0, 15, 1e-14);
    };

    // Integrate in the time-to-go r rather than s, so that the singular end
    // r -> 0 is resolved without cancellation.
    tanh_sinh<double> ts;
    const auto before = [&](double r) {
        const double a = eps + r;
        return overlap(a, a) + overlap(r, r) - 2.0 * overlap(a, r);
    };
    const auto after = [&](double r) { return overlap(r, r); };
    return ts.integrate(before, 0.0, t, 1e-12) + ts.integrate(after, 0.0, eps, 1e-12);
}

}  // namespace

TEST_CASE("heat kernel closed form")
{
    CHECK(heat_kernel(1, 0) == doctest::Approx(0.3989423).epsilon(1e-7));
    CHECK(heat_kernel(2, 1) == doctest::Approx(std::exp(-0.25) / std::sqrt(4 * std::numbers::pi)));
    CHECK_THROWS_AS(heat_kernel(0, 1), InputError);
    CHECK_THROWS_AS(heat_kernel(-1, 1), InputError);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ut(0.01, 5.0), ux(-10.0, 10.0);
    for (int k = 0; k < 100; ++k) {
        const double t = ut(rng), x = ux(rng);
        CHECK(heat_kernel(t, x) == heat_kernel(t, -x));
    }

    double mass = 0.0;
    const double dx = 1.0 / 64;
    for (int i = -512; i < 512; ++i) mass += heat_kernel(1, i * dx) * dx;
    CHECK(std::abs(mass - 1.0) < 1e-8);
}

TEST_CASE("heat step fixes constants and conserves mass")
{
    const GridSpec g = unit_grid(256, 8);
    const FieldState c = field_from(g, [](double) { return 2.5; });
    const FieldState c1 = heat_step(c, 0.3);
    for (double v : c1.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(c1.t_abs == doctest::Approx(0.3));

    const FieldState bump = field_from(g, [](double x) { return std::exp(-std::abs(x)) * (2 + std::sin(3 * x)); });
    const FieldState moved = heat_step(bump, 0.7);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < g.nx(); ++i) {
        m0 += bump.values[i] * g.dx();
        m1 += moved.values[i] * g.dx();
    }
    CHECK(std::abs(m0 - m1) < 1e-12);
}

TEST_CASE("heat step reproduces the semigroup of the kernel")
{
    const GridSpec g = unit_grid(1024, 8);  // dx = 1/64
    const FieldState p01 = field_from(g, [](double x) { return heat_kernel(0.1, x); });
    const FieldState stepped = heat_step(p01, 0.1);
    const FieldState p02 = field_from(g, [](double x) { return heat_kernel(0.2, x); });
    CHECK(sup_diff(stepped.values, p02.values) < 1e-6);
}

TEST_CASE("heat step composes additively in time")
{
    const GridSpec g = unit_grid(200, 10);
    const FieldState f = field_from(g, [](double x) { return 1.0 + std::exp(-x * x) + 0.1 * std::cos(x); });
    const FieldState ab = heat_step(heat_step(f, 0.13), 0.29);
    const FieldState direct = heat_step(f, 0.42);
    CHECK(sup_diff(ab.values, direct.values) < 1e-10);


    // A step much wider than dx keeps a positive field positive; unresolved
    // steps are covered in test_positivity.cpp.
    const FieldState positive = field_from(g, [](double x) { return 1e-3 + std::exp(-x * x / 0.01); });
    for (double v : heat_step(positive, 0.5).values) CHECK(v > 0.0);
}

TEST_CASE("heat step rejects non-finite input")
{
    const GridSpec g = unit_grid(64, 8);
    FieldState f = field_from(g, [](double) { return 1.0; });
    f.values[5] = NAN;
    CHECK_THROWS_AS(heat_step(f, 0.1), NumericalError);
    f.values[5] = INFINITY;
    CHECK_THROWS_AS(heat_step(f, 0.1), NumericalError);
}

TEST_CASE("linear increment variance closed form")
{
    CHECK(linear_increment_variance(1, 0) == 0.0);
    CHECK_THROWS_AS(linear_increment_variance(1, -0.1), InputError);

    const double closed = linear_increment_variance(1, 0.01);
    const double numeric = increment_variance_by_quadrature(1, 0.01);
    CHECK(closed == doctest::Approx(numeric).epsilon(1e-8));
    CHECK(closed == doctest::Approx(0.07978496).epsilon(1e-7));

    const double eps = 1e-4;
    const double lead = std::sqrt(2.0 / std::numbers::pi) * std::sqrt(eps);
    CHECK(std::abs(linear_increment_variance(1, eps) / lead - 1.0) < 1e-2);

    // Oracle consistency: nonnegative, increasing in eps, vanishing at 0.
    double prev = 0.0;
    for (double e = 1e-8; e < 2.0; e *= 1.7) {
        const double v = linear_increment_variance(1, e);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(linear_increment_variance(1, 1e-12) < 1e-5);
}
