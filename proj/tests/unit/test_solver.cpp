#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kpzlab/heat_kernel.hpp"
#include "kpzlab/solver.hpp"
#include "kpzlab/verify.hpp"

using namespace kpzlab;

namespace {

GridSpec small_grid(double t_start, double t_end, std::size_t nt, std::size_t nx = 128,
                    double half_width = 4)
{
    return make_grid(-half_width, half_width, nx, t_start, t_end, nt,
                     {.override_boundary_guard = true});
}

// Exact Var V_N(0) of the additive scheme: V_N = sum_m H^m xi / dx with
// H the spectral heat step, so the variance is
//   (dt / dx) (1 / nx) sum_{m=0}^{N-1} sum_k exp(-k^2 m dt)
// over the periodic wavenumbers k of the grid.
double discrete_additive_variance(const GridSpec& g)
{
    const auto nx = static_cast<long>(g.nx());
    double total = 0.0;
    for (std::size_t m = 0; m < g.nt(); ++m) {
        double modes = 0.0;
        for (long j = -nx / 2; j < nx - nx / 2; ++j) {
            const double k = 2.0 * std::numbers::pi * static_cast<double>(j) / g.width();
            modes += std::exp(-k * k * static_cast<double>(m) * g.dt());
        }
        total += modes;
    }
    return g.dt() / g.dx() * total / static_cast<double>(nx);
}

}  // namespace

TEST_CASE("zero noise leaves only the Ito drift")
{
    const GridSpec g = small_grid(0, 1, 256);  // dx = 1/16
    const SolveOptions opts{.snapshot_times = {0.5, 1.0}};
    const Trajectory traj =
        solve(g, InitialDatum::from_expression("0"), NoiseArray::zeros(g), SolveMode::Multiplicative, opts);
    for (double t : {0.5, 1.0}) {
        const FieldState& s = traj.snapshot_at(t);
        const double expected = std::exp(-t / (2.0 * g.dx()));
        for (std::size_t i = 0; i < g.nx(); ++i) {
            CHECK(s.value(i) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    CHECK(traj.origin_log_path.values.back() == doctest::Approx(-1.0 / (2.0 * g.dx())).epsilon(1e-12));
    CHECK(traj.origin_path.size() == g.nt() + 1);
}

TEST_CASE("noise multiplier has unit mean")
{
    const GridSpec g = small_grid(0, 1, 2048, 512, 8);  // 2^20 cells
    const NoiseArray noise = sample_noise(g, 11, 0).materialize();
    const double sigma = 1.0 / g.dx();
    const double drift = g.dt() / (2.0 * g.dx());
    double sum = 0.0, sumsq = 0.0;
    for (double w : noise.values()) {
        const double m = std::exp(sigma * w - drift);
        sum += m;
        sumsq += m * m;
    }
    const double n = static_cast<double>(noise.values().size());
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0) < 4.0 * se);
}

TEST_CASE("additive variance matches the scheme's exact variance")
{
    const GridSpec g = small_grid(0, 1, 256, 64, 4);
    const std::size_t replicas = 2000;
    const auto ens = solve_ensemble(g, InitialDatum::from_expression("-inf"), 77, replicas,
                                    SolveMode::Additive, {}, 2);
    std::vector<double> v1;
    for (const auto& traj : ens) v1.push_back(traj.origin_path.values.back());
    const SampleMoments m = sample_moments(v1);
    const double oracle = discrete_additive_variance(g);
    CHECK(std::abs(m.variance - oracle) < 3.0 * m.se_variance);
    // On this coarse lattice the scheme's variance sits a few percent from
    // the continuum value sqrt(1/pi).
    CHECK(std::abs(oracle / std::sqrt(1.0 / std::numbers::pi) - 1.0) < 0.05);
}

TEST_CASE("ensemble mean of the narrow wedge follows the heat kernel")
{
    const double t0 = 1.0 / 64;
    const GridSpec g = small_grid(t0, t0 + 0.5, 512);  // dx = 1/16, dt = 1/1024
    const double t_end = g.t_end();
    const std::size_t replicas = 1000;
    const auto ens = solve_ensemble(g, InitialDatum::narrow_wedge(t0), 5, replicas,
                                    SolveMode::Multiplicative, {.snapshot_times = {t_end}}, 2);
    const FieldState expect = heat_step(make_initial_field(g, InitialDatum::narrow_wedge(t0)), 0.5);
    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const auto i = static_cast<std::size_t>(std::lround((x - g.x_min()) / g.dx()));
        std::vector<double> z;
        for (const auto& traj : ens) z.push_back(traj.snapshot_at(t_end).value(i));
        const SampleMoments m = sample_moments(z);
        CHECK(std::abs(m.mean - expect.values[i]) < 3.0 * m.se_mean);
        // The sampled kernel and the continuum kernel agree closely.
        CHECK(expect.values[i] == doctest::Approx(heat_kernel(t_end, x)).epsilon(1e-6));
    }
}

TEST_CASE("solution is linear in the initial field")
{
    const GridSpec g = small_grid(0, 0.25, 256, 128, 4);
    const NoiseRealization noise = sample_noise(g, 3, 0);
    const auto ic1 = InitialDatum::from_expression("-|x|");
    const auto ic2 = InitialDatum::from_expression("-(x-1)^2 + 0.5");
    const CheckReport lin = linearity_check(g, noise, ic1, ic2);
    CHECK(lin.pass);
    CHECK(lin.measured <= 1e-10);

    const SolveOptions opts{.snapshot_times = {0.25}};
    const auto base = solve(g, ic1, noise, SolveMode::Multiplicative, opts);
    const auto with_empty =
        linearity_check(g, noise, ic1, InitialDatum::from_expression("-inf"));
    CHECK(with_empty.measured == 0.0);

    // e^{f + log 3} = 3 e^f: homogeneity.
    const auto scaled =
        solve(g, InitialDatum::from_expression("-|x| + 1.0986122886681098"), noise,
              SolveMode::Multiplicative, opts);
    const FieldState& a = base.snapshot_at(0.25);
    const FieldState& b = scaled.snapshot_at(0.25);
    for (std::size_t i = 0; i < g.nx(); ++i) {
        CHECK(b.value(i) == doctest::Approx(3.0 * a.value(i)).epsilon(1e-12));
    }
}

TEST_CASE("large fields are renormalized instead of overflowing")
{
    const GridSpec g = small_grid(0, 0.5, 128, 64, 4);
    const auto traj = solve(g, InitialDatum::from_expression("700 - x^2"), sample_noise(g, 1, 0),
                            SolveMode::Multiplicative, {.snapshot_times = {0.5}});
    const FieldState& s = traj.snapshot_at(0.5);
    CHECK(s.log_scale > 300.0);
    for (double v : traj.origin_log_path.values) CHECK(std::isfinite(v));
    CHECK(traj.origin_log_path.values.front() == doctest::Approx(700.0));

    // The same run shifted down by 700 differs by exactly that constant in log.
    const auto low = solve(g, InitialDatum::from_expression("-x^2"), sample_noise(g, 1, 0),
                           SolveMode::Multiplicative);
    for (std::size_t k = 0; k < low.origin_log_path.size(); ++k) {
        CHECK(traj.origin_log_path.values[k] - low.origin_log_path.values[k] ==
              doctest::Approx(700.0).epsilon(1e-12));
    }
}

TEST_CASE("additive mode needs a zero start")
{
    const GridSpec g = small_grid(0, 0.1, 10, 64, 4);
    CHECK_THROWS_AS(solve(g, InitialDatum::from_expression("0"), NoiseArray::zeros(g), SolveMode::Additive),
                    InputError);
    const auto traj = solve(g, InitialDatum::from_expression("-inf"), sample_noise(g, 1, 0), SolveMode::Additive);
    CHECK(traj.origin_path.values.front() == 0.0);
    CHECK(traj.temporal_path().values.back() != 0.0);
}

TEST_CASE("ensembles do not depend on the thread count")
{
    const GridSpec g = small_grid(0, 0.25, 64, 64, 4);
    const auto ic = InitialDatum::brownian(9);
    const auto one = solve_ensemble(g, ic, 21, 6, SolveMode::Multiplicative, {}, 1);
    const auto four = solve_ensemble(g, ic, 21, 6, SolveMode::Multiplicative, {}, 4);
    for (std::size_t r = 0; r < one.size(); ++r) {
        CHECK(one[r].stream_id == r);
        CHECK(one[r].origin_log_path.values == four[r].origin_log_path.values);
    }
    CHECK(one[0].origin_log_path.values != one[1].origin_log_path.values);
    CHECK_THROWS_AS(solve_ensemble(g, ic, 21, 0, SolveMode::Multiplicative, {}, 1), InputError);
}

TEST_CASE("cole_hopf")
{
    const Path ones{0.0, 0.1, {1, 1, 1}};
    for (double h : cole_hopf(ones).values) CHECK(h == 0.0);
    const Path es{0.0, 0.1, {std::numbers::e, std::numbers::e}};
    for (double h : cole_hopf(es).values) CHECK(h == doctest::Approx(1.0));
    const Path bad{0.0, 0.1, {1, 2, 0, 3}};
    try {
        (void)cole_hopf(bad);
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("index 2") != std::string::npos);
    }
}

TEST_CASE("scaled_height")
{
    Trajectory traj;
    traj.ic = InitialDatum::narrow_wedge(0.125);
    traj.mode = SolveMode::Multiplicative;
    traj.origin_log_path = Path{0.125, 0.125, std::vector<double>(81, 0.0)};  // up to t = 10.125
    // log Z = 0: h = (alpha t / 24) / t^{1/3} = t^{2/3} / 24 for alpha = 1.
    CHECK(scaled_height(traj, 8.0, 1.0) == doctest::Approx(4.0 / 24.0));
    CHECK(scaled_height(traj, 1.0, 1.0) == doctest::Approx(1.0 / 24.0));
    traj.origin_log_path.values[8] = -0.3;  // t = 1.125
    traj.origin_log_path.values[7] = 0.7;   // t = 1
    CHECK(scaled_height(traj, 1.0, 1.0) == doctest::Approx(0.7 + 1.0 / 24.0));

    Trajectory short_run = traj;
    short_run.origin_log_path = Path{0.125, 0.125, std::vector<double>(12, 0.0)};  // to 1.5
    CHECK_THROWS_AS(scaled_height(short_run, 1.0, 2.0), InputError);

    Trajectory flat = traj;
    flat.ic = InitialDatum::from_expression("0");
    CHECK_THROWS_AS(scaled_height(flat, 1.0, 1.0), InputError);
}

TEST_CASE("stationarity transform of the kernel is flat")
{
    const GridSpec g = small_grid(0.5, 1.5, 100, 128, 4);
    FieldState f = make_initial_field(g, InitialDatum::narrow_wedge(0.5));
    const auto out = stationarity_transform(f);
    const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi * 0.5);
    for (double v : out) CHECK(v == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("stationarity transform of the wedge ensemble")
{
    const double t0 = 1.0 / 64;
    const GridSpec g = small_grid(t0, t0 + 0.5, 512);
    const double s = g.t_end();
    const auto ens = solve_ensemble(g, InitialDatum::narrow_wedge(t0), 17, 1000,
                                    SolveMode::Multiplicative, {.snapshot_times = {s}}, 2);
    const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi * s);
    std::vector<std::vector<double>> at(3);
    const std::size_t i0 = g.origin_index();
    const std::size_t step = static_cast<std::size_t>(std::lround(1.0 / g.dx()));
    for (const auto& traj : ens) {
        const auto tr = stationarity_transform(traj.snapshot_at(s));
        at[0].push_back(tr[i0]);
        at[1].push_back(tr[i0 + step]);
        at[2].push_back(tr[i0 - 2 * step]);
    }
    for (const auto& sample : at) {
        const SampleMoments m = sample_moments(sample);
        CHECK(std::abs(m.mean - c) < 3.0 * m.se_mean);
    }
    const SampleMoments y0 = sample_moments(at[0]);
    const SampleMoments y1 = sample_moments(at[1]);
    const double se = std::hypot(y0.se_variance, y1.se_variance);
    CHECK(std::abs(y0.variance - y1.variance) < 4.0 * se);
}
