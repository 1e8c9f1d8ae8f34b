#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kpzlab/fbm.hpp"
#include "kpzlab/pathstats.hpp"
#include "kpzlab/verify.hpp"

using namespace kpzlab;

namespace {

std::vector<double> increments(const Path& p, std::size_t lag = 1)
{
    std::vector<double> d;
    for (std::size_t k = lag; k < p.size(); ++k) d.push_back(p.values[k] - p.values[k - lag]);
    return d;
}

double mean_square(const std::vector<double>& x)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    return s / static_cast<double>(x.size());
}

std::vector<double> uniform_times(std::size_t n, double dt, std::size_t first = 1)
{
    std::vector<double> t;
    for (std::size_t k = first; k <= n; ++k) t.push_back(static_cast<double>(k) * dt);
    return t;
}

}  // namespace

TEST_CASE("fbm covariance")
{
    CHECK(fbm_covariance(0.5, 1, 2) == doctest::Approx(1.0));
    CHECK(fbm_covariance(0.25, 1, 1) == doctest::Approx(1.0));
    // E|X_1 - X_0|^2 with X_0 = 0.
    CHECK(fbm_covariance(0.25, 1, 1) - 2 * fbm_covariance(0.25, 0, 1) + fbm_covariance(0.25, 0, 0) ==
          doctest::Approx(1.0));
    CHECK(fbm_covariance(0.25, 1, 2) == doctest::Approx(0.7071068).epsilon(1e-7));
    CHECK(fbm_covariance(0.25, 2, 1) == fbm_covariance(0.25, 1, 2));
    CHECK_THROWS_AS(fbm_covariance(0.25, -1, 1), InputError);
    CHECK_THROWS_AS((FbmSpec{.hurst = 1.0, .times = {1}}.validate()), InputError);
    CHECK_THROWS_AS((FbmSpec{.hurst = 0.25, .times = {1, 1}}.validate()), InputError);
}

TEST_CASE("Cholesky sampler: single time and zero time")
{
    std::vector<double> x;
    for (std::uint64_t r = 0; r < 4000; ++r) {
        const Path p = sample_fbm_cholesky({.hurst = 0.25, .times = {1.0}, .seed = 3, .stream_id = r});
        x.push_back(p.values[0]);
    }
    const SampleMoments m = sample_moments(x);
    CHECK(std::abs(m.mean) < 4.0 * m.se_mean);
    CHECK(std::abs(m.variance - 1.0) < 4.0 * m.se_variance);
    CHECK(ks_normality(x).passed());

    const Path zero = sample_fbm_cholesky({.hurst = 0.25, .times = {0.0}, .seed = 1});
    CHECK(zero.values == std::vector<double>{0.0});
    const Path lead = sample_fbm_cholesky({.hurst = 0.25, .times = {0.0, 0.5, 1.0}, .seed = 1});
    CHECK(lead.values[0] == 0.0);
}

TEST_CASE("Cholesky sampler reproduces the covariance")
{
    const std::vector<double> times = uniform_times(12, 1.0 / 6);
    const std::size_t m = times.size();
    const std::size_t samples = 3000;
    std::vector<std::vector<double>> draws;
    for (std::uint64_t r = 0; r < samples; ++r) {
        draws.push_back(sample_fbm_cholesky({.hurst = 0.25, .times = times, .seed = 8, .stream_id = r}).values);
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            std::vector<double> prod;
            for (const auto& d : draws) prod.push_back(d[i] * d[j]);
            const SampleMoments pm = sample_moments(prod);
            CHECK(std::abs(pm.mean - fbm_covariance(0.25, times[i], times[j])) < 4.0 * pm.se_mean);
        }
    }
}

TEST_CASE("circulant increments have variance dt^{2H}")
{
    const double dt = 1.0 / 1024;
    const Path p = sample_fbm_circulant(0.25, 1 << 18, dt, 4, 0);
    CHECK(p.size() == (1u << 18) + 1);
    CHECK(p.values[0] == 0.0);
    CHECK(std::abs(mean_square(increments(p)) / std::sqrt(dt) - 1.0) < 0.01);

    // Self-similarity: spacing c dt has variance c^{1/2} dt^{1/2}.
    for (std::size_t c : {4u, 16u}) {
        const double expect = std::sqrt(static_cast<double>(c) * dt);
        CHECK(std::abs(mean_square(increments(p, c)) / expect - 1.0) < 0.03);
    }
    CHECK_THROWS_AS(sample_fbm_circulant(0.25, 1000, dt, 1, 0), InputError);
}

TEST_CASE("circulant Brownian increments are uncorrelated")
{
    const std::size_t n = 1 << 16;
    const Path p = sample_fbm_circulant(0.5, n, 1.0 / n, 6, 2);
    const auto d = increments(p);
    const std::vector<double> a(d.begin(), d.end() - 1), b(d.begin() + 1, d.end());
    CHECK(std::abs(sample_correlation(a, b)) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(mean_square(d) * static_cast<double>(n) - 1.0) < 0.03);
}

TEST_CASE("Cholesky and circulant generators agree in distribution")
{
    const std::size_t n = 1024;
    const double dt = 1.0 / n;
    const Path chol = sample_fbm({.hurst = 0.25, .times = uniform_times(n, dt, 0),
                                  .method = FbmMethod::Cholesky, .seed = 10});
    const Path circ = sample_fbm({.hurst = 0.25, .times = uniform_times(n, dt, 0),
                                  .method = FbmMethod::Circulant, .seed = 10});
    CHECK(chol.size() == n + 1);
    CHECK(circ.size() == n + 1);
    const KsResult ks = ks_two_sample(increments(chol), increments(circ));
    CHECK(ks.threshold == doctest::Approx(1.63 * std::sqrt(2.0 / n)));
    CHECK(ks.passed());
}

TEST_CASE("circulant increments are stationary")
{
    const double dt = 1.0 / 256;
    const CirculantFbm gen(0.25, 512, dt);
    const std::size_t eps_steps = 8;
    std::vector<std::vector<double>> at(3);
    for (std::uint64_t r = 0; r < 800; ++r) {
        const Path p = gen.sample(12, r);
        for (std::size_t j = 0; j < 3; ++j) {
            const std::size_t k = 100 + 150 * j;  // t = 0.39, 0.98, 1.56
            at[j].push_back(p.values[k + eps_steps] - p.values[k]);
        }
    }
    const double expect = std::sqrt(eps_steps * dt);
    for (const auto& x : at) {
        const SampleMoments m = sample_moments(x);
        CHECK(std::abs(m.variance - expect) < 4.0 * m.se_variance);
    }
}

TEST_CASE("rescaling to the KPZ normalization")
{
    const double dt = 1.0 / 4096;
    const Path p = rescale_to_kpz_scale(sample_fbm_circulant(0.25, 1 << 18, dt, 13, 0));
    const std::size_t lag = 16;
    const double eps = lag * dt;
    CHECK(std::abs(mean_square(increments(p, lag)) / (0.797885 * std::sqrt(eps)) - 1.0) < 0.03);
    CHECK(kFbmKpzScale == doctest::Approx(std::pow(2.0 / std::numbers::pi, 0.25)).epsilon(1e-15));

    const Path zero{0.0, 0.5, {0, 0, 0}};
    CHECK(rescale_to_kpz_scale(zero).values == zero.values);

    const Path q = sample_fbm_circulant(0.25, 64, 1.0 / 64, 1, 1);
    const Path back = scale_path(rescale_to_kpz_scale(q), 1.0 / kFbmKpzScale);
    for (std::size_t k = 0; k < q.size(); ++k) {
        CHECK(std::abs(back.values[k] - q.values[k]) <= 1e-15 * std::max(1.0, std::abs(q.values[k])));
    }
}

TEST_CASE("automatic method and sampling are deterministic")
{
    const FbmSpec spec{.hurst = 0.25, .times = uniform_times(5000, 1e-3), .seed = 2, .stream_id = 1};
    const Path a = sample_fbm(spec);
    const Path b = sample_fbm(spec);
    CHECK(a.values == b.values);
    CHECK(a.t0 == doctest::Approx(1e-3));
    CHECK(a.size() == 5000);
}
