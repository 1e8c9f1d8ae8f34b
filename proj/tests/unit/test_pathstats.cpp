#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kpzlab/fbm.hpp"
#include "kpzlab/pathstats.hpp"
#include "kpzlab/rng.hpp"
#include "kpzlab/verify.hpp"

using namespace kpzlab;

namespace {

Path linear_path(double t0, double dt, std::size_t n, double slope = 1.0)
{
    Path p{t0, dt, {}};
    for (std::size_t k = 0; k < n; ++k) p.values.push_back(slope * p.time(k));
    return p;
}

// Rounds values to multiples of 2^-32 so that adding a small dyadic
// constant is exact in floating point, which makes shift invariance an exact
// (bitwise) property.
Path dyadic(Path p)
{
    for (double& v : p.values) v = std::ldexp(std::round(std::ldexp(v, 32)), -32);
    return p;
}

Path shifted(Path p, double c)
{
    for (double& v : p.values) v += c;
    return p;
}

std::vector<double> normals(std::size_t n, std::uint64_t stream, double sd = 1.0)
{
    std::vector<double> z(n);
    CounterNormalStream(123, RngDomain::SpaceTimeNoise, stream).fill_row(0, z);
    for (double& v : z) v *= sd;
    return z;
}

}  // namespace

TEST_CASE("constants")
{
    CHECK(kQuarticVariationConstant == doctest::Approx(6.0 / std::numbers::pi).epsilon(1e-15));
    CHECK(kModulusConstant == doctest::Approx(std::pow(8.0 / std::numbers::pi, 0.25)).epsilon(1e-15));
    CHECK(kStandardizeFactor == doctest::Approx(std::pow(std::numbers::pi / 2.0, 0.25)).epsilon(1e-15));
}

TEST_CASE("alpha variation examples")
{
    const Path flat{0.0, 1.0 / 64, std::vector<double>(129, 3.0)};
    CHECK(alpha_variation(flat, 4, 1.0 / 16, 0, 2).value == 0.0);

    const Path line = linear_path(0, 1.0 / 4, 5);
    const VariationResult v = alpha_variation(line, 1, 0.25, 0, 1);
    CHECK(v.terms == 4);
    CHECK(v.value == doctest::Approx(1.0));

    CHECK_THROWS_AS(alpha_variation(line, 1, 0.3, 0, 1), InputError);
    CHECK_THROWS_AS(alpha_variation(line, 1, 0.25, 0, 3), InputError);
    CHECK_THROWS_AS(alpha_variation(line, 0, 0.25, 0, 1), InputError);
}

TEST_CASE("alpha variation scales exactly")
{
    const Path p = sample_fbm_circulant(0.25, 1 << 12, 1.0 / 2048, 5, 0);
    for (double alpha : {2.0, 3.0, 4.0}) {
        const double base = alpha_variation(p, alpha, 1.0 / 256, 1, 2).value;
        for (double c : {2.0, -0.5}) {
            const double scaled = alpha_variation(scale_path(p, c), alpha, 1.0 / 256, 1, 2).value;
            CHECK(scaled == doctest::Approx(std::pow(std::abs(c), alpha) * base).epsilon(1e-13));
        }
    }
}

TEST_CASE("variation brackets the quartic exponent")
{
    // The fBm(1/4) alpha-variation scales like eps^{alpha/4 - 1}: it blows
    // up for alpha = 3 and vanishes for alpha = 5 as eps shrinks.
    const Path p = sample_fbm_circulant(0.25, 1 << 19, std::ldexp(1.0, -18), 7, 0);
    const double coarse = std::ldexp(1.0, -14), fine = std::ldexp(1.0, -18);
    CHECK(alpha_variation(p, 5, fine, 1, 2).value < alpha_variation(p, 5, coarse, 1, 2).value);
    CHECK(alpha_variation(p, 3, fine, 1, 2).value > alpha_variation(p, 3, coarse, 1, 2).value);
    const double v4 = alpha_variation(rescale_to_kpz_scale(p), 4, fine, 1, 2).value;
    CHECK(std::abs(v4 / kQuarticVariationConstant - 1.0) < 0.1);
}

TEST_CASE("standardized increments")
{
    const double dt = 1.0 / 512;
    const double eps = 8 * dt;
    const CirculantFbm gen(0.25, 1024, dt);
    std::vector<Path> paths;
    for (std::uint64_t r = 0; r < 1000; ++r) paths.push_back(rescale_to_kpz_scale(gen.sample(3, r)));
    const auto z = standardized_increments(paths, 1.0, eps);
    REQUIRE(z.size() == paths.size());
    const SampleMoments m = sample_moments(z);
    CHECK(std::abs(m.variance - 1.0) < 3.0 * m.se_variance);
    CHECK(ks_normality(z).passed());

    const std::vector<Path> flat(60, Path{0.0, dt, std::vector<double>(1025, 1.5)});
    for (double v : standardized_increments(flat, 1.0, eps)) CHECK(v == 0.0);
    CHECK_THROWS_AS(standardized_increments(flat, 1.0, 1.5 * dt), InputError);
}

TEST_CASE("KS normality")
{
    const auto z = normals(1000, 0);
    const KsResult ok = ks_normality(z);
    CHECK(ok.threshold == doctest::Approx(0.05155).epsilon(1e-3));
    CHECK(ok.passed());

    const KsResult wide = ks_normality(normals(1000, 1, 2.0));
    CHECK_FALSE(wide.passed());

    const KsResult flat = ks_normality(std::vector<double>(1000, 0.0));
    CHECK(flat.statistic == doctest::Approx(0.5).epsilon(1e-3));
    CHECK_FALSE(flat.passed());

    CHECK_THROWS_AS(ks_normality(normals(10, 2)), InputError);
}

TEST_CASE("two-sample KS")
{
    const auto a = normals(2000, 3);
    const auto b = normals(2000, 4);
    CHECK(ks_two_sample(a, b).passed());
    CHECK_FALSE(ks_two_sample(a, normals(2000, 5, 1.5)).passed());
    CHECK(ks_two_sample(a, a).statistic == 0.0);
}

TEST_CASE("LIL profile")
{
    const double dt = std::ldexp(1.0, -16);
    const Path line = linear_path(0, dt, (1 << 17) + 1);
    const ScalingProfile lil = lil_profile(line, 1.0, 16, 4, {.min_resolved_steps = 1});
    CHECK(lil.kind == ProfileKind::LIL);
    CHECK(lil.depths.front() == 4);
    CHECK(lil.depths.back() == 16);
    // A running maximum over a decaying sequence is flat; the per-level
    // increment itself decays like 2^{-3j/4}.
    CHECK(lil.statistic.back() == lil.statistic.front());
    const ScalingProfile deep = lil_profile(line, 1.0, 16, 12, {.min_resolved_steps = 1});
    CHECK(deep.statistic.back() < 0.05 * lil.statistic.front());

    const Path zero{0, dt, std::vector<double>(line.size(), 0.0)};
    for (double v : lil_profile(zero, 1.0, 16, 4, {.min_resolved_steps = 1}).statistic) CHECK(v == 0.0);

    // The default resolution floor refuses levels finer than 16 steps.
    CHECK_THROWS_AS(lil_profile(line, 1.0, 16), InputError);
    CHECK_NOTHROW(lil_profile(line, 1.0, 12));
    CHECK_THROWS_AS(lil_profile(line, 1.0, 8, 1), InputError);

    const Path fb = dyadic(sample_fbm_circulant(0.25, 1 << 17, dt, 9, 0));
    const auto a = lil_profile(fb, 1.0, 16, 4, {.min_resolved_steps = 1});
    const auto b = lil_profile(shifted(fb, 7.5), 1.0, 16, 4, {.min_resolved_steps = 1});
    CHECK(a.statistic == b.statistic);
}

TEST_CASE("modulus of continuity profile")
{
    const double dt = std::ldexp(1.0, -14);
    const Path line = linear_path(0, dt, (1 << 15) + 1, 3.0);
    const std::vector<int> depths{4, 6, 8, 10};
    const ScalingProfile moc = moc_profile(line, depths);
    for (std::size_t i = 1; i < moc.statistic.size(); ++i) {
        CHECK(moc.statistic[i] < moc.statistic[i - 1]);
    }
    // Exact value for a line: 3 * 2^-j / (2^{-j/4} sqrt(j log 2)).
    const double j = 10;
    CHECK(moc.statistic.back() ==
          doctest::Approx(3.0 * std::pow(2.0, -0.75 * j) / std::sqrt(j * std::log(2.0))));

    const Path fb = dyadic(sample_fbm_circulant(0.25, 1 << 15, dt, 2, 0));
    CHECK(moc_profile(fb, depths).statistic == moc_profile(shifted(fb, -4.0), depths).statistic);
    const std::vector<int> unsorted{6, 4};
    CHECK_THROWS_AS(moc_profile(fb, unsorted), InputError);
}

TEST_CASE("Holder coefficient")
{
    const Path line = linear_path(0, 1.0 / 64, 65);
    CHECK(holder_coefficient(line, 0.5, 0, 1) == doctest::Approx(1.0));
    CHECK(holder_coefficient(shifted(line, 2.0), 0.5, 0, 1) == doctest::Approx(1.0));
    const Path flat{0, 1.0 / 64, std::vector<double>(65, -1.0)};
    CHECK(holder_coefficient(flat, 0.3, 0, 1) == 0.0);
    CHECK_THROWS_AS(holder_coefficient(line, 1.5, 0, 1), InputError);

    // Every spacing in [0, 1] is at most 1, so |x - y|^beta shrinks as beta
    // grows and the coefficient is nondecreasing in beta.
    const Path fb = sample_fbm_circulant(0.25, 1 << 10, 1.0 / 1024, 3, 0);
    double prev = 0.0;
    for (double beta : {0.1, 0.2, 0.25, 0.3, 0.5}) {
        const double h = holder_coefficient(fb, beta, 0, 1);
        CHECK(h >= prev);
        prev = h;
    }
}

TEST_CASE("exceptional sets")
{
    const double dt = std::ldexp(1.0, -14);
    const Path fb = rescale_to_kpz_scale(sample_fbm_circulant(0.25, 1 << 15, dt, 4, 0));
    const int j = 14;
    const ExceptionalSet tiny = exceptional_set(fb, 1e-9, j);
    const ExceptionalSet e3 = exceptional_set(fb, 0.3, j);
    const ExceptionalSet e5 = exceptional_set(fb, 0.5, j);
    const ExceptionalSet e8 = exceptional_set(fb, 0.8, j);

    CHECK(tiny.size() == tiny.level_bits.size());
    CHECK(tiny.level_bits.size() == (1u << j));
    CHECK(e5.size() > 0);
    CHECK(e5.size() < e3.size());
    CHECK(e5.subset_of(e3));
    CHECK(e8.subset_of(e5));
    CHECK_FALSE(e3.subset_of(e8));
    CHECK(e5.times().size() == e5.size());
    for (double t : e5.times()) CHECK((t >= 1.0 && t < 2.0));

    const Path line = linear_path(0, dt, (1 << 15) + 1);
    CHECK(exceptional_set(line, 1.05, j).size() == 0);
}

TEST_CASE("box dimension")
{
    std::vector<double> all;
    const std::size_t n = 1 << 14;
    for (std::size_t m = 0; m < n; ++m) all.push_back(1.0 + static_cast<double>(m) / n);
    std::vector<double> scales;
    for (int k = 2; k <= 12; ++k) scales.push_back(std::ldexp(1.0, -k));
    const BoxCountResult full = box_dimension(all, scales);
    CHECK(full.slope == doctest::Approx(1.0).epsilon(0.02));

    const std::vector<double> one{1.37};
    const BoxCountResult point = box_dimension(one, scales);
    CHECK(std::abs(point.slope) < 0.02);

    const BoxCountResult none = box_dimension(std::vector<double>{}, scales);
    CHECK(none.empty);
    CHECK(none.slope == 0.0);

    const std::vector<double> wide{0.1, 0.05, 0.01, 0.001};
    CHECK_THROWS_AS(box_dimension(all, std::vector<double>{0.1, 0.09, 0.08}), InputError);
    CHECK_NOTHROW(box_dimension(all, wide));
    CHECK_THROWS_AS(box_dimension(all, std::vector<double>{0.1, 0.05, 0.02, 0.01}), InputError);

    const BoxCountResult fit = fit_box_dimension({0.5, 0.25, 0.125}, {3, 6, 12});
    CHECK(fit.slope == doctest::Approx(1.0));
    CHECK(fit.residual == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("matched box counts")
{
    const double dt = std::ldexp(1.0, -14);
    const Path fb = rescale_to_kpz_scale(sample_fbm_circulant(0.25, 1 << 15, dt, 4, 0));
    const ExceptionalSet set = exceptional_set(fb, 1e-9, 14);
    const std::vector<int> levels{8, 10, 12, 14};
    const auto counts = matched_box_counts(set, levels);
    for (std::size_t i = 0; i < levels.size(); ++i) CHECK(counts[i] == std::ldexp(1.0, levels[i]));
    const std::vector<int> shallow{3};
    CHECK_THROWS_AS(matched_box_counts(set, shallow), InputError);
}
