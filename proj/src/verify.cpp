#include "kpzlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/core.h>

namespace kpzlab {

namespace {

const double kSqrtTwoOverPi = std::sqrt(2.0 / std::numbers::pi);

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

double Tolerance::resolve(double target, double se) const
{
    switch (kind) {
    case ToleranceKind::Absolute: return value;
    case ToleranceKind::Relative: return value * std::fabs(target);
    case ToleranceKind::StandardErrors: return value * se;
    }
    return 0.0;
}

std::string Tolerance::describe() const
{
    switch (kind) {
    case ToleranceKind::Absolute: return fmt::format("abs {:g}", value);
    case ToleranceKind::Relative: return fmt::format("{:g}%", 100.0 * value);
    case ToleranceKind::StandardErrors: return fmt::format("{:g} SE", value);
    }
    return {};
}

void judge(CheckReport& report, const Tolerance& tol)
{
    report.tolerance = tol.resolve(report.target, report.se);
    report.tolerance_rule = tol.describe();
    report.pass = std::fabs(report.measured - report.target) <= report.tolerance;
}

double jackknife_se(std::size_t n, std::size_t groups,
                    const std::function<double(std::size_t, std::size_t)>& stat)
{
    const std::size_t g = std::min(n, groups);
    if (g < 2) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> loo(g);
    for (std::size_t k = 0; k < g; ++k) {
        loo[k] = stat(k * n / g, (k + 1) * n / g);
    }
    double mean = 0.0;
    for (double v : loo) mean += v;
    mean /= static_cast<double>(g);
    double ss = 0.0;
    for (double v : loo) ss += (v - mean) * (v - mean);
    return std::sqrt(static_cast<double>(g - 1) / static_cast<double>(g) * ss);
}

SampleMoments sample_moments(std::span<const double> x)
{
    SampleMoments m;
    const std::size_t n = x.size();
    if (n < 2) throw InputError("sample_moments: need at least two samples");
    const double nn = static_cast<double>(n);
    for (double v : x) m.mean += v;
    m.mean /= nn;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : x) {
        const double d = (v - m.mean) * (v - m.mean);
        m2 += d;
        m4 += d * d;
    }
    m.variance = m2 / (nn - 1.0);
    m.se_mean = std::sqrt(m.variance / nn);
    // Var of the sample variance: (mu4 - sigma^4 (n-3)/(n-1)) / n.
    const double mu4 = m4 / nn;
    const double s4 = m.variance * m.variance;
    m.se_variance = std::sqrt(std::max(0.0, (mu4 - s4 * (nn - 3.0) / (nn - 1.0)) / nn));
    return m;
}

CheckReport increment_variance_ratio(std::span<const Path> paths, double t, double epsilon,
                                     VarianceNormalizer normalizer, Tolerance tol)
{
    const auto start = std::chrono::steady_clock::now();
    if (paths.size() < 200) {
        throw InputError(
            fmt::format("increment_variance_ratio: needs at least 200 paths, got {}", paths.size()));
    }
    const Path& ref = paths.front();
    for (const Path& p : paths) {
        if (p.t0 != ref.t0 || p.dt != ref.dt || p.size() != ref.size()) {
            throw InputError("increment_variance_ratio: paths are on mismatched grids");
        }
    }
    const std::size_t k = exact_multiple(epsilon, ref.dt, "increment_variance_ratio epsilon");
    const std::size_t i = ref.index_of(t);
    if (i + k >= ref.size()) throw InputError("increment_variance_ratio: t + eps beyond the paths");

    const std::size_t n = paths.size();
    std::vector<double> inc(n);
    std::vector<double> base_sq(n);
    for (std::size_t r = 0; r < n; ++r) {
        inc[r] = paths[r].values[i + k] - paths[r].values[i];
        base_sq[r] = paths[r].values[i] * paths[r].values[i];
    }

    const double asym = kSqrtTwoOverPi * std::sqrt(epsilon);
    auto stat = [&](std::size_t lo, std::size_t hi) {
        double s1 = 0.0;
        double s2 = 0.0;
        double z2 = 0.0;
        std::size_t m = 0;
        for (std::size_t r = 0; r < n; ++r) {
            if (r >= lo && r < hi) continue;
            s1 += inc[r];
            s2 += inc[r] * inc[r];
            z2 += base_sq[r];
            ++m;
        }
        const double mm = static_cast<double>(m);
        const double var = (s2 - s1 * s1 / mm) / (mm - 1.0);
        switch (normalizer) {
        case VarianceNormalizer::LinearOracle: return var / linear_increment_variance(t, epsilon);
        case VarianceNormalizer::AsymptoticHeight: return var / asym;
        case VarianceNormalizer::AsymptoticShe: return var / (asym * z2 / mm);
        }
        return var;
    };

    CheckReport rep;
    rep.name = "increment_variance_ratio";
    rep.target = 1.0;
    rep.measured = stat(0, 0);
    rep.se = jackknife_se(n, 100, stat);
    rep.replicas = n;
    judge(rep, tol);
    rep.runtime_seconds = seconds_since(start);
    return rep;
}

CheckReport linearity_check(const GridSpec& grid, const NoiseSource& noise, const InitialDatum& ic1,
                            const InitialDatum& ic2)
{
    const auto start = std::chrono::steady_clock::now();
    if (ic1.kind != InitialKind::FunctionIC || ic2.kind != InitialKind::FunctionIC) {
        throw InputError("linearity_check: both initial data must be function data");
    }
    if (!(noise.grid() == grid)) throw InputError("linearity_check: noise is on a different grid");

    FieldState a = make_initial_field(grid, ic1);
    FieldState b = make_initial_field(grid, ic2);
    // The sum is formed on a common scale so renormalized inputs add exactly.
    const double common = std::max(a.log_scale, b.log_scale);
    FieldState sum = a;
    sum.log_scale = common;
    const double fa = std::exp(a.log_scale - common);
    const double fb = std::exp(b.log_scale - common);
    for (std::size_t i = 0; i < sum.values.size(); ++i) {
        sum.values[i] = fa * a.values[i] + fb * b.values[i];
    }

    SheStepper sa(grid, SolveMode::Multiplicative);
    SheStepper sb(grid, SolveMode::Multiplicative);
    SheStepper ss(grid, SolveMode::Multiplicative);
    std::vector<double> row(grid.nx());
    double worst = 0.0;
    std::size_t worst_step = 0;
    auto measure = [&](std::size_t step) {
        const double ea = std::exp(a.log_scale - sum.log_scale);
        const double eb = std::exp(b.log_scale - sum.log_scale);
        double scale = 0.0;
        double dev = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i) {
            const double za = ea * a.values[i];
            const double zb = eb * b.values[i];
            scale = std::max(scale, std::fabs(za) + std::fabs(zb));
            dev = std::max(dev, std::fabs(sum.values[i] - za - zb));
        }
        const double rel = scale > 0.0 ? dev / scale : dev;
        if (rel > worst) {
            worst = rel;
            worst_step = step;
        }
    };
    measure(0);
    for (std::size_t n = 0; n < grid.nt(); ++n) {
        noise.fill_row(n, row);
        sa.advance(a, row, n + 1);
        sb.advance(b, row, n + 1);
        ss.advance(sum, row, n + 1);
        measure(n + 1);
    }

    CheckReport rep;
    rep.name = "linearity";
    rep.target = 0.0;
    rep.measured = worst;
    rep.replicas = 1;
    judge(rep, {ToleranceKind::Absolute, 1e-10});
    rep.detail = fmt::format("largest deviation at step {}", worst_step);
    rep.runtime_seconds = seconds_since(start);
    return rep;
}

double sample_correlation(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size() || a.size() < 2) {
        throw InputError("sample_correlation: samples must have equal length >= 2");
    }
    const double n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sab / std::sqrt(saa * sbb);
}

GaussianLimitReport gaussian_limit_check(std::span<const Path> paths, std::span<const double> times,
                                         double epsilon, double max_abs_correlation)
{
    const auto start = std::chrono::steady_clock::now();
    if (paths.size() < 500) {
        throw InputError(
            fmt::format("gaussian_limit_check: needs at least 500 paths, got {}", paths.size()));
    }
    if (times.size() < 2) throw InputError("gaussian_limit_check: needs at least two times");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i - 1] + epsilon > times[i] + 1e-12) {
            throw InputError("gaussian_limit_check: increments overlap or times are not increasing");
        }
    }
    GaussianLimitReport out;
    out.times.assign(times.begin(), times.end());
    std::vector<std::vector<double>> z;
    for (double t : times) z.push_back(standardized_increments(paths, t, epsilon));
    bool ok = true;
    double worst = 0.0;
    for (const auto& zi : z) {
        out.marginals.push_back(ks_normality(zi));
        ok = ok && out.marginals.back().passed();
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t k = i + 1; k < z.size(); ++k) {
            const double c = sample_correlation(z[i], z[k]);
            out.pair_correlations.push_back(c);
            if (!(std::fabs(c) < max_abs_correlation)) ok = false;
            // A NaN correlation (constant increments) poisons the summary.
            worst = std::isnan(c) || std::isnan(worst) ? std::numeric_limits<double>::quiet_NaN()
                                                      : std::max(worst, std::fabs(c));
        }
    }
    auto& rep = out.summary;
    rep.name = "gaussian_limit";
    rep.target = 0.0;
    rep.measured = worst;
    rep.se = 1.0 / std::sqrt(static_cast<double>(paths.size()));
    rep.tolerance = max_abs_correlation;
    rep.tolerance_rule = fmt::format("|corr| < {:g} and KS at 1%", max_abs_correlation);
    rep.pass = ok;
    rep.replicas = paths.size();
    std::string ks;
    for (const auto& m : out.marginals) ks += fmt::format(" {:.4f}/{:.4f}", m.statistic, m.threshold);
    rep.detail = "KS" + ks;
    rep.runtime_seconds = seconds_since(start);
    return out;
}

}  // namespace kpzlab
