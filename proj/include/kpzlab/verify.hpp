#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kpzlab/pathstats.hpp"
#include "kpzlab/solver.hpp"

namespace kpzlab {

/// How a check's tolerance is declared. The report always carries the
/// resolved absolute tolerance.
enum class ToleranceKind { Absolute, Relative, StandardErrors };

struct Tolerance {
    ToleranceKind kind = ToleranceKind::StandardErrors;
    double value = 3.0;

    /// Absolute tolerance for a given target and standard error.
    double resolve(double target, double se) const;
    std::string describe() const;
};

struct CheckReport {
    std::string name;
    double target = 0.0;
    double measured = 0.0;
    double se = 0.0;
    double tolerance = 0.0;
    std::string tolerance_rule;
    bool pass = false;
    std::size_t replicas = 0;
    double runtime_seconds = 0.0;
    std::string detail;
};

/// Fills tolerance, tolerance_rule and pass = |measured - target| <= tolerance.
void judge(CheckReport& report, const Tolerance& tol);

/**
 * Grouped delete-a-group jackknife standard error of stat(). The n samples
 * are split into min(n, groups) contiguous groups; stat(lo, hi) must
 * evaluate the statistic with samples [lo, hi) left out ((0, 0) = all).
 */
double jackknife_se(std::size_t n, std::size_t groups,
                    const std::function<double(std::size_t, std::size_t)>& stat);

struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double se_mean = 0.0;
    double se_variance = 0.0;
};

SampleMoments sample_moments(std::span<const double> x);

enum class VarianceNormalizer {
    LinearOracle,     // V paths: linear_increment_variance(t, eps)
    AsymptoticHeight, // H paths: (2/pi)^{1/2} sqrt(eps)
    AsymptoticShe,    // Z paths: (2/pi)^{1/2} sqrt(eps) * mean(Z_t^2)
};

/// Sample Var(path(t + eps) - path(t)) over the paths divided by the chosen
/// normalizer; target 1, jackknife SE. Needs at least 200 paths sharing one
/// time grid.
CheckReport increment_variance_ratio(std::span<const Path> paths, double t, double epsilon,
                                     VarianceNormalizer normalizer,
                                     Tolerance tol = {ToleranceKind::StandardErrors, 3.0});

/**
 * Runs the multiplicative scheme from e^{f1}, e^{f2} and e^{f1} + e^{f2} on
 * one shared noise and reports the largest
 *   |Z^{g1+g2} - Z^{g1} - Z^{g2}| / max_i(|Z^{g1}_i| + |Z^{g2}_i|)
 * over all nodes and steps. Target 0, tolerance 1e-10.
 */
CheckReport linearity_check(const GridSpec& grid, const NoiseSource& noise, const InitialDatum& ic1,
                            const InitialDatum& ic2);

struct GaussianLimitReport {
    std::vector<double> times;
    /// Correlation of standardized increments for each pair (i < k), row-major.
    std::vector<double> pair_correlations;
    std::vector<KsResult> marginals;
    CheckReport summary;
};

/// Standardized increments at each time, their pairwise sample correlations
/// and marginal KS statistics. Passes when every |correlation| is below
/// max_abs_correlation and every marginal passes KS. Needs >= 500 paths and
/// t_i + eps <= t_{i+1}.
GaussianLimitReport gaussian_limit_check(std::span<const Path> paths, std::span<const double> times,
                                         double epsilon, double max_abs_correlation = 0.1);

/// Pearson correlation; NaN when either sample is constant.
double sample_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace kpzlab
