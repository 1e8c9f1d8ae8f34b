#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpzlab/solver.hpp"

namespace kpzlab {

/// 6/pi, (8/pi)^{1/4} and (pi/2)^{1/4}.
inline constexpr double kQuarticVariationConstant = 1.909859317102744;
inline constexpr double kModulusConstant = 1.2632375554921293;
inline constexpr double kStandardizeFactor = 1.1195151349202477;

struct VariationResult {
    double alpha = 0.0;
    double epsilon = 0.0;
    double s = 0.0;
    double t = 0.0;
    std::size_t terms = 0;
    double value = 0.0;
};

/// Sum of |g(u) - g(u - eps)|^alpha over u in [s + eps, t] on the absolute
/// mesh eps*Z. eps must be a whole number of path steps and every mesh time
/// must be a path sample time.
VariationResult alpha_variation(const Path& path, double alpha, double epsilon, double s, double t);

/// (pi/2)^{1/4} eps^{-1/4} (path(t + eps) - path(t)) for each path.
std::vector<double> standardized_increments(std::span<const Path> paths, double t, double epsilon);

struct KsResult {
    double statistic = 0.0;
    double threshold = 0.0;
    std::size_t n = 0;
    bool passed() const { return statistic < threshold; }
};

/// One-sample Kolmogorov-Smirnov distance to N(0,1), 1% threshold 1.63/sqrt(N).
KsResult ks_normality(std::span<const double> samples);

/// Two-sample KS distance, 1% threshold 1.63 sqrt((n+m)/(n m)).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

enum class ProfileKind { LIL, MOC };

struct ScalingProfile {
    ProfileKind kind = ProfileKind::LIL;
    std::vector<int> depths;
    std::vector<double> epsilons;
    std::vector<double> statistic;
    double target = kModulusConstant;
};

struct ProfileOptions {
    /// Smallest admissible eps as a number of path steps. 16 keeps
    /// simulated paths clear of the scheme's own time step; exact Gaussian
    /// paths are valid down to a single step.
    std::size_t min_resolved_steps = 16;
};

/**
 * Finite-scale LIL statistic at base time t: entry J is the running maximum
 * over levels j = min_depth..J of
 *   (path(t + 2^-j) - path(t)) / (2^{-j/4} sqrt(log log 2^j)).
 * min_depth must be at least 2 so that log log 2^j > 0.
 */
ScalingProfile lil_profile(const Path& path, double t, int max_depth, int min_depth = 4,
                           ProfileOptions options = {});

/**
 * Modulus-of-continuity statistic per level: the largest |path(b) - path(a)|
 * over sample pairs in [s, t] with b - a <= 2^-j, divided by
 * 2^{-j/4} sqrt(log 2^j). Uses a monotone-deque sliding window, O(n).
 */
ScalingProfile moc_profile(const Path& path, std::span<const int> depths, double s = 1.0,
                           double t = 2.0, ProfileOptions options = {});

/// sup |f(x) - f(y)| / |x - y|^beta over sample pairs in [a, b]. Above 8192
/// samples the interval is subsampled at a uniform stride first, so the
/// value is a lower bound of the full-grid coefficient.
double holder_coefficient(const Path& path, double beta, double a, double b);

/**
 * Finite-resolution exceptional set on [s, t). Candidate times are
 * s + m 2^-j. For each candidate and each level q in [ceil(j/2), j] the bit
 * q of level_bits[m] records whether
 *   |path(u + 2^-q) - path(u)| / (2^{-q/4} sqrt(q log 2)) >= alpha (8/pi)^{1/4}.
 * Levels whose increment would leave the path are skipped. A time belongs
 * to the set when any bit is set.
 */
struct ExceptionalSet {
    double alpha = 0.0;
    int resolution = 0;
    double s = 1.0;
    double spacing = 0.0;
    std::vector<std::uint64_t> level_bits;

    bool contains(std::size_t m) const { return level_bits[m] != 0; }
    std::size_t size() const;
    std::vector<double> times() const;
    /// True when every member (and every level bit) of this set is also in
    /// `other`.
    bool subset_of(const ExceptionalSet& other) const;
};

ExceptionalSet exceptional_set(const Path& path, double alpha, int resolution, double s = 1.0,
                               double t = 2.0);

struct BoxCountResult {
    double alpha = 0.0;
    std::vector<double> scales;
    std::vector<double> counts;
    double slope = 0.0;
    double residual = 0.0;
    bool empty = false;
};

/// Least-squares slope of log count against log(1/scale).
BoxCountResult fit_box_dimension(std::vector<double> scales, std::vector<double> counts);

/// Occupied boxes of each size among `times` in [s, t). Needs at least four
/// scales spanning a factor of 100; an empty set gives slope 0 and empty.
BoxCountResult box_dimension(std::span<const double> times, std::span<const double> scales,
                             double s = 1.0, double t = 2.0);

/**
 * Scale-matched box counts: at box size 2^-k the count is the number of
 * times s + m 2^-k whose level-k increment crosses the threshold. Boxes are
 * thereby probed at the resolution that defines them, which is what makes
 * the count grow like 2^{k(1 - alpha^2)}.
 */
std::vector<double> matched_box_counts(const ExceptionalSet& set, std::span<const int> levels);

}  // namespace kpzlab
