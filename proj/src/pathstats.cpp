#include "kpzlab/pathstats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numbers>

#include <fmt/core.h>

namespace kpzlab {

namespace {

constexpr std::size_t kHolderCap = 8192;

double mesh_tolerance(double x) { return 1e-9 * std::max(1.0, std::fabs(x)); }

// Index range [first, last] of samples whose times lie in [s, t].
std::pair<std::size_t, std::size_t> covered_range(const Path& path, double s, double t,
                                                  const char* what)
{
    if (path.size() == 0) throw InputError(fmt::format("{}: empty path", what));
    if (!(s < t)) throw InputError(fmt::format("{}: empty interval [{}, {}]", what, s, t));
    if (s < path.t0 - mesh_tolerance(s) || t > path.t_end() + mesh_tolerance(t)) {
        throw InputError(fmt::format("{}: interval [{}, {}] not covered by path [{}, {}]", what, s,
                                     t, path.t0, path.t_end()));
    }
    const double a = (s - path.t0) / path.dt;
    const double b = (t - path.t0) / path.dt;
    auto first = static_cast<std::size_t>(std::max(0.0, std::ceil(a - 1e-9)));
    auto last = static_cast<std::size_t>(std::max(0.0, std::floor(b + 1e-9)));
    last = std::min(last, path.size() - 1);
    return {first, last};
}

std::size_t dyadic_steps(const Path& path, int level, std::size_t min_steps, const char* what)
{
    const double eps = std::ldexp(1.0, -level);
    if (eps < path.dt * (1.0 - 1e-12)) {
        throw InputError(
            fmt::format("{}: level {} is finer than the path resolution dt = {}", what, level, path.dt));
    }
    const std::size_t k = exact_multiple(eps, path.dt, fmt::format("{} level {}", what, level));
    if (k < min_steps) {
        throw InputError(fmt::format("{}: level {} spans {} steps, fewer than the minimum {}", what,
                                     level, k, min_steps));
    }
    return k;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

VariationResult alpha_variation(const Path& path, double alpha, double epsilon, double s, double t)
{
    if (!(alpha > 0.0)) throw InputError("alpha_variation: alpha must be positive");
    if (!(epsilon > 0.0)) throw InputError("alpha_variation: epsilon must be positive");
    if (epsilon > t - s + mesh_tolerance(t - s)) {
        throw InputError("alpha_variation: epsilon exceeds the interval length");
    }
    const std::size_t k = exact_multiple(epsilon, path.dt, "alpha_variation epsilon");
    covered_range(path, s, t, "alpha_variation");

    VariationResult r{alpha, epsilon, s, t, 0, 0.0};
    const auto m_first = static_cast<long long>(std::ceil((s + epsilon) / epsilon - 1e-9));
    const auto m_last = static_cast<long long>(std::floor(t / epsilon + 1e-9));
    if (m_last < m_first) return r;
    std::size_t idx = path.index_of(static_cast<double>(m_first) * epsilon);
    const bool quartic = alpha == 4.0;
    for (long long m = m_first; m <= m_last; ++m, idx += k) {
        const double d = std::fabs(path.values[idx] - path.values[idx - k]);
        if (quartic) {
            const double d2 = d * d;
            r.value += d2 * d2;
        } else {
            r.value += std::pow(d, alpha);
        }
        ++r.terms;
    }
    return r;
}

std::vector<double> standardized_increments(std::span<const Path> paths, double t, double epsilon)
{
    if (!(epsilon > 0.0)) throw InputError("standardized_increments: epsilon must be positive");
    const double factor = kStandardizeFactor * std::pow(epsilon, -0.25);
    std::vector<double> out;
    out.reserve(paths.size());
    for (const Path& p : paths) {
        const std::size_t k = exact_multiple(epsilon, p.dt, "standardized_increments epsilon");
        const std::size_t i = p.index_of(t);
        if (i + k >= p.size()) {
            throw InputError(fmt::format("standardized_increments: t + eps = {} beyond path end {}",
                                         t + epsilon, p.t_end()));
        }
        out.push_back(factor * (p.values[i + k] - p.values[i]));
    }
    return out;
}

KsResult ks_normality(std::span<const double> samples)
{
    const std::size_t n = samples.size();
    if (n < 50) {
        throw InputError(fmt::format("ks_normality: needs at least 50 samples, got {}", n));
    }
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    double d = 0.0;
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = normal_cdf(x[i]);
        d = std::max(d, std::max(static_cast<double>(i + 1) / nn - f, f - static_cast<double>(i) / nn));
    }
    return {d, 1.63 / std::sqrt(nn), n};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty()) throw InputError("ks_two_sample: empty sample");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double n = static_cast<double>(x.size());
    const double m = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    return {d, 1.63 * std::sqrt((n + m) / (n * m)), x.size() + y.size()};
}

ScalingProfile lil_profile(const Path& path, double t, int max_depth, int min_depth,
                           ProfileOptions options)
{
    if (min_depth < 2) {
        throw InputError("lil_profile: min_depth must be >= 2 (log log 2^j <= 0 below)");
    }
    if (max_depth < min_depth) throw InputError("lil_profile: max_depth below min_depth");
    const std::size_t base = path.index_of(t);
    ScalingProfile prof;
    prof.kind = ProfileKind::LIL;
    double running = -std::numeric_limits<double>::infinity();
    for (int j = min_depth; j <= max_depth; ++j) {
        const std::size_t k = dyadic_steps(path, j, options.min_resolved_steps, "lil_profile");
        if (base + k >= path.size()) {
            throw InputError(fmt::format("lil_profile: t + 2^-{} beyond path end", j));
        }
        const double eps = std::ldexp(1.0, -j);
        const double norm = std::pow(eps, 0.25) * std::sqrt(std::log(std::log(1.0 / eps)));
        running = std::max(running, (path.values[base + k] - path.values[base]) / norm);
        prof.depths.push_back(j);
        prof.epsilons.push_back(eps);
        prof.statistic.push_back(running);
    }
    return prof;
}

ScalingProfile moc_profile(const Path& path, std::span<const int> depths, double s, double t,
                           ProfileOptions options)
{
    if (depths.empty()) throw InputError("moc_profile: no depths");
    const auto [first, last] = covered_range(path, s, t, "moc_profile");
    ScalingProfile prof;
    prof.kind = ProfileKind::MOC;
    const auto& v = path.values;
    for (std::size_t d = 0; d < depths.size(); ++d) {
        if (d > 0 && depths[d] <= depths[d - 1]) {
            throw InputError("moc_profile: depths must be strictly increasing");
        }
        const int j = depths[d];
        const std::size_t w = dyadic_steps(path, j, options.min_resolved_steps, "moc_profile");
        // Largest (max - min) over windows of w + 1 consecutive samples.
        std::deque<std::size_t> hi;
        std::deque<std::size_t> lo;
        double best = 0.0;
        for (std::size_t i = first; i <= last; ++i) {
            while (!hi.empty() && v[hi.back()] <= v[i]) hi.pop_back();
            while (!lo.empty() && v[lo.back()] >= v[i]) lo.pop_back();
            hi.push_back(i);
            lo.push_back(i);
            while (hi.front() + w < i) hi.pop_front();
            while (lo.front() + w < i) lo.pop_front();
            best = std::max(best, v[hi.front()] - v[lo.front()]);
        }
        const double eps = std::ldexp(1.0, -j);
        prof.depths.push_back(j);
        prof.epsilons.push_back(eps);
        prof.statistic.push_back(best / (std::pow(eps, 0.25) * std::sqrt(std::log(1.0 / eps))));
    }
    return prof;
}

double holder_coefficient(const Path& path, double beta, double a, double b)
{
    if (!(beta > 0.0 && beta <= 1.0)) throw InputError("holder_coefficient: beta must be in (0, 1]");
    const auto [first, last] = covered_range(path, a, b, "holder_coefficient");
    if (last <= first) return 0.0;
    const std::size_t count = last - first + 1;
    const std::size_t stride = (count + kHolderCap - 1) / kHolderCap;
    std::vector<double> ts;
    std::vector<double> xs;
    for (std::size_t i = first; i <= last; i += stride) {
        ts.push_back(path.time(i));
        xs.push_back(path.values[i]);
    }
    double best = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t k = i + 1; k < xs.size(); ++k) {
            const double r = std::fabs(xs[k] - xs[i]) / std::pow(ts[k] - ts[i], beta);
            best = std::max(best, r);
        }
    }
    return best;
}

std::size_t ExceptionalSet::size() const
{
    return static_cast<std::size_t>(
        std::count_if(level_bits.begin(), level_bits.end(), [](std::uint64_t b) { return b != 0; }));
}

std::vector<double> ExceptionalSet::times() const
{
    std::vector<double> out;
    for (std::size_t m = 0; m < level_bits.size(); ++m) {
        if (level_bits[m] != 0) out.push_back(s + static_cast<double>(m) * spacing);
    }
    return out;
}

bool ExceptionalSet::subset_of(const ExceptionalSet& other) const
{
    if (other.level_bits.size() != level_bits.size() || other.resolution != resolution) {
        throw InputError("exceptional sets are on different resolutions");
    }
    for (std::size_t m = 0; m < level_bits.size(); ++m) {
        if ((level_bits[m] & ~other.level_bits[m]) != 0) return false;
    }
    return true;
}

ExceptionalSet exceptional_set(const Path& path, double alpha, int resolution, double s, double t)
{
    if (!(alpha > 0.0)) throw InputError("exceptional_set: alpha must be positive");
    if (resolution < 1 || resolution > 62) throw InputError("exceptional_set: resolution out of range");
    const std::size_t stride = dyadic_steps(path, resolution, 1, "exceptional_set");
    const auto [first, last] = covered_range(path, s, t, "exceptional_set");
    if (std::fabs(path.time(first) - s) > mesh_tolerance(s)) {
        throw InputError("exceptional_set: interval start is not a sample time");
    }
    ExceptionalSet set;
    set.alpha = alpha;
    set.resolution = resolution;
    set.s = s;
    set.spacing = std::ldexp(1.0, -resolution);
    const auto count = static_cast<std::size_t>(std::llround((t - s) / set.spacing));
    set.level_bits.assign(count, 0);

    const int q_lo = (resolution + 1) / 2;
    const double threshold = alpha * kModulusConstant;
    std::vector<std::size_t> steps;
    std::vector<double> norms;
    for (int q = q_lo; q <= resolution; ++q) {
        steps.push_back(stride << (resolution - q));
        const double delta = std::ldexp(1.0, -q);
        norms.push_back(1.0 / (std::pow(delta, 0.25) * std::sqrt(q * std::numbers::ln2)));
    }
    const auto& v = path.values;
    for (std::size_t m = 0; m < count; ++m) {
        const std::size_t i = first + m * stride;
        std::uint64_t bits = 0;
        for (std::size_t l = 0; l < steps.size(); ++l) {
            if (i + steps[l] >= v.size()) continue;
            if (std::fabs(v[i + steps[l]] - v[i]) * norms[l] >= threshold) {
                bits |= std::uint64_t{1} << (q_lo + static_cast<int>(l));
            }
        }
        set.level_bits[m] = bits;
    }
    return set;
}

BoxCountResult fit_box_dimension(std::vector<double> scales, std::vector<double> counts)
{
    if (scales.size() != counts.size() || scales.size() < 2) {
        throw InputError("fit_box_dimension: need matching scales and counts (at least two)");
    }
    BoxCountResult r;
    r.scales = std::move(scales);
    r.counts = std::move(counts);
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < r.scales.size(); ++i) {
        if (r.counts[i] > 0.0) {
            xs.push_back(std::log(1.0 / r.scales[i]));
            ys.push_back(std::log(r.counts[i]));
        }
    }
    if (xs.size() < 2) {
        r.empty = true;
        return r;
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    r.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - my - r.slope * (xs[i] - mx);
        rss += e * e;
    }
    r.residual = std::sqrt(rss / n);
    return r;
}

BoxCountResult box_dimension(std::span<const double> times, std::span<const double> scales,
                             double s, double t)
{
    if (scales.size() < 4) throw InputError("box_dimension: needs at least four scales");
    const auto [smin, smax] = std::minmax_element(scales.begin(), scales.end());
    if (!(*smin > 0.0) || *smax / *smin < 100.0) {
        throw InputError("box_dimension: scales must be positive and span two decades");
    }
    std::vector<double> counts;
    for (double scale : scales) {
        std::vector<long long> boxes;
        for (double u : times) {
            if (u < s || u >= t) continue;
            boxes.push_back(static_cast<long long>(std::floor((u - s) / scale)));
        }
        std::sort(boxes.begin(), boxes.end());
        boxes.erase(std::unique(boxes.begin(), boxes.end()), boxes.end());
        counts.push_back(static_cast<double>(boxes.size()));
    }
    const bool empty = std::all_of(counts.begin(), counts.end(), [](double c) { return c == 0.0; });
    if (empty) {
        BoxCountResult r;
        r.scales.assign(scales.begin(), scales.end());
        r.counts = counts;
        r.empty = true;
        return r;
    }
    return fit_box_dimension(std::vector<double>(scales.begin(), scales.end()), std::move(counts));
}

std::vector<double> matched_box_counts(const ExceptionalSet& set, std::span<const int> levels)
{
    const int q_lo = (set.resolution + 1) / 2;
    std::vector<double> counts;
    for (int k : levels) {
        if (k < q_lo || k > set.resolution) {
            throw InputError(fmt::format("matched_box_counts: level {} outside [{}, {}]", k, q_lo,
                                         set.resolution));
        }
        const std::size_t step = std::size_t{1} << (set.resolution - k);
        const std::uint64_t bit = std::uint64_t{1} << k;
        std::size_t c = 0;
        for (std::size_t m = 0; m < set.level_bits.size(); m += step) {
            if (set.level_bits[m] & bit) ++c;
        }
        counts.push_back(static_cast<double>(c));
    }
    return counts;
}

}  // namespace kpzlab
