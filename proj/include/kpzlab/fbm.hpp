#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "kpzlab/solver.hpp"

namespace kpzlab {

/// (2/pi)^{1/4}: the factor relating KPZ temporal increments to fBm(1/4).
inline constexpr double kFbmKpzScale = 0.8932438417380023;

enum class FbmMethod { Automatic, Cholesky, Circulant };

struct FbmSpec {
    double hurst = 0.25;
    std::vector<double> times;
    FbmMethod method = FbmMethod::Automatic;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    void validate() const;
};

/// Cov(X_s, X_t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2 for fBm with X_0 = 0.
double fbm_covariance(double hurst, double s, double t);

/// Exact sample at spec.times via a dense Cholesky factor (at most 8192
/// times). The returned Path holds values in spec.times order; its t0/dt
/// are only meaningful for uniform times.
Path sample_fbm_cholesky(const FbmSpec& spec);

/**
 * Davies-Harte circulant embedding for fBm on the uniform grid k*dt,
 * k = 0..n. The sqrt-eigenvalue table depends only on (H, n, dt), is built
 * once and is read-only afterwards, so one instance can serve concurrent
 * sample() calls.
 */
class CirculantFbm {
public:
    CirculantFbm(double hurst, std::size_t n, double dt);

    double hurst() const { return hurst_; }
    std::size_t steps() const { return n_; }
    double dt() const { return dt_; }

    /// Path of n + 1 values, X_0 = 0, at times 0, dt, ..., n dt.
    Path sample(std::uint64_t seed, std::uint64_t stream_id) const;

private:
    double hurst_;
    std::size_t n_;
    double dt_;
    // sqrt(lambda_k / 2n) for k = 0..n.
    std::vector<double> root_;
};

/// n must be a power of two no larger than 2^26.
Path sample_fbm_circulant(double hurst, std::size_t n, double dt, std::uint64_t seed,
                          std::uint64_t stream_id);

/// Dispatches on spec.method. Automatic uses Cholesky up to 4096 times and
/// circulant embedding above, which needs uniform times on a multiple of
/// the spacing.
Path sample_fbm(const FbmSpec& spec);

/// values * (2/pi)^{1/4}.
Path rescale_to_kpz_scale(const Path& path);
Path scale_path(const Path& path, double factor);

}  // namespace kpzlab
