#include "kpzlab/fbm.hpp"

#include <cmath>
#include <mutex>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <fftw3.h>
#include <fmt/core.h>

#include "fftw_lock.hpp"
#include "kpzlab/rng.hpp"

namespace kpzlab {

namespace {

constexpr std::size_t kCholeskyLimit = 8192;
constexpr std::size_t kAutomaticCholeskyLimit = 4096;
constexpr std::size_t kCirculantLimit = std::size_t{1} << 26;

// Normal rows inside the FractionalBrownian domain, one per generator, so the
// two methods never reuse each other's variates for the same stream.
constexpr std::size_t kCirculantRow = 0;
constexpr std::size_t kCholeskyRow = 1;

using detail::fftw_planner_mutex;

void check_hurst(double h)
{
    if (!(h > 0.0 && h < 1.0)) {
        throw InputError(fmt::format("Hurst parameter must lie in (0, 1), got {}", h));
    }
}

// Autocovariance of unit-spacing fractional Gaussian noise at lag k, written
// with expm1/log1p so the large-lag tail keeps its relative accuracy.
double fgn_autocov(double h, std::size_t k)
{
    if (k == 0) return 1.0;
    const double kk = static_cast<double>(k);
    const double u = 1.0 / kk;
    const double e = 2.0 * h;
    return 0.5 * std::pow(kk, e) * (std::expm1(e * std::log1p(u)) + std::expm1(e * std::log1p(-u)));
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct FftwReal {
    double* p = nullptr;
    explicit FftwReal(std::size_t n) : p(fftw_alloc_real(n)) {}
    ~FftwReal() { fftw_free(p); }
};
struct FftwComplex {
    fftw_complex* p = nullptr;
    explicit FftwComplex(std::size_t n) : p(fftw_alloc_complex(n)) {}
    ~FftwComplex() { fftw_free(p); }
};

}  // namespace

void FbmSpec::validate() const
{
    check_hurst(hurst);
    if (times.empty()) throw InputError("fbm: times must be nonempty");
    if (!(times.front() >= 0.0)) throw InputError("fbm: times must be >= 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw InputError("fbm: times must be strictly increasing");
    }
}

double fbm_covariance(double hurst, double s, double t)
{
    check_hurst(hurst);
    if (!(s >= 0.0) || !(t >= 0.0)) throw InputError("fbm_covariance: times must be >= 0");
    const double e = 2.0 * hurst;
    return 0.5 * (std::pow(s, e) + std::pow(t, e) - std::pow(std::fabs(t - s), e));
}

Path sample_fbm_cholesky(const FbmSpec& spec)
{
    spec.validate();
    if (spec.times.size() > kCholeskyLimit) {
        throw InputError(fmt::format("fbm Cholesky: {} times exceed the limit of {}",
                                     spec.times.size(), kCholeskyLimit));
    }
    // X_0 = 0 exactly, so a leading zero time is excluded from the factor.
    const std::size_t skip = spec.times.front() == 0.0 ? 1 : 0;
    const std::size_t m = spec.times.size() - skip;

    Path out;
    out.t0 = spec.times.front();
    out.dt = spec.times.size() > 1 ? spec.times[1] - spec.times[0] : 1.0;
    out.values.assign(spec.times.size(), 0.0);
    if (m == 0) return out;

    Eigen::MatrixXd cov(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double c = fbm_covariance(spec.hurst, spec.times[i + skip], spec.times[j + skip]);
            cov(i, j) = c;
            cov(j, i) = c;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw NumericalError(
            "fbm Cholesky: covariance matrix is not numerically positive definite "
            "(times too close together)");
    }
    CounterNormalStream normals(spec.seed, RngDomain::FractionalBrownian, spec.stream_id);
    Eigen::VectorXd z(m);
    normals.fill_row(kCholeskyRow, std::span<double>(z.data(), m));
    const Eigen::VectorXd x = llt.matrixL() * z;
    for (std::size_t i = 0; i < m; ++i) out.values[i + skip] = x[i];
    return out;
}

CirculantFbm::CirculantFbm(double hurst, std::size_t n, double dt) : hurst_(hurst), n_(n), dt_(dt)
{
    check_hurst(hurst);
    if (!is_power_of_two(n) || n > kCirculantLimit) {
        throw InputError(fmt::format("fbm circulant: n must be a power of two <= 2^26, got {}", n));
    }
    if (!(dt > 0.0)) throw InputError("fbm circulant: dt must be positive");

    const std::size_t big = 2 * n;
    FftwReal row(big);
    FftwComplex spec(n + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(big), row.p, spec.p, FFTW_ESTIMATE);
    }
    for (std::size_t j = 0; j <= n; ++j) row.p[j] = fgn_autocov(hurst, j);
    for (std::size_t j = n + 1; j < big; ++j) row.p[j] = row.p[big - j];
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    // The first-row sum bounds |lambda_k|; eigenvalues below -1e-10 of it are
    // genuinely negative, smaller excursions are rounding.
    double lmax = 0.0;
    for (std::size_t k = 0; k <= n; ++k) lmax = std::max(lmax, std::fabs(spec.p[k][0]));
    const double scale = std::pow(dt, hurst);
    root_.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double lambda = spec.p[k][0];
        if (lambda < -1e-10 * lmax) {
            throw NumericalError(
                fmt::format("fbm circulant: negative embedding eigenvalue {} at mode {}", lambda, k));
        }
        root_[k] = scale * std::sqrt(std::max(lambda, 0.0) / static_cast<double>(big));
    }
}

Path CirculantFbm::sample(std::uint64_t seed, std::uint64_t stream_id) const
{
    const std::size_t n = n_;
    const std::size_t big = 2 * n;
    std::vector<double> z(big);
    CounterNormalStream normals(seed, RngDomain::FractionalBrownian, stream_id);
    normals.fill_row(kCirculantRow, z);

    FftwComplex spec(n + 1);
    FftwReal real(big);
    // Hermitian spectrum whose inverse transform has the circulant covariance:
    // modes 0 and n are real, the others carry half the variance per part.
    spec.p[0][0] = root_[0] * z[0];
    spec.p[0][1] = 0.0;
    spec.p[n][0] = root_[n] * z[1];
    spec.p[n][1] = 0.0;
    constexpr double half = 0.70710678118654752;
    for (std::size_t k = 1; k < n; ++k) {
        const double r = root_[k] * half;
        spec.p[k][0] = r * z[2 * k];
        spec.p[k][1] = r * z[2 * k + 1];
    }
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(big), spec.p, real.p, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    Path out{0.0, dt_, std::vector<double>(n + 1)};
    double acc = 0.0;
    out.values[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += real.p[k];
        out.values[k + 1] = acc;
    }
    return out;
}

Path sample_fbm_circulant(double hurst, std::size_t n, double dt, std::uint64_t seed,
                          std::uint64_t stream_id)
{
    return CirculantFbm(hurst, n, dt).sample(seed, stream_id);
}

Path sample_fbm(const FbmSpec& spec)
{
    spec.validate();
    FbmMethod method = spec.method;
    if (method == FbmMethod::Automatic) {
        method = spec.times.size() <= kAutomaticCholeskyLimit ? FbmMethod::Cholesky
                                                              : FbmMethod::Circulant;
    }
    if (method == FbmMethod::Cholesky) return sample_fbm_cholesky(spec);

    if (spec.times.size() < 2) throw InputError("fbm circulant: needs at least two times");
    const double dt = spec.times[1] - spec.times[0];
    for (std::size_t i = 1; i < spec.times.size(); ++i) {
        const double d = spec.times[i] - spec.times[i - 1];
        if (std::fabs(d - dt) > 1e-9 * dt) {
            throw InputError("fbm circulant: times must be uniformly spaced");
        }
    }
    const std::size_t offset = exact_multiple(spec.times.front(), dt, "fbm start time");
    const std::size_t needed = offset + spec.times.size() - 1;
    std::size_t n = 1;
    while (n < needed) n *= 2;
    Path full = sample_fbm_circulant(spec.hurst, n, dt, spec.seed, spec.stream_id);
    Path out{spec.times.front(), dt, {}};
    out.values.assign(full.values.begin() + static_cast<std::ptrdiff_t>(offset),
                      full.values.begin() + static_cast<std::ptrdiff_t>(offset + spec.times.size()));
    return out;
}

Path scale_path(const Path& path, double factor)
{
    Path out = path;
    for (double& v : out.values) v *= factor;
    return out;
}

Path rescale_to_kpz_scale(const Path& path) { return scale_path(path, kFbmKpzScale); }

}  // namespace kpzlab
