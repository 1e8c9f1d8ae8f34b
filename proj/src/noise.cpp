#include "kpzlab/noise.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace kpzlab {

NoiseArray::NoiseArray(GridSpec grid, std::vector<double> increments)
    : grid_(grid), data_(std::move(increments))
{
    if (data_.size() != grid_.nt() * grid_.nx()) {
        throw InputError(fmt::format("NoiseArray: expected {} x {} values, got {}", grid_.nt(),
                                     grid_.nx(), data_.size()));
    }
}

NoiseArray NoiseArray::zeros(const GridSpec& grid)
{
    return NoiseArray(grid, std::vector<double>(grid.nt() * grid.nx(), 0.0));
}

std::span<const double> NoiseArray::row(std::size_t n) const
{
    if (n >= grid_.nt()) {
        throw InputError(fmt::format("NoiseArray: row {} out of range", n));
    }
    return std::span<const double>(data_).subspan(n * grid_.nx(), grid_.nx());
}

void NoiseArray::fill_row(std::size_t n, std::span<double> out) const
{
    const auto r = row(n);
    std::copy(r.begin(), r.end(), out.begin());
}

NoiseRealization::NoiseRealization(GridSpec grid, std::uint64_t seed, std::uint64_t stream_id)
    : grid_(grid),
      seed_(seed),
      stream_id_(stream_id),
      normals_(seed, RngDomain::SpaceTimeNoise, stream_id),
      scale_(std::sqrt(grid.dt() * grid.dx()))
{
}

void NoiseRealization::fill_row(std::size_t n, std::span<double> out) const
{
    normals_.fill_row(n, out.first(grid_.nx()));
    for (std::size_t i = 0; i < grid_.nx(); ++i) {
        out[i] *= scale_;
    }
}

NoiseArray NoiseRealization::materialize() const
{
    std::vector<double> data(grid_.nt() * grid_.nx());
    for (std::size_t n = 0; n < grid_.nt(); ++n) {
        fill_row(n, std::span<double>(data).subspan(n * grid_.nx(), grid_.nx()));
    }
    return NoiseArray(grid_, std::move(data));
}

NoiseRealization sample_noise(const GridSpec& grid, std::uint64_t seed, std::uint64_t stream_id)
{
    return NoiseRealization(grid, seed, stream_id);
}

double NoiseSummary::max_abs_lag1() const
{
    double m = 0.0;
    if (spatial_lag1) m = std::max(m, std::abs(*spatial_lag1));
    if (temporal_lag1) m = std::max(m, std::abs(*temporal_lag1));
    return m;
}

NoiseSummary noise_statistics(const NoiseArray& noise)
{
    const auto v = noise.values();
    const std::size_t nt = noise.grid().nt();
    const std::size_t nx = noise.grid().nx();
    NoiseSummary s;
    if (v.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / static_cast<double>(v.size());
    if (!(s.variance > 0.0)) {
        return s;
    }
    // Pooled lag-1 correlation using the global mean and variance.
    auto lag_corr = [&](std::size_t pairs, auto&& value_pair) -> std::optional<double> {
        if (pairs == 0) return std::nullopt;
        double acc = 0.0;
        for (std::size_t k = 0; k < pairs; ++k) {
            const auto [a, b] = value_pair(k);
            acc += (a - s.mean) * (b - s.mean);
        }
        return acc / static_cast<double>(pairs) / s.variance;
    };
    if (nx > 1) {
        const std::size_t per_row = nx - 1;
        s.spatial_lag1 = lag_corr(nt * per_row, [&](std::size_t k) {
            const std::size_t n = k / per_row;
            const std::size_t i = k % per_row;
            return std::pair{v[n * nx + i], v[n * nx + i + 1]};
        });
    }
    if (nt > 1) {
        s.temporal_lag1 = lag_corr((nt - 1) * nx, [&](std::size_t k) {
            return std::pair{v[k], v[k + nx]};
        });
    }
    return s;
}

}  // namespace kpzlab
