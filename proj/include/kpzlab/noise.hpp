#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kpzlab/grid.hpp"
#include "kpzlab/rng.hpp"

namespace kpzlab {

/// Anything that can hand out the space-time white-noise increments of one
/// time row: out[i] = dW_{n,i}, variance dt*dx.
class NoiseSource {
public:
    virtual ~NoiseSource() = default;
    virtual const GridSpec& grid() const = 0;
    virtual void fill_row(std::size_t n, std::span<double> out) const = 0;
};

/// Materialized nt x nx increment array (row-major, row n = time step n).
class NoiseArray final : public NoiseSource {
public:
    NoiseArray(GridSpec grid, std::vector<double> increments);

    /// All-zero increments on `grid`.
    static NoiseArray zeros(const GridSpec& grid);

    const GridSpec& grid() const override { return grid_; }
    void fill_row(std::size_t n, std::span<double> out) const override;

    std::span<const double> values() const { return data_; }
    std::span<double> values() { return data_; }
    std::span<const double> row(std::size_t n) const;

private:
    GridSpec grid_;
    std::vector<double> data_;
};

/**
 * Seeded discrete white noise on a grid.
 *
 * Cell (n, i) is sqrt(dt*dx) times the standard normal at counter
 * (row n, index i) of the (seed, stream_id) Philox stream, so the whole
 * array is a pure function of (grid, seed, stream_id). Rows are generated
 * on demand; call materialize() to hold the full array.
 */
class NoiseRealization final : public NoiseSource {
public:
    NoiseRealization(GridSpec grid, std::uint64_t seed, std::uint64_t stream_id);

    const GridSpec& grid() const override { return grid_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    void fill_row(std::size_t n, std::span<double> out) const override;
    NoiseArray materialize() const;

private:
    GridSpec grid_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    CounterNormalStream normals_;
    double scale_;
};

NoiseRealization sample_noise(const GridSpec& grid, std::uint64_t seed, std::uint64_t stream_id);

struct NoiseSummary {
    double mean = 0.0;
    double variance = 0.0;
    /// Lag-1 sample correlations; empty when undefined (zero variance or a
    /// single row/column).
    std::optional<double> spatial_lag1;
    std::optional<double> temporal_lag1;

    bool correlation_defined() const { return spatial_lag1.has_value() && temporal_lag1.has_value(); }
    double max_abs_lag1() const;
};

NoiseSummary noise_statistics(const NoiseArray& noise);

}  // namespace kpzlab
