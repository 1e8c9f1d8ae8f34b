#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kpzlab/field.hpp"
#include "kpzlab/heat_kernel.hpp"
#include "kpzlab/initial_data.hpp"
#include "kpzlab/noise.hpp"

namespace kpzlab {

/// Uniformly sampled scalar time series: values[k] is the value at t0 + k*dt.
struct Path {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double t_end() const { return t0 + dt * static_cast<double>(values.size() - 1); }
    double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
    /// Index of time t; throws InputError unless t is a sample time.
    std::size_t index_of(double t) const;
    /// Number of samples spanning `span`; throws unless span is a multiple of dt.
    std::size_t steps(double span) const;
};

struct Trajectory {
    GridSpec grid;
    InitialDatum ic;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    SolveMode mode = SolveMode::Multiplicative;
    /// Field value at x = 0 for every time step (Z or V).
    Path origin_path;
    /// log Z at x = 0 (multiplicative mode only); exact even when Z itself
    /// would overflow a double.
    Path origin_log_path;
    std::vector<FieldState> snapshots;

    /// log Z at the origin (multiplicative), V at the origin (additive).
    const Path& temporal_path() const
    {
        return mode == SolveMode::Multiplicative ? origin_log_path : origin_path;
    }
    const FieldState& snapshot_at(double t_abs) const;
};

struct SolveOptions {
    std::vector<double> snapshot_times;
    bool record_origin = true;
};

/**
 * One-step operator of the splitting scheme: exact spectral heat flow by dt,
 * then the noise kick of the row dW:
 *   multiplicative: Z <- Z * exp(dW/dx - dt/(2dx))
 *   additive:       V <- V + dW/dx
 * Multiplicative fields are renormalized into FieldState::log_scale when
 * their maximum leaves [e^-300, e^300].
 */
class SheStepper {
public:
    SheStepper(const GridSpec& grid, SolveMode mode);

    /// Advances `field` by one step using noise row `increments`; `step` is
    /// only used for error messages.
    void advance(FieldState& field, std::span<const double> increments, std::size_t step);

    SolveMode mode() const { return mode_; }

private:
    GridSpec grid_;
    SolveMode mode_;
    HeatPropagator heat_;
    double kick_scale_;
    double ito_drift_;
};

/// Runs the scheme from an explicit initial field over noise.grid().
Trajectory solve_field(FieldState initial, const NoiseSource& noise, SolveMode mode,
                       const SolveOptions& options = {});

/// Runs the scheme from `ic`. Additive mode requires an identically zero
/// initial field (e.g. the expression "-inf"); see solve_additive.
Trajectory solve(const GridSpec& grid, const InitialDatum& ic, const NoiseSource& noise,
                 SolveMode mode, const SolveOptions& options = {});

/// Additive (linear) equation from V_0 = 0.
Trajectory solve_additive(const GridSpec& grid, const NoiseSource& noise,
                          const SolveOptions& options = {});

/// Independent replicas r = 0..replicas-1 with noise streams (seed, r), in
/// replica order regardless of `threads`.
std::vector<Trajectory> solve_ensemble(const GridSpec& grid, const InitialDatum& ic,
                                       std::uint64_t seed, std::size_t replicas, SolveMode mode,
                                       const SolveOptions& options, std::size_t threads);

/// Pointwise natural log; throws InputError naming the first value <= 0.
Path cole_hopf(const Path& z_path);

/// [log Z_{alpha t}(t^{2/3} x) + alpha t / 24] / t^{1/3} for a narrow-wedge
/// trajectory. x = 0 reads the origin path; other x use the nearest node of
/// the snapshot at absolute time alpha t.
double scaled_height(const Trajectory& traj, double t, double alpha, double x = 0.0);

/// y -> Z(s, y) exp(y^2 / (2s)) with s = field.t_abs.
std::vector<double> stationarity_transform(const FieldState& field);

}  // namespace kpzlab
