#include "kpzlab/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "kpzlab/parallel.hpp"
#include "kpzlab/simd_kernels.hpp"

namespace kpzlab {

namespace {

constexpr double kRenormHigh = 300.0;
constexpr double kRenormLow = -300.0;

// Largest |value| of the field; throws on NaN/inf. The scan keeps four
// independent accumulators and defers the error path to a second pass so
// the common case stays branch-free.
double checked_max_abs(std::span<const double> v, std::size_t step, double t_abs)
{
    std::array<double, 4> m{};
    std::array<double, 4> poison{};
    const std::size_t n = v.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        for (std::size_t l = 0; l < 4; ++l) {
            const double a = std::fabs(v[i + l]);
            m[l] = a > m[l] ? a : m[l];
            poison[l] += v[i + l] * 0.0;
        }
    }
    for (; i < n; ++i) {
        const double a = std::fabs(v[i]);
        m[0] = a > m[0] ? a : m[0];
        poison[0] += v[i] * 0.0;
    }
    if (!std::isfinite(poison[0] + poison[1] + poison[2] + poison[3])) {
        for (std::size_t k = 0; k < n; ++k) {
            if (!std::isfinite(v[k])) {
                throw NumericalError(fmt::format(
                    "solver: non-finite field value at step {} (t = {}), node {}", step, t_abs, k));
            }
        }
    }
    return std::max(std::max(m[0], m[1]), std::max(m[2], m[3]));
}

double origin_log(const FieldState& f, std::size_t origin)
{
    const double z = f.values[origin];
    return z > 0.0 ? f.log_scale + std::log(z) : -std::numeric_limits<double>::infinity();
}

}  // namespace

std::size_t Path::index_of(double t) const
{
    if (values.empty()) throw InputError("path is empty");
    const double span = t - t0;
    if (span < -1e-12 * std::max(1.0, std::fabs(t0))) {
        throw InputError(fmt::format("time {} precedes path start {}", t, t0));
    }
    const std::size_t k = exact_multiple(std::max(0.0, span), dt, "path time offset");
    if (k >= values.size()) {
        throw InputError(fmt::format("time {} is beyond path end {}", t, t_end()));
    }
    return k;
}

std::size_t Path::steps(double span) const { return exact_multiple(span, dt, "time span"); }

const FieldState& Trajectory::snapshot_at(double t_abs) const
{
    const double tol = 1e-9 * std::max(1.0, std::fabs(t_abs));
    for (const auto& s : snapshots) {
        if (std::fabs(s.t_abs - t_abs) <= tol) return s;
    }
    throw InputError(fmt::format("no snapshot recorded at t = {}", t_abs));
}

SheStepper::SheStepper(const GridSpec& grid, SolveMode mode)
    : grid_(grid), mode_(mode), heat_(grid, grid.dt()),
      kick_scale_(1.0 / grid.dx()), ito_drift_(grid.dt() / (2.0 * grid.dx()))
{}

void SheStepper::advance(FieldState& field, std::span<const double> increments, std::size_t step)
{
    if (increments.size() != field.values.size()) {
        throw InputError("solver: noise row length does not match the field");
    }
    heat_.apply(field.values);
    if (mode_ == SolveMode::Multiplicative) {
        simd::lognormal_multiply(field.values, increments, kick_scale_, ito_drift_);
    } else {
        for (std::size_t i = 0; i < field.values.size(); ++i) {
            field.values[i] += kick_scale_ * increments[i];
        }
    }
    field.t_abs += grid_.dt();

    const double m = checked_max_abs(field.values, step, field.t_abs);
    if (mode_ == SolveMode::Multiplicative && m > 0.0) {
        const double lm = std::log(m);
        if (lm > kRenormHigh || lm < kRenormLow) {
            const double inv = 1.0 / m;
            for (double& v : field.values) v *= inv;
            field.log_scale += lm;
        }
    }
}

Trajectory solve_field(FieldState initial, const NoiseSource& noise, SolveMode mode,
                       const SolveOptions& options)
{
    const GridSpec& grid = noise.grid();
    if (!(initial.grid == grid)) {
        throw InputError("solver: initial field and noise are on different grids");
    }
    if (initial.values.size() != grid.nx()) {
        throw InputError("solver: initial field has the wrong length");
    }
    const double tol = 1e-9 * std::max(1.0, grid.t_start());
    if (std::fabs(initial.t_abs - grid.t_start()) > tol) {
        throw InputError(fmt::format("solver: initial field is at t = {}, grid starts at {}",
                                     initial.t_abs, grid.t_start()));
    }
    checked_max_abs(initial.values, 0, initial.t_abs);
    initial.mode = mode;

    std::vector<std::size_t> snap_steps;
    for (double t : options.snapshot_times) snap_steps.push_back(grid.step_index(t));
    std::sort(snap_steps.begin(), snap_steps.end());
    snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

    Trajectory traj;
    traj.grid = grid;
    traj.mode = mode;
    const std::size_t nt = grid.nt();
    const std::size_t origin = grid.origin_index();
    const bool log_path = mode == SolveMode::Multiplicative;
    if (options.record_origin) {
        traj.origin_path = Path{grid.t_start(), grid.dt(), {}};
        traj.origin_path.values.reserve(nt + 1);
        if (log_path) {
            traj.origin_log_path = Path{grid.t_start(), grid.dt(), {}};
            traj.origin_log_path.values.reserve(nt + 1);
        }
    }

    FieldState field = std::move(initial);
    auto record = [&](std::size_t n) {
        if (options.record_origin) {
            traj.origin_path.values.push_back(field.value(origin));
            if (log_path) traj.origin_log_path.values.push_back(origin_log(field, origin));
        }
        if (std::binary_search(snap_steps.begin(), snap_steps.end(), n)) {
            traj.snapshots.push_back(field);
        }
    };

    record(0);
    SheStepper stepper(grid, mode);
    std::vector<double> row(grid.nx());
    for (std::size_t n = 0; n < nt; ++n) {
        noise.fill_row(n, row);
        stepper.advance(field, row, n + 1);
        record(n + 1);
    }
    return traj;
}

Trajectory solve(const GridSpec& grid, const InitialDatum& ic, const NoiseSource& noise,
                 SolveMode mode, const SolveOptions& options)
{
    FieldState init = make_initial_field(grid, ic);
    if (mode == SolveMode::Additive) {
        for (double v : init.values) {
            if (v != 0.0) {
                throw InputError(
                    "solver: additive mode starts from the zero field; the initial datum is nonzero");
            }
        }
        init.log_scale = 0.0;
    }
    Trajectory traj = solve_field(std::move(init), noise, mode, options);
    traj.ic = ic;
    return traj;
}

Trajectory solve_additive(const GridSpec& grid, const NoiseSource& noise,
                          const SolveOptions& options)
{
    FieldState init{grid, grid.t_start(), std::vector<double>(grid.nx(), 0.0),
                    SolveMode::Additive, 0.0};
    Trajectory traj = solve_field(std::move(init), noise, SolveMode::Additive, options);
    traj.ic = InitialDatum::from_expression("-inf");
    return traj;
}

std::vector<Trajectory> solve_ensemble(const GridSpec& grid, const InitialDatum& ic,
                                       std::uint64_t seed, std::size_t replicas, SolveMode mode,
                                       const SolveOptions& options, std::size_t threads)
{
    if (replicas == 0) throw InputError("solve_ensemble: replicas must be >= 1");
    return parallel_map(replicas, threads, [&](std::size_t r) {
        NoiseRealization noise(grid, seed, r);
        Trajectory traj;
        if (mode == SolveMode::Additive) {
            traj = solve_additive(grid, noise, options);
        } else {
            FieldState init = make_initial_field(grid, ic, r);
            traj = solve_field(std::move(init), noise, mode, options);
            traj.ic = ic;
        }
        traj.seed = seed;
        traj.stream_id = r;
        return traj;
    });
}

Path cole_hopf(const Path& z_path)
{
    Path out{z_path.t0, z_path.dt, {}};
    out.values.reserve(z_path.size());
    for (std::size_t k = 0; k < z_path.size(); ++k) {
        const double z = z_path.values[k];
        if (!(z > 0.0)) {
            throw InputError(fmt::format("cole_hopf: non-positive value {} at index {} (t = {})",
                                         z, k, z_path.time(k)));
        }
        out.values.push_back(std::log(z));
    }
    return out;
}

double scaled_height(const Trajectory& traj, double t, double alpha, double x)
{
    if (!(t > 0.0) || !(alpha > 0.0)) {
        throw InputError("scaled_height: t and alpha must be positive");
    }
    if (traj.ic.kind != InitialKind::NarrowWedge) {
        throw InputError("scaled_height: requires a narrow-wedge trajectory");
    }
    if (traj.mode != SolveMode::Multiplicative) {
        throw InputError("scaled_height: requires a multiplicative trajectory");
    }
    const double at = alpha * t;
    double log_z = 0.0;
    if (x == 0.0) {
        const Path& lp = traj.origin_log_path.values.empty() ? traj.origin_path
                                                             : traj.origin_log_path;
        const double start = lp.t0;
        const double end = lp.t_end();
        if (at < start - 1e-12 || at > end + 1e-9 * std::max(1.0, end)) {
            throw InputError(fmt::format(
                "scaled_height: alpha*t = {} outside the simulated window [{}, {}]", at, start, end));
        }
        const std::size_t k = lp.index_of(at);
        log_z = traj.origin_log_path.values.empty() ? std::log(lp.values[k]) : lp.values[k];
    } else {
        const FieldState& snap = traj.snapshot_at(at);
        const double y = std::cbrt(t * t) * x;
        const GridSpec& g = snap.grid;
        if (y < g.x_min() || y > g.x_max()) {
            throw InputError(fmt::format("scaled_height: position {} outside the grid", y));
        }
        const auto i = static_cast<std::size_t>(std::lround((y - g.x_min()) / g.dx())) % g.nx();
        log_z = snap.log_value(i);
    }
    if (!std::isfinite(log_z)) {
        throw NumericalError("scaled_height: Z is not positive at the requested point");
    }
    return (log_z + at / 24.0) / std::cbrt(t);
}

std::vector<double> stationarity_transform(const FieldState& field)
{
    const double s = field.t_abs;
    if (!(s > 0.0)) throw InputError("stationarity_transform: field time must be positive");
    std::vector<double> out(field.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double y = field.grid.x(i);
        out[i] = std::exp(field.log_scale + y * y / (2.0 * s)) * field.values[i];
    }
    return out;
}

}  // namespace kpzlab
