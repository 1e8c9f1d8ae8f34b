#include "kpzlab/grid.hpp"

#include <cmath>

#include <fmt/core.h>

namespace kpzlab {

namespace {
constexpr double kGuardFactor = 10.0;
constexpr double kMultipleTolerance = 1e-9;
}  // namespace

std::size_t exact_multiple(double span, double step, const std::string& what)
{
    if (!(step > 0.0) || !std::isfinite(span) || span < 0.0) {
        throw InputError(fmt::format("{}: invalid span {} for step {}", what, span, step));
    }
    const double ratio = span / step;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > kMultipleTolerance * std::max(1.0, rounded)) {
        throw InputError(fmt::format("{}: {} is not an integer multiple of {} (ratio {})", what,
                                     span, step, ratio));
    }
    return static_cast<std::size_t>(rounded);
}

GridSpec make_grid(double x_min, double x_max, std::size_t nx, double t_start, double t_end,
                   std::size_t nt, GridOptions options)
{
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(t_start) ||
        !std::isfinite(t_end)) {
        throw InputError("make_grid: bounds must be finite");
    }
    if (nx == 0 || nt == 0) {
        throw InputError("make_grid: nx and nt must be at least 1");
    }
    if (!(x_max > x_min)) {
        throw InputError(fmt::format("make_grid: x_max ({}) must exceed x_min ({})", x_max, x_min));
    }
    if (t_start < 0.0 || !(t_end > t_start)) {
        throw InputError(
            fmt::format("make_grid: need 0 <= t_start < t_end, got [{}, {}]", t_start, t_end));
    }
    GridSpec g;
    g.x_min_ = x_min;
    g.x_max_ = x_max;
    g.nx_ = nx;
    g.t_start_ = t_start;
    g.t_end_ = t_end;
    g.nt_ = nt;
    g.dx_ = (x_max - x_min) / static_cast<double>(nx);
    g.dt_ = (t_end - t_start) / static_cast<double>(nt);
    g.guard_overridden_ = options.override_boundary_guard;
    if (!g.satisfies_boundary_guard() && !options.override_boundary_guard) {
        throw InputError(fmt::format(
            "make_grid: domain width {} is below the boundary guard 10*sqrt(t_end) = {}",
            g.width(), kGuardFactor * std::sqrt(t_end)));
    }
    return g;
}

bool GridSpec::satisfies_boundary_guard() const
{
    return width() >= kGuardFactor * std::sqrt(t_end_);
}

std::size_t GridSpec::origin_index() const
{
    const double pos = -x_min_ / dx_;
    const double idx = std::round(pos);
    if (idx < 0.0 || idx >= static_cast<double>(nx_) || std::abs(pos - idx) > 1e-9) {
        throw InputError("grid: x = 0 is not a grid node");
    }
    return static_cast<std::size_t>(idx);
}

std::size_t GridSpec::steps_for(double duration) const
{
    return exact_multiple(duration, dt_, "time span");
}

std::size_t GridSpec::step_index(double t) const
{
    if (t < t_start_ - kMultipleTolerance * dt_ || t > t_end_ + kMultipleTolerance * dt_) {
        throw InputError(
            fmt::format("time {} outside grid window [{}, {}]", t, t_start_, t_end_));
    }
    return steps_for(std::max(0.0, t - t_start_));
}

}  // namespace kpzlab
