#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace kpzlab {

/// Thrown for contract violations on user-facing inputs (bad grids, bad
/// epsilons, malformed descriptors). Carries a human-readable reason.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a computation breaks down numerically (overflow, NaN,
/// non-positive definite covariance).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridOptions {
    bool override_boundary_guard = false;
};

/**
 * Space-time discretization of a periodic interval [x_min, x_max) and a time
 * window [t_start, t_end].
 *
 * Spatial nodes are x_i = x_min + i*dx for i = 0..nx-1; x_max is identified
 * with x_min. Times are t_n = t_start + n*dt for n = 0..nt.
 */
class GridSpec {
public:
    /// Placeholder single-cell grid on [0, 1) x [0, 1]; real grids come from
    /// make_grid.
    GridSpec() = default;

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t nx() const { return nx_; }
    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    std::size_t nt() const { return nt_; }
    double dx() const { return dx_; }
    double dt() const { return dt_; }
    double width() const { return x_max_ - x_min_; }
    bool guard_overridden() const { return guard_overridden_; }

    double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }
    double t(std::size_t n) const { return t_start_ + static_cast<double>(n) * dt_; }

    /// Index of the node at x = 0. Throws InputError if 0 is not a node.
    std::size_t origin_index() const;

    /// True if the boundary guard width >= 10*sqrt(t_end) holds.
    bool satisfies_boundary_guard() const;

    /// Number of time steps spanning `duration`; throws if duration is not an
    /// integer multiple of dt (relative tolerance 1e-9).
    std::size_t steps_for(double duration) const;

    /// Step index of absolute time t; throws if t is off-grid or outside.
    std::size_t step_index(double t) const;

    friend GridSpec make_grid(double, double, std::size_t, double, double, std::size_t,
                              GridOptions);
    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    double x_min_ = 0.0;
    double x_max_ = 1.0;
    std::size_t nx_ = 1;
    double t_start_ = 0.0;
    double t_end_ = 1.0;
    std::size_t nt_ = 1;
    double dx_ = 1.0;
    double dt_ = 1.0;
    bool guard_overridden_ = false;
};

GridSpec make_grid(double x_min, double x_max, std::size_t nx, double t_start, double t_end,
                   std::size_t nt, GridOptions options = {});

/// Number of whole `step`s in `span`, or throws InputError naming `what` when
/// `span` is not an integer multiple of `step`.
std::size_t exact_multiple(double span, double step, const std::string& what);

}  // namespace kpzlab
