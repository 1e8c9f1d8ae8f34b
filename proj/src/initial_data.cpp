#include "kpzlab/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "kpzlab/heat_kernel.hpp"
#include "kpzlab/rng.hpp"

namespace kpzlab {

namespace {
constexpr double kLogOverflowGuard = 300.0;
}

void HypParams::validate() const
{
    if (!(theta > 0 && delta > 0 && lambda > 0 && kappa > 0 && M > 0)) {
        throw InputError("HypParams: theta, delta, lambda, kappa and M must all be positive");
    }
}

double evaluate(const FunctionDescriptor& f, double x)
{
    return std::visit([x](const auto& fn) { return fn(x); }, f);
}

InitialDatum InitialDatum::narrow_wedge(double t0)
{
    if (!(t0 > 0.0)) throw InputError("narrow wedge: smoothing time t0 must be positive");
    InitialDatum d;
    d.kind = InitialKind::NarrowWedge;
    d.t0 = t0;
    return d;
}

InitialDatum InitialDatum::brownian(std::uint64_t seed)
{
    InitialDatum d;
    d.kind = InitialKind::BrownianIC;
    d.brownian_seed = seed;
    return d;
}

InitialDatum InitialDatum::from_function(FunctionDescriptor f)
{
    InitialDatum d;
    d.kind = InitialKind::FunctionIC;
    d.function = std::move(f);
    return d;
}

InitialDatum InitialDatum::from_expression(const std::string& text)
{
    return from_function(Expression::parse(text));
}

std::string InitialDatum::describe() const
{
    switch (kind) {
    case InitialKind::NarrowWedge: return fmt::format("narrow_wedge(t0={})", t0);
    case InitialKind::BrownianIC: return fmt::format("brownian(seed={})", brownian_seed);
    case InitialKind::FunctionIC:
        if (function && std::holds_alternative<Expression>(*function)) {
            return fmt::format("function({})", std::get<Expression>(*function).text());
        }
        return "function(table)";
    }
    return "unknown";
}

double default_narrow_wedge_t0(double dx, double dt)
{
    const double target = std::max(10.0 * dt, 8.0 * dx * dx);
    return std::ceil(target / dt - 1e-9) * dt;
}

HypReport validate_hyp(const InitialDatum& f, const HypParams& p, double probe_extent,
                       std::size_t probe_count)
{
    p.validate();
    if (f.kind != InitialKind::FunctionIC || !f.function) {
        throw InputError("validate_hyp: only function initial data can be validated");
    }
    if (probe_extent < p.M) {
        throw InputError("validate_hyp: probe_extent must be at least M");
    }
    if (probe_count < 2) probe_count = 2;
    const auto& fn = *f.function;

    HypReport r;
    r.probe_extent = probe_extent;
    r.probe_count = probe_count;

    r.growth_ok = true;
    const double h = 2.0 * probe_extent / static_cast<double>(probe_count - 1);
    for (std::size_t i = 0; i < probe_count; ++i) {
        const double x = -probe_extent + static_cast<double>(i) * h;
        const double v = evaluate(fn, x);
        if (std::isnan(v)) throw InputError(fmt::format("validate_hyp: f is NaN at x = {}", x));
        if (v > p.lambda * (1.0 + std::pow(std::abs(x), 2.0 - p.delta))) {
            r.growth_ok = false;
            r.growth_violation_x = x;
            break;
        }
    }

    // Floor condition: scan [-M, M] for a run of probes with f >= -kappa
    // covering a window of length theta.
    r.floor_ok = false;
    if (p.theta <= 2.0 * p.M) {
        const std::size_t n = std::max<std::size_t>(
            probe_count, static_cast<std::size_t>(std::ceil(64.0 * 2.0 * p.M / p.theta)) + 1);
        const double step = 2.0 * p.M / static_cast<double>(n - 1);
        std::optional<double> run_start;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = -p.M + static_cast<double>(i) * step;
            const double v = evaluate(fn, y);
            if (v >= -p.kappa) {
                if (!run_start) run_start = y;
                if (y - *run_start >= p.theta - 1e-12 * p.theta) {
                    r.floor_ok = true;
                    r.floor_interval = std::pair{*run_start, *run_start + p.theta};
                    break;
                }
            } else {
                run_start.reset();
            }
        }
    }
    return r;
}

MomentBound log_moment_bound(const InitialDatum& f, int k, const std::vector<double>& probes,
                             const HypParams& p)
{
    if (k < 1) throw InputError("log_moment_bound: k must be >= 1");
    if (f.kind == InitialKind::NarrowWedge) {
        throw InputError("log_moment_bound: narrow wedge data is not a function");
    }
    p.validate();
    MomentBound mb;
    mb.k = k;
    mb.probes = probes;
    mb.values.reserve(probes.size());
    const double kd = static_cast<double>(k);
    for (double x : probes) {
        if (f.kind == InitialKind::BrownianIC) {
            mb.values.push_back(kd * kd * std::abs(x) / 2.0);
        } else {
            mb.values.push_back(kd * evaluate(*f.function, x));
        }
    }
    mb.delta_k = std::min(1.0, p.delta);
    std::vector<double> ladder{2.0 * kd * p.lambda, kd * kd / 2.0,
                               std::max(2.0 * kd * p.lambda, kd * kd / 2.0)};
    std::sort(ladder.begin(), ladder.end());
    for (double lam : ladder) {
        bool ok = true;
        for (std::size_t i = 0; i < probes.size() && ok; ++i) {
            ok = mb.values[i] <= lam * (1.0 + std::pow(std::abs(probes[i]), 2.0 - mb.delta_k));
        }
        mb.lambda_k = lam;
        if (ok) {
            mb.satisfied = true;
            break;
        }
    }
    return mb;
}

FieldState make_initial_field(const GridSpec& grid, const InitialDatum& ic, std::uint64_t replica)
{
    FieldState s{grid, grid.t_start(), std::vector<double>(grid.nx()), SolveMode::Multiplicative, 0.0};
    switch (ic.kind) {
    case InitialKind::NarrowWedge: {
        if (!(ic.t0 >= 4.0 * grid.dt() * (1.0 - 1e-12))) {
            throw InputError(fmt::format("narrow wedge: t0 = {} must be at least 4 dt = {}", ic.t0,
                                         4.0 * grid.dt()));
        }
        if (std::abs(grid.t_start() - ic.t0) > 1e-12 * std::max(1.0, ic.t0)) {
            throw InputError(fmt::format(
                "narrow wedge: grid must start at the smoothing time t0 = {} (got t_start = {})",
                ic.t0, grid.t_start()));
        }
        for (std::size_t i = 0; i < grid.nx(); ++i) s.values[i] = heat_kernel(ic.t0, grid.x(i));
        return s;
    }
    case InitialKind::BrownianIC: {
        const std::size_t i0 = grid.origin_index();
        const std::size_t nx = grid.nx();
        CounterNormalStream normals(ic.brownian_seed, RngDomain::BrownianInitialData, replica);
        std::vector<double> right(nx);
        std::vector<double> left(nx);
        normals.fill_row(0, right);
        normals.fill_row(1, left);
        const double sd = std::sqrt(grid.dx());
        std::vector<double> b(nx, 0.0);
        for (std::size_t i = i0 + 1; i < nx; ++i) b[i] = b[i - 1] + sd * right[i - i0 - 1];
        for (std::size_t i = i0; i-- > 0;) b[i] = b[i + 1] + sd * left[i0 - i - 1];
        const double bmax = *std::max_element(b.begin(), b.end());
        if (bmax > kLogOverflowGuard) s.log_scale = bmax;
        for (std::size_t i = 0; i < nx; ++i) s.values[i] = std::exp(b[i] - s.log_scale);
        return s;
    }
    case InitialKind::FunctionIC: {
        if (!ic.function) throw InputError("function initial data without a descriptor");
        std::vector<double> f(grid.nx());
        double fmax = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            f[i] = evaluate(*ic.function, grid.x(i));
            if (std::isnan(f[i]) || f[i] == std::numeric_limits<double>::infinity()) {
                throw NumericalError(
                    fmt::format("initial data: exp(f) overflows at x = {} (f = {})", grid.x(i), f[i]));
            }
            fmax = std::max(fmax, f[i]);
        }
        if (fmax > kLogOverflowGuard) s.log_scale = fmax;
        for (std::size_t i = 0; i < grid.nx(); ++i) s.values[i] = std::exp(f[i] - s.log_scale);
        return s;
    }
    }
    return s;
}

}  // namespace kpzlab
