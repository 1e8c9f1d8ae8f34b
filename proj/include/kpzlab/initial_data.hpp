#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kpzlab/expr.hpp"
#include "kpzlab/field.hpp"

namespace kpzlab {

/// Parameters (theta, delta, lambda, kappa, M) of the sub-parabolic initial
/// data class; all strictly positive.
struct HypParams {
    double theta = 1.0;
    double delta = 1.0;
    double lambda = 1.0;
    double kappa = 1.0;
    double M = 1.0;

    void validate() const;
};

using FunctionDescriptor = std::variant<Expression, SampleTable>;

double evaluate(const FunctionDescriptor& f, double x);

enum class InitialKind { NarrowWedge, BrownianIC, FunctionIC };

/**
 * Initial datum f for the KPZ equation (the heat equation starts from e^f).
 *
 * NarrowWedge stands for a delta mass at 0 and is realized on a grid as the
 * heat kernel at smoothing time t0. BrownianIC is a two-sided Brownian
 * motion with its own seed. FunctionIC is a deterministic function with
 * values in R or -inf.
 */
struct InitialDatum {
    InitialKind kind = InitialKind::FunctionIC;
    std::optional<FunctionDescriptor> function;
    std::uint64_t brownian_seed = 0;
    double t0 = 0.0;

    static InitialDatum narrow_wedge(double t0);
    static InitialDatum brownian(std::uint64_t seed);
    static InitialDatum from_function(FunctionDescriptor f);
    static InitialDatum from_expression(const std::string& text);

    std::string describe() const;
};

/// Default narrow-wedge smoothing time for a grid: the smallest multiple of
/// dt that is at least max(10 dt, 8 dx^2), so the sampled kernel is resolved.
double default_narrow_wedge_t0(double dx, double dt);

struct HypReport {
    bool growth_ok = false;
    std::optional<double> growth_violation_x;
    bool floor_ok = false;
    std::optional<std::pair<double, double>> floor_interval;
    double probe_extent = 0.0;
    std::size_t probe_count = 0;

    bool pass() const { return growth_ok && floor_ok; }
};

/// Probe-based membership test: growth bound f(x) <= lambda (1 + |x|^{2-delta})
/// on [-probe_extent, probe_extent], and a length-theta window inside [-M, M]
/// where f >= -kappa.
HypReport validate_hyp(const InitialDatum& f, const HypParams& p, double probe_extent,
                       std::size_t probe_count = 4097);

struct MomentBound {
    int k = 1;
    double lambda_k = 0.0;
    double delta_k = 0.0;
    std::vector<double> probes;
    std::vector<double> values;  ///< log M_k^f at each probe
    bool satisfied = false;
};

/// log M_k^f on the probes (k f(x) for deterministic data, k^2 |x| / 2 for
/// Brownian data) and the smallest (lambda_k, delta_k) from the ladder
/// lambda_k in {2 k lambda, k^2 / 2, max of both}, delta_k = min(1, delta)
/// for which log M_k^f(x) <= lambda_k (1 + |x|^{2 - delta_k}) at every probe.
MomentBound log_moment_bound(const InitialDatum& f, int k, const std::vector<double>& probes,
                             const HypParams& p);

/// Initial field on `grid`: e^f at the nodes (-inf -> 0), e^{B(x_i)} for
/// Brownian data, p_{t0}(x_i) for the narrow wedge. The field time is
/// grid.t_start(); the narrow wedge requires t_start == t0 >= 4 dt. For
/// Brownian data, `replica` selects an independent path B per replica.
FieldState make_initial_field(const GridSpec& grid, const InitialDatum& ic,
                              std::uint64_t replica = 0);

}  // namespace kpzlab
