#include "kpzlab/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <vector>

#include <fftw3.h>
#include <fmt/core.h>

#include "fftw_lock.hpp"

namespace kpzlab {

namespace detail {
std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}
}  // namespace detail

using detail::fftw_planner_mutex;

double heat_kernel(double t, double x)
{
    if (!(t > 0.0)) {
        throw InputError(fmt::format("heat_kernel: t must be positive, got {}", t));
    }
    return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

struct HeatPropagator::Impl {
    std::size_t n = 0;
    double dt = 0.0;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::vector<double> damping;

    ~Impl()
    {
        std::lock_guard lock(fftw_planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        fftw_free(real);
        fftw_free(spec);
    }
};

HeatPropagator::HeatPropagator(const GridSpec& grid, double dt) : impl_(std::make_unique<Impl>())
{
    if (!(dt > 0.0)) {
        throw InputError(fmt::format("HeatPropagator: dt must be positive, got {}", dt));
    }
    auto& d = *impl_;
    d.n = grid.nx();
    d.dt = dt;
    const std::size_t modes = d.n / 2 + 1;
    d.real = fftw_alloc_real(d.n);
    d.spec = fftw_alloc_complex(modes);
    {
        std::lock_guard lock(fftw_planner_mutex());
        const int n = static_cast<int>(d.n);
        d.forward = fftw_plan_dft_r2c_1d(n, d.real, d.spec, FFTW_ESTIMATE);
        d.backward = fftw_plan_dft_c2r_1d(n, d.spec, d.real, FFTW_ESTIMATE);
    }
    const double length = grid.width();
    d.damping.resize(modes);
    for (std::size_t m = 0; m < modes; ++m) {
        const double k = 2.0 * std::numbers::pi * static_cast<double>(m) / length;
        d.damping[m] = std::exp(-0.5 * k * k * dt) / static_cast<double>(d.n);
    }
}

HeatPropagator::~HeatPropagator() = default;
HeatPropagator::HeatPropagator(HeatPropagator&&) noexcept = default;
HeatPropagator& HeatPropagator::operator=(HeatPropagator&&) noexcept = default;

double HeatPropagator::dt() const { return impl_->dt; }
std::size_t HeatPropagator::size() const { return impl_->n; }

void HeatPropagator::apply(std::span<double> values)
{
    auto& d = *impl_;
    if (values.size() != d.n) {
        throw InputError(fmt::format("heat step: field has {} values, grid has {}", values.size(), d.n));
    }
    std::copy(values.begin(), values.end(), d.real);
    fftw_execute(d.forward);
    const std::size_t modes = d.damping.size();
    for (std::size_t m = 0; m < modes; ++m) {
        d.spec[m][0] *= d.damping[m];
        d.spec[m][1] *= d.damping[m];
    }
    fftw_execute(d.backward);
    std::copy(d.real, d.real + d.n, values.begin());
}

FieldState heat_step(const FieldState& field, double dt)
{
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        if (!std::isfinite(field.values[i])) {
            throw NumericalError(fmt::format("heat_step: non-finite value at node {}", i));
        }
    }
    HeatPropagator prop(field.grid, dt);
    FieldState out = field;
    prop.apply(out.values);
    out.t_abs = field.t_abs + dt;
    return out;
}

double linear_increment_variance(double t, double eps)
{
    if (!(t > 0.0)) {
        throw InputError(fmt::format("linear_increment_variance: t must be positive, got {}", t));
    }
    if (!(eps >= 0.0)) {
        throw InputError(fmt::format("linear_increment_variance: eps must be >= 0, got {}", eps));
    }
    const double v = std::sqrt(2.0 * t + 2.0 * eps) + std::sqrt(2.0 * t) -
                     2.0 * std::sqrt(2.0 * t + eps) + 2.0 * std::sqrt(eps);
    return std::max(0.0, v) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace kpzlab
