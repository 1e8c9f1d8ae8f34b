#pragma once

#include <memory>
#include <span>

#include "kpzlab/field.hpp"

namespace kpzlab {

/// (2 pi t)^{-1/2} exp(-x^2 / (2t)); t must be positive.
double heat_kernel(double t, double x);

/**
 * Exact heat flow on the periodic grid: each discrete Fourier mode with
 * wavenumber k is damped by exp(-k^2 dt / 2).
 *
 * Holds FFTW plans and aligned work buffers, so one instance must not be
 * used concurrently; create one per worker. Plans are built with
 * FFTW_ESTIMATE so the arithmetic is identical across instances.
 */
class HeatPropagator {
public:
    HeatPropagator(const GridSpec& grid, double dt);
    ~HeatPropagator();
    HeatPropagator(HeatPropagator&&) noexcept;
    HeatPropagator& operator=(HeatPropagator&&) noexcept;
    HeatPropagator(const HeatPropagator&) = delete;
    HeatPropagator& operator=(const HeatPropagator&) = delete;

    double dt() const;
    std::size_t size() const;

    /// Propagates `values` (length nx) in place by time dt.
    void apply(std::span<double> values);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Heat flow of `field` by time dt; returns the field at t_abs + dt.
FieldState heat_step(const FieldState& field, double dt);

/// E[(V_{t+eps}(0) - V_t(0))^2] for the additive linear equation started
/// from zero:
///   [sqrt(2t+2eps) + sqrt(2t) - 2 sqrt(2t+eps) + 2 sqrt(eps)] / sqrt(2 pi).
double linear_increment_variance(double t, double eps);

}  // namespace kpzlab
