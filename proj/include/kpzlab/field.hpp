#pragma once

#include <cmath>
#include <vector>

#include "kpzlab/grid.hpp"

namespace kpzlab {

enum class SolveMode { Multiplicative, Additive };

/**
 * A spatial field at one absolute time.
 *
 * The represented field is exp(log_scale) * values. log_scale stays 0 unless
 * the multiplicative solver had to renormalize to avoid overflow; the scheme
 * is linear in the field, so the rescaling is exact.
 */
struct FieldState {
    GridSpec grid;
    double t_abs = 0.0;
    std::vector<double> values;
    SolveMode mode = SolveMode::Multiplicative;
    double log_scale = 0.0;

    /// Field value at node i including the scale factor.
    double value(std::size_t i) const { return std::exp(log_scale) * values[i]; }
    /// Natural log of the field at node i (requires a positive value).
    double log_value(std::size_t i) const { return log_scale + std::log(values[i]); }
};

}  // namespace kpzlab
