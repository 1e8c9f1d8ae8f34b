#pragma once

#include <cstdint>
#include <span>

// Hot loops compiled with vectorized libm. Every entry point works on whole
// 16-element chunks so results do not depend on the caller's array length.
namespace kpzlab::simd {

inline constexpr std::size_t kChunk = 16;

/// Box-Muller on 16 raw 64-bit words -> 16 standard normals. Words 2p and
/// 2p+1 feed the pair (out[2p], out[2p+1]).
void box_muller16(const std::uint64_t* bits, double* out);

/// field[i] *= exp(sigma * normals[i] - drift) for i < field.size().
void lognormal_multiply(std::span<double> field, std::span<const double> normals, double sigma,
                        double drift);

}  // namespace kpzlab::simd
