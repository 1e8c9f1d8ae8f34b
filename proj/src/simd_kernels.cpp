#include "kpzlab/simd_kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace kpzlab::simd {

void box_muller16(const std::uint64_t* bits, double* out)
{
    std::array<double, kChunk / 2> radius{};
    std::array<double, kChunk / 2> angle{};
#pragma omp simd
    for (std::size_t p = 0; p < kChunk / 2; ++p) {
        const double u1 = (static_cast<double>(bits[2 * p] >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = (static_cast<double>(bits[2 * p + 1] >> 11) + 1.0) * 0x1.0p-53;
        radius[p] = std::sqrt(-2.0 * std::log(u1));
        angle[p] = 2.0 * std::numbers::pi * u2;
    }
    // cos and sin in separate loops: a fused body is turned into scalar
    // sincos calls, which defeats vectorization.
    std::array<double, kChunk / 2> c{};
    std::array<double, kChunk / 2> s{};
#pragma omp simd
    for (std::size_t p = 0; p < kChunk / 2; ++p) c[p] = std::cos(angle[p]);
#pragma omp simd
    for (std::size_t p = 0; p < kChunk / 2; ++p) s[p] = std::sin(angle[p]);
    for (std::size_t p = 0; p < kChunk / 2; ++p) {
        out[2 * p] = radius[p] * c[p];
        out[2 * p + 1] = radius[p] * s[p];
    }
}

namespace {

inline void multiply_chunk(double* field, const double* normals, double sigma, double drift)
{
#pragma omp simd
    for (std::size_t i = 0; i < kChunk; ++i) {
        field[i] *= std::exp(sigma * normals[i] - drift);
    }
}

}  // namespace

void lognormal_multiply(std::span<double> field, std::span<const double> normals, double sigma,
                        double drift)
{
    const std::size_t n = field.size();
    const std::size_t full = n - n % kChunk;
    for (std::size_t i = 0; i < full; i += kChunk) {
        multiply_chunk(field.data() + i, normals.data() + i, sigma, drift);
    }
    if (full < n) {
        std::array<double, kChunk> f{};
        std::array<double, kChunk> g{};
        std::copy(field.begin() + full, field.end(), f.begin());
        std::copy(normals.begin() + full, normals.begin() + n, g.begin());
        multiply_chunk(f.data(), g.data(), sigma, drift);
        std::copy(f.begin(), f.begin() + (n - full), field.begin() + full);
    }
}

}  // namespace kpzlab::simd
