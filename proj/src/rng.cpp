#include "kpzlab/rng.hpp"

#include <algorithm>

#include "kpzlab/simd_kernels.hpp"

namespace kpzlab {

static_assert(CounterNormalStream::kChunk == simd::kChunk);

void CounterNormalStream::chunk(std::uint64_t row, std::uint64_t first_block,
                                std::span<double, kChunk> out) const
{
    std::array<std::uint64_t, kChunk> bits{};
    for (std::size_t b = 0; b < kChunk / 4; ++b) {
        const auto r = Philox4x64::block({first_block + b, row, stream_, 0}, key_);
        std::copy(r.begin(), r.end(), bits.begin() + 4 * b);
    }
    simd::box_muller16(bits.data(), out.data());
}

void CounterNormalStream::fill_row(std::uint64_t row, std::span<double> out) const
{
    const std::size_t n = out.size();
    const std::size_t full = n - n % kChunk;
    for (std::size_t i = 0; i < full; i += kChunk) {
        chunk(row, i / 4, std::span<double, kChunk>(out.data() + i, kChunk));
    }
    if (full < n) {
        std::array<double, kChunk> tail{};
        chunk(row, full / 4, tail);
        std::copy(tail.begin(), tail.begin() + (n - full), out.begin() + full);
    }
}

double CounterNormalStream::at(std::uint64_t row, std::uint64_t index) const
{
    std::array<double, kChunk> values{};
    const std::uint64_t base = index - index % kChunk;
    chunk(row, base / 4, values);
    return values[index - base];
}

}  // namespace kpzlab
