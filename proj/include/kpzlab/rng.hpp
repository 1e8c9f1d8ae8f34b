#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace kpzlab {

/// Philox4x64-10 counter-based generator (Salmon et al.). Output is a pure
/// function of (counter, key); there is no hidden state.
struct Philox4x64 {
    using Counter = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    __extension__ typedef unsigned __int128 u128;

    static Counter block(Counter ctr, Key key)
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const u128 p0 = static_cast<u128>(kM0) * ctr[0];
            const u128 p1 = static_cast<u128>(kM1) * ctr[2];
            const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const auto lo0 = static_cast<std::uint64_t>(p0);
            const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
            const auto lo1 = static_cast<std::uint64_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;
};

/// Key-domain tags so that independent consumers of one user seed never
/// share a counter space.
enum class RngDomain : std::uint64_t {
    SpaceTimeNoise = 0x6e6f697365ULL,
    FractionalBrownian = 0x66626dULL,
    BrownianInitialData = 0x62726f776eULL,
};

/**
 * Random-access stream of standard normals indexed by (row, index).
 *
 * Value (row, i) is a pure function of (seed, domain, stream, row, i): any
 * subset can be generated in any order or on any thread. Normals come from
 * Box-Muller on 53-bit uniforms, evaluated in fixed 16-wide chunks so a given
 * index always follows the same arithmetic path.
 */
class CounterNormalStream {
public:
    static constexpr std::size_t kChunk = 16;

    CounterNormalStream(std::uint64_t seed, RngDomain domain, std::uint64_t stream)
        : key_{seed, static_cast<std::uint64_t>(domain)}, stream_(stream)
    {
    }

    /// Writes normals (row, 0..out.size()) into `out`.
    void fill_row(std::uint64_t row, std::span<double> out) const;

    double at(std::uint64_t row, std::uint64_t index) const;

private:
    void chunk(std::uint64_t row, std::uint64_t first_block, std::span<double, kChunk> out) const;

    Philox4x64::Key key_;
    std::uint64_t stream_;
};

}  // namespace kpzlab
