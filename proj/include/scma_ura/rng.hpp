#pragma once

#include <cstdint>
#include <random>

namespace scma_ura {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Substream seed for (root seed, stream kind, index a, index b).
///
/// Every random stream in a campaign is derived from the root seed through
/// this function, so any (grid point, replication) or (group, replication)
/// pair can be replayed on its own. `kind` separates campaign types that
/// would otherwise share indices.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t kind, std::uint64_t a, std::uint64_t b = 0) noexcept
{
    std::uint64_t s = splitmix64(root);
    s = splitmix64(s ^ (kind * 0xd1b54a32d192ed03ULL));
    s = splitmix64(s ^ (a * 0xa0761d6478bd642fULL));
    s = splitmix64(s ^ (b * 0xe7037ed1a0b428dbULL));
    return s;
}

inline Rng make_stream(std::uint64_t root, std::uint64_t kind, std::uint64_t a, std::uint64_t b = 0)
{
    return Rng(derive_seed(root, kind, a, b));
}

namespace stream_kind {
inline constexpr std::uint64_t sweep = 1;
inline constexpr std::uint64_t barring = 2;
inline constexpr std::uint64_t groups = 3;
inline constexpr std::uint64_t property = 4;
inline constexpr std::uint64_t trace = 5;
} // namespace stream_kind

} // namespace scma_ura
