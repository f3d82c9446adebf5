#pragma once

// Shared test-only helpers. The minimum clique cover here is an exhaustive
// oracle, deliberately independent of the delivery implementation it checks.

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "cachesim/config.hpp"

namespace testsupport {

// dp[S] = minimum number of cliques covering vertex subset S (bitmask), for
// every S over at most 6 vertices. Subset dynamic program over the cliques
// that contain the lowest vertex of S.
inline std::array<int, 64> min_cover_table(int vertices,
                                           const std::array<std::uint8_t, 6>& adj) {
    const int masks = 1 << vertices;
    std::array<bool, 64> is_clique{};
    for (int mask = 1; mask < masks; ++mask) {
        bool ok = true;
        for (int v = 0; v < vertices && ok; ++v) {
            if (!(mask & (1 << v))) continue;
            const std::uint8_t others = mask & ~(1 << v);
            ok = (others & ~adj[v]) == 0;
        }
        is_clique[mask] = ok;
    }

    std::array<int, 64> dp{};
    dp[0] = 0;
    for (int s = 1; s < masks; ++s) {
        const int low = s & -s;
        int best = std::numeric_limits<int>::max() - 1;
        for (int sub = s; sub; sub = (sub - 1) & s) {
            if ((sub & low) && is_clique[sub]) best = std::min(best, dp[s ^ sub] + 1);
        }
        dp[s] = best;
    }
    return dp;
}

inline cachesim::Placement fixed_placement(
    std::uint32_t caches, std::uint64_t universe, std::uint64_t per_cache,
    const std::vector<std::vector<std::uint64_t>>& sets) {
    std::vector<boost::dynamic_bitset<>> rows;
    for (const auto& set : sets) {
        boost::dynamic_bitset<> bits(universe);
        for (auto item : set) bits.set(item);
        rows.push_back(std::move(bits));
    }
    return cachesim::Placement(caches, universe, per_cache, std::move(rows));
}

} // namespace testsupport
