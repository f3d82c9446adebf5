#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "cachesim/config.hpp"
#include "cachesim/graphs.hpp"
#include "cachesim/rng.hpp"

namespace cachesim {

// Output of one delivery round: one message per vertex set. A set of size one
// is an uncoded transmission, larger sets are XORs over the members' demands.
// Rate is counted in file units, so each message costs 1/delta of a file.
struct DeliveryResult {
    std::vector<std::vector<std::uint32_t>> messages; // sorted member lists
    std::uint32_t vertex_count = 0;
    std::uint32_t delta = 1;
    std::vector<std::uint64_t> clique_histogram; // index = message size
    boost::dynamic_bitset<> covered;
    boost::dynamic_bitset<> skipped_looped;

    std::uint64_t message_count() const { return messages.size(); }
    Rational rate_files() const { return Rational(messages.size(), delta); }
    double rate() const { return static_cast<double>(messages.size()) / delta; }
};

namespace detail {

inline DeliveryResult make_result(const SideInfoGraph& g) {
    DeliveryResult res;
    res.vertex_count = g.vertex_count();
    res.delta = g.delta();
    res.clique_histogram.assign(g.vertex_count() + 1, 0);
    res.covered.resize(g.vertex_count());
    res.skipped_looped = g.loops();
    return res;
}

inline void finalize_messages(DeliveryResult& res,
                              std::vector<std::vector<std::uint32_t>>&& messages) {
    res.messages = std::move(messages);
    for (const auto& m : res.messages) {
        ++res.clique_histogram[m.size()];
        for (auto v : m) res.covered.set(v);
    }
}

} // namespace detail

// Greedy clique cover. Vertices arrive in label order; a looped vertex is
// skipped, otherwise the vertex joins one of the largest existing cliques all
// of whose members are adjacent to it (ties broken uniformly at random), or
// opens a new singleton clique when none qualifies. One message per clique.
inline DeliveryResult clique_cover_deliver(const SideInfoGraph& g, const RngSpec& rng) {
    const std::uint32_t vertices = g.vertex_count();
    RandomEngine eng = rng.engine();
    DeliveryResult res = detail::make_result(g);

    struct Clique {
        boost::dynamic_bitset<> mask;
        std::vector<std::uint32_t> members;
    };
    std::vector<Clique> cliques; // in creation order
    // Clique indices bucketed by current size; bucket s lives at by_size[s].
    std::vector<std::vector<std::uint32_t>> by_size(2);
    std::uint32_t largest = 0;
    std::vector<std::uint32_t> suitable;

    for (std::uint32_t v = 0; v < vertices; ++v) {
        if (g.loop(v)) continue;
        const auto& adj = g.neighbors(v);

        bool joined = false;
        for (std::uint32_t size = largest; size >= 1 && !joined; --size) {
            suitable.clear();
            for (auto idx : by_size[size])
                if (cliques[idx].mask.is_subset_of(adj)) suitable.push_back(idx);
            if (suitable.empty()) continue;

            const std::uint32_t pick =
                suitable.size() == 1
                    ? suitable.front()
                    : suitable[eng.uniform_below(suitable.size())];
            auto& bucket = by_size[size];
            bucket.erase(std::find(bucket.begin(), bucket.end(), pick));
            cliques[pick].mask.set(v);
            cliques[pick].members.push_back(v);
            if (by_size.size() <= size + 1) by_size.resize(size + 2);
            by_size[size + 1].push_back(pick);
            largest = std::max(largest, size + 1);
            joined = true;
        }
        if (!joined) {
            Clique c;
            c.mask.resize(vertices);
            c.mask.set(v);
            c.members.push_back(v);
            cliques.push_back(std::move(c));
            by_size[1].push_back(static_cast<std::uint32_t>(cliques.size() - 1));
            largest = std::max<std::uint32_t>(largest, 1);
        }
    }

    std::vector<std::vector<std::uint32_t>> messages;
    messages.reserve(cliques.size());
    for (auto& c : cliques) messages.push_back(std::move(c.members));
    detail::finalize_messages(res, std::move(messages));
    return res;
}

// Online matching. A looped vertex is removed on arrival; an unlooped vertex
// with at least one previously arrived, still unmatched, unlooped neighbor is
// paired with one of them uniformly at random. Whatever remains unmatched at
// the end is sent uncoded.
inline DeliveryResult matching_deliver(const SideInfoGraph& g, const RngSpec& rng) {
    const std::uint32_t vertices = g.vertex_count();
    RandomEngine eng = rng.engine();
    DeliveryResult res = detail::make_result(g);

    boost::dynamic_bitset<> available(vertices); // arrived, unlooped, unmatched
    std::vector<std::vector<std::uint32_t>> messages;

    for (std::uint32_t v = 0; v < vertices; ++v) {
        if (g.loop(v)) continue;
        boost::dynamic_bitset<> candidates = g.neighbors(v);
        candidates &= available;
        const std::uint64_t count = candidates.count();
        if (count == 0) {
            available.set(v);
            continue;
        }
        std::uint64_t skip = count == 1 ? 0 : eng.uniform_below(count);
        auto partner = candidates.find_first();
        while (skip-- > 0) partner = candidates.find_next(partner);
        available.reset(partner);
        messages.push_back({static_cast<std::uint32_t>(partner), v});
    }
    for (auto v = available.find_first(); v != boost::dynamic_bitset<>::npos;
         v = available.find_next(v))
        messages.push_back({static_cast<std::uint32_t>(v)});

    detail::finalize_messages(res, std::move(messages));
    return res;
}

// A delivery is decodable when every member of every message finds the
// demands of all other members in its own cache, and every unlooped vertex is
// served by exactly one message. Returns false on the first violation; throws
// only when the result does not belong to (p, d, cfg) at all.
inline bool verify_decodability(const DeliveryResult& res, const Placement& p,
                                const DemandVector& d, const CacheNetworkConfig& cfg) {
    const std::uint32_t delta = cfg.subfiles_per_file;
    if (res.vertex_count != cfg.vertex_count() || res.delta != delta ||
        p.num_caches() != cfg.num_caches || d.files.size() != cfg.num_caches ||
        p.item_universe_size() != cfg.item_count())
        throw std::invalid_argument("verify_decodability: result/instance mismatch");

    boost::dynamic_bitset<> seen(res.vertex_count);
    for (const auto& message : res.messages) {
        for (auto v : message) {
            if (seen.test(v)) return false; // served twice
            seen.set(v);
            const VertexMeta vm = vertex_meta(v, delta);
            for (auto w : message) {
                if (w == v) continue;
                const VertexMeta wm = vertex_meta(w, delta);
                const std::uint64_t needed =
                    std::uint64_t(d.files[wm.cache]) * delta + wm.subfile;
                if (!p.contains(vm.cache, needed)) return false;
            }
        }
    }
    // Exactly the unlooped vertices are covered.
    for (std::uint32_t v = 0; v < res.vertex_count; ++v) {
        const VertexMeta vm = vertex_meta(v, delta);
        const std::uint64_t own = std::uint64_t(d.files[vm.cache]) * delta + vm.subfile;
        const bool looped = p.contains(vm.cache, own);
        if (looped == seen.test(v)) return false;
    }
    return true;
}

// Fraction of caches' requests served by messages coding three or more
// vertices together, normalized by the number of caches.
inline Rational large_clique_coverage(const DeliveryResult& res) {
    std::uint64_t covered_by_large = 0;
    for (std::size_t s = 3; s < res.clique_histogram.size(); ++s)
        covered_by_large += s * res.clique_histogram[s];
    const std::uint32_t num_caches = res.vertex_count / res.delta;
    return Rational(covered_by_large, num_caches);
}

} // namespace cachesim
