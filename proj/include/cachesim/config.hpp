#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/dynamic_bitset.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "cachesim/rng.hpp"

namespace cachesim {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// One problem instance: K caches, a library of N equally popular files, M
// files of storage per cache, and files split into delta equal subfiles
// (delta = 1 means whole-file caching). The storage fraction M/N is kept as
// an exact rational and converted to floating point only at use sites.
struct CacheNetworkConfig {
    std::uint32_t num_caches = 1;        // K
    std::uint32_t library_size = 1;      // N
    std::uint32_t cache_capacity = 0;    // M
    std::uint32_t subfiles_per_file = 1; // delta

    CacheNetworkConfig(std::uint32_t caches, std::uint32_t files,
                       std::uint32_t capacity, std::uint32_t subfiles = 1)
        : num_caches(caches),
          library_size(files),
          cache_capacity(capacity),
          subfiles_per_file(subfiles) {
        if (num_caches < 1) throw std::invalid_argument("config: need at least one cache");
        if (library_size < 1) throw std::invalid_argument("config: need at least one file");
        if (cache_capacity > library_size)
            throw std::invalid_argument("config: cache capacity exceeds library size");
        if (subfiles_per_file < 1)
            throw std::invalid_argument("config: need at least one subfile per file");
    }

    Rational storage_fraction() const { return Rational(cache_capacity, library_size); }
    double storage_fraction_real() const { return static_cast<double>(storage_fraction()); }

    std::uint64_t item_count() const {
        return std::uint64_t(library_size) * subfiles_per_file;
    }
    std::uint64_t items_per_cache() const {
        return std::uint64_t(cache_capacity) * subfiles_per_file;
    }
    std::uint64_t vertex_count() const {
        return std::uint64_t(num_caches) * subfiles_per_file;
    }
};

// The file index requested by each cache in one delivery round.
struct DemandVector {
    std::vector<std::uint32_t> files; // length K, entries in [0, N)
};

inline DemandVector draw_demands(const CacheNetworkConfig& cfg, const RngSpec& rng) {
    RandomEngine eng = rng.engine();
    DemandVector d;
    d.files.resize(cfg.num_caches);
    for (auto& f : d.files)
        f = static_cast<std::uint32_t>(eng.uniform_below(cfg.library_size));
    return d;
}

// Number of distinct files requested.
inline std::uint32_t distinct_count(const DemandVector& d) {
    std::vector<std::uint32_t> sorted = d.files;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return static_cast<std::uint32_t>(sorted.size());
}

// Per-cache stored item sets. An item is a file when delta = 1 and a subfile
// otherwise, indexed as file * delta + subfile.
class Placement {
public:
    Placement(std::uint32_t num_caches, std::uint64_t item_universe,
              std::uint64_t items_per_cache,
              std::vector<boost::dynamic_bitset<>> stored)
        : num_caches_(num_caches),
          item_universe_(item_universe),
          items_per_cache_(items_per_cache),
          stored_(std::move(stored)) {
        if (stored_.size() != num_caches_)
            throw std::invalid_argument("placement: cache count mismatch");
        for (const auto& s : stored_) {
            if (s.size() != item_universe_ || s.count() != items_per_cache_)
                throw std::invalid_argument("placement: stored set has wrong size");
        }
    }

    std::uint32_t num_caches() const { return num_caches_; }
    std::uint64_t item_universe_size() const { return item_universe_; }
    std::uint64_t per_cache_capacity() const { return items_per_cache_; }

    bool contains(std::uint32_t cache, std::uint64_t item) const {
        return stored_[cache].test(item);
    }
    const boost::dynamic_bitset<>& items(std::uint32_t cache) const {
        return stored_[cache];
    }
    std::vector<std::uint64_t> item_list(std::uint32_t cache) const {
        std::vector<std::uint64_t> out;
        const auto& bits = stored_[cache];
        for (auto i = bits.find_first(); i != boost::dynamic_bitset<>::npos;
             i = bits.find_next(i))
            out.push_back(i);
        return out;
    }

private:
    std::uint32_t num_caches_;
    std::uint64_t item_universe_;
    std::uint64_t items_per_cache_;
    std::vector<boost::dynamic_bitset<>> stored_;
};

// Each cache independently stores a uniformly random fixed-size subset of the
// item library. Sampling is a partial Fisher-Yates shuffle, so every
// (M*delta)-subset is exactly equally likely; swaps are undone afterwards so
// the identity array is shared across caches.
inline Placement place(const CacheNetworkConfig& cfg, const RngSpec& rng) {
    const std::uint64_t universe = cfg.item_count();
    const std::uint64_t take = cfg.items_per_cache();
    RandomEngine eng = rng.engine();

    std::vector<std::uint64_t> pool(universe);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<std::uint64_t> swapped_with(take);

    std::vector<boost::dynamic_bitset<>> stored;
    stored.reserve(cfg.num_caches);
    for (std::uint32_t k = 0; k < cfg.num_caches; ++k) {
        boost::dynamic_bitset<> bits(universe);
        for (std::uint64_t i = 0; i < take; ++i) {
            const std::uint64_t j = i + eng.uniform_below(universe - i);
            std::swap(pool[i], pool[j]);
            swapped_with[i] = j;
            bits.set(pool[i]);
        }
        for (std::uint64_t i = take; i-- > 0;)
            std::swap(pool[i], pool[swapped_with[i]]);
        stored.push_back(std::move(bits));
    }
    return Placement(cfg.num_caches, universe, take, std::move(stored));
}

} // namespace cachesim
