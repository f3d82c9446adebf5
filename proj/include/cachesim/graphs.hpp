#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "cachesim/config.hpp"
#include "cachesim/rng.hpp"

namespace cachesim {

struct VertexMeta {
    std::uint32_t cache;   // k
    std::uint32_t subfile; // delta index within the cache block
};

// Vertices are laid out cache-major: vertex = cache * delta + subfile. With
// that layout "same cache" is an index-range check.
inline VertexMeta vertex_meta(std::uint32_t vertex, std::uint32_t delta) {
    return VertexMeta{vertex / delta, vertex % delta};
}

// Directed side-information graph: vertex v is looped iff its cache already
// stores the item it requests, and there is an edge u -> v iff cache u stores
// the item requested at v. Loops are kept out of the adjacency rows because
// delivery treats looped vertices categorically (they are skipped, not coded).
class SideInfoDigraph {
public:
    SideInfoDigraph(std::uint32_t vertices, std::uint32_t delta,
                    boost::dynamic_bitset<> loops,
                    std::vector<boost::dynamic_bitset<>> out_rows)
        : vertices_(vertices),
          delta_(delta),
          loops_(std::move(loops)),
          out_(std::move(out_rows)) {
        if (loops_.size() != vertices_ || out_.size() != vertices_)
            throw std::invalid_argument("digraph: dimension mismatch");
        for (std::uint32_t v = 0; v < vertices_; ++v) {
            if (out_[v].size() != vertices_)
                throw std::invalid_argument("digraph: row size mismatch");
            if (out_[v].test(v))
                throw std::invalid_argument("digraph: self edge stored in adjacency");
        }
    }

    std::uint32_t vertex_count() const { return vertices_; }
    std::uint32_t delta() const { return delta_; }
    bool loop(std::uint32_t v) const { return loops_.test(v); }
    bool edge(std::uint32_t u, std::uint32_t v) const { return out_[u].test(v); }
    const boost::dynamic_bitset<>& out_neighbors(std::uint32_t u) const { return out_[u]; }
    const boost::dynamic_bitset<>& loops() const { return loops_; }
    VertexMeta meta(std::uint32_t v) const { return vertex_meta(v, delta_); }

private:
    std::uint32_t vertices_;
    std::uint32_t delta_;
    boost::dynamic_bitset<> loops_;
    std::vector<boost::dynamic_bitset<>> out_;
};

// Undirected side-information graph: edge {u, v} iff both directed edges are
// present. Cliques of unlooped vertices are exactly the XOR-codable groups.
class SideInfoGraph {
public:
    SideInfoGraph(std::uint32_t vertices, std::uint32_t delta,
                  boost::dynamic_bitset<> loops,
                  std::vector<boost::dynamic_bitset<>> rows)
        : vertices_(vertices),
          delta_(delta),
          loops_(std::move(loops)),
          adj_(std::move(rows)) {
        if (loops_.size() != vertices_ || adj_.size() != vertices_)
            throw std::invalid_argument("graph: dimension mismatch");
        for (std::uint32_t v = 0; v < vertices_; ++v) {
            if (adj_[v].size() != vertices_)
                throw std::invalid_argument("graph: row size mismatch");
            if (adj_[v].test(v))
                throw std::invalid_argument("graph: self edge stored in adjacency");
        }
    }

    // Convenience factory for fixtures and hand-built instances.
    static SideInfoGraph from_edges(
        std::uint32_t vertices,
        const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
        const std::vector<std::uint32_t>& looped = {}, std::uint32_t delta = 1) {
        boost::dynamic_bitset<> loops(vertices);
        for (auto v : looped) loops.set(v);
        std::vector<boost::dynamic_bitset<>> rows(vertices,
                                                  boost::dynamic_bitset<>(vertices));
        for (auto [u, v] : edges) {
            if (u == v) throw std::invalid_argument("graph: loop passed as edge");
            rows[u].set(v);
            rows[v].set(u);
        }
        return SideInfoGraph(vertices, delta, std::move(loops), std::move(rows));
    }

    std::uint32_t vertex_count() const { return vertices_; }
    std::uint32_t delta() const { return delta_; }
    bool loop(std::uint32_t v) const { return loops_.test(v); }
    bool edge(std::uint32_t u, std::uint32_t v) const { return adj_[u].test(v); }
    const boost::dynamic_bitset<>& neighbors(std::uint32_t u) const { return adj_[u]; }
    const boost::dynamic_bitset<>& loops() const { return loops_; }
    std::uint32_t unlooped_count() const {
        return vertices_ - static_cast<std::uint32_t>(loops_.count());
    }
    VertexMeta meta(std::uint32_t v) const { return vertex_meta(v, delta_); }

    // Debug dump, one line per vertex. Not a stable interchange format.
    void dump(std::ostream& os) const {
        for (std::uint32_t v = 0; v < vertices_; ++v) {
            os << v << " loop:" << (loops_.test(v) ? 1 : 0) << " neighbors:";
            for (auto u = adj_[v].find_first(); u != boost::dynamic_bitset<>::npos;
                 u = adj_[v].find_next(u))
                os << ' ' << u;
            os << '\n';
        }
    }

private:
    std::uint32_t vertices_;
    std::uint32_t delta_;
    boost::dynamic_bitset<> loops_;
    std::vector<boost::dynamic_bitset<>> adj_;
};

// Exact construction from a placement and a demand vector. Vertex (k, s) is
// looped iff subfile s of cache k's demand is stored at cache k; there are
// edges (l, t) -> (k, s) for every t iff that subfile is stored at cache l.
// No edges are drawn between vertices of the same cache.
inline SideInfoDigraph build_digraph(const Placement& p, const DemandVector& d,
                                     const CacheNetworkConfig& cfg) {
    const std::uint32_t delta = cfg.subfiles_per_file;
    const auto vertices = static_cast<std::uint32_t>(cfg.vertex_count());
    if (p.num_caches() != cfg.num_caches || p.item_universe_size() != cfg.item_count() ||
        p.per_cache_capacity() != cfg.items_per_cache() ||
        d.files.size() != cfg.num_caches)
        throw std::invalid_argument("build_digraph: placement/demand/config mismatch");
    for (auto f : d.files)
        if (f >= cfg.library_size)
            throw std::invalid_argument("build_digraph: demand out of range");

    boost::dynamic_bitset<> loops(vertices);
    std::vector<boost::dynamic_bitset<>> out(vertices, boost::dynamic_bitset<>(vertices));

    for (std::uint32_t k = 0; k < cfg.num_caches; ++k) {
        for (std::uint32_t s = 0; s < delta; ++s) {
            const std::uint32_t v = k * delta + s;
            const std::uint64_t item = std::uint64_t(d.files[k]) * delta + s;
            if (p.contains(k, item)) loops.set(v);
            for (std::uint32_t l = 0; l < cfg.num_caches; ++l) {
                if (l == k) continue;
                if (p.contains(l, item)) {
                    for (std::uint32_t t = 0; t < delta; ++t)
                        out[l * delta + t].set(v);
                }
            }
        }
    }
    return SideInfoDigraph(vertices, delta, std::move(loops), std::move(out));
}

// Keep an undirected edge only where both directions exist; loops carry over.
inline SideInfoGraph build_graph(const SideInfoDigraph& dg) {
    const std::uint32_t vertices = dg.vertex_count();
    std::vector<boost::dynamic_bitset<>> in(vertices, boost::dynamic_bitset<>(vertices));
    for (std::uint32_t u = 0; u < vertices; ++u) {
        const auto& row = dg.out_neighbors(u);
        for (auto v = row.find_first(); v != boost::dynamic_bitset<>::npos;
             v = row.find_next(v))
            in[v].set(u);
    }
    std::vector<boost::dynamic_bitset<>> rows;
    rows.reserve(vertices);
    for (std::uint32_t u = 0; u < vertices; ++u) {
        boost::dynamic_bitset<> row = dg.out_neighbors(u);
        row &= in[u];
        rows.push_back(std::move(row));
    }
    return SideInfoGraph(vertices, dg.delta(), dg.loops(), std::move(rows));
}

// Independent-edge model of the exact digraph, valid as K/N -> 0: every
// directed edge and loop present independently with probability q = M/N.
// Only defined for whole-file caching.
inline SideInfoDigraph generate_asymptotic_digraph(const CacheNetworkConfig& cfg,
                                                   const RngSpec& rng) {
    if (cfg.subfiles_per_file != 1)
        throw std::invalid_argument("asymptotic digraph model is defined for delta = 1");
    const std::uint32_t vertices = cfg.num_caches;
    const std::uint64_t num = cfg.cache_capacity;
    const std::uint64_t den = cfg.library_size;
    RandomEngine eng = rng.engine();

    boost::dynamic_bitset<> loops(vertices);
    std::vector<boost::dynamic_bitset<>> out(vertices, boost::dynamic_bitset<>(vertices));
    for (std::uint32_t u = 0; u < vertices; ++u) {
        for (std::uint32_t v = 0; v < vertices; ++v) {
            if (u == v) {
                if (eng.bernoulli_ratio(num, den)) loops.set(u);
            } else if (eng.bernoulli_ratio(num, den)) {
                out[u].set(v);
            }
        }
    }
    return SideInfoDigraph(vertices, 1, std::move(loops), std::move(out));
}

// Independent-edge model of the exact undirected graph: edges Bernoulli(q^2),
// loops Bernoulli(q), all mutually independent. Only defined for delta = 1.
inline SideInfoGraph generate_asymptotic_graph(const CacheNetworkConfig& cfg,
                                               const RngSpec& rng) {
    if (cfg.subfiles_per_file != 1)
        throw std::invalid_argument("asymptotic graph model is defined for delta = 1");
    const std::uint32_t vertices = cfg.num_caches;
    const std::uint64_t num = cfg.cache_capacity;
    const std::uint64_t den = cfg.library_size;
    RandomEngine eng = rng.engine();

    boost::dynamic_bitset<> loops(vertices);
    for (std::uint32_t v = 0; v < vertices; ++v)
        if (eng.bernoulli_ratio(num, den)) loops.set(v);

    std::vector<boost::dynamic_bitset<>> rows(vertices, boost::dynamic_bitset<>(vertices));
    for (std::uint32_t u = 0; u < vertices; ++u) {
        for (std::uint32_t v = u + 1; v < vertices; ++v) {
            if (eng.bernoulli_ratio(num * num, den * den)) {
                rows[u].set(v);
                rows[v].set(u);
            }
        }
    }
    return SideInfoGraph(vertices, 1, std::move(loops), std::move(rows));
}

} // namespace cachesim
