#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "cachesim/config.hpp"
#include "cachesim/graphs.hpp"

using namespace cachesim;

namespace {

Placement fixed_placement(std::uint32_t caches, std::uint64_t universe,
                          std::uint64_t per_cache,
                          const std::vector<std::vector<std::uint64_t>>& sets) {
    std::vector<boost::dynamic_bitset<>> rows;
    for (const auto& set : sets) {
        boost::dynamic_bitset<> bits(universe);
        for (auto item : set) bits.set(item);
        rows.push_back(std::move(bits));
    }
    return Placement(caches, universe, per_cache, std::move(rows));
}

} // namespace

TEST_CASE("digraph from a fixed two-cache instance", "[graphs]") {
    const CacheNetworkConfig cfg(2, 2, 1);
    const Placement p = fixed_placement(2, 2, 1, {{0}, {1}});
    const DemandVector d{{1, 0}};

    const SideInfoDigraph dg = build_digraph(p, d, cfg);
    CHECK_FALSE(dg.loop(0)); // cache 0 wants file 1, stores file 0
    CHECK_FALSE(dg.loop(1));
    CHECK(dg.edge(0, 1)); // cache 1's request (file 0) is stored at cache 0
    CHECK(dg.edge(1, 0)); // cache 0's request (file 1) is stored at cache 1

    const SideInfoGraph g = build_graph(dg);
    CHECK(g.edge(0, 1));
    CHECK(g.edge(1, 0));
    CHECK_FALSE(g.loop(0));
    CHECK_FALSE(g.loop(1));
}

TEST_CASE("one-directional edges do not survive symmetrization", "[graphs]") {
    const CacheNetworkConfig cfg(2, 2, 1);
    const Placement p = fixed_placement(2, 2, 1, {{1}, {1}});
    const DemandVector d{{1, 0}};
    // Cache 0 stores file 1 = its own demand -> loop; nobody stores file 0.
    const SideInfoDigraph dg = build_digraph(p, d, cfg);
    CHECK(dg.loop(0));
    CHECK_FALSE(dg.loop(1));
    CHECK(dg.edge(1, 0));
    CHECK_FALSE(dg.edge(0, 1));

    const SideInfoGraph g = build_graph(dg);
    CHECK_FALSE(g.edge(0, 1));
    CHECK(g.loop(0));
}

TEST_CASE("full caches produce the complete looped graph", "[graphs]") {
    const CacheNetworkConfig cfg(4, 3, 3);
    const Placement p = place(cfg, RngSpec{1, 1});
    const DemandVector d = draw_demands(cfg, RngSpec{1, 2});
    const SideInfoDigraph dg = build_digraph(p, d, cfg);
    const SideInfoGraph g = build_graph(dg);
    for (std::uint32_t u = 0; u < 4; ++u) {
        CHECK(dg.loop(u));
        CHECK(g.loop(u));
        for (std::uint32_t v = 0; v < 4; ++v)
            if (u != v) {
                CHECK(dg.edge(u, v));
                CHECK(g.edge(u, v));
            }
    }

    const CacheNetworkConfig zero(4, 3, 0);
    const SideInfoDigraph dg0 =
        build_digraph(place(zero, RngSpec{1, 3}), draw_demands(zero, RngSpec{1, 4}), zero);
    CHECK(dg0.loops().none());
    for (std::uint32_t u = 0; u < 4; ++u) CHECK(dg0.out_neighbors(u).none());
}

TEST_CASE("dimension mismatches are rejected", "[graphs]") {
    const CacheNetworkConfig cfg(3, 4, 1);
    const Placement p = place(cfg, RngSpec{2, 0});
    DemandVector bad{{0, 1}};
    CHECK_THROWS_AS(build_digraph(p, bad, cfg), std::invalid_argument);
    DemandVector out_of_range{{0, 1, 9}};
    CHECK_THROWS_AS(build_digraph(p, out_of_range, cfg), std::invalid_argument);
    const CacheNetworkConfig other(3, 5, 1);
    DemandVector good{{0, 1, 2}};
    CHECK_THROWS_AS(build_digraph(p, good, other), std::invalid_argument);
}

TEST_CASE("subfile graphs have block structure and no intra-cache edges", "[graphs]") {
    const CacheNetworkConfig cfg(4, 6, 2, 3);
    for (std::uint64_t t = 0; t < 20; ++t) {
        const Placement p = place(cfg, RngSpec{33, 2 * t});
        const DemandVector d = draw_demands(cfg, RngSpec{33, 2 * t + 1});
        const SideInfoDigraph dg = build_digraph(p, d, cfg);
        const std::uint32_t delta = cfg.subfiles_per_file;
        for (std::uint32_t l = 0; l < cfg.num_caches; ++l) {
            for (std::uint32_t k = 0; k < cfg.num_caches; ++k) {
                for (std::uint32_t s = 0; s < delta; ++s) {
                    const std::uint32_t target = k * delta + s;
                    if (l == k) {
                        for (std::uint32_t th = 0; th < delta; ++th)
                            if (l * delta + th != target)
                                CHECK_FALSE(dg.edge(l * delta + th, target));
                        continue;
                    }
                    // Either all delta source subfile vertices point at the
                    // target, or none do.
                    const bool first = dg.edge(l * delta, target);
                    for (std::uint32_t th = 1; th < delta; ++th)
                        CHECK(dg.edge(l * delta + th, target) == first);
                }
            }
        }
        const SideInfoGraph g = build_graph(dg);
        for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
            CHECK(g.meta(v).cache == v / delta);
            CHECK(g.meta(v).subfile == v % delta);
            for (std::uint32_t u = 0; u < g.vertex_count(); ++u)
                if (u != v && u / delta == v / delta) CHECK_FALSE(g.edge(u, v));
        }
    }
}

TEST_CASE("asymptotic generators hit their degenerate endpoints", "[graphs]") {
    const CacheNetworkConfig zero(5, 7, 0);
    const SideInfoDigraph dg = generate_asymptotic_digraph(zero, RngSpec{3, 0});
    CHECK(dg.loops().none());
    for (std::uint32_t u = 0; u < 5; ++u) CHECK(dg.out_neighbors(u).none());
    const SideInfoGraph g = generate_asymptotic_graph(zero, RngSpec{3, 1});
    CHECK(g.loops().none());

    const CacheNetworkConfig full(5, 7, 7);
    const SideInfoDigraph dgf = generate_asymptotic_digraph(full, RngSpec{3, 2});
    const SideInfoGraph gf = generate_asymptotic_graph(full, RngSpec{3, 3});
    for (std::uint32_t u = 0; u < 5; ++u) {
        CHECK(dgf.loop(u));
        CHECK(gf.loop(u));
        CHECK(dgf.out_neighbors(u).count() == 4);
        CHECK(gf.neighbors(u).count() == 4);
    }

    const CacheNetworkConfig subfiles(5, 7, 2, 3);
    CHECK_THROWS_AS(generate_asymptotic_digraph(subfiles, RngSpec{3, 4}),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_asymptotic_graph(subfiles, RngSpec{3, 5}),
                    std::invalid_argument);
}

TEST_CASE("asymptotic digraph density matches q", "[graphs]") {
    const CacheNetworkConfig cfg(30, 10, 4); // q = 0.4
    const std::uint64_t samples = 10000;
    std::uint64_t present = 0;
    const std::uint64_t indicators = 30ull * 30ull * samples; // edges and loops
    for (std::uint64_t t = 0; t < samples; ++t) {
        const SideInfoDigraph dg = generate_asymptotic_digraph(cfg, RngSpec{17, t});
        present += dg.loops().count();
        for (std::uint32_t u = 0; u < 30; ++u) present += dg.out_neighbors(u).count();
    }
    const double freq = double(present) / double(indicators);
    const double sigma = std::sqrt(0.4 * 0.6 / double(indicators));
    CHECK(std::abs(freq - 0.4) < 3 * sigma);
}

TEST_CASE("asymptotic graph edge density matches q squared", "[graphs]") {
    const CacheNetworkConfig cfg(30, 2, 1); // q = 0.5
    const std::uint64_t samples = 10000;
    const std::uint64_t pairs_per_graph = 30 * 29 / 2;
    std::uint64_t edges = 0, loops = 0;
    for (std::uint64_t t = 0; t < samples; ++t) {
        const SideInfoGraph g = generate_asymptotic_graph(cfg, RngSpec{18, t});
        loops += g.loops().count();
        for (std::uint32_t u = 0; u < 30; ++u) edges += g.neighbors(u).count();
    }
    edges /= 2;
    const double edge_freq = double(edges) / double(pairs_per_graph * samples);
    const double sigma_e = std::sqrt(0.25 * 0.75 / double(pairs_per_graph * samples));
    CHECK(std::abs(edge_freq - 0.25) < 3 * sigma_e);
    const double loop_freq = double(loops) / double(30 * samples);
    const double sigma_l = std::sqrt(0.25 / double(30 * samples));
    CHECK(std::abs(loop_freq - 0.5) < 3 * sigma_l);
}

TEST_CASE("symmetrized digraph model matches the graph model marginals", "[graphs]") {
    const CacheNetworkConfig cfg(10, 5, 2); // q = 0.4
    const std::uint64_t samples = 20000;
    std::uint64_t edge01 = 0, edges = 0, loops = 0;
    const std::uint64_t pairs_per_graph = 10 * 9 / 2;
    for (std::uint64_t t = 0; t < samples; ++t) {
        const SideInfoGraph g = build_graph(generate_asymptotic_digraph(cfg, RngSpec{19, t}));
        edge01 += g.edge(0, 1);
        loops += g.loops().count();
        for (std::uint32_t u = 0; u < 10; ++u) edges += g.neighbors(u).count();
    }
    edges /= 2;
    const double p_edge = 0.16; // q^2
    const double sigma_pair = std::sqrt(p_edge * (1 - p_edge) / double(samples));
    CHECK(std::abs(double(edge01) / double(samples) - p_edge) < 3 * sigma_pair);
    const double sigma_all =
        std::sqrt(p_edge * (1 - p_edge) / double(samples * pairs_per_graph));
    CHECK(std::abs(double(edges) / double(samples * pairs_per_graph) - p_edge) <
          3 * sigma_all);
    const double sigma_loop = std::sqrt(0.4 * 0.6 / double(samples * 10));
    CHECK(std::abs(double(loops) / double(samples * 10) - 0.4) < 3 * sigma_loop);
}

TEST_CASE("exact graph marginals are q for loops and directed edges", "[graphs]") {
    const CacheNetworkConfig cfg(5, 10, 4); // q = 0.4
    const std::uint64_t samples = 50000;
    std::uint64_t loops = 0, edges = 0;
    for (std::uint64_t t = 0; t < samples; ++t) {
        const RngSpec rng{23, t};
        const SideInfoDigraph dg = build_digraph(
            place(cfg, rng.substream(0)), draw_demands(cfg, rng.substream(1)), cfg);
        loops += dg.loops().count();
        for (std::uint32_t u = 0; u < 5; ++u) edges += dg.out_neighbors(u).count();
    }
    const double sigma_loop = std::sqrt(0.4 * 0.6 / double(samples * 5));
    CHECK(std::abs(double(loops) / double(samples * 5) - 0.4) < 3 * sigma_loop);
    const double sigma_edge = std::sqrt(0.4 * 0.6 / double(samples * 20));
    CHECK(std::abs(double(edges) / double(samples * 20) - 0.4) < 3 * sigma_edge);
}

TEST_CASE("exact joint edge statistics approach the independent model", "[graphs]") {
    // Probability of the triangle {0,1},{0,2},{1,2} in the exact graph versus
    // q^6 under independence, for shrinking K/N at fixed q = 0.4. The N = 10
    // instance is visibly biased upwards; by N = 100 the bias is far below
    // the resolution of the confidence interval.
    const double q6 = std::pow(0.4, 6);
    auto triangle_freq = [&](std::uint32_t n, std::uint64_t trials, std::uint64_t seed) {
        const CacheNetworkConfig cfg(5, n, (n * 2) / 5);
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < trials; ++t) {
            const RngSpec rng{seed, t};
            const SideInfoGraph g = build_graph(build_digraph(
                place(cfg, rng.substream(0)), draw_demands(cfg, rng.substream(1)), cfg));
            hits += g.edge(0, 1) && g.edge(0, 2) && g.edge(1, 2);
        }
        return double(hits) / double(trials);
    };

    const std::uint64_t t10 = 3000000, t100 = 500000, t1000 = 100000;
    const double dev10 = triangle_freq(10, t10, 101) - q6;
    const double dev100 = triangle_freq(100, t100, 102) - q6;
    const double dev1000 = triangle_freq(1000, t1000, 103) - q6;

    const double sigma10 = std::sqrt(q6 * (1 - q6) / double(t10));
    const double sigma100 = std::sqrt(q6 * (1 - q6) / double(t100));
    const double sigma1000 = std::sqrt(q6 * (1 - q6) / double(t1000));

    CHECK(dev10 > 3 * sigma10);                  // dependence visible at K/N = 0.5
    CHECK(std::abs(dev100) < 3 * sigma100);      // gone at K/N = 0.05
    CHECK(std::abs(dev1000) < 3 * sigma1000);    // and at K/N = 0.005
    CHECK(std::abs(dev1000) < std::abs(dev10));  // approach is monotone here
}

TEST_CASE("debug dump lists one vertex per line", "[graphs]") {
    const SideInfoGraph g = SideInfoGraph::from_edges(3, {{0, 1}}, {2});
    std::ostringstream os;
    g.dump(os);
    CHECK(os.str() == "0 loop:0 neighbors: 1\n1 loop:0 neighbors: 0\n2 loop:1 neighbors:\n");
}
