#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cachesim/analytics.hpp"
#include "cachesim/config.hpp"
#include "cachesim/delivery.hpp"
#include "cachesim/graphs.hpp"
#include "cachesim/rng.hpp"

namespace cachesim {

enum class Scheme {
    cfcm,    // file caching, matching delivery
    cfcc,    // file caching, clique-cover delivery
    cscc,    // subfile caching, clique-cover delivery
    uncoded, // per-distinct-request uncoded delivery
    csc_opt, // optimal decentralized subfile reference (analytic only)
    cfcm_ga, // cfcm on the independent-edge graph model
    cfcc_ga, // cfcc on the independent-edge graph model
};

enum class GraphSource { exact, asymptotic };
enum class RateSource { analytic, monte_carlo };

inline Scheme base_scheme(Scheme s) {
    if (s == Scheme::cfcm_ga) return Scheme::cfcm;
    if (s == Scheme::cfcc_ga) return Scheme::cfcc;
    return s;
}

struct ExperimentSpec {
    CacheNetworkConfig cfg;
    Scheme scheme = Scheme::cfcc;
    std::uint64_t trials = 1;
    std::uint64_t master_seed = 0;
    GraphSource graph_source = GraphSource::exact;

    // The *_ga scheme labels force the asymptotic source.
    GraphSource effective_source() const {
        if (scheme == Scheme::cfcm_ga || scheme == Scheme::cfcc_ga)
            return GraphSource::asymptotic;
        return graph_source;
    }

    void validate() const {
        if (trials < 1) throw std::invalid_argument("experiment: need at least one trial");
        if (scheme == Scheme::csc_opt)
            throw std::invalid_argument("experiment: csc-opt is analytic only");
        if (effective_source() == GraphSource::asymptotic) {
            if (cfg.subfiles_per_file != 1)
                throw std::invalid_argument("experiment: asymptotic source needs delta = 1");
            if (base_scheme(scheme) != Scheme::cfcm && base_scheme(scheme) != Scheme::cfcc)
                throw std::invalid_argument(
                    "experiment: asymptotic source only models coded file caching");
        }
    }
};

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t trials = 0;
    std::vector<double> histogram_mean;       // mean message count by size
    double large_clique_coverage_mean = 0.0;  // mean of (covered by size>=3)/K
};

// One per-trial record for the optional raw dump.
struct TrialRecord {
    std::uint64_t trial = 0;
    double rate = 0.0;
    std::uint64_t n_messages = 0;
    std::uint32_t max_clique = 0;
};

namespace detail {

// Substream labels within one trial; placement and demands must not share a
// stream or their draws would be correlated.
enum TrialStream : std::uint64_t {
    stream_placement = 0,
    stream_demands = 1,
    stream_delivery = 2,
    stream_graph = 3,
};

inline unsigned thread_budget(std::uint64_t trials) {
    unsigned threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    if (const char* env = std::getenv("CACHE_SIM_THREADS")) {
        const long parsed = std::atol(env);
        if (parsed >= 1) threads = static_cast<unsigned>(parsed);
    }
    const std::uint64_t chunks = (trials + 63) / 64;
    if (chunks < threads) threads = static_cast<unsigned>(chunks);
    return std::max(1u, threads);
}

// Integer per-trial tallies. Every reduced quantity is an exact integer sum,
// so the aggregate is independent of the thread schedule by construction.
struct Tally {
    std::uint64_t sum_messages = 0;
    std::uint64_t sum_messages_sq = 0;
    std::uint64_t sum_distinct = 0;
    std::uint64_t sum_distinct_sq = 0;
    std::uint64_t sum_large_covered = 0;
    std::vector<std::uint64_t> histogram;

    void merge(const Tally& other) {
        sum_messages += other.sum_messages;
        sum_messages_sq += other.sum_messages_sq;
        sum_distinct += other.sum_distinct;
        sum_distinct_sq += other.sum_distinct_sq;
        sum_large_covered += other.sum_large_covered;
        if (histogram.size() < other.histogram.size())
            histogram.resize(other.histogram.size(), 0);
        for (std::size_t i = 0; i < other.histogram.size(); ++i)
            histogram[i] += other.histogram[i];
    }
};

inline void run_one_trial(const ExperimentSpec& spec, std::uint64_t trial, Tally& tally,
                          std::vector<TrialRecord>* dump) {
    const RngSpec trial_rng{spec.master_seed, trial};
    const Scheme scheme = base_scheme(spec.scheme);

    if (scheme == Scheme::uncoded) {
        const DemandVector d = draw_demands(spec.cfg, trial_rng.substream(stream_demands));
        const std::uint64_t ne = distinct_count(d);
        tally.sum_distinct += ne;
        tally.sum_distinct_sq += ne * ne;
        if (dump) {
            const double miss = 1.0 - spec.cfg.storage_fraction_real();
            (*dump)[trial] = TrialRecord{trial, double(ne) * miss, ne, 1};
        }
        return;
    }

    DeliveryResult res;
    if (spec.effective_source() == GraphSource::asymptotic) {
        const SideInfoGraph g =
            generate_asymptotic_graph(spec.cfg, trial_rng.substream(stream_graph));
        res = scheme == Scheme::cfcm
                  ? matching_deliver(g, trial_rng.substream(stream_delivery))
                  : clique_cover_deliver(g, trial_rng.substream(stream_delivery));
    } else {
        const Placement p = place(spec.cfg, trial_rng.substream(stream_placement));
        const DemandVector d = draw_demands(spec.cfg, trial_rng.substream(stream_demands));
        const SideInfoGraph g = build_graph(build_digraph(p, d, spec.cfg));
        res = scheme == Scheme::cfcm
                  ? matching_deliver(g, trial_rng.substream(stream_delivery))
                  : clique_cover_deliver(g, trial_rng.substream(stream_delivery));
        if (!verify_decodability(res, p, d, spec.cfg))
            throw std::runtime_error("trial " + std::to_string(trial) +
                                     ": delivery failed decodability check");
    }

    const std::uint64_t messages = res.message_count();
    tally.sum_messages += messages;
    tally.sum_messages_sq += messages * messages;
    if (tally.histogram.size() < res.clique_histogram.size())
        tally.histogram.resize(res.clique_histogram.size(), 0);
    std::uint32_t max_clique = 0;
    for (std::size_t s = 0; s < res.clique_histogram.size(); ++s) {
        tally.histogram[s] += res.clique_histogram[s];
        if (res.clique_histogram[s] > 0) max_clique = static_cast<std::uint32_t>(s);
        if (s >= 3) tally.sum_large_covered += s * res.clique_histogram[s];
    }
    if (dump) (*dump)[trial] = TrialRecord{trial, res.rate(), messages, max_clique};
}

} // namespace detail

// Runs all trials of one experiment and aggregates the sample mean and its
// standard error. Trials may execute on several threads (capped by the
// CACHE_SIM_THREADS environment variable); per-trial streams are derived from
// (master_seed, trial) and all tallies are integer sums, so the estimate is
// bit-identical for every schedule. When `dump` is non-null it receives one
// record per trial in trial order.
inline Estimate run_experiment(const ExperimentSpec& spec,
                               std::vector<TrialRecord>* dump = nullptr) {
    spec.validate();
    const std::uint64_t trials = spec.trials;
    if (dump) dump->assign(trials, TrialRecord{});

    const unsigned threads = detail::thread_budget(trials);
    std::vector<detail::Tally> tallies(threads);

    if (threads == 1) {
        for (std::uint64_t t = 0; t < trials; ++t)
            detail::run_one_trial(spec, t, tallies[0], dump);
    } else {
        std::atomic<std::uint64_t> next_chunk{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        const std::uint64_t chunk_size = 64;
        const std::uint64_t chunks = (trials + chunk_size - 1) / chunk_size;

        auto worker = [&](unsigned id) {
            try {
                for (;;) {
                    const std::uint64_t chunk = next_chunk.fetch_add(1);
                    if (chunk >= chunks) return;
                    const std::uint64_t begin = chunk * chunk_size;
                    const std::uint64_t end = std::min(trials, begin + chunk_size);
                    for (std::uint64_t t = begin; t < end; ++t)
                        detail::run_one_trial(spec, t, tallies[id], dump);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned id = 0; id < threads; ++id) pool.emplace_back(worker, id);
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    detail::Tally total;
    for (const auto& t : tallies) total.merge(t);

    Estimate est;
    est.trials = trials;
    const double n = static_cast<double>(trials);
    if (base_scheme(spec.scheme) == Scheme::uncoded) {
        const double miss = 1.0 - spec.cfg.storage_fraction_real();
        const double mean_ne = double(total.sum_distinct) / n;
        est.mean = mean_ne * miss;
        if (trials > 1) {
            const double var_ne =
                (double(total.sum_distinct_sq) - n * mean_ne * mean_ne) / (n - 1.0);
            est.stderr_ = miss * std::sqrt(std::max(0.0, var_ne) / n);
        }
        return est;
    }

    const double delta = spec.cfg.subfiles_per_file;
    const double mean_msgs = double(total.sum_messages) / n;
    est.mean = mean_msgs / delta;
    if (trials > 1) {
        const double var_msgs =
            (double(total.sum_messages_sq) - n * mean_msgs * mean_msgs) / (n - 1.0);
        est.stderr_ = std::sqrt(std::max(0.0, var_msgs) / n) / delta;
    }
    est.histogram_mean.resize(total.histogram.size());
    for (std::size_t s = 0; s < total.histogram.size(); ++s)
        est.histogram_mean[s] = double(total.histogram[s]) / n;
    est.large_clique_coverage_mean =
        double(total.sum_large_covered) / (n * spec.cfg.num_caches);
    return est;
}

// One point of a rate curve: a scheme evaluated at one configuration, either
// by formula or by simulation.
struct RatePoint {
    Scheme scheme = Scheme::cfcc;
    RateSource source = RateSource::analytic;
    std::uint32_t num_caches = 0;
    std::uint32_t library_size = 0;
    std::uint32_t cache_capacity = 0;
    std::uint32_t subfiles_per_file = 1;
    double rate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t trials = 0;
    std::optional<double> large_clique_coverage;
};

enum class SweepAxis { capacity, caches, subfiles };

struct SweepEntry {
    RatePoint point;
    std::string error; // empty on success
};

inline double analytic_rate(Scheme scheme, const CacheNetworkConfig& cfg) {
    const Rational q = cfg.storage_fraction();
    switch (base_scheme(scheme)) {
        case Scheme::cfcm: return rate_cfcm_analytic(cfg.num_caches, q);
        case Scheme::cfcc: return rate_cfcc_analytic(cfg.num_caches, q);
        case Scheme::cscc:
            return rate_cscc_approx(cfg.num_caches, q, cfg.subfiles_per_file);
        case Scheme::uncoded:
            return rate_uncoded_analytic(cfg.num_caches, cfg.library_size,
                                         cfg.cache_capacity);
        case Scheme::csc_opt:
            return rate_csc_opt_analytic(cfg.num_caches, cfg.library_size,
                                         cfg.cache_capacity);
        default: throw std::invalid_argument("analytic_rate: unsupported scheme");
    }
}

// Sweeps one axis of the base experiment. For every value the analytic point
// is emitted first, then the Monte-Carlo point (csc-opt has no simulation).
// A failing point is reported in its entry and the sweep continues. Each
// point draws from its own seed stream, so trials stay independent across
// points.
inline std::vector<SweepEntry> run_sweep(const ExperimentSpec& base, SweepAxis axis,
                                         const std::vector<std::uint32_t>& values) {
    std::vector<SweepEntry> entries;
    for (std::size_t index = 0; index < values.size(); ++index) {
        const std::uint32_t value = values[index];
        CacheNetworkConfig cfg = base.cfg;
        SweepEntry analytic_entry;
        try {
            switch (axis) {
                case SweepAxis::capacity:
                    cfg = CacheNetworkConfig(cfg.num_caches, cfg.library_size, value,
                                             cfg.subfiles_per_file);
                    break;
                case SweepAxis::caches:
                    cfg = CacheNetworkConfig(value, cfg.library_size, cfg.cache_capacity,
                                             cfg.subfiles_per_file);
                    break;
                case SweepAxis::subfiles:
                    cfg = CacheNetworkConfig(cfg.num_caches, cfg.library_size,
                                             cfg.cache_capacity, value);
                    break;
            }
        } catch (const std::exception& e) {
            analytic_entry.point.scheme = base.scheme;
            analytic_entry.error = e.what();
            entries.push_back(analytic_entry);
            continue;
        }

        analytic_entry.point =
            RatePoint{base_scheme(base.scheme), RateSource::analytic,   cfg.num_caches,
                      cfg.library_size,         cfg.cache_capacity,     cfg.subfiles_per_file,
                      0.0,                      0.0,                    0,
                      std::nullopt};
        try {
            analytic_entry.point.rate = analytic_rate(base.scheme, cfg);
        } catch (const std::exception& e) {
            analytic_entry.error = e.what();
        }
        entries.push_back(analytic_entry);

        if (base.scheme == Scheme::csc_opt) continue;

        SweepEntry mc_entry;
        mc_entry.point =
            RatePoint{base_scheme(base.scheme), RateSource::monte_carlo, cfg.num_caches,
                      cfg.library_size,         cfg.cache_capacity,      cfg.subfiles_per_file,
                      0.0,                      0.0,                     base.trials,
                      std::nullopt};
        try {
            ExperimentSpec spec = base;
            spec.cfg = cfg;
            spec.master_seed = RngSpec::mix(base.master_seed, index);
            const Estimate est = run_experiment(spec);
            mc_entry.point.rate = est.mean;
            mc_entry.point.stderr_ = est.stderr_;
            mc_entry.point.trials = est.trials;
            if (base_scheme(base.scheme) != Scheme::uncoded)
                mc_entry.point.large_clique_coverage = est.large_clique_coverage_mean;
        } catch (const std::exception& e) {
            mc_entry.error = e.what();
        }
        entries.push_back(mc_entry);
    }
    return entries;
}

} // namespace cachesim
