#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cachesim/config.hpp"

namespace cachesim {

// ---------------------------------------------------------------------------
// Matching delivery, expected message count.
// ---------------------------------------------------------------------------

// Closed-form approximation to the expected number of messages produced by
// online matching on the independent-edge graph model:
//   (1/2) [ K(1-q) - log(2 - (1-q^2)^{K(1-q)}) / log(1-q^2) ].
// Evaluated through log1p/expm1 so the nearly-cancelling terms stay accurate;
// below q = 1e-4 the 0/0 ratio is replaced by its series expansion.
inline double rate_cfcm_analytic(std::uint32_t num_caches, const Rational& q) {
    if (q < 0 || q > 1) throw std::invalid_argument("rate_cfcm_analytic: q outside [0,1]");
    const double qd = static_cast<double>(q);
    if (qd >= 1.0 - 1e-12) return 0.0;

    const double a = num_caches * (1.0 - qd);
    const double log_edge_miss = std::log1p(-qd * qd); // log(1 - q^2)
    if (qd < 1e-4) return a + 0.5 * a * a * log_edge_miss;

    const double one_minus_pow = -std::expm1(a * log_edge_miss); // 1 - (1-q^2)^a
    const double numer = std::log1p(one_minus_pow);              // log(2 - (1-q^2)^a)
    return 0.5 * (a - numer / log_edge_miss);
}

// ---------------------------------------------------------------------------
// Clique-cover delivery, ODE model.
// ---------------------------------------------------------------------------

// The drift of the normalized clique counts z_i uses the survival products
//   g_i = prod_{j=i}^{K} (1 - q^{2j})^{K z_j},
// the probability that no existing clique of size >= i can absorb an arriving
// vertex. Two conventions for the size-(i-1) inflow term are selectable: the
// balanced birth/death form
//   dz_i/dx = (1-q) [2 g_i - g_{i+1} - g_{i-1}]
// (an arrival joins a size-(i-1) clique with probability g_i - g_{i-1} and
// leaves size i with probability g_{i+1} - g_i), and an alternative with
// "+ g_{i-1}". Only the balanced form conserves covered-vertex mass; the
// acceptance suite checks both against simulation and the balanced form is
// the default.
enum class CliqueOdeVariant { balanced_inflow, additive_inflow };

struct OdeSolution {
    Rational q;
    std::uint32_t num_caches = 0;           // K
    std::vector<double> z;                   // z[i-1] = z_i(1; q)
    std::vector<std::pair<double, std::vector<double>>> trajectory; // sampled z(x)
    double step_size = 0.0;
    std::uint32_t i_max_effective = 0;       // largest i with z_i(1) > tol

    double sum_z() const {
        double s = 0.0;
        for (double v : z) s += v;
        return s;
    }
    // Expected number of delivery messages, K * sum_i z_i(1).
    double clique_count() const { return num_caches * sum_z(); }
    // Fraction of vertices inside cliques, sum_i i * z_i; bounded by 1 - q.
    double covered_mass() const {
        double s = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) s += double(i + 1) * z[i];
        return s;
    }
};

// Fixed-step classical Runge-Kutta integration of the K-dimensional clique
// growth system over x in [0, 1], from z(0) = 0. Boundary conventions:
// g_{K+1} = 1 (empty product) and g_0 = 0. Default step is 1/(50K).
inline OdeSolution solve_clique_cover_ode(
    std::uint32_t num_caches, const Rational& q, double step = 0.0,
    double tol = 1e-12, CliqueOdeVariant variant = CliqueOdeVariant::balanced_inflow) {
    if (num_caches < 1) throw std::invalid_argument("ode: need at least one cache");
    if (q < 0 || q >= 1) throw std::invalid_argument("ode: q outside [0,1)");
    const double qd = static_cast<double>(q);
    const std::uint32_t K = num_caches;
    if (step <= 0.0) step = 1.0 / (50.0 * K);
    const auto steps =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(1.0 / step)));
    const double h = 1.0 / static_cast<double>(steps);

    // log(1 - q^{2i}) for i = 1..K; constant throughout the integration.
    std::vector<double> log_miss(K + 1, 0.0);
    {
        const double q2 = qd * qd;
        double q_pow = 1.0;
        for (std::uint32_t i = 1; i <= K; ++i) {
            q_pow *= q2;
            log_miss[i] = std::log1p(-q_pow);
        }
    }

    const double sign = variant == CliqueOdeVariant::balanced_inflow ? -1.0 : 1.0;
    const double unlooped = 1.0 - qd;
    std::vector<double> g(K + 2, 0.0);

    auto drift = [&](const std::vector<double>& state, std::vector<double>& out) {
        // Suffix products in log space: one O(K) sweep per evaluation.
        g[K + 1] = 1.0;
        double log_g = 0.0;
        for (std::uint32_t i = K; i >= 1; --i) {
            log_g += K * state[i - 1] * log_miss[i];
            g[i] = std::exp(log_g);
        }
        g[0] = 0.0;
        for (std::uint32_t i = 1; i <= K; ++i)
            out[i - 1] = unlooped * (2.0 * g[i] - g[i + 1] + sign * g[i - 1]);
    };

    std::vector<double> z(K, 0.0), tmp(K), k1(K), k2(K), k3(K), k4(K);
    OdeSolution sol;
    sol.q = q;
    sol.num_caches = K;
    sol.step_size = h;
    const std::uint64_t sample_every = std::max<std::uint64_t>(1, steps / 100);
    sol.trajectory.emplace_back(0.0, z);

    for (std::uint64_t n = 0; n < steps; ++n) {
        drift(z, k1);
        for (std::uint32_t i = 0; i < K; ++i) tmp[i] = z[i] + 0.5 * h * k1[i];
        drift(tmp, k2);
        for (std::uint32_t i = 0; i < K; ++i) tmp[i] = z[i] + 0.5 * h * k2[i];
        drift(tmp, k3);
        for (std::uint32_t i = 0; i < K; ++i) tmp[i] = z[i] + h * k3[i];
        drift(tmp, k4);
        for (std::uint32_t i = 0; i < K; ++i) {
            z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(z[i]))
                throw std::runtime_error("ode: non-finite state, step size too large");
        }
        if ((n + 1) % sample_every == 0 || n + 1 == steps)
            sol.trajectory.emplace_back(double(n + 1) * h, z);
    }

    sol.z = std::move(z);
    for (std::uint32_t i = K; i >= 1; --i) {
        if (sol.z[i - 1] > tol) {
            sol.i_max_effective = i;
            break;
        }
    }
    return sol;
}

// Expected delivery rate of clique-cover delivery on the independent-edge
// model: K * sum_i z_i(1; q).
inline double rate_cfcc_analytic(
    std::uint32_t num_caches, const Rational& q, double step = 0.0,
    CliqueOdeVariant variant = CliqueOdeVariant::balanced_inflow) {
    if (q < 0 || q > 1) throw std::invalid_argument("rate_cfcc_analytic: q outside [0,1]");
    if (static_cast<double>(q) >= 1.0 - 1e-12) return 0.0;
    return solve_clique_cover_ode(num_caches, q, step, 1e-12, variant).clique_count();
}

// Subfile-caching approximation: treat the K*delta subfile vertices as files
// and rescale, R(K, q, delta) ~= R_cc(K * delta, q) / delta. Only trustworthy
// for delta much smaller than K; can be far off outside that regime.
inline double rate_cscc_approx(std::uint32_t num_caches, const Rational& q,
                               std::uint32_t delta,
                               CliqueOdeVariant variant = CliqueOdeVariant::balanced_inflow) {
    if (delta < 1) throw std::invalid_argument("rate_cscc_approx: delta must be >= 1");
    return rate_cfcc_analytic(num_caches * delta, q, 0.0, variant) / delta;
}

// ---------------------------------------------------------------------------
// Exact combinatorics for the baselines.
// ---------------------------------------------------------------------------

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

// Number of surjections from a K-set onto an m-set, S{K,m} * m!, by
// inclusion-exclusion: sum_j (-1)^j C(m,j) (m-j)^K.
inline BigInt surjection_count(std::uint32_t k_objects, std::uint32_t m_targets) {
    if (m_targets < 1) throw std::invalid_argument("surjection_count: need m >= 1");
    if (m_targets > k_objects) return 0;
    BigInt total = 0;
    for (std::uint32_t j = 0; j <= m_targets; ++j) {
        const BigInt term =
            binomial(m_targets, j) *
            boost::multiprecision::pow(BigInt(m_targets - j), k_objects);
        total += (j % 2 == 0) ? term : -term;
    }
    return total;
}

// P(exactly m distinct files among K uniform requests from N files), exact:
// C(N,m) * surjections(K,m) / N^K. Out-of-range m has probability zero.
inline Rational prob_distinct(std::uint32_t num_caches, std::uint32_t library_size,
                              std::uint32_t m) {
    if (m < 1 || m > num_caches || m > library_size) return Rational(0);
    const BigInt numer = binomial(library_size, m) * surjection_count(num_caches, m);
    const BigInt denom = boost::multiprecision::pow(BigInt(library_size), num_caches);
    return Rational(numer, denom);
}

// ---------------------------------------------------------------------------
// Baseline expected rates.
// ---------------------------------------------------------------------------

// Uncoded delivery serves each distinct request separately, each costing the
// uncached fraction: E[N_e(d)] (1 - M/N) = N (1 - (1-1/N)^K)(1 - M/N).
inline double rate_uncoded_analytic(std::uint32_t num_caches, std::uint32_t library_size,
                                    std::uint32_t cache_capacity) {
    if (cache_capacity > library_size)
        throw std::invalid_argument("rate_uncoded_analytic: M > N");
    const double n = library_size;
    const double miss = 1.0 - double(cache_capacity) / n;
    return n * (1.0 - std::pow((n - 1.0) / n, double(num_caches))) * miss;
}

// Same quantity as an exact rational: (N - M) (N^K - (N-1)^K) / N^K.
inline Rational rate_uncoded_exact(std::uint32_t num_caches, std::uint32_t library_size,
                                   std::uint32_t cache_capacity) {
    if (cache_capacity > library_size)
        throw std::invalid_argument("rate_uncoded_exact: M > N");
    const BigInt nk = boost::multiprecision::pow(BigInt(library_size), num_caches);
    const BigInt nk1 = boost::multiprecision::pow(BigInt(library_size - 1), num_caches);
    return Rational(BigInt(library_size - cache_capacity) * (nk - nk1), nk);
}

// Reference expected rate of the optimal decentralized subfile scheme:
//   (N-M)/M * [1 - sum_m P(N_e = m) (1 - M/N)^m],
// exact in rational arithmetic. Undefined at M = 0.
inline Rational rate_csc_opt_exact(std::uint32_t num_caches, std::uint32_t library_size,
                                   std::uint32_t cache_capacity) {
    if (cache_capacity < 1)
        throw std::invalid_argument("rate_csc_opt_exact: undefined at M = 0");
    if (cache_capacity > library_size)
        throw std::invalid_argument("rate_csc_opt_exact: M > N");
    const Rational miss(library_size - cache_capacity, library_size); // 1 - M/N
    Rational weighted(0);
    Rational miss_pow(1);
    const std::uint32_t m_max = std::min(num_caches, library_size);
    for (std::uint32_t m = 1; m <= m_max; ++m) {
        miss_pow *= miss;
        weighted += prob_distinct(num_caches, library_size, m) * miss_pow;
    }
    return Rational(library_size - cache_capacity, cache_capacity) * (1 - weighted);
}

namespace detail {

// log(sum of exp) free evaluation of the optimal-subfile rate for instances
// whose exact-rational form would exceed the big-integer budget. Stirling
// numbers come from the additive recurrence evaluated in log space.
inline double rate_csc_opt_logspace(std::uint32_t num_caches, std::uint32_t library_size,
                                    std::uint32_t cache_capacity) {
    const std::uint32_t K = num_caches;
    const double n = library_size;
    const double log_miss = std::log1p(-double(cache_capacity) / n);
    const std::uint32_t m_max = std::min(num_caches, library_size);

    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    auto log_add = [](double a, double b) {
        if (a == neg_inf) return b;
        if (b == neg_inf) return a;
        const double hi = std::max(a, b), lo = std::min(a, b);
        return hi + std::log1p(std::exp(lo - hi));
    };

    // log S{row, m} for the current row of the Stirling triangle.
    std::vector<double> log_stirling(m_max + 1, neg_inf);
    log_stirling[1] = 0.0;
    for (std::uint32_t row = 2; row <= K; ++row) {
        for (std::uint32_t m = std::min(row, m_max); m >= 2; --m)
            log_stirling[m] = log_add(std::log(double(m)) + log_stirling[m],
                                      log_stirling[m - 1]);
        // S{row, 1} stays 1.
    }

    double total = 0.0; // sum_m P(m) (1 - M/N)^m
    for (std::uint32_t m = 1; m <= m_max; ++m) {
        const double log_binom = std::lgamma(n + 1) - std::lgamma(double(m) + 1) -
                                 std::lgamma(n - double(m) + 1);
        const double log_surj = log_stirling[m] + std::lgamma(double(m) + 1);
        const double log_p = log_binom + log_surj - K * std::log(n);
        total += std::exp(log_p + m * log_miss);
    }
    return (n - cache_capacity) / cache_capacity * (1.0 - total);
}

} // namespace detail

// Float front-end: exact rationals while K*log2(N) stays within the given
// bit budget, log-space evaluation beyond it.
inline double rate_csc_opt_analytic(std::uint32_t num_caches, std::uint32_t library_size,
                                    std::uint32_t cache_capacity,
                                    double bigint_bit_budget = 1e5) {
    if (cache_capacity < 1)
        throw std::invalid_argument("rate_csc_opt_analytic: undefined at M = 0");
    const double bits = num_caches * std::log2(double(library_size) + 1.0);
    if (bits <= bigint_bit_budget)
        return static_cast<double>(
            rate_csc_opt_exact(num_caches, library_size, cache_capacity));
    return detail::rate_csc_opt_logspace(num_caches, library_size, cache_capacity);
}

// ---------------------------------------------------------------------------
// Gains.
// ---------------------------------------------------------------------------

struct CodingGains {
    double additive;       // (R_uncoded - R_coded) / R_uncoded
    double multiplicative; // R_uncoded / R_coded
};

inline CodingGains coding_gains(double rate_coded, double rate_uncoded) {
    if (!(rate_uncoded > 0.0) || !(rate_coded > 0.0))
        throw std::domain_error("coding_gains: rates must be positive");
    return CodingGains{(rate_uncoded - rate_coded) / rate_uncoded,
                       rate_uncoded / rate_coded};
}

} // namespace cachesim
