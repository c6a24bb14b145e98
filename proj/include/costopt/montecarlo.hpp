#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "costopt/testdesign.hpp"

namespace costopt {

struct simulation_report {
    std::int64_t trials;
    double alpha_hat;
    double beta_hat;
    double cost_hat;
    double alpha_ci_halfwidth; // 3-sigma binomial at the empirical rate
    double beta_ci_halfwidth;
    std::uint64_t seed;
};

namespace detail {

inline double ci3_halfwidth(double rate, std::int64_t trials) {
    return 3.0 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

// Ratio of a vector the simulator drew itself; skips the per-coordinate
// type validation that log_likelihood_ratio does for external callers but
// computes the identical arithmetic.
inline double llr_of_own_sample(const hypothesis_pair& pair,
                                const std::optional<llr_reduction>& red,
                                const std::vector<double>& obs) {
    if (red) {
        double sum = 0.0;
        for (double x : obs) sum += x;
        const double stat = red->stat == llr_reduction::statistic::sample_mean
                                ? sum / static_cast<double>(pair.sample_size())
                                : sum;
        return red->slope * stat + red->intercept;
    }
    double acc = 0.0;
    for (double x : obs) acc += pair.p1().log_density(x) - pair.p0().log_density(x);
    return acc;
}

inline bool rejects(const threshold_test& test, double llr, rng_engine& eng) {
    if (llr > test.llr_threshold) return true;
    if (llr < test.llr_threshold) return false;
    const double g = test.boundary_randomization;
    if (g >= 1.0) return true;
    if (g <= 0.0) return false;
    return uniform01(eng) < g;
}

// Runs body(thread_index, first_trial, last_trial) over a partition of the
// trial range. Every trial seeds its own engine, so the partition cannot
// change any result; it only spreads the work.
template <class Body>
void for_each_trial_block(std::int64_t trials, const Body& body) {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min(workers, 8u);
    if (trials < 50000 || workers == 1) {
        body(0u, std::int64_t{0}, trials);
        return;
    }
    const std::int64_t chunk = (trials + workers - 1) / workers;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        const std::int64_t lo = static_cast<std::int64_t>(w) * chunk;
        const std::int64_t hi = std::min(trials, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, w, lo, hi] { body(w, lo, hi); });
    }
    for (auto& t : pool) t.join();
}

inline constexpr unsigned max_workers = 8;

} // namespace detail

// Empirical error rates from `trials` seeded samples of size N under each
// hypothesis. Trial i draws from an engine seeded by substream_seed(seed,
// h, i), h = 0 under H0 and 1 under H1; decisions are tallied as integer
// counts per trial, so the report is a pure function of (inputs, seed) no
// matter how the trials are scheduled across threads.
inline simulation_report estimate_error_rates(const threshold_test& test,
                                              const hypothesis_pair& pair, std::int64_t trials,
                                              std::uint64_t seed,
                                              const cost_model& cost = cost_model{1.0, 1.0}) {
    if (trials < 1000) throw input_error("estimate_error_rates: trials must be >= 1000");
    const auto red = sufficient_reduction(pair);
    const auto n = static_cast<std::size_t>(pair.sample_size());

    std::int64_t reject_count[2] = {0, 0};
    for (int h = 0; h < 2; ++h) {
        const density_model& model = h == 0 ? pair.p0() : pair.p1();
        std::int64_t partial[detail::max_workers] = {};
        detail::for_each_trial_block(trials, [&](unsigned w, std::int64_t lo, std::int64_t hi) {
            std::vector<double> obs(n);
            std::int64_t rejected = 0;
            for (std::int64_t i = lo; i < hi; ++i) {
                rng_engine eng = make_engine(substream_seed(seed, static_cast<std::uint64_t>(h),
                                                            static_cast<std::uint64_t>(i)));
                model.draw_n(eng, obs);
                rejected += detail::rejects(test, detail::llr_of_own_sample(pair, red, obs), eng);
            }
            partial[w] = rejected;
        });
        for (std::int64_t r : partial) reject_count[h] += r;
    }

    const double m = static_cast<double>(trials);
    const double alpha_hat = static_cast<double>(reject_count[0]) / m;
    const double beta_hat = static_cast<double>(trials - reject_count[1]) / m;
    return {trials,
            alpha_hat,
            beta_hat,
            cost.c0 * alpha_hat + cost.c1 * beta_hat,
            detail::ci3_halfwidth(alpha_hat, trials),
            detail::ci3_halfwidth(beta_hat, trials),
            seed};
}

struct policy_comparison {
    threshold_test np_test;
    threshold_test optimal_test;
    simulation_report np;
    simulation_report optimal;
    double cost_difference;         // empirical J(NP) - J(optimal)
    double difference_ci_halfwidth; // 3-sigma, paired over common samples
};

// Runs the fixed-size Neyman-Pearson policy and the cost-optimal policy on
// the same seeded sample streams and reports both empirical costs plus the
// paired difference. Common random numbers keep the difference estimate
// tight enough to resolve the gap at desk-scale trial counts.
inline policy_comparison compare_policies(const hypothesis_pair& pair, const cost_model& cost,
                                          double np_size, std::int64_t trials,
                                          std::uint64_t seed) {
    if (trials < 1000) throw input_error("compare_policies: trials must be >= 1000");
    const threshold_test np_test = neyman_pearson_test(pair, np_size);
    const threshold_test opt_test = cost_optimal_test(pair, cost);
    const auto red = sufficient_reduction(pair);
    const auto n = static_cast<std::size_t>(pair.sample_size());

    // Joint decision counts cell[h][np][opt]; everything below derives from
    // these integers, so accumulation order cannot perturb the results.
    std::int64_t cell[2][2][2] = {};
    for (int h = 0; h < 2; ++h) {
        const density_model& model = h == 0 ? pair.p0() : pair.p1();
        std::int64_t partial[detail::max_workers][2][2] = {};
        detail::for_each_trial_block(trials, [&](unsigned w, std::int64_t lo, std::int64_t hi) {
            std::vector<double> obs(n);
            for (std::int64_t i = lo; i < hi; ++i) {
                rng_engine eng = make_engine(substream_seed(seed, static_cast<std::uint64_t>(h),
                                                            static_cast<std::uint64_t>(i)));
                model.draw_n(eng, obs);
                const double llr = detail::llr_of_own_sample(pair, red, obs);
                const bool np_rejects = detail::rejects(np_test, llr, eng);
                const bool opt_rejects = detail::rejects(opt_test, llr, eng);
                ++partial[w][np_rejects][opt_rejects];
            }
        });
        for (const auto& p : partial) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) cell[h][a][b] += p[a][b];
            }
        }
    }

    const double m = static_cast<double>(trials);
    const auto report = [&](bool optimal_policy) {
        const auto rej = [&](int h) {
            return optimal_policy ? cell[h][0][1] + cell[h][1][1] : cell[h][1][0] + cell[h][1][1];
        };
        const double alpha_hat = static_cast<double>(rej(0)) / m;
        const double beta_hat = static_cast<double>(trials - rej(1)) / m;
        return simulation_report{trials,
                                 alpha_hat,
                                 beta_hat,
                                 cost.c0 * alpha_hat + cost.c1 * beta_hat,
                                 detail::ci3_halfwidth(alpha_hat, trials),
                                 detail::ci3_halfwidth(beta_hat, trials),
                                 seed};
    };
    const simulation_report np_report = report(false);
    const simulation_report opt_report = report(true);

    // Per-trial paired differences take values in {-c, 0, +c}; their
    // variances come straight from the disagreement cells.
    const double p_plus0 = static_cast<double>(cell[0][1][0]) / m;  // np rejects, opt accepts
    const double p_minus0 = static_cast<double>(cell[0][0][1]) / m; // opt rejects, np accepts
    const double mean_d = cost.c0 * (p_plus0 - p_minus0);
    const double var_d = cost.c0 * cost.c0 * (p_plus0 + p_minus0) - mean_d * mean_d;
    const double p_plus1 = static_cast<double>(cell[1][0][1]) / m;
    const double p_minus1 = static_cast<double>(cell[1][1][0]) / m;
    const double mean_e = cost.c1 * (p_plus1 - p_minus1);
    const double var_e = cost.c1 * cost.c1 * (p_plus1 + p_minus1) - mean_e * mean_e;

    return {np_test,
            opt_test,
            np_report,
            opt_report,
            np_report.cost_hat - opt_report.cost_hat,
            3.0 * std::sqrt((var_d + var_e) / m)};
}

} // namespace costopt
