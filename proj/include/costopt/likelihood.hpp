#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "costopt/distributions.hpp"
#include "costopt/errors.hpp"

namespace costopt {

// The two simple hypotheses plus the i.i.d. sample size N.
class hypothesis_pair {
public:
    hypothesis_pair(density_model p0, density_model p1, std::int64_t sample_size)
        : p0_(std::move(p0)), p1_(std::move(p1)), sample_size_(sample_size) {
        if (p0_.base() != p1_.base()) {
            throw input_error("hypothesis_pair: " + p0_.name() + " and " + p1_.name() +
                              " have different base measures");
        }
        if (p0_ == p1_ || same_finite_distribution(p0_, p1_)) {
            throw input_error("hypothesis_pair: hypotheses must differ in distribution");
        }
        if (sample_size_ < 1) throw input_error("hypothesis_pair: sample size must be >= 1");
    }

    const density_model& p0() const { return p0_; }
    const density_model& p1() const { return p1_; }
    std::int64_t sample_size() const { return sample_size_; }

    bool operator==(const hypothesis_pair&) const = default;

private:
    // Catches cross-family aliases such as binomial(1, p) vs bernoulli(p):
    // equal finite supports with bitwise-equal pmf values.
    static bool same_finite_distribution(const density_model& a, const density_model& b) {
        if (!a.discrete() || !b.discrete() || a.as<poisson>() || b.as<poisson>()) return false;
        const auto sa = a.support_atoms(0.0);
        const auto sb = b.support_atoms(0.0);
        if (sa != sb) return false;
        for (std::int64_t atom : sa) {
            const double x = static_cast<double>(atom);
            if (std::exp(a.log_density(x)) != std::exp(b.log_density(x))) return false;
        }
        return true;
    }

    density_model p0_;
    density_model p1_;
    std::int64_t sample_size_;
};

// Closed-form reduction of the sample log-likelihood ratio to a scalar
// statistic: ln L(x) = slope * stat(x) + intercept, slope != 0.
struct llr_reduction {
    enum class statistic { sample_mean, sample_sum };
    statistic stat;
    double slope;
    double intercept;
};

// Families with a linear sufficient statistic. Calibration, analytic error
// rates and log_likelihood_ratio all evaluate the ratio through this same
// (slope, intercept) so their boundary arithmetic agrees bit for bit.
inline std::optional<llr_reduction> sufficient_reduction(const hypothesis_pair& pair) {
    const double n = static_cast<double>(pair.sample_size());
    if (const auto* g0 = pair.p0().as<gaussian>()) {
        const auto* g1 = pair.p1().as<gaussian>();
        if (g1 && g0->variance == g1->variance) {
            const double delta = g1->mean - g0->mean;
            const double slope = n * delta / g0->variance;
            return llr_reduction{llr_reduction::statistic::sample_mean, slope,
                                 -slope * 0.5 * (g0->mean + g1->mean)};
        }
        return std::nullopt;
    }
    if (const auto* e0 = pair.p0().as<exponential>()) {
        const auto* e1 = pair.p1().as<exponential>();
        if (!e1) return std::nullopt;
        return llr_reduction{llr_reduction::statistic::sample_sum, e0->rate - e1->rate,
                             n * std::log(e1->rate / e0->rate)};
    }
    if (const auto* p0 = pair.p0().as<poisson>()) {
        const auto* p1 = pair.p1().as<poisson>();
        if (!p1) return std::nullopt;
        return llr_reduction{llr_reduction::statistic::sample_sum, std::log(p1->rate / p0->rate),
                             n * (p0->rate - p1->rate)};
    }
    if (const auto* b0 = pair.p0().as<bernoulli>()) {
        const auto* b1 = pair.p1().as<bernoulli>();
        if (!b1) return std::nullopt;
        const double odds = std::log(b1->p / b0->p) - std::log1p(-b1->p) + std::log1p(-b0->p);
        return llr_reduction{llr_reduction::statistic::sample_sum, odds,
                             n * (std::log1p(-b1->p) - std::log1p(-b0->p))};
    }
    if (const auto* b0 = pair.p0().as<binomial>()) {
        const auto* b1 = pair.p1().as<binomial>();
        if (!b1 || b0->trials != b1->trials) return std::nullopt;
        const double odds = std::log(b1->p / b0->p) - std::log1p(-b1->p) + std::log1p(-b0->p);
        return llr_reduction{llr_reduction::statistic::sample_sum, odds,
                             n * static_cast<double>(b0->trials) *
                                 (std::log1p(-b1->p) - std::log1p(-b0->p))};
    }
    return std::nullopt;
}

namespace detail {

// Validates every coordinate and reports whether the vector is possible
// under each hypothesis. Throws on type mismatches; zero-density-under-both
// vectors are rejected as impossible observations.
inline void check_observations(const hypothesis_pair& pair, std::span<const double> obs,
                               bool& zero_under_p0, bool& zero_under_p1) {
    zero_under_p0 = false;
    zero_under_p1 = false;
    for (double x : obs) {
        const support_status s0 = pair.p0().check_observation(x);
        const support_status s1 = pair.p1().check_observation(x);
        if (s0 == support_status::bad_type || s1 == support_status::bad_type) {
            throw input_error("log_likelihood_ratio: observation is not type-compatible with the pair");
        }
        zero_under_p0 |= (s0 == support_status::outside);
        zero_under_p1 |= (s1 == support_status::outside);
        if (zero_under_p0 && zero_under_p1) {
            throw impossible_observation_error(
                "log_likelihood_ratio: observation vector has zero density under both hypotheses");
        }
    }
}

} // namespace detail

// ln Lambda(x) = sum_i [ln p1(x_i) - ln p0(x_i)] for the i.i.d. product
// density; +inf / -inf when exactly one product density vanishes.
inline double log_likelihood_ratio(const hypothesis_pair& pair, std::span<const double> obs) {
    if (std::ssize(obs) != pair.sample_size()) {
        throw input_error("log_likelihood_ratio: expected " + std::to_string(pair.sample_size()) +
                          " observations, got " + std::to_string(obs.size()));
    }
    bool zero0 = false;
    bool zero1 = false;
    detail::check_observations(pair, obs, zero0, zero1);
    if (zero0) return inf;
    if (zero1) return -inf;

    if (const auto red = sufficient_reduction(pair)) {
        double sum = 0.0;
        for (double x : obs) sum += x;
        const double stat = red->stat == llr_reduction::statistic::sample_mean
                                ? sum / static_cast<double>(pair.sample_size())
                                : sum;
        return red->slope * stat + red->intercept;
    }

    double acc = 0.0;
    for (double x : obs) {
        acc += pair.p1().log_density(x) - pair.p0().log_density(x);
    }
    return acc;
}

// Sample-mean cutoff c with {ln Lambda >= t} = {mean >= c}, for the
// equal-variance Gaussian mean shift (m0 < m1).
inline double mean_threshold(const hypothesis_pair& pair, double llr_threshold) {
    const auto* g0 = pair.p0().as<gaussian>();
    const auto* g1 = pair.p1().as<gaussian>();
    if (!g0 || !g1 || g0->variance != g1->variance) {
        throw unsupported_reduction_error(
            "mean_threshold: requires two gaussian models with identical variance");
    }
    if (!(g0->mean < g1->mean)) {
        throw input_error("mean_threshold: requires mean(p0) < mean(p1)");
    }
    const auto red = sufficient_reduction(pair); // slope > 0 since m1 > m0
    return (llr_threshold - red->intercept) / red->slope;
}

} // namespace costopt
