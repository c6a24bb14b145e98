#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "costopt/likelihood.hpp"

namespace costopt {

// Positive costs of the two error types: c0 for rejecting a true H0,
// c1 for rejecting a true H1.
struct cost_model {
    double c0;
    double c1;
    cost_model(double c0_, double c1_) : c0(c0_), c1(c1_) {
        if (!(std::isfinite(c0) && c0 > 0.0) || !(std::isfinite(c1) && c1 > 0.0)) {
            throw input_error("cost_model: costs must be finite and > 0");
        }
    }
    bool operator==(const cost_model&) const = default;
};

// Reject H0 iff ln Lambda > t, and with probability gamma when ln Lambda = t.
// gamma = 1 is the deterministic ">=" test; gamma < 1 only ever arises from
// Neyman-Pearson calibration on counting families.
struct threshold_test {
    double llr_threshold;
    double boundary_randomization;
    threshold_test(double threshold, double gamma = 1.0)
        : llr_threshold(threshold), boundary_randomization(gamma) {
        if (std::isnan(threshold)) throw input_error("threshold_test: threshold is NaN");
        if (!(gamma >= 0.0 && gamma <= 1.0)) {
            throw input_error("threshold_test: boundary randomization must lie in [0,1]");
        }
    }
    bool deterministic() const {
        return boundary_randomization == 0.0 || boundary_randomization == 1.0;
    }
    bool operator==(const threshold_test&) const = default;
};

struct error_rates {
    double alpha; // P0(reject H0)
    double beta;  // P1(accept H0)
    double power() const { return 1.0 - beta; }
};

enum class decision { accept_null, reject_null };

namespace detail {

// One value of the induced ln Lambda distribution with its mass under each
// hypothesis. mass0 = 0 encodes llr = +inf atoms (p0 vanishes, p1 does not).
struct llr_atom {
    double llr;
    double mass0;
    double mass1;
};

// Past this many atoms the exact enumeration stops being a desk-scale
// computation and Monte Carlo is the sane route.
inline constexpr std::int64_t max_enumeration_atoms = 200000;

inline void sort_and_merge(std::vector<llr_atom>& atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const llr_atom& a, const llr_atom& b) { return a.llr < b.llr; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (out > 0 && atoms[out - 1].llr == atoms[i].llr) {
            atoms[out - 1].mass0 += atoms[i].mass0;
            atoms[out - 1].mass1 += atoms[i].mass1;
        } else {
            atoms[out++] = atoms[i];
        }
    }
    atoms.resize(out);
}

// Exact finite distribution of ln Lambda for counting-family pairs:
// through the sufficient statistic when there is one (any N), otherwise by
// direct enumeration of the union support (N = 1 only).
inline std::optional<std::vector<llr_atom>> llr_atoms(const hypothesis_pair& pair) {
    if (!pair.p0().discrete()) return std::nullopt;
    const auto red = sufficient_reduction(pair);
    const std::int64_t n = pair.sample_size();
    std::vector<llr_atom> atoms;

    if (red) {
        // Distribution of the sufficient sum S under each hypothesis.
        std::int64_t s_max = 0;
        std::function<double(std::int64_t)> logpmf0, logpmf1;
        if (const auto* po0 = pair.p0().as<poisson>()) {
            const double r0 = static_cast<double>(n) * po0->rate;
            const double r1 = static_cast<double>(n) * pair.p1().as<poisson>()->rate;
            const density_model sum0{poisson{r0}};
            const density_model sum1{poisson{r1}};
            s_max = std::max(sum0.support_atoms(1e-14).back(), sum1.support_atoms(1e-14).back());
            logpmf0 = [r0](std::int64_t k) { return log_poisson_pmf(r0, k); };
            logpmf1 = [r1](std::int64_t k) { return log_poisson_pmf(r1, k); };
        } else if (const auto* be0 = pair.p0().as<bernoulli>()) {
            const double q0 = be0->p;
            const double q1 = pair.p1().as<bernoulli>()->p;
            s_max = n;
            logpmf0 = [n, q0](std::int64_t k) { return log_binomial_pmf(n, q0, k); };
            logpmf1 = [n, q1](std::int64_t k) { return log_binomial_pmf(n, q1, k); };
        } else if (const auto* bi0 = pair.p0().as<binomial>()) {
            const std::int64_t m = n * bi0->trials;
            const double q0 = bi0->p;
            const double q1 = pair.p1().as<binomial>()->p;
            s_max = m;
            logpmf0 = [m, q0](std::int64_t k) { return log_binomial_pmf(m, q0, k); };
            logpmf1 = [m, q1](std::int64_t k) { return log_binomial_pmf(m, q1, k); };
        } else {
            return std::nullopt;
        }
        if (s_max + 1 > max_enumeration_atoms) return std::nullopt;
        atoms.reserve(static_cast<std::size_t>(s_max + 1));
        for (std::int64_t s = 0; s <= s_max; ++s) {
            atoms.push_back({red->slope * static_cast<double>(s) + red->intercept,
                             std::exp(logpmf0(s)), std::exp(logpmf1(s))});
        }
        sort_and_merge(atoms);
        return atoms;
    }

    if (n != 1) return std::nullopt;
    auto support = pair.p0().support_atoms(1e-14);
    for (std::int64_t a : pair.p1().support_atoms(1e-14)) support.push_back(a);
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (std::ssize(support) > max_enumeration_atoms) return std::nullopt;
    atoms.reserve(support.size());
    for (std::int64_t a : support) {
        const double x = static_cast<double>(a);
        const double l0 = pair.p0().log_density(x);
        const double l1 = pair.p1().log_density(x);
        // Same expression log_likelihood_ratio uses, so ties match exactly.
        atoms.push_back({l1 - l0, std::exp(l0), std::exp(l1)});
    }
    sort_and_merge(atoms);
    return atoms;
}

// Continuous pairs whose ln Lambda is a monotone function of a scalar
// statistic with a closed-form sampling distribution.
struct llr_continuous {
    double slope; // != 0; sign gives the rejection direction in the statistic
    double intercept;
    std::function<double(double)> cdf0;      // statistic cdf under H0
    std::function<double(double)> cdf1;      // statistic cdf under H1
    std::function<double(double)> quantile0; // statistic quantile under H0
};

// P(sum of n iid exponential(rate) <= s), via the Poisson survival identity.
inline double erlang_cdf(std::int64_t n, double rate, double s) {
    if (s <= 0.0) return 0.0;
    const double u = rate * s;
    double term = std::exp(-u);
    kahan_sum acc;
    acc.add(term);
    for (std::int64_t k = 1; k < n; ++k) {
        term *= u / static_cast<double>(k);
        acc.add(term);
    }
    return 1.0 - std::min(acc.value(), 1.0);
}

inline double erlang_quantile(std::int64_t n, double rate, double q) {
    double lo = 0.0;
    double hi = (static_cast<double>(n) + 40.0 * std::sqrt(static_cast<double>(n)) + 40.0) / rate;
    while (erlang_cdf(n, rate, hi) < q) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (erlang_cdf(n, rate, mid) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline std::optional<llr_continuous> llr_continuous_model(const hypothesis_pair& pair) {
    if (pair.p0().discrete()) return std::nullopt;
    const auto red = sufficient_reduction(pair);
    if (!red) return std::nullopt;
    const std::int64_t n = pair.sample_size();
    if (const auto* g0 = pair.p0().as<gaussian>()) {
        const double sd = std::sqrt(g0->variance / static_cast<double>(n));
        const double m0 = g0->mean;
        const double m1 = pair.p1().as<gaussian>()->mean;
        return llr_continuous{
            red->slope, red->intercept,
            [m0, sd](double c) { return normal_cdf((c - m0) / sd); },
            [m1, sd](double c) { return normal_cdf((c - m1) / sd); },
            [m0, sd](double q) { return m0 + sd * normal_quantile(q); }};
    }
    const double r0 = pair.p0().as<exponential>()->rate;
    const double r1 = pair.p1().as<exponential>()->rate;
    if (n > 500) return std::nullopt; // Erlang survival sum degrades past desk scale
    return llr_continuous{red->slope, red->intercept,
                          [n, r0](double c) { return erlang_cdf(n, r0, c); },
                          [n, r1](double c) { return erlang_cdf(n, r1, c); },
                          [n, r0](double q) { return erlang_quantile(n, r0, q); }};
}

inline double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

} // namespace detail

// The deterministic likelihood-ratio test minimizing c0*alpha + c1*beta:
// reject H0 iff ln Lambda >= ln(c0/c1).
inline threshold_test cost_optimal_test(const hypothesis_pair& pair, const cost_model& cost) {
    (void)pair; // the optimal threshold depends only on the cost ratio
    return threshold_test{std::log(cost.c0 / cost.c1), 1.0};
}

// alpha = P0(llr > t) + gamma P0(llr = t), beta = P1(llr < t) + (1-gamma) P1(llr = t).
// Exact enumeration for counting families, closed-form statistic
// distributions for gaussian/exponential pairs; anything else throws
// not_analytic_error so callers fall back to Monte Carlo deliberately.
inline error_rates compute_error_rates(const threshold_test& test, const hypothesis_pair& pair) {
    const double t = test.llr_threshold;
    const double g = test.boundary_randomization;

    if (const auto atoms = detail::llr_atoms(pair)) {
        detail::kahan_sum a_gt, a_eq, b_lt, b_eq;
        for (const auto& atom : *atoms) {
            if (atom.llr > t) {
                a_gt.add(atom.mass0);
            } else if (atom.llr == t) {
                a_eq.add(atom.mass0);
                b_eq.add(atom.mass1);
            } else {
                b_lt.add(atom.mass1);
            }
        }
        return {detail::clamp01(a_gt.value() + g * a_eq.value()),
                detail::clamp01(b_lt.value() + (1.0 - g) * b_eq.value())};
    }

    if (const auto model = detail::llr_continuous_model(pair)) {
        if (t == -inf) return {1.0, 0.0};
        if (t == inf) return {0.0, 1.0};
        const double c = (t - model->intercept) / model->slope;
        if (model->slope > 0.0) {
            return {1.0 - model->cdf0(c), model->cdf1(c)};
        }
        return {model->cdf0(c), 1.0 - model->cdf1(c)};
    }

    throw not_analytic_error("error rates for " + pair.p0().name() + " vs " + pair.p1().name() +
                             " with N=" + std::to_string(pair.sample_size()) +
                             " have no analytic route; use Monte Carlo estimation");
}

inline std::optional<error_rates> try_error_rates(const threshold_test& test,
                                                  const hypothesis_pair& pair) {
    try {
        return compute_error_rates(test, pair);
    } catch (const not_analytic_error&) {
        return std::nullopt;
    }
}

// Likelihood-ratio test of exactly the requested size. Continuous pairs get
// a deterministic threshold; counting pairs get the classical randomized
// boundary: the smallest t with P0(llr > t) <= size, with
// gamma = (size - P0(llr > t)) / P0(llr = t) on the boundary atom.
inline threshold_test neyman_pearson_test(const hypothesis_pair& pair, double size) {
    if (!(size > 0.0 && size < 1.0)) {
        throw input_error("neyman_pearson_test: size must lie in (0,1)");
    }

    if (const auto atoms = detail::llr_atoms(pair)) {
        const std::size_t k = atoms->size();
        std::vector<double> tail_gt(k); // tail_gt[i] = P0(llr > llr_i)
        detail::kahan_sum acc;
        for (std::size_t i = k; i-- > 0;) {
            tail_gt[i] = acc.value();
            acc.add((*atoms)[i].mass0);
        }
        for (std::size_t i = 0; i < k; ++i) {
            if (tail_gt[i] <= size) {
                const double m = (*atoms)[i].mass0;
                const double gamma = m > 0.0 ? detail::clamp01((size - tail_gt[i]) / m) : 0.0;
                return threshold_test{(*atoms)[i].llr, gamma};
            }
        }
        // Unreachable: the topmost atom always has an empty strict tail.
        return threshold_test{(*atoms).back().llr, 0.0};
    }

    if (const auto model = detail::llr_continuous_model(pair)) {
        const double c =
            model->slope > 0.0 ? model->quantile0(1.0 - size) : model->quantile0(size);
        return threshold_test{model->slope * c + model->intercept, 1.0};
    }

    throw not_analytic_error("Neyman-Pearson calibration for " + pair.p0().name() + " vs " +
                             pair.p1().name() + " has no analytic route");
}

// J(test) = c0 * alpha + c1 * beta.
inline double expected_cost(const threshold_test& test, const hypothesis_pair& pair,
                            const cost_model& cost) {
    const error_rates rates = compute_error_rates(test, pair);
    return cost.c0 * rates.alpha + cost.c1 * rates.beta;
}

// Applies the test to one observation vector. The seed only matters when
// ln Lambda hits the boundary exactly and gamma is fractional.
inline decision decide(const threshold_test& test, const hypothesis_pair& pair,
                       std::span<const double> observations, std::uint64_t seed) {
    const double llr = log_likelihood_ratio(pair, observations);
    const double t = test.llr_threshold;
    if (llr > t) return decision::reject_null;
    if (llr < t) return decision::accept_null;
    const double g = test.boundary_randomization;
    if (g >= 1.0) return decision::reject_null;
    if (g <= 0.0) return decision::accept_null;
    rng_engine eng = make_engine(substream_seed(seed, 2));
    return uniform01(eng) < g ? decision::reject_null : decision::accept_null;
}

} // namespace costopt
