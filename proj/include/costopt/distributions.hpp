#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "costopt/errors.hpp"
#include "costopt/normal.hpp"
#include "costopt/rng.hpp"

namespace costopt {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Reference measure the density is taken against.
enum class base_measure { lebesgue_on_reals, counting_on_integers };

struct gaussian {
    double mean = 0.0;
    double variance = 1.0; // > 0
    bool operator==(const gaussian&) const = default;
};

struct poisson {
    double rate = 1.0; // > 0
    bool operator==(const poisson&) const = default;
};

struct bernoulli {
    double p = 0.5; // in (0,1)
    bool operator==(const bernoulli&) const = default;
};

struct binomial {
    std::int64_t trials = 1; // >= 1
    double p = 0.5;          // in (0,1)
    bool operator==(const binomial&) const = default;
};

struct exponential {
    double rate = 1.0; // > 0
    bool operator==(const exponential&) const = default;
};

// Arbitrary finite distribution on integer atoms; the escape hatch for
// desk-scale experiments that the named families do not cover.
struct tabulated {
    std::vector<std::int64_t> atoms; // distinct; stored sorted ascending
    std::vector<double> masses;      // >= 0, sum to 1 within 1e-12
    bool operator==(const tabulated&) const = default;
};

namespace detail {

inline bool is_integral_value(double x) {
    return std::isfinite(x) && std::floor(x) == x;
}

inline double log_binomial_pmf(std::int64_t n, double p, std::int64_t k) {
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
           kd * std::log(p) + (nd - kd) * std::log1p(-p);
}

inline double log_poisson_pmf(double rate, std::int64_t k) {
    const double kd = static_cast<double>(k);
    return kd * std::log(rate) - rate - std::lgamma(kd + 1.0);
}

// One variate from a counting family, by inversion of the uniform draw.
template <class F>
double draw_discrete(const F& f, rng_engine& eng) {
    if constexpr (std::is_same_v<F, poisson>) {
        // Sequential inversion per rate chunk; chunking keeps
        // exp(-rate) away from underflow and the scan short.
        double remaining = f.rate;
        std::int64_t total = 0;
        while (remaining > 0.0) {
            const double chunk = std::min(remaining, 30.0);
            remaining -= chunk;
            double t = std::exp(-chunk);
            double cum = t;
            const double u = uniform01(eng);
            std::int64_t k = 0;
            while (u > cum && k < 4000) {
                ++k;
                t *= chunk / static_cast<double>(k);
                cum += t;
            }
            total += k;
        }
        return static_cast<double>(total);
    } else if constexpr (std::is_same_v<F, bernoulli>) {
        return uniform01(eng) < f.p ? 1.0 : 0.0;
    } else if constexpr (std::is_same_v<F, binomial>) {
        std::int64_t k = 0;
        for (std::int64_t i = 0; i < f.trials; ++i) {
            k += uniform01(eng) < f.p ? 1 : 0;
        }
        return static_cast<double>(k);
    } else {
        static_assert(std::is_same_v<F, tabulated>);
        const double u = uniform01(eng);
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < f.atoms.size(); ++i) {
            cum += f.masses[i];
            if (u < cum) return static_cast<double>(f.atoms[i]);
        }
        return static_cast<double>(f.atoms.back());
    }
}

// Kahan-compensated accumulator; the discrete cdf/quantile scans and the
// randomized-size arithmetic rely on sub-1e-13 summation error.
struct kahan_sum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

} // namespace detail

// Where an observation sits relative to a model's support.
enum class support_status {
    ok,       // positive density
    outside,  // valid observation type, zero density
    bad_type, // not an observation of this base measure (e.g. 0.5 for a pmf)
};

class density_model {
public:
    using family_type = std::variant<gaussian, poisson, bernoulli, binomial, exponential, tabulated>;

    density_model(gaussian g) : family_(g) { validate(); }
    density_model(poisson p) : family_(p) { validate(); }
    density_model(bernoulli b) : family_(b) { validate(); }
    density_model(binomial b) : family_(b) { validate(); }
    density_model(exponential e) : family_(e) { validate(); }
    density_model(tabulated t) : family_(std::move(t)) { canonicalize_tabulated(); validate(); }

    bool operator==(const density_model&) const = default;

    const family_type& family() const { return family_; }

    template <class F>
    const F* as() const {
        return std::get_if<F>(&family_);
    }

    base_measure base() const {
        if (std::holds_alternative<gaussian>(family_) || std::holds_alternative<exponential>(family_)) {
            return base_measure::lebesgue_on_reals;
        }
        return base_measure::counting_on_integers;
    }

    bool discrete() const { return base() == base_measure::counting_on_integers; }

    std::string name() const {
        return std::visit(
            [](const auto& f) -> std::string {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, gaussian>) {
                    return "gaussian(mean=" + format(f.mean) + ", variance=" + format(f.variance) + ")";
                } else if constexpr (std::is_same_v<T, poisson>) {
                    return "poisson(rate=" + format(f.rate) + ")";
                } else if constexpr (std::is_same_v<T, bernoulli>) {
                    return "bernoulli(p=" + format(f.p) + ")";
                } else if constexpr (std::is_same_v<T, binomial>) {
                    return "binomial(trials=" + std::to_string(f.trials) + ", p=" + format(f.p) + ")";
                } else if constexpr (std::is_same_v<T, exponential>) {
                    return "exponential(rate=" + format(f.rate) + ")";
                } else {
                    return "tabulated(" + std::to_string(f.atoms.size()) + " atoms)";
                }
            },
            family_);
    }

    support_status check_observation(double x) const {
        if (!std::isfinite(x)) return support_status::bad_type;
        switch (base()) {
        case base_measure::lebesgue_on_reals:
            if (const auto* e = as<exponential>(); e && x < 0.0) return support_status::outside;
            return support_status::ok;
        case base_measure::counting_on_integers: {
            if (!detail::is_integral_value(x)) return support_status::bad_type;
            const auto k = static_cast<std::int64_t>(x);
            if (as<poisson>()) {
                return k >= 0 ? support_status::ok : support_status::outside;
            }
            if (as<bernoulli>()) {
                return (k == 0 || k == 1) ? support_status::ok : support_status::outside;
            }
            if (const auto* b = as<binomial>()) {
                return (k >= 0 && k <= b->trials) ? support_status::ok : support_status::outside;
            }
            const auto& t = std::get<tabulated>(family_);
            const auto it = std::lower_bound(t.atoms.begin(), t.atoms.end(), k);
            if (it == t.atoms.end() || *it != k) return support_status::outside;
            return t.masses[static_cast<std::size_t>(it - t.atoms.begin())] > 0.0
                       ? support_status::ok
                       : support_status::outside;
        }
        }
        return support_status::bad_type;
    }

    // ln p(x); -inf where the density vanishes. Observations of the wrong
    // type for the base measure are rejected rather than mapped to -inf.
    double log_density(double x) const {
        if (check_observation(x) == support_status::bad_type) {
            throw input_error("log_density: observation " + format(x) +
                              " is not type-compatible with " + name());
        }
        return std::visit(
            [x](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, gaussian>) {
                    const double d = x - f.mean;
                    return -0.5 * d * d / f.variance -
                           0.5 * std::log(2.0 * std::numbers::pi * f.variance);
                } else if constexpr (std::is_same_v<T, exponential>) {
                    if (x < 0.0) return -inf;
                    return std::log(f.rate) - f.rate * x;
                } else if constexpr (std::is_same_v<T, poisson>) {
                    const auto k = static_cast<std::int64_t>(x);
                    if (k < 0) return -inf;
                    return detail::log_poisson_pmf(f.rate, k);
                } else if constexpr (std::is_same_v<T, bernoulli>) {
                    const auto k = static_cast<std::int64_t>(x);
                    if (k == 1) return std::log(f.p);
                    if (k == 0) return std::log1p(-f.p);
                    return -inf;
                } else if constexpr (std::is_same_v<T, binomial>) {
                    const auto k = static_cast<std::int64_t>(x);
                    if (k < 0 || k > f.trials) return -inf;
                    return detail::log_binomial_pmf(f.trials, f.p, k);
                } else {
                    const auto k = static_cast<std::int64_t>(x);
                    const auto it = std::lower_bound(f.atoms.begin(), f.atoms.end(), k);
                    if (it == f.atoms.end() || *it != k) return -inf;
                    const double m = f.masses[static_cast<std::size_t>(it - f.atoms.begin())];
                    return m > 0.0 ? std::log(m) : -inf;
                }
            },
            family_);
    }

    // P(X <= x). For counting families this is the usual right-continuous
    // step function, defined for any real x.
    double cdf(double x) const {
        if (std::isnan(x)) throw input_error("cdf: observation is NaN");
        return std::visit(
            [x](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, gaussian>) {
                    return normal_cdf((x - f.mean) / std::sqrt(f.variance));
                } else if constexpr (std::is_same_v<T, exponential>) {
                    if (x < 0.0) return 0.0;
                    return -std::expm1(-f.rate * x);
                } else if constexpr (std::is_same_v<T, poisson>) {
                    if (x < 0.0) return 0.0;
                    const auto k = static_cast<std::int64_t>(std::floor(std::min(x, 4.6e18)));
                    detail::kahan_sum acc;
                    for (std::int64_t j = 0; j <= k; ++j) {
                        acc.add(std::exp(detail::log_poisson_pmf(f.rate, j)));
                        if (j > static_cast<std::int64_t>(f.rate) && 1.0 - acc.value() < 1e-18) break;
                    }
                    return std::min(acc.value(), 1.0);
                } else if constexpr (std::is_same_v<T, bernoulli>) {
                    if (x < 0.0) return 0.0;
                    if (x < 1.0) return 1.0 - f.p;
                    return 1.0;
                } else if constexpr (std::is_same_v<T, binomial>) {
                    if (x < 0.0) return 0.0;
                    const auto k = static_cast<std::int64_t>(std::floor(x));
                    if (k >= f.trials) return 1.0;
                    detail::kahan_sum acc;
                    for (std::int64_t j = 0; j <= k; ++j) {
                        acc.add(std::exp(detail::log_binomial_pmf(f.trials, f.p, j)));
                    }
                    return std::min(acc.value(), 1.0);
                } else {
                    detail::kahan_sum acc;
                    for (std::size_t i = 0; i < f.atoms.size(); ++i) {
                        if (static_cast<double>(f.atoms[i]) > x) break;
                        acc.add(f.masses[i]);
                    }
                    return std::min(acc.value(), 1.0);
                }
            },
            family_);
    }

    // Continuous families: the x with cdf(x) = q, to ~1e-14.
    // Counting families: the smallest support point with cdf(x) >= q.
    double quantile(double q) const {
        if (!(q > 0.0 && q < 1.0)) throw input_error("quantile: q must lie in (0,1)");
        return std::visit(
            [q](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, gaussian>) {
                    return f.mean + std::sqrt(f.variance) * normal_quantile(q);
                } else if constexpr (std::is_same_v<T, exponential>) {
                    return -std::log1p(-q) / f.rate;
                } else if constexpr (std::is_same_v<T, poisson>) {
                    detail::kahan_sum acc;
                    const std::int64_t cap =
                        static_cast<std::int64_t>(f.rate + 60.0 * std::sqrt(f.rate) + 80.0);
                    for (std::int64_t k = 0;; ++k) {
                        acc.add(std::exp(detail::log_poisson_pmf(f.rate, k)));
                        if (acc.value() >= q || k >= cap) return static_cast<double>(k);
                    }
                } else if constexpr (std::is_same_v<T, bernoulli>) {
                    return (1.0 - f.p >= q) ? 0.0 : 1.0;
                } else if constexpr (std::is_same_v<T, binomial>) {
                    detail::kahan_sum acc;
                    for (std::int64_t k = 0; k < f.trials; ++k) {
                        acc.add(std::exp(detail::log_binomial_pmf(f.trials, f.p, k)));
                        if (acc.value() >= q) return static_cast<double>(k);
                    }
                    return static_cast<double>(f.trials);
                } else {
                    detail::kahan_sum acc;
                    for (std::size_t i = 0; i + 1 < f.atoms.size(); ++i) {
                        acc.add(f.masses[i]);
                        if (acc.value() >= q) return static_cast<double>(f.atoms[i]);
                    }
                    return static_cast<double>(f.atoms.back());
                }
            },
            family_);
    }

    // One variate, consuming `eng` deterministically. All transforms are
    // implemented here (not via std:: distributions) so that a given seed
    // yields the same stream regardless of standard library.
    double draw(rng_engine& eng) const {
        return std::visit(
            [&eng](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, gaussian>) {
                    // Box-Muller, cosine branch only.
                    const double u1 = uniform_pos(eng);
                    const double u2 = uniform01(eng);
                    return f.mean + std::sqrt(f.variance) * std::sqrt(-2.0 * std::log(u1)) *
                                        std::cos(2.0 * std::numbers::pi * u2);
                } else if constexpr (std::is_same_v<T, exponential>) {
                    return -std::log(uniform_pos(eng)) / f.rate;
                } else {
                    return detail::draw_discrete(f, eng);
                }
            },
            family_);
    }

    // Fills `out` with i.i.d. variates. This is the bulk path the sampler
    // and the simulator share; for gaussians it uses both Box-Muller
    // branches per uniform pair, so its stream differs from repeated
    // draw() calls (each path is individually deterministic).
    void draw_n(rng_engine& eng, std::span<double> out) const {
        std::visit(
            [&eng, out](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, gaussian>) {
                    const double sd = std::sqrt(f.variance);
                    std::size_t i = 0;
                    for (; i + 1 < out.size(); i += 2) {
                        const double r = std::sqrt(-2.0 * std::log(uniform_pos(eng)));
                        const double a = 2.0 * std::numbers::pi * uniform01(eng);
                        out[i] = f.mean + sd * r * std::cos(a);
                        out[i + 1] = f.mean + sd * r * std::sin(a);
                    }
                    if (i < out.size()) {
                        const double r = std::sqrt(-2.0 * std::log(uniform_pos(eng)));
                        const double a = 2.0 * std::numbers::pi * uniform01(eng);
                        out[i] = f.mean + sd * r * std::cos(a);
                    }
                } else if constexpr (std::is_same_v<T, exponential>) {
                    for (auto& x : out) x = -std::log(uniform_pos(eng)) / f.rate;
                } else {
                    for (auto& x : out) x = detail::draw_discrete(f, eng);
                }
            },
            family_);
    }

    // i.i.d. draws; same (model, count, seed) gives a bit-identical vector.
    std::vector<double> sample(std::int64_t count, std::uint64_t seed) const {
        if (count <= 0) throw input_error("sample: count must be positive");
        rng_engine eng = make_engine(mix64(seed));
        std::vector<double> out(static_cast<std::size_t>(count));
        draw_n(eng, out);
        return out;
    }

    // Support atoms of a counting family, covering all but at most `tail`
    // of the mass (all of it for finite families). Ascending order.
    std::vector<std::int64_t> support_atoms(double tail) const {
        if (!discrete()) throw input_error("support_atoms: " + name() + " is not a counting-measure family");
        if (const auto* p = as<poisson>()) {
            std::vector<std::int64_t> atoms;
            detail::kahan_sum acc;
            const std::int64_t cap =
                static_cast<std::int64_t>(p->rate + 60.0 * std::sqrt(p->rate) + 80.0);
            for (std::int64_t k = 0; k <= cap; ++k) {
                atoms.push_back(k);
                acc.add(std::exp(detail::log_poisson_pmf(p->rate, k)));
                if (k > static_cast<std::int64_t>(p->rate) && 1.0 - acc.value() <= tail) break;
            }
            return atoms;
        }
        if (as<bernoulli>()) return {0, 1};
        if (const auto* b = as<binomial>()) {
            std::vector<std::int64_t> atoms(static_cast<std::size_t>(b->trials + 1));
            for (std::size_t i = 0; i < atoms.size(); ++i) atoms[i] = static_cast<std::int64_t>(i);
            return atoms;
        }
        const auto& t = std::get<tabulated>(family_);
        std::vector<std::int64_t> atoms;
        for (std::size_t i = 0; i < t.atoms.size(); ++i) {
            if (t.masses[i] > 0.0) atoms.push_back(t.atoms[i]);
        }
        return atoms;
    }

private:
    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return buf;
    }

    void canonicalize_tabulated() {
        auto& t = std::get<tabulated>(family_);
        if (t.atoms.size() != t.masses.size()) {
            throw input_error("tabulated: atoms and masses must have equal length");
        }
        std::vector<std::size_t> order(t.atoms.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return t.atoms[a] < t.atoms[b]; });
        tabulated sorted;
        sorted.atoms.reserve(order.size());
        sorted.masses.reserve(order.size());
        for (std::size_t i : order) {
            sorted.atoms.push_back(t.atoms[i]);
            sorted.masses.push_back(t.masses[i]);
        }
        t = std::move(sorted);
    }

    void validate() const {
        std::visit(
            [](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, gaussian>) {
                    if (!std::isfinite(f.mean) || !std::isfinite(f.variance) || f.variance <= 0.0) {
                        throw input_error("gaussian: mean must be finite and variance > 0");
                    }
                } else if constexpr (std::is_same_v<T, poisson>) {
                    if (!std::isfinite(f.rate) || f.rate <= 0.0) {
                        throw input_error("poisson: rate must be finite and > 0");
                    }
                } else if constexpr (std::is_same_v<T, bernoulli>) {
                    if (!(f.p > 0.0 && f.p < 1.0)) throw input_error("bernoulli: p must lie in (0,1)");
                } else if constexpr (std::is_same_v<T, binomial>) {
                    if (f.trials < 1) throw input_error("binomial: trials must be >= 1");
                    if (!(f.p > 0.0 && f.p < 1.0)) throw input_error("binomial: p must lie in (0,1)");
                } else if constexpr (std::is_same_v<T, exponential>) {
                    if (!std::isfinite(f.rate) || f.rate <= 0.0) {
                        throw input_error("exponential: rate must be finite and > 0");
                    }
                } else {
                    if (f.atoms.empty()) throw input_error("tabulated: needs at least one atom");
                    double sum = 0.0;
                    for (double m : f.masses) {
                        if (!(m >= 0.0) || !std::isfinite(m)) {
                            throw input_error("tabulated: masses must be finite and >= 0");
                        }
                        sum += m;
                    }
                    if (std::abs(sum - 1.0) > 1e-12) {
                        throw input_error("tabulated: masses must sum to 1 (got " + format(sum) + ")");
                    }
                    for (std::size_t i = 0; i + 1 < f.atoms.size(); ++i) {
                        if (f.atoms[i] == f.atoms[i + 1]) {
                            throw input_error("tabulated: atoms must be distinct");
                        }
                    }
                }
            },
            family_);
    }

    family_type family_;
};

} // namespace costopt
