#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "costopt/likelihood.hpp"
#include "costopt/testdesign.hpp"

namespace costopt {

// A hypothesis pair restricted to n atoms: two probability vectors over a
// common finite support. This is the playground where the optimality
// argument can be checked exhaustively.
struct finite_instance {
    std::vector<double> q0;
    std::vector<double> q1;

    finite_instance(std::vector<double> q0_, std::vector<double> q1_)
        : q0(std::move(q0_)), q1(std::move(q1_)) {
        if (q0.size() != q1.size() || q0.empty()) {
            throw input_error("finite_instance: q0 and q1 must be nonempty and equally sized");
        }
        for (const auto* v : {&q0, &q1}) {
            double sum = 0.0;
            for (double m : *v) {
                if (!(m >= 0.0) || !std::isfinite(m)) {
                    throw input_error("finite_instance: masses must be finite and >= 0");
                }
                sum += m;
            }
            if (std::abs(sum - 1.0) > 1e-12) {
                throw input_error("finite_instance: masses must sum to 1");
            }
        }
    }

    std::size_t size() const { return q0.size(); }
};

// A point of the relaxed feasible set: per-atom rejection weights in [0,1].
struct relaxed_allocation {
    std::vector<double> f;

    explicit relaxed_allocation(std::vector<double> f_) : f(std::move(f_)) {
        for (double v : f) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw input_error("relaxed_allocation: entries must lie in [0,1]");
            }
        }
    }

    std::size_t size() const { return f.size(); }
};

struct grid_spec {
    double lo;
    double hi;
    std::int64_t n;
};

// A finite instance together with the coordinate of each atom.
struct discretized_instance {
    finite_instance instance;
    std::vector<double> atoms;
};

// Restricts a scalar N=1 pair to a finite support: pointwise density weights
// on an equally spaced grid for continuous pairs (renormalized), the
// truncated support for counting pairs (grid ignored).
inline discretized_instance discretize(const hypothesis_pair& pair,
                                       std::optional<grid_spec> grid = std::nullopt) {
    if (pair.sample_size() != 1) {
        throw input_error("discretize: requires sample_size 1");
    }

    std::vector<double> atoms;
    if (!pair.p0().discrete()) {
        if (!grid) throw input_error("discretize: continuous pairs need a grid");
        if (!(grid->lo < grid->hi) || grid->n < 2) {
            throw input_error("discretize: grid needs lo < hi and n >= 2");
        }
        for (const auto* model : {&pair.p0(), &pair.p1()}) {
            const double captured = model->cdf(grid->hi) - model->cdf(grid->lo);
            if (captured < 0.99) {
                throw input_error("discretize: grid [" + std::to_string(grid->lo) + ", " +
                                  std::to_string(grid->hi) + "] captures only " +
                                  std::to_string(captured) + " of the mass of " + model->name());
            }
        }
        atoms.resize(static_cast<std::size_t>(grid->n));
        const double step = (grid->hi - grid->lo) / static_cast<double>(grid->n - 1);
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            atoms[i] = grid->lo + step * static_cast<double>(i);
        }
    } else {
        auto support = pair.p0().support_atoms(1e-12);
        for (std::int64_t a : pair.p1().support_atoms(1e-12)) support.push_back(a);
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
        atoms.reserve(support.size());
        for (std::int64_t a : support) atoms.push_back(static_cast<double>(a));
    }

    std::vector<double> q0(atoms.size());
    std::vector<double> q1(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        q0[i] = std::exp(pair.p0().log_density(atoms[i]));
        q1[i] = std::exp(pair.p1().log_density(atoms[i]));
    }
    for (auto* v : {&q0, &q1}) {
        detail::kahan_sum total;
        for (double m : *v) total.add(m);
        for (double& m : *v) m /= total.value();
    }
    return {finite_instance{std::move(q0), std::move(q1)}, std::move(atoms)};
}

// Linear relaxed objective sum_i f_i (c0 q0_i - c1 q1_i); the expected cost
// of the allocation is this value + c1.
inline double relaxed_objective(const finite_instance& inst, const cost_model& cost,
                                const relaxed_allocation& f) {
    if (f.size() != inst.size()) throw input_error("relaxed_objective: length mismatch");
    detail::kahan_sum acc;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        acc.add(f.f[i] * (cost.c0 * inst.q0[i] - cost.c1 * inst.q1[i]));
    }
    return acc.value();
}

struct relaxed_solution {
    relaxed_allocation allocation;
    double value;
};

// Pointwise minimizer of the relaxed problem: f = 1 exactly where the
// integrand c0 q0 - c1 q1 is <= 0 (ties included, matching the ">=" form
// of the optimal critical region).
inline relaxed_solution relaxed_minimum(const finite_instance& inst, const cost_model& cost) {
    std::vector<double> f(inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const double coef = cost.c0 * inst.q0[i] - cost.c1 * inst.q1[i];
        f[i] = coef <= 0.0 ? 1.0 : 0.0;
    }
    relaxed_allocation alloc{std::move(f)};
    const double value = relaxed_objective(inst, cost, alloc);
    return {std::move(alloc), value};
}

struct indicator_solution {
    std::vector<std::size_t> subset; // atom indices of the best critical region
    double value;
};

// Exhaustive minimum over all 2^n indicator tests. This is the independent
// oracle the relaxation is checked against; ties go to the subset the
// relaxed minimizer picks so the two reports line up.
inline indicator_solution brute_force_indicator_minimum(const finite_instance& inst,
                                                        const cost_model& cost) {
    const std::size_t n = inst.size();
    if (n > 22) {
        throw input_error("brute_force_indicator_minimum: " + std::to_string(n) +
                          " atoms exceeds the enumeration guard (22)");
    }
    std::vector<double> coef(n);
    for (std::size_t i = 0; i < n; ++i) {
        coef[i] = cost.c0 * inst.q0[i] - cost.c1 * inst.q1[i];
    }
    const auto subset_value = [&](std::uint32_t mask) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) v += coef[i];
        }
        return v;
    };

    std::uint32_t best_mask = 0;
    double best = 0.0;
    const std::uint32_t limit = static_cast<std::uint32_t>(1ull << n);
    for (std::uint32_t mask = 1; mask < limit; ++mask) {
        const double v = subset_value(mask);
        if (v < best) {
            best = v;
            best_mask = mask;
        }
    }

    std::uint32_t relaxed_mask = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (coef[i] <= 0.0) relaxed_mask |= (1u << i);
    }
    if (subset_value(relaxed_mask) == best) best_mask = relaxed_mask;

    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < n; ++i) {
        if (best_mask & (1u << i)) subset.push_back(i);
    }
    return {std::move(subset), best};
}

// One-sided directional derivative of the linear objective at f_star in the
// direction f - f_star. Nonnegativity over all feasible f certifies that
// f_star is the minimum.
inline double directional_derivative(const finite_instance& inst, const cost_model& cost,
                                     const relaxed_allocation& f_star,
                                     const relaxed_allocation& f) {
    if (f_star.size() != inst.size() || f.size() != inst.size()) {
        throw input_error("directional_derivative: length mismatch");
    }
    detail::kahan_sum acc;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        acc.add((f.f[i] - f_star.f[i]) * (cost.c0 * inst.q0[i] - cost.c1 * inst.q1[i]));
    }
    return acc.value();
}

} // namespace costopt
