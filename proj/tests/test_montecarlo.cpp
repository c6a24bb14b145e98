#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "costopt/montecarlo.hpp"
#include "test_support.hpp"

using namespace costopt;

namespace {

hypothesis_pair mean_shift_pair() {
    return hypothesis_pair{density_model{gaussian{0.0, 36.0}},
                           density_model{gaussian{1.2, 36.0}}, 100};
}

bool identical(const simulation_report& a, const simulation_report& b) {
    return a.trials == b.trials && a.alpha_hat == b.alpha_hat && a.beta_hat == b.beta_hat &&
           a.cost_hat == b.cost_hat && a.alpha_ci_halfwidth == b.alpha_ci_halfwidth &&
           a.beta_ci_halfwidth == b.beta_ci_halfwidth && a.seed == b.seed;
}

} // namespace

TEST_CASE("simulation determinism and degenerate tests", "[montecarlo]") {
    const hypothesis_pair pair{density_model{poisson{1.0}}, density_model{poisson{2.0}}, 2};
    const threshold_test test = cost_optimal_test(pair, {1.0, 1.0});

    const simulation_report a = estimate_error_rates(test, pair, 5000, 17);
    const simulation_report b = estimate_error_rates(test, pair, 5000, 17);
    CHECK(identical(a, b));
    const simulation_report c = estimate_error_rates(test, pair, 5000, 18);
    CHECK_FALSE(identical(a, c));

    CHECK_THROWS_AS(estimate_error_rates(test, pair, 999, 17), input_error);

    const simulation_report always = estimate_error_rates(threshold_test{-inf}, pair, 1000, 3);
    CHECK(always.alpha_hat == 1.0);
    CHECK(always.beta_hat == 0.0);
    const simulation_report never = estimate_error_rates(threshold_test{inf}, pair, 1000, 3);
    CHECK(never.alpha_hat == 0.0);
    CHECK(never.beta_hat == 1.0);

    // Smoke run: small trial counts still report finite confidence bounds.
    const simulation_report smoke = estimate_error_rates(test, pair, 1000, 5, {2.0, 0.5});
    CHECK(std::isfinite(smoke.alpha_ci_halfwidth));
    CHECK(std::isfinite(smoke.beta_ci_halfwidth));
    CHECK(smoke.cost_hat == 2.0 * smoke.alpha_hat + 0.5 * smoke.beta_hat);
}

TEST_CASE("empirical rates track the analytic values", "[montecarlo]") {
    const hypothesis_pair pair = mean_shift_pair();
    const threshold_test test = cost_optimal_test(pair, {1.0, 1.0});
    const error_rates exact = compute_error_rates(test, pair);

    const simulation_report rep = estimate_error_rates(test, pair, 200000, 20260809);
    CHECK(std::abs(rep.alpha_hat - exact.alpha) <= rep.alpha_ci_halfwidth);
    CHECK(std::abs(rep.beta_hat - exact.beta) <= rep.beta_ci_halfwidth);
}

TEST_CASE("confidence intervals cover at the advertised rate", "[montecarlo][property]") {
    // 3-sigma binomial bounds should cover ~99.7% of seeded runs; require
    // at least 99 of 100. The randomized NP test exercises the boundary
    // draw in decide as well.
    const hypothesis_pair pair{density_model{poisson{1.0}}, density_model{poisson{2.0}}, 1};
    const threshold_test np = neyman_pearson_test(pair, 0.5);
    const error_rates exact = compute_error_rates(np, pair);

    int alpha_cover = 0;
    int beta_cover = 0;
    for (std::uint64_t run = 0; run < 100; ++run) {
        const simulation_report rep = estimate_error_rates(np, pair, 2000, 1000 + run);
        alpha_cover += std::abs(rep.alpha_hat - exact.alpha) <= rep.alpha_ci_halfwidth;
        beta_cover += std::abs(rep.beta_hat - exact.beta) <= rep.beta_ci_halfwidth;
    }
    CHECK(alpha_cover >= 99);
    CHECK(beta_cover >= 99);

    const hypothesis_pair gpair = mean_shift_pair();
    const threshold_test gtest = cost_optimal_test(gpair, {std::exp(1.0), 1.0});
    const error_rates gexact = compute_error_rates(gtest, gpair);
    int gcover = 0;
    for (std::uint64_t run = 0; run < 20; ++run) {
        const simulation_report rep = estimate_error_rates(gtest, gpair, 2000, 7000 + run);
        gcover += std::abs(rep.alpha_hat - gexact.alpha) <= rep.alpha_ci_halfwidth &&
                  std::abs(rep.beta_hat - gexact.beta) <= rep.beta_ci_halfwidth;
    }
    CHECK(gcover >= 19);
}

TEST_CASE("policy comparison on common random numbers", "[montecarlo]") {
    const hypothesis_pair pair = mean_shift_pair();

    // Identical policies: calibrating NP at alpha* makes the two tests the
    // same region, so the paired difference is exactly zero.
    const cost_model even{1.0, 1.0};
    const double alpha_star = compute_error_rates(cost_optimal_test(pair, even), pair).alpha;
    const policy_comparison same = compare_policies(pair, even, alpha_star, 20000, 5);
    CHECK(same.cost_difference == 0.0);
    CHECK(same.difference_ci_halfwidth == 0.0);
    CHECK(identical(same.np, same.optimal));

    // The benchmark setting with the largest gap: J differs by ~0.55.
    const cost_model e3{std::exp(3.0), 1.0};
    const policy_comparison cmp = compare_policies(pair, e3, 0.05, 100000, 99);
    CHECK(std::abs(cmp.np.cost_hat - 1.3655168148466548) < 0.02);
    CHECK(std::abs(cmp.optimal.cost_hat - 0.8161869234563076) < 0.02);
    CHECK(cmp.cost_difference > 3.0 * cmp.difference_ci_halfwidth);
    CHECK(cmp.cost_difference == cmp.np.cost_hat - cmp.optimal.cost_hat);

    // Same seed, same reports, bit for bit.
    const policy_comparison again = compare_policies(pair, e3, 0.05, 100000, 99);
    CHECK(identical(again.np, cmp.np));
    CHECK(identical(again.optimal, cmp.optimal));
    CHECK(again.difference_ci_halfwidth == cmp.difference_ci_halfwidth);

    CHECK_THROWS_AS(compare_policies(pair, e3, 0.05, 100, 99), input_error);
}

TEST_CASE("estimates also work without an analytic route", "[montecarlo]") {
    // Unequal-variance gaussians have no closed-form rates; simulation is
    // the documented fallback.
    const hypothesis_pair pair{density_model{gaussian{0.0, 1.0}},
                               density_model{gaussian{1.0, 4.0}}, 3};
    CHECK_THROWS_AS(compute_error_rates(threshold_test{0.0}, pair), not_analytic_error);
    const simulation_report rep = estimate_error_rates(threshold_test{0.0}, pair, 20000, 11);
    CHECK(rep.alpha_hat > 0.0);
    CHECK(rep.alpha_hat < 1.0);
    CHECK(rep.beta_hat > 0.0);
    CHECK(rep.beta_hat < 1.0);
}
