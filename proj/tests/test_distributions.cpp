#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "costopt/distributions.hpp"
#include "test_support.hpp"

using namespace costopt;

TEST_CASE("log_density matches direct evaluation", "[distributions]") {
    const density_model g{gaussian{0.0, 36.0}};
    // ln(1/sqrt(72 pi))
    CHECK(g.log_density(0.0) == Catch::Approx(-2.7106980024327277).epsilon(0).margin(1e-12));

    // Independent check: the density integrates to 1 over [-60, 60].
    const double mass = testsupport::integrate(
        [&](double x) { return std::exp(g.log_density(x)); }, -60.0, 60.0, 1e-12);
    CHECK(mass == Catch::Approx(1.0).epsilon(0).margin(1e-9));

    const density_model two_point{tabulated{{0, 1}, {0.5, 0.5}}};
    CHECK(two_point.log_density(1.0) == Catch::Approx(std::log(0.5)).epsilon(0).margin(1e-15));

    const density_model p{poisson{1.0}};
    CHECK(p.log_density(-1.0) == -inf);
    CHECK_THROWS_AS(p.log_density(0.5), input_error);
    CHECK_THROWS_AS(g.log_density(std::nan("")), input_error);
}

TEST_CASE("cdf values", "[distributions]") {
    const density_model g{gaussian{0.0, 1.0}};
    CHECK(g.cdf(1.645) == Catch::Approx(0.9500150944608786).epsilon(0).margin(1e-13));

    const density_model g2{gaussian{3.25, 7.5}};
    CHECK(g2.cdf(3.25) == Catch::Approx(0.5).epsilon(0).margin(1e-15));

    const density_model p{poisson{1.0}};
    CHECK(p.cdf(1.0) == Catch::Approx(2.0 / std::exp(1.0)).epsilon(0).margin(1e-13));
    CHECK(p.cdf(-0.5) == 0.0);
    CHECK(p.cdf(1.5) == Catch::Approx(2.0 / std::exp(1.0)).epsilon(0).margin(1e-13));

    const density_model e{exponential{2.0}};
    CHECK(e.cdf(0.0) == 0.0);
    CHECK(e.cdf(1.0) == Catch::Approx(1.0 - std::exp(-2.0)).epsilon(0).margin(1e-15));
}

TEST_CASE("quantile values", "[distributions]") {
    const density_model g{gaussian{0.0, 1.0}};
    CHECK(g.quantile(0.95) == Catch::Approx(1.6448536269514722).epsilon(0).margin(1e-10));

    const density_model g2{gaussian{-1.75, 4.0}};
    CHECK(g2.quantile(0.5) == Catch::Approx(-1.75).epsilon(0).margin(1e-14));

    const density_model p{poisson{1.0}};
    CHECK(p.quantile(0.7) == 1.0); // cdf(0)=0.3679 < 0.7 <= cdf(1)=0.7358

    CHECK_THROWS_AS(g.quantile(0.0), input_error);
    CHECK_THROWS_AS(g.quantile(1.0), input_error);
    CHECK_THROWS_AS(p.quantile(-0.1), input_error);
}

TEST_CASE("sampling contract", "[distributions]") {
    const density_model g{gaussian{0.0, 1.0}};
    CHECK_THROWS_AS(g.sample(0, 1), input_error);
    CHECK(g.sample(1, 1).size() == 1);

    // CLT bound at 4 sigma for 1e6 draws.
    const auto xs = g.sample(1000000, 20260809);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    CHECK(std::abs(mean) < 4e-3);

    const density_model degenerate{tabulated{{0}, {1.0}}};
    const auto zs = degenerate.sample(5, 7);
    CHECK(zs == std::vector<double>{0, 0, 0, 0, 0});

    // Same seed, same model: bit-identical.
    CHECK(g.sample(1000, 42) == g.sample(1000, 42));
    CHECK(g.sample(1000, 42) != g.sample(1000, 43));
}

TEST_CASE("normalization over the support", "[distributions]") {
    const std::vector<density_model> discrete = {
        density_model{poisson{0.7}}, density_model{poisson{6.3}},
        density_model{bernoulli{0.23}}, density_model{binomial{11, 0.37}},
        density_model{tabulated{{-3, 2, 5, 9}, {0.1, 0.4, 0.25, 0.25}}}};
    for (const auto& m : discrete) {
        double sum = 0.0;
        for (auto a : m.support_atoms(1e-14)) {
            sum += std::exp(m.log_density(static_cast<double>(a)));
        }
        CHECK(sum == Catch::Approx(1.0).epsilon(0).margin(1e-10));
    }

    const density_model g{gaussian{1.3, 2.25}};
    const double gm = testsupport::integrate(
        [&](double x) { return std::exp(g.log_density(x)); }, 1.3 - 12 * 1.5, 1.3 + 12 * 1.5, 1e-12);
    CHECK(gm == Catch::Approx(1.0).epsilon(0).margin(1e-8));

    const density_model e{exponential{0.8}};
    const double em = testsupport::integrate(
        [&](double x) { return std::exp(e.log_density(x)); }, 0.0, 40.0 / 0.8, 1e-12);
    CHECK(em == Catch::Approx(1.0).epsilon(0).margin(1e-8));
}

TEST_CASE("cdf/quantile round trips", "[distributions][property]") {
    testsupport::case_rng rng(101);
    for (int i = 0; i < 200; ++i) {
        const density_model g{gaussian{rng.uniform(-10, 10), rng.log_uniform(0.01, 100)}};
        const double q = rng.uniform(1e-6, 1.0 - 1e-6);
        CHECK(g.cdf(g.quantile(q)) == Catch::Approx(q).epsilon(0).margin(1e-9));

        const density_model e{exponential{rng.log_uniform(0.05, 20)}};
        CHECK(e.cdf(e.quantile(q)) == Catch::Approx(q).epsilon(0).margin(1e-9));

        const density_model p{poisson{rng.log_uniform(0.1, 30)}};
        const double qq = rng.uniform(0.01, 0.99);
        const double xp = p.quantile(qq);
        CHECK(p.cdf(xp) >= qq);                             // smallest atom with cdf >= q
        if (xp > 0.0) CHECK(p.cdf(xp - 1.0) < qq);          // ...so the one below is under

        const double x = std::floor(rng.uniform(0, 3 * 30));
        const double c = p.cdf(x);
        if (c > 0.0 && c < 1.0) CHECK(p.quantile(c) <= x);

        const density_model b{binomial{rng.uniform_int(1, 40), rng.uniform(0.05, 0.95)}};
        const double xb = b.quantile(qq);
        CHECK(b.cdf(xb) >= qq);
        if (xb > 0.0) CHECK(b.cdf(xb - 1.0) < qq);
    }
}

TEST_CASE("cdf is monotone with limits 0 and 1", "[distributions][property]") {
    testsupport::case_rng rng(808);
    const density_model models[] = {
        density_model{gaussian{rng.uniform(-5, 5), rng.log_uniform(0.1, 50)}},
        density_model{exponential{rng.log_uniform(0.1, 10)}},
        density_model{poisson{rng.log_uniform(0.2, 20)}},
        density_model{bernoulli{rng.uniform(0.1, 0.9)}},
        density_model{binomial{rng.uniform_int(1, 30), rng.uniform(0.1, 0.9)}},
        density_model{tabulated{{-7, -1, 0, 4, 11}, {0.1, 0.2, 0.3, 0.25, 0.15}}},
    };
    for (const auto& m : models) {
        INFO(m.name());
        double prev = -1.0;
        for (int i = 0; i <= 200; ++i) {
            const double x = -60.0 + 0.6 * i;
            const double c = m.cdf(x);
            CHECK(c >= prev);
            CHECK(c >= 0.0);
            CHECK(c <= 1.0);
            prev = c;
        }
        CHECK(m.cdf(-1e9) == 0.0);
        CHECK(m.cdf(1e9) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("seeded sampling matches the analytic cdf", "[distributions][sampling]") {
    constexpr std::int64_t n = 100000;
    const struct {
        density_model model;
        bool discrete;
    } cases[] = {
        {density_model{gaussian{2.0, 9.0}}, false},
        {density_model{exponential{1.7}}, false},
        {density_model{poisson{3.2}}, true},
        {density_model{poisson{45.5}}, true}, // spans two sampler chunks
        {density_model{bernoulli{0.31}}, true},
        {density_model{binomial{9, 0.62}}, true},
        {density_model{tabulated{{-2, 0, 1, 7}, {0.2, 0.3, 0.1, 0.4}}}, true},
    };
    std::uint64_t seed = 555;
    for (const auto& c : cases) {
        const auto xs = c.model.sample(n, seed++);
        const auto cdf = [&](double x) { return c.model.cdf(x); };
        const double d = c.discrete ? testsupport::ks_statistic_discrete(xs, cdf)
                                    : testsupport::ks_statistic_continuous(xs, cdf);
        INFO(c.model.name());
        CHECK(d < 0.01);
    }
}

TEST_CASE("parameter validation", "[distributions]") {
    CHECK_THROWS_AS((density_model{gaussian{0.0, 0.0}}), input_error);
    CHECK_THROWS_AS((density_model{gaussian{0.0, -1.0}}), input_error);
    CHECK_THROWS_AS((density_model{poisson{0.0}}), input_error);
    CHECK_THROWS_AS((density_model{bernoulli{1.0}}), input_error);
    CHECK_THROWS_AS((density_model{binomial{0, 0.5}}), input_error);
    CHECK_THROWS_AS((density_model{exponential{-2.0}}), input_error);
    CHECK_THROWS_AS((density_model{tabulated{{0, 1}, {0.5, 0.6}}}), input_error);
    CHECK_THROWS_AS((density_model{tabulated{{0, 0}, {0.5, 0.5}}}), input_error);
    CHECK_THROWS_AS((density_model{tabulated{{0, 1}, {0.5}}}), input_error);

    // Atoms arrive in any order; the model stores them sorted.
    const density_model t{tabulated{{5, -1, 2}, {0.2, 0.5, 0.3}}};
    CHECK(t.cdf(-1.0) == Catch::Approx(0.5));
    CHECK(t.cdf(2.0) == Catch::Approx(0.8));
}

TEST_CASE("base measures", "[distributions]") {
    CHECK(density_model{gaussian{0, 1}}.base() == base_measure::lebesgue_on_reals);
    CHECK(density_model{exponential{1}}.base() == base_measure::lebesgue_on_reals);
    CHECK(density_model{poisson{1}}.base() == base_measure::counting_on_integers);
    CHECK(density_model{bernoulli{0.5}}.base() == base_measure::counting_on_integers);
    CHECK(density_model{binomial{2, 0.5}}.base() == base_measure::counting_on_integers);
    CHECK(density_model{tabulated{{0}, {1.0}}}.base() == base_measure::counting_on_integers);
}
