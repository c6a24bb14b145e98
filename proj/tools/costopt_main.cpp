// Command-line front end: design cost-optimal likelihood-ratio tests,
// calibrate fixed-size Neyman-Pearson tests, estimate and compare costs by
// seeded simulation, verify the finite-instance relaxation argument, and
// print the benchmark cost-comparison table.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "costopt/costopt.hpp"

namespace {

using namespace costopt;

// All numeric output goes through these two formatters: 6 significant
// digits for humans, 12 for CSV. Identical invocations therefore produce
// byte-identical files.
std::string fmt(double v, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

std::string csv_field(double v) { return fmt(v, 12); }

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open CSV output file " + path);
    out << header << "\n";
    for (const auto& row : rows) out << row << "\n";
}

struct scenario_options {
    std::string path;
    std::optional<double> c0_flag;
    std::optional<double> c1_flag;
    std::optional<double> size_flag;
    std::string emit_path;

    scenario resolve() const {
        scenario s = load_scenario(path);
        if (c0_flag || c1_flag) {
            s.costs = cost_model{c0_flag.value_or(s.costs.c0), c1_flag.value_or(s.costs.c1)};
        }
        if (size_flag) {
            if (!(*size_flag > 0.0 && *size_flag < 1.0)) {
                throw input_error("--size must lie in (0,1)");
            }
            s.np_size = size_flag;
        }
        if (!emit_path.empty()) {
            std::ofstream out(emit_path, std::ios::binary);
            if (!out) throw input_error("cannot open scenario output file " + emit_path);
            out << to_json_string(s);
        }
        return s;
    }
};

void add_scenario_flags(CLI::App* cmd, scenario_options& opts, bool with_size) {
    cmd->add_option("--scenario", opts.path, "scenario JSON file")->required();
    cmd->add_option("--c0", opts.c0_flag, "override cost of a Type I error");
    cmd->add_option("--c1", opts.c1_flag, "override cost of a Type II error");
    if (with_size) {
        cmd->add_option("--size", opts.size_flag, "Neyman-Pearson test size in (0,1)");
    }
    cmd->add_option("--emit-scenario", opts.emit_path, "write the resolved scenario as JSON");
}

void echo_scenario(const scenario& s) {
    std::cout << "p0: " << s.p0.name() << "\n";
    std::cout << "p1: " << s.p1.name() << "\n";
    std::cout << "sample size: " << s.sample_size << "\n";
    std::cout << "costs: c0=" << fmt(s.costs.c0) << " c1=" << fmt(s.costs.c1) << "\n";
}

std::optional<double> gaussian_mean_cutoff(const hypothesis_pair& pair, double threshold) {
    try {
        return mean_threshold(pair, threshold);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

double require_np_size(const scenario& s) {
    if (!s.np_size) {
        throw input_error("no Neyman-Pearson size: set np_size in the scenario or pass --size");
    }
    return *s.np_size;
}

int cmd_design(const scenario_options& opts, const std::string& csv_path) {
    const scenario s = opts.resolve();
    const hypothesis_pair pair = s.pair();
    echo_scenario(s);

    const threshold_test test = cost_optimal_test(pair, s.costs);
    std::cout << "llr threshold: " << fmt(test.llr_threshold) << "\n";
    std::cout << "gamma: " << fmt(test.boundary_randomization) << "\n";
    const auto cutoff = gaussian_mean_cutoff(pair, test.llr_threshold);
    if (cutoff) std::cout << "mean cutoff: " << fmt(*cutoff) << "\n";

    const auto rates = try_error_rates(test, pair);
    if (rates) {
        std::cout << "alpha*: " << fmt(rates->alpha) << "\n";
        std::cout << "beta*: " << fmt(rates->beta) << "\n";
        std::cout << "power: " << fmt(rates->power()) << "\n";
        std::cout << "expected cost: "
                  << fmt(s.costs.c0 * rates->alpha + s.costs.c1 * rates->beta) << "\n";
    } else {
        std::cout << "alpha*/beta*: no analytic route for this pair; use `costopt simulate`\n";
    }

    if (!csv_path.empty()) {
        std::string row = csv_field(s.costs.c0) + "," + csv_field(s.costs.c1) + "," +
                          csv_field(test.llr_threshold) + "," +
                          csv_field(test.boundary_randomization) + ",";
        row += cutoff ? csv_field(*cutoff) : std::string{};
        row += ",";
        if (rates) {
            row += csv_field(rates->alpha) + "," + csv_field(rates->beta) + "," +
                   csv_field(s.costs.c0 * rates->alpha + s.costs.c1 * rates->beta);
        } else {
            row += ",,";
        }
        write_csv(csv_path, "c0,c1,llr_threshold,gamma,mean_cutoff,alpha,beta,expected_cost",
                  {row});
    }
    return 0;
}

int cmd_np(const scenario_options& opts, const std::string& csv_path) {
    const scenario s = opts.resolve();
    const hypothesis_pair pair = s.pair();
    const double size = require_np_size(s);
    echo_scenario(s);
    std::cout << "size: " << fmt(size) << "\n";

    const threshold_test test = neyman_pearson_test(pair, size);
    std::cout << "llr threshold: " << fmt(test.llr_threshold) << "\n";
    std::cout << "gamma: " << fmt(test.boundary_randomization) << "\n";
    const auto cutoff = gaussian_mean_cutoff(pair, test.llr_threshold);
    if (cutoff) std::cout << "mean cutoff: " << fmt(*cutoff) << "\n";

    const error_rates rates = compute_error_rates(test, pair);
    std::cout << "alpha: " << fmt(rates.alpha) << "\n";
    std::cout << "beta: " << fmt(rates.beta) << "\n";
    std::cout << "power: " << fmt(rates.power()) << "\n";

    if (!csv_path.empty()) {
        std::string row = csv_field(size) + "," + csv_field(test.llr_threshold) + "," +
                          csv_field(test.boundary_randomization) + ",";
        row += cutoff ? csv_field(*cutoff) : std::string{};
        row += "," + csv_field(rates.alpha) + "," + csv_field(rates.beta) + "," +
               csv_field(rates.power());
        write_csv(csv_path, "size,llr_threshold,gamma,mean_cutoff,alpha,beta,power", {row});
    }
    return 0;
}

void print_report_line(const char* label, const threshold_test& test,
                       const simulation_report& rep) {
    std::cout << label << ": llr threshold " << fmt(test.llr_threshold) << ", gamma "
              << fmt(test.boundary_randomization) << "\n";
    std::cout << "  alpha_hat: " << fmt(rep.alpha_hat) << " +- " << fmt(rep.alpha_ci_halfwidth)
              << "\n";
    std::cout << "  beta_hat:  " << fmt(rep.beta_hat) << " +- " << fmt(rep.beta_ci_halfwidth)
              << "\n";
    std::cout << "  cost_hat:  " << fmt(rep.cost_hat) << "\n";
}

int cmd_simulate(const scenario_options& opts, const std::string& which_test,
                 std::int64_t trials, std::uint64_t seed, const std::string& csv_path) {
    const scenario s = opts.resolve();
    const hypothesis_pair pair = s.pair();
    echo_scenario(s);
    std::cout << "trials: " << trials << "\n";
    std::cout << "seed: " << seed << "\n";

    const threshold_test test = which_test == "np"
                                    ? neyman_pearson_test(pair, require_np_size(s))
                                    : cost_optimal_test(pair, s.costs);
    const simulation_report rep = estimate_error_rates(test, pair, trials, seed, s.costs);
    print_report_line(which_test == "np" ? "neyman-pearson" : "cost-optimal", test, rep);

    if (const auto exact = try_error_rates(test, pair)) {
        std::cout << "analytic alpha: " << fmt(exact->alpha)
                  << (std::abs(rep.alpha_hat - exact->alpha) <= rep.alpha_ci_halfwidth
                          ? " (inside 3-sigma CI)"
                          : " (OUTSIDE 3-sigma CI)")
                  << "\n";
        std::cout << "analytic beta: " << fmt(exact->beta)
                  << (std::abs(rep.beta_hat - exact->beta) <= rep.beta_ci_halfwidth
                          ? " (inside 3-sigma CI)"
                          : " (OUTSIDE 3-sigma CI)")
                  << "\n";
    } else {
        std::cout << "analytic rates: not available for this pair\n";
    }

    if (!csv_path.empty()) {
        const std::string row = std::string(which_test == "np" ? "np" : "optimal") + "," +
                                std::to_string(rep.trials) + "," + std::to_string(rep.seed) + "," +
                                csv_field(test.llr_threshold) + "," +
                                csv_field(test.boundary_randomization) + "," +
                                csv_field(rep.alpha_hat) + "," + csv_field(rep.alpha_ci_halfwidth) +
                                "," + csv_field(rep.beta_hat) + "," +
                                csv_field(rep.beta_ci_halfwidth) + "," + csv_field(rep.cost_hat);
        write_csv(csv_path,
                  "test,trials,seed,llr_threshold,gamma,alpha_hat,alpha_ci,beta_hat,beta_ci,cost_hat",
                  {row});
    }
    return 0;
}

int cmd_compare(const scenario_options& opts, std::int64_t trials, std::uint64_t seed,
                const std::string& csv_path) {
    const scenario s = opts.resolve();
    const hypothesis_pair pair = s.pair();
    const double size = require_np_size(s);
    echo_scenario(s);
    std::cout << "np size: " << fmt(size) << "\n";
    std::cout << "trials: " << trials << "\n";
    std::cout << "seed: " << seed << "\n";

    const policy_comparison cmp = compare_policies(pair, s.costs, size, trials, seed);
    print_report_line("neyman-pearson", cmp.np_test, cmp.np);
    print_report_line("cost-optimal", cmp.optimal_test, cmp.optimal);
    std::cout << "cost difference (np - optimal): " << fmt(cmp.cost_difference) << " +- "
              << fmt(cmp.difference_ci_halfwidth) << " (3-sigma)\n";

    if (!csv_path.empty()) {
        const std::string row =
            std::to_string(trials) + "," + std::to_string(seed) + "," + csv_field(size) + "," +
            csv_field(s.costs.c0) + "," + csv_field(s.costs.c1) + "," +
            csv_field(cmp.np_test.llr_threshold) + "," +
            csv_field(cmp.np_test.boundary_randomization) + "," + csv_field(cmp.np.alpha_hat) +
            "," + csv_field(cmp.np.beta_hat) + "," + csv_field(cmp.np.cost_hat) + "," +
            csv_field(cmp.optimal_test.llr_threshold) + "," +
            csv_field(cmp.optimal_test.boundary_randomization) + "," +
            csv_field(cmp.optimal.alpha_hat) + "," + csv_field(cmp.optimal.beta_hat) + "," +
            csv_field(cmp.optimal.cost_hat) + "," + csv_field(cmp.cost_difference) + "," +
            csv_field(cmp.difference_ci_halfwidth);
        write_csv(csv_path,
                  "trials,seed,np_size,c0,c1,np_threshold,np_gamma,np_alpha_hat,np_beta_hat,"
                  "np_cost_hat,opt_threshold,opt_gamma,opt_alpha_hat,opt_beta_hat,opt_cost_hat,"
                  "difference,difference_ci",
                  {row});
    }
    return 0;
}

struct relaxation_check {
    double relaxed_value = 0.0;
    double indicator_value = 0.0;
    double min_directional_derivative = 0.0;
    bool tight = false;
};

relaxation_check check_instance(const finite_instance& inst, const cost_model& cost,
                                std::int64_t directions, rng_engine& eng) {
    relaxation_check out;
    const relaxed_solution relaxed = relaxed_minimum(inst, cost);
    const indicator_solution brute = brute_force_indicator_minimum(inst, cost);
    out.relaxed_value = relaxed.value;
    out.indicator_value = brute.value;
    out.tight = std::abs(relaxed.value - brute.value) <= 1e-12;

    double min_dd = inf;
    std::vector<double> f(inst.size());
    for (std::int64_t d = 0; d < directions; ++d) {
        for (auto& v : f) v = uniform01(eng);
        min_dd = std::min(min_dd,
                          directional_derivative(inst, cost, relaxed.allocation,
                                                 relaxed_allocation{f}));
    }
    for (std::size_t i = 0; i < inst.size(); ++i) {
        for (double target : {0.0, 1.0}) {
            f = relaxed.allocation.f;
            f[i] = target;
            min_dd = std::min(min_dd, directional_derivative(inst, cost, relaxed.allocation,
                                                             relaxed_allocation{f}));
        }
    }
    out.min_directional_derivative = min_dd;
    return out;
}

int cmd_verify_relaxation(const std::string& scenario_path, const std::string& grid_text,
                          std::int64_t instances, std::int64_t max_atoms, std::int64_t directions,
                          std::uint64_t seed, const std::string& csv_path) {
    std::vector<std::string> rows;
    bool all_tight = true;
    double worst_gap = 0.0;
    double min_dd = inf;

    if (!scenario_path.empty()) {
        const scenario s = load_scenario(scenario_path);
        std::optional<grid_spec> grid;
        if (!grid_text.empty()) {
            grid_spec g{};
            long long n = 0;
            if (std::sscanf(grid_text.c_str(), "%lf:%lf:%lld", &g.lo, &g.hi, &n) != 3) {
                throw input_error("--grid expects lo:hi:n");
            }
            g.n = n;
            grid = g;
        }
        echo_scenario(s);
        std::cout << "seed: " << seed << "\n";
        const hypothesis_pair pair{s.p0, s.p1, 1};
        const discretized_instance d = discretize(pair, grid);
        std::cout << "instance: " << d.instance.size() << " atoms\n";
        rng_engine eng = make_engine(substream_seed(seed, 3));
        const relaxation_check c = check_instance(d.instance, s.costs, directions, eng);
        all_tight = c.tight;
        worst_gap = std::abs(c.relaxed_value - c.indicator_value);
        min_dd = c.min_directional_derivative;
        std::cout << "relaxed value: " << fmt(c.relaxed_value)
                  << " (expected cost " << fmt(c.relaxed_value + s.costs.c1) << ")\n";
        std::cout << "indicator value: " << fmt(c.indicator_value) << "\n";
        rows.push_back("0," + std::to_string(d.instance.size()) + "," +
                       csv_field(c.relaxed_value) + "," + csv_field(c.indicator_value) + "," +
                       csv_field(worst_gap) + "," + csv_field(c.min_directional_derivative) +
                       "," + (c.tight ? "1" : "0"));
    } else {
        std::cout << "instances: " << instances << "\n";
        std::cout << "max atoms: " << max_atoms << "\n";
        std::cout << "directions per instance: " << directions << "\n";
        std::cout << "seed: " << seed << "\n";
        std::int64_t tight_count = 0;
        for (std::int64_t i = 0; i < instances; ++i) {
            rng_engine eng = make_engine(substream_seed(seed, 4, static_cast<std::uint64_t>(i)));
            const std::int64_t n = 1 + static_cast<std::int64_t>(
                                           uniform01(eng) * static_cast<double>(max_atoms));
            std::vector<double> q0(static_cast<std::size_t>(n));
            std::vector<double> q1(static_cast<std::size_t>(n));
            for (auto* v : {&q0, &q1}) {
                double sum = 0.0;
                for (auto& m : *v) {
                    m = uniform01(eng);
                    sum += m;
                }
                for (auto& m : *v) m /= sum;
            }
            const finite_instance inst{std::move(q0), std::move(q1)};
            const cost_model cost{std::exp(uniform01(eng) * 6.0 - 3.0),
                                  std::exp(uniform01(eng) * 6.0 - 3.0)};
            const relaxation_check c = check_instance(inst, cost, directions, eng);
            tight_count += c.tight;
            all_tight &= c.tight;
            worst_gap = std::max(worst_gap, std::abs(c.relaxed_value - c.indicator_value));
            min_dd = std::min(min_dd, c.min_directional_derivative);
            rows.push_back(std::to_string(i) + "," + std::to_string(inst.size()) + "," +
                           csv_field(c.relaxed_value) + "," + csv_field(c.indicator_value) + "," +
                           csv_field(std::abs(c.relaxed_value - c.indicator_value)) + "," +
                           csv_field(c.min_directional_derivative) + "," + (c.tight ? "1" : "0"));
        }
        std::cout << "tight instances: " << tight_count << "/" << instances << "\n";
    }

    std::cout << "max |indicator - relaxed| gap: " << fmt(worst_gap) << "\n";
    std::cout << "min directional derivative: " << fmt(min_dd) << " (threshold -1e-12)\n";
    const bool ok = all_tight && min_dd >= -1e-12;
    std::cout << "verdict: " << (ok ? "PASS" : "FAIL") << "\n";

    if (!csv_path.empty()) {
        write_csv(csv_path,
                  "instance,atoms,relaxed_value,indicator_value,gap,min_directional_derivative,"
                  "tight",
                  rows);
    }
    return ok ? 0 : 2;
}

int cmd_reproduce_table(bool paper_rounding, const std::string& csv_path) {
    const auto rows =
        benchmark_table(paper_rounding ? table_rounding::published : table_rounding::full_precision);
    std::cout << "benchmark: N(0,36) vs N(1.2,36), 100 observations, NP size 0.05, c1=1\n";
    std::cout << "rounding: " << (paper_rounding ? "published constants" : "full precision")
              << "\n";
    std::printf("%-12s %-12s %-12s %-12s %-12s\n", "c0", "J(NP)", "alpha*", "beta*", "J(opt)");
    std::vector<std::string> csv_rows;
    for (const auto& r : rows) {
        std::printf("%-12s %-12s %-12s %-12s %-12s\n", fmt(r.c0).c_str(), fmt(r.j_np).c_str(),
                    fmt(r.alpha_star).c_str(), fmt(r.beta_star).c_str(), fmt(r.j_opt).c_str());
        csv_rows.push_back(csv_field(r.c0) + "," + csv_field(r.j_np) + "," +
                           csv_field(r.alpha_star) + "," + csv_field(r.beta_star) + "," +
                           csv_field(r.j_opt));
    }
    if (!csv_path.empty()) {
        write_csv(csv_path, "c0,j_np,alpha_star,beta_star,j_opt", csv_rows);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cost-optimal binary hypothesis test design"};
    app.require_subcommand(1);

    scenario_options design_opts, np_opts, sim_opts, cmp_opts;
    std::string csv_design, csv_np, csv_sim, csv_cmp, csv_relax, csv_table;
    std::string sim_test = "optimal";
    std::int64_t sim_trials = 100000, cmp_trials = 100000;
    std::uint64_t sim_seed = 1, cmp_seed = 1, relax_seed = 1;
    std::string relax_scenario, relax_grid;
    std::int64_t relax_instances = 100, relax_atoms = 12, relax_directions = 1000;
    bool paper_rounding = false;

    CLI::App* design = app.add_subcommand("design", "cost-optimal test for a scenario");
    add_scenario_flags(design, design_opts, false);
    design->add_option("--csv", csv_design, "write the report as CSV");

    CLI::App* np = app.add_subcommand("np", "fixed-size Neyman-Pearson test for a scenario");
    add_scenario_flags(np, np_opts, true);
    np->add_option("--csv", csv_np, "write the report as CSV");

    CLI::App* sim = app.add_subcommand("simulate", "seeded Monte Carlo error-rate estimate");
    add_scenario_flags(sim, sim_opts, true);
    sim->add_option("--test", sim_test, "which test to simulate: optimal or np")
        ->check(CLI::IsMember({"optimal", "np"}));
    sim->add_option("--trials", sim_trials, "number of simulated samples per hypothesis");
    sim->add_option("--seed", sim_seed, "master seed");
    sim->add_option("--csv", csv_sim, "write the report as CSV");

    CLI::App* cmp = app.add_subcommand("compare",
                                       "paired Monte Carlo comparison of NP vs cost-optimal");
    add_scenario_flags(cmp, cmp_opts, true);
    cmp->add_option("--trials", cmp_trials, "number of simulated samples per hypothesis");
    cmp->add_option("--seed", cmp_seed, "master seed");
    cmp->add_option("--csv", csv_cmp, "write the report as CSV");

    CLI::App* relax = app.add_subcommand(
        "verify-relaxation", "check relaxation tightness and the optimality certificate");
    relax->add_option("--scenario", relax_scenario, "verify one discretized scenario instead");
    relax->add_option("--grid", relax_grid, "discretization grid lo:hi:n for continuous pairs");
    relax->add_option("--instances", relax_instances, "number of random instances");
    relax->add_option("--max-atoms", relax_atoms, "atoms per random instance (<= 22)");
    relax->add_option("--directions", relax_directions, "random directions per instance");
    relax->add_option("--seed", relax_seed, "master seed");
    relax->add_option("--csv", csv_relax, "write per-instance results as CSV");

    CLI::App* table = app.add_subcommand("reproduce-table",
                                         "benchmark cost comparison across c0 = 1, e, e^2, e^3");
    table->add_flag("--paper-rounding", paper_rounding,
                    "use the rounded constants of the originally published table");
    table->add_option("--csv", csv_table, "write the table as CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (design->parsed()) return cmd_design(design_opts, csv_design);
        if (np->parsed()) return cmd_np(np_opts, csv_np);
        if (sim->parsed()) return cmd_simulate(sim_opts, sim_test, sim_trials, sim_seed, csv_sim);
        if (cmp->parsed()) return cmd_compare(cmp_opts, cmp_trials, cmp_seed, csv_cmp);
        if (relax->parsed()) {
            return cmd_verify_relaxation(relax_scenario, relax_grid, relax_instances, relax_atoms,
                                         relax_directions, relax_seed, csv_relax);
        }
        if (table->parsed()) return cmd_reproduce_table(paper_rounding, csv_table);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
