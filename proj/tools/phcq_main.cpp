#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phcq/harness.hpp"
#include "phcq/selection.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

using phcq::harness::ExperimentConfig;
using phcq::harness::Strategy;

int cmd_run(const std::string& config_path, std::uint64_t seed, bool seed_set,
            const std::string& strategy, const std::string& out_csv) {
    ExperimentConfig cfg =
        config_path.empty() ? ExperimentConfig{} : phcq::harness::load_config(config_path);
    if (seed_set) cfg.seed = seed;
    if (!strategy.empty()) {
        if (strategy == "phc")
            cfg.strategy = Strategy::phc;
        else if (strategy == "semi" || strategy == "semi_uniform")
            cfg.strategy = Strategy::semi_uniform;
        else
            throw std::invalid_argument("config: strategy must be phc or semi");
    }
    phcq::harness::validate(cfg);

    const auto records = phcq::harness::run_experiment(cfg);
    if (!out_csv.empty()) phcq::harness::emit_csv(records, out_csv);

    for (const auto& r : records)
        std::printf("period %2d  c=%+.4f  reward=%10.4f  cum=%10.4f\n", r.period, r.coefficient,
                    r.reward, r.cumulative_reward);
    if (!records.empty()) {
        std::printf("final coefficient: %+.4f\n", records.back().coefficient);
        std::printf("periods to convergence: %d\n",
                    phcq::harness::periods_to_convergence(records));
    }
    if (!out_csv.empty()) std::printf("wrote %s\n", out_csv.c_str());
    return kExitOk;
}

int cmd_compare(const std::string& config_path, const std::vector<std::uint64_t>& seeds,
                const std::string& out_dir) {
    ExperimentConfig base =
        config_path.empty() ? ExperimentConfig{} : phcq::harness::load_config(config_path);
    ExperimentConfig cfg_phc = base;
    cfg_phc.strategy = Strategy::phc;
    ExperimentConfig cfg_semi = base;
    cfg_semi.strategy = Strategy::semi_uniform;

    const auto sum = phcq::harness::compare_strategies(cfg_phc, cfg_semi, seeds);
    std::printf("%-12s %-8s %-8s %-10s %-10s %-8s\n", "seed", "phc_ptc", "semi_ptc", "phc_c",
                "semi_c", "speedup");
    for (std::size_t i = 0; i < seeds.size(); ++i)
        std::printf("%-12llu %-8d %-8d %-+10.4f %-+10.4f %-8.3f\n",
                    static_cast<unsigned long long>(seeds[i]),
                    sum.phc.periods_to_convergence[i], sum.semi.periods_to_convergence[i],
                    sum.phc.final_coefficients[i], sum.semi.final_coefficients[i],
                    sum.speedups[i]);
    std::printf("median speedup: %.3f\n", sum.median_speedup);

    if (!out_dir.empty()) {
        std::vector<std::string> csvs;
        for (const auto seed : seeds) {
            for (const auto* name : {"phc", "semi"}) {
                ExperimentConfig c = base;
                c.seed = seed;
                c.strategy = std::string(name) == "phc" ? Strategy::phc : Strategy::semi_uniform;
                const auto recs = phcq::harness::run_experiment(c);
                const std::string path =
                    out_dir + "/" + name + "_seed" + std::to_string(seed) + ".csv";
                phcq::harness::emit_csv(recs, path);
                csvs.push_back(path);
            }
        }
        phcq::harness::emit_plot_script(csvs, out_dir + "/plot.py");
        std::printf("wrote %zu CSVs and plot.py under %s\n", csvs.size(), out_dir.c_str());
    }
    return kExitOk;
}

// quick oracle-style checks runnable without the full experiment
int cmd_selftest() {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::printf("%-55s %s\n", name, ok ? "pass" : "FAIL");
        failures += !ok;
    };

    // two-pass variance vs first_stage_variance on random draws
    {
        phcq::rng::Stream s(42);
        std::vector<double> draws;
        for (int i = 0; i < 1000; ++i) draws.push_back(s.normal());
        const double v = phcq::selection::first_stage_variance(draws);
        check("first-stage variance of N(0,1) draws in [0.8, 1.2]", v > 0.8 && v < 1.2);
    }
    // weight constraint
    {
        phcq::selection::SelectionConfig cfg{10, 0.05, 1.5, 3.0, 0};
        const int n_i = phcq::selection::stopping_time(4.0, cfg);
        const auto w = phcq::selection::dd_weights(n_i, cfg.n0, 4.0, cfg);
        double sum = 0.0, sum2 = 0.0;
        for (double x : w) sum += x, sum2 += x * x;
        check("dd_weights sum to 1", std::abs(sum - 1.0) < 1e-9);
        check("dd_weights satisfy S2*sum(tau^2) = (eps/h)^2",
              std::abs(4.0 * sum2 - 0.25) < 1e-9);
    }
    // correct-selection rate, k=2, wide gap
    {
        phcq::rng::Stream s(7);
        int wins = 0;
        const int trials = 1000;
        phcq::selection::SelectionConfig cfg{10, 0.05, 1.0,
                                             phcq::selection::solve_h(2, 0.05, 10), 0};
        for (int t = 0; t < trials; ++t) {
            std::vector<phcq::selection::PopulationSampler> oracles = {
                [&] { return s.normal(0.0, 1.0); }, [&] { return s.normal(5.0, 1.0); }};
            wins += phcq::selection::select_best(oracles, cfg).best_index == 1;
        }
        check("correct-selection rate >= 0.95 (gap >> eps)", wins >= 950);
    }
    // environment fixed point and Monte Carlo mean
    {
        phcq::env::StateSample z(50);
        const auto out = phcq::env::step_sample(z, std::vector<double>(50, 0.0), 99);
        bool zero = true;
        for (const auto& x : out) zero &= x.x1 == 0.0 && x.x2 == 0.0 && x.x3 == 0.0;
        check("origin is a fixed point under zero action", zero);

        phcq::env::StateSample shocked(100000, phcq::env::StateVec{1.0, 0.0, 0.0});
        const auto stepped =
            phcq::env::step_sample(shocked, std::vector<double>(shocked.size(), 0.0), 123);
        double mean = 0.0;
        for (const auto& x : stepped) mean += x.x1;
        mean /= double(stepped.size());
        check("mean x1 after one step of (1,0,0) near 0.75", mean > 0.70 && mean < 0.80);
    }
    // serial and parallel kernels agree bit-for-bit
    {
        phcq::env::StateSample sample(64, phcq::env::StateVec{1.0, 0.5, -0.25});
        const auto a = phcq::env::rollout_returns(sample, -0.7, 20, 0.988, -5, -5, 5150);
        const auto b = phcq::env::rollout_returns_serial(sample, -0.7, 20, 0.988, -5, -5, 5150);
        check("OpenMP rollout matches serial reference exactly", a == b);
    }
    return failures == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PHC exploration for robust Q-learning: experiment runner"};
    app.require_subcommand(1);

    std::string config_path, strategy, out_csv, out_dir, seeds_arg;
    std::uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "run one experiment");
    run->add_option("--config", config_path, "config file (defaults reproduce the experiment)");
    auto* seed_opt = run->add_option("--seed", seed, "override master seed");
    run->add_option("--strategy", strategy, "phc | semi");
    run->add_option("--out", out_csv, "CSV output path");

    auto* compare = app.add_subcommand("compare", "compare PHC vs semi-uniform over seeds");
    compare->add_option("--config", config_path, "config file");
    compare->add_option("--seeds", seeds_arg, "comma-separated seed list")->required();
    compare->add_option("--out-dir", out_dir, "directory for per-run CSVs and plot script");

    app.add_subcommand("selftest", "run quick oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (app.got_subcommand("run"))
            return cmd_run(config_path, seed, seed_opt->count() > 0, strategy, out_csv);
        if (app.got_subcommand("compare")) {
            std::vector<std::uint64_t> seeds_list;
            std::size_t pos = 0;
            while (pos < seeds_arg.size()) {
                const auto comma = seeds_arg.find(',', pos);
                const auto tok = seeds_arg.substr(pos, comma - pos);
                seeds_list.push_back(std::stoull(tok));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            return cmd_compare(config_path, seeds_list, out_dir);
        }
        return cmd_selftest();
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}
