#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phcq/learner.hpp"
#include "phcq/phc.hpp"

// Experiment orchestration: the 30-period robust Q-learning loop over the
// shocked linear system, with either PHC or semi-uniform exploration, plus
// CSV emission and strategy comparison.
namespace phcq::harness {

enum class Strategy { phc, semi_uniform };

struct ExperimentConfig {
    // experiment
    double gamma = 0.988;
    double tau1 = -5.0;
    double tau2 = -5.0;
    double phi = 0.5;
    int sample_size = 50;  // N
    double delta = 0.04;
    double xi = 0.1;
    int periods = 30;
    double shock = 1.0;
    std::uint64_t seed = 1;
    Strategy strategy = Strategy::phc;
    // learner
    double beta = 0.2;
    double match_radius = 0.25;
    // policy transformations
    double step = 0.05;
    int arity = 3;
    double step_decay = 0.5;
    double min_step = 0.01;
    // selection / phc
    int n0 = 10;
    double h = 0.0;  // 0 = solve per round
    double epsilon_floor = 0.25;
    double spread_fraction = 0.1;
    int max_iters = 20;
    int max_samples = 150;  // per-population draw cap inside PHC rounds (0 = uncapped)
    // eta oracle
    int rollout_horizon = 30;
};

void validate(const ExperimentConfig& cfg);

struct RunRecord {
    int period = 0;
    double coefficient = 0.0;
    double reward = 0.0;              // period robust reward R~
    double cumulative_reward = 0.0;   // discounted running sum
    double avg_final_policy = 0.0;    // cumulative reward / periods final policy was active
    long env_samples = 0;             // total environment state-steps so far
    long selection_samples = 0;       // total selection draws so far
};

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

struct StrategyRuns {
    std::vector<int> periods_to_convergence;  // per seed, 1-based period count
    std::vector<double> final_coefficients;
};

struct ComparisonSummary {
    StrategyRuns phc;
    StrategyRuns semi;
    std::vector<double> speedups;  // semi / phc, per seed
    double median_speedup = 0.0;
};

// first period (1-based) from which the coefficient stays within +-band of
// the run's final coefficient
int periods_to_convergence(const std::vector<RunRecord>& records, double band = 0.05);

ComparisonSummary compare_strategies(const ExperimentConfig& cfg_phc,
                                     const ExperimentConfig& cfg_semi,
                                     const std::vector<std::uint64_t>& seeds);

void emit_csv(const std::vector<RunRecord>& records, const std::string& path);
std::vector<RunRecord> parse_csv(const std::string& path);

// standalone matplotlib script: coefficient-vs-period and
// average-cumulative-reward-vs-period, one series per CSV
void emit_plot_script(const std::vector<std::string>& csv_paths, const std::string& out);

// flat key/value config file with [section] headers; unknown keys rejected
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

}  // namespace phcq::harness
