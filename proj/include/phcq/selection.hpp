#pragma once

#include <functional>
#include <vector>

// Dudewicz-Dalal two-stage selection of the largest-mean population among k
// normal populations with unknown, unequal variances. A first stage of n0
// draws per population estimates the variance; the variance-dependent second
// stage plus a specific weighting of the observations makes the standardized
// weighted mean a t(n0-1) pivot, which yields the guarantee
// P{correct selection} >= 1-delta whenever the top-two mean gap is >= epsilon.
namespace phcq::selection {

struct SelectionConfig {
    int n0 = 10;           // first-stage sample size, >= 2
    double delta = 0.05;   // error probability, p* = 1 - delta
    double epsilon = 1.0;  // indifference-zone width, > 0
    double h = 0.0;        // t-quantile design constant, > 0 (see solve_h)
    // Optional cap on the per-population stopping time (0 = uncapped). A
    // binding cap forfeits the guarantee for that round; intended for the
    // embedded use where rounds near convergence would otherwise demand
    // unbounded sampling.
    int max_samples = 0;
};

void validate(const SelectionConfig& cfg);

// One observation from an unknown-mean, unknown-variance population.
using PopulationSampler = std::function<double()>;

struct PopulationStats {
    int n_i = 0;                   // stopping time (total draws)
    double sample_variance = 0.0;  // S^2 over the first n0 draws
    double weighted_mean = 0.0;    // tau-weighted mean over all n_i draws
    std::vector<double> weights;   // tau_1..tau_{n_i}, sums to 1
};

struct SelectionResult {
    int best_index = 0;
    std::vector<PopulationStats> per_population;
    long total_samples = 0;
};

// Unbiased (n-1 denominator) variance of the first-stage sample.
double first_stage_variance(const std::vector<double>& samples);

// n_i = max{n0+1, ceil((S h / epsilon)^2)}
int stopping_time(double S2, const SelectionConfig& cfg);

// Dudewicz-Dalal weights: equal weight on the first n0 observations, a
// distinct common weight on the rest, solving sum tau = 1 and
// S^2 * sum tau^2 = (epsilon/h)^2; root with the larger first-stage weight.
// S2 == 0 (or n_i == n0) degenerates to uniform 1/n_i.
std::vector<double> dd_weights(int n_i, int n0, double S2, const SelectionConfig& cfg);

// Intermediate product of the first sampling stage, exposed so callers can
// set epsilon adaptively from the first-stage means before finishing.
struct FirstStage {
    std::vector<std::vector<double>> samples;  // n0 draws per population
    std::vector<double> means;
    std::vector<double> variances;
};

FirstStage run_first_stage(const std::vector<PopulationSampler>& oracles, int n0);

// Second stage: per-population stopping time, extra draws, weighted means,
// argmax (ties to the lowest index). k == 1 short-circuits after the first
// stage. Consumes exactly sum(n_i) - k*n0 further draws.
SelectionResult finish_selection(const std::vector<PopulationSampler>& oracles,
                                 const FirstStage& fs, const SelectionConfig& cfg);

SelectionResult select_best(const std::vector<PopulationSampler>& oracles,
                            const SelectionConfig& cfg);

// Design constant h(k, delta, nu) with nu = n0 - 1: the root of
//   integral F_nu(t + h)^(k-1) f_nu(t) dt = 1 - delta,
// i.e. the correct-selection probability of k independent t(nu) pivots at
// the least-favorable configuration. Solved by quadrature + bisection.
double solve_h(int k, double delta, int n0);

}  // namespace phcq::selection
