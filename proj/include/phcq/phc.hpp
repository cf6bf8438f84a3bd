#pragma once

#include <functional>
#include <vector>

#include "phcq/policy.hpp"
#include "phcq/rng.hpp"
#include "phcq/selection.hpp"

// Probabilistic hill climbing: iterated two-stage statistical selection over
// a local transformation set of the incumbent policy. Each round compares the
// eta populations of the incumbent and its perturbations; the walk stops when
// the incumbent is re-selected (at the finest step size) or the round budget
// is exhausted. The per-round error budget delta_w halves geometrically so
// the total stays below delta_total regardless of round count.
namespace phcq::phc {

struct PhcConfig {
    double delta_total = 0.04;
    int n0 = 10;
    int max_iters = 20;
    double epsilon_floor = 0.01;
    double spread_fraction = 0.1;  // epsilon_w = max(floor, fraction * first-stage spread)
    double h = 0.0;                // > 0 overrides; 0 solves h(k, delta_w, n0) per round
    int max_samples = 0;           // per-population cap forwarded to selection (0 = uncapped)
    double step_decay = 0.5;       // step multiplier on incumbent re-selection (1 = off)
    double min_step = 0.01;        // re-selection at or below this step terminates
};

void validate(const PhcConfig& cfg);

struct SemiUniformConfig {
    double xi = 0.1;  // exploration probability, (0,1)
    policy::PolicyCatalog catalog;
};

// one selection round of telemetry
struct PhcRound {
    int omega = 0;
    double step = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    std::vector<double> candidate_coeffs;
    std::vector<double> eta_bars;
    std::vector<int> n_i;
    int winner = 0;
    long samples = 0;
};

struct PhcTrace {
    std::vector<PhcRound> rounds;
    bool truncated = false;  // max_iters reached before re-selection
    long total_samples = 0;
};

using SamplerFactory =
    std::function<selection::PopulationSampler(const policy::Policy&, int round, int slot)>;

// epsilon_w = max(epsilon_floor, spread_fraction * (max - min first-stage mean))
double epsilon_schedule(const std::vector<double>& etas_first_stage, const PhcConfig& cfg);

// delta_w = delta_total / 2^(omega+1)
double delta_schedule(int omega, const PhcConfig& cfg);

policy::Policy phc_explore(const policy::Policy& pi0, const SamplerFactory& factory,
                           const policy::TransformSet& ts, const PhcConfig& cfg,
                           PhcTrace* trace = nullptr);

// best policy with probability 1-xi, uniform catalog member with probability xi
policy::Policy semi_uniform_choose(const policy::Policy& best, const SemiUniformConfig& cfg,
                                   rng::Stream& stream);

}  // namespace phcq::phc
