#pragma once

#include <cstdint>
#include <vector>

#include "phcq/rng.hpp"

// Stochastic discrete-time 3-state linear system with uncertain parameters,
// advanced by Monte Carlo: every state step draws a fresh parameter vector
// from the admissible uniform ranges.
namespace phcq::env {

struct StateVec {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
};

// One realization of the uncertain model parameters.
struct ParamDraw {
    double kappa;    // x1 persistence, U[0.6, 0.9]
    double theta;    // x2 adjustment speed, U[0.1, 0.4]
    double zeta;     // action pass-through, U[0.4, 0.6]
    double upsilon;  // x2 -> x3 coupling, U[1.5, 2.5]
};

struct ParamRanges {
    double kappa_lo = 0.6, kappa_hi = 0.9;
    double theta_lo = 0.1, theta_hi = 0.4;
    double zeta_lo = 0.4, zeta_hi = 0.6;
    double upsilon_lo = 1.5, upsilon_hi = 2.5;
};

using StateSample = std::vector<StateVec>;

ParamDraw draw_params(rng::Stream& stream, const ParamRanges& ranges = {});

StateVec step_deterministic(const StateVec& x, double action, const ParamDraw& p);

// Advances every state under an independently drawn ParamDraw.
// Child streams are forked per state index, so the result is identical for
// the serial and OpenMP paths.
StateSample step_sample(const StateSample& sample, const std::vector<double>& actions,
                        std::uint64_t key);
StateSample step_sample_serial(const StateSample& sample, const std::vector<double>& actions,
                               std::uint64_t key);

StateSample apply_shock(StateSample sample, double magnitude);

// Per-state discounted cumulative reward of a `horizon`-step rollout under a
// constant linear feedback a = c*x1; reward(x) is evaluated on the post-step
// state. This is the hot kernel behind the PHC sampling oracles.
std::vector<double> rollout_returns(const StateSample& sample, double coeff, int horizon,
                                    double gamma, double tau1, double tau2, std::uint64_t key);
std::vector<double> rollout_returns_serial(const StateSample& sample, double coeff, int horizon,
                                           double gamma, double tau1, double tau2,
                                           std::uint64_t key);

}  // namespace phcq::env
