#pragma once

#include <map>
#include <string>
#include <vector>

#include "phcq/environment.hpp"
#include "phcq/policy.hpp"

// Risk-averse Q-learning core. Rewards and values are scored by
// phi*mean - (1-phi)*variance, so a mean-preserving increase in spread is
// ranked strictly worse. Q functions are approximated per policy by online
// clusters over state space (Welford statistics on the q-values, running-mean
// centroids).
namespace phcq::learner {

struct RewardParams {
    double tau1 = -5.0;
    double tau2 = -5.0;
    double gamma = 0.988;
    double phi = 0.5;
};

struct LearnParams {
    double beta = 0.2;  // constant learning rate, (0, 1]
};

void validate(const RewardParams& p);
void validate(const LearnParams& p);

struct QCluster {
    env::StateVec centroid;
    double q_mean = 0.0;
    double q_m2 = 0.0;  // sum of squared deviations
    int count = 0;

    double variance() const { return count >= 2 ? q_m2 / double(count - 1) : 0.0; }
};

class QTable {
public:
    explicit QTable(double match_radius = 0.25);

    double match_radius() const { return radius_; }

    // nullptr when no centroid of pi lies within match_radius of x
    const QCluster* find(const policy::Policy& pi, const env::StateVec& x) const;
    const std::vector<QCluster>* clusters(const policy::Policy& pi) const;
    std::vector<policy::Policy> known_policies() const;

    // fold one (state, q) observation into the matching cluster of pi, or
    // start a new singleton
    void absorb(const policy::Policy& pi, const env::StateVec& x, double q_new);

    // merge clusters of pi pairwise until no two centroids are within
    // match_radius (pooled counts/means/m2)
    void maintain(const policy::Policy& pi);

    // one cluster per line: coefficient, centroid triple, q_mean, variance, count
    void save_snapshot(const std::string& path) const;

private:
    double radius_;
    std::map<long long, std::vector<QCluster>> by_policy_;
};

// per-period term of the quadratic cost: tau1*x2^2 + tau2*x3^2
double instant_reward(const env::StateVec& x, const RewardParams& p);

// phi*mean - (1-phi)*sample-variance over the given rewards
double robust_reward(const std::vector<double>& rewards, double phi);

// same functional on q-value samples; the observable handed to selection
double eta(const std::vector<double>& q_samples, double phi);

// max over candidate policies of Qbar - (1-phi)*S^2 at the cluster matching
// x_next; unmatched candidates score the optimistic cold-start value 0
double robust_value(const env::StateVec& x_next, const std::vector<policy::Policy>& candidates,
                    const QTable& table, double phi);

// q + beta * P(x) * [R~ + gamma*V~ - q]
double robust_q_update(double q, double reward_tilde, double v_next, double p_weight,
                       const LearnParams& lp, double gamma);

// (1-beta)*q + beta*(r + gamma*v_next); reference update for cross-checks
double standard_q_update(double q, double r, double v_next, const LearnParams& lp, double gamma);

// empirical probability mass of x's nearest cluster within the sample
// (nearest-centroid assignment over pi's clusters; an empty cluster list puts
// the whole sample in one bucket)
double state_weight(const env::StateVec& x, const env::StateSample& sample, const QTable& table,
                    const policy::Policy& pi);

}  // namespace phcq::learner
