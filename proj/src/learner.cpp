#include "phcq/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace phcq::learner {

void validate(const RewardParams& p) {
    if (!(p.gamma > 0.0 && p.gamma < 1.0))
        throw std::invalid_argument("learner: gamma must be in (0,1)");
    if (!(p.phi >= 0.0 && p.phi <= 1.0))
        throw std::invalid_argument("learner: phi must be in [0,1]");
}

void validate(const LearnParams& p) {
    if (!(p.beta > 0.0 && p.beta <= 1.0))
        throw std::invalid_argument("learner: beta must be in (0,1]");
}

namespace {

long long policy_key(const policy::Policy& pi) {
    return static_cast<long long>(std::llround(pi.c * 1e9));
}

double dist2(const env::StateVec& a, const env::StateVec& b) {
    const double d1 = a.x1 - b.x1, d2 = a.x2 - b.x2, d3 = a.x3 - b.x3;
    return d1 * d1 + d2 * d2 + d3 * d3;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / double(v.size() - 1);
}

// index of the nearest centroid, -1 for an empty list
int nearest(const std::vector<QCluster>& cs, const env::StateVec& x) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const double d = dist2(cs[i].centroid, x);
        if (d < bd) {
            bd = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace

QTable::QTable(double match_radius) : radius_(match_radius) {
    if (!(match_radius > 0.0)) throw std::invalid_argument("QTable: match_radius must be > 0");
}

const std::vector<QCluster>* QTable::clusters(const policy::Policy& pi) const {
    auto it = by_policy_.find(policy_key(pi));
    return it == by_policy_.end() ? nullptr : &it->second;
}

const QCluster* QTable::find(const policy::Policy& pi, const env::StateVec& x) const {
    const auto* cs = clusters(pi);
    if (!cs) return nullptr;
    const int i = nearest(*cs, x);
    if (i < 0 || dist2((*cs)[std::size_t(i)].centroid, x) > radius_ * radius_) return nullptr;
    return &(*cs)[std::size_t(i)];
}

std::vector<policy::Policy> QTable::known_policies() const {
    std::vector<policy::Policy> out;
    out.reserve(by_policy_.size());
    for (const auto& [key, cs] : by_policy_)
        if (!cs.empty()) out.push_back(policy::Policy{double(key) * 1e-9});
    return out;
}

void QTable::absorb(const policy::Policy& pi, const env::StateVec& x, double q_new) {
    auto& cs = by_policy_[policy_key(pi)];
    const int i = nearest(cs, x);
    if (i >= 0 && dist2(cs[std::size_t(i)].centroid, x) <= radius_ * radius_) {
        QCluster& c = cs[std::size_t(i)];
        c.count += 1;
        const double dq = q_new - c.q_mean;
        c.q_mean += dq / double(c.count);
        c.q_m2 += dq * (q_new - c.q_mean);
        c.centroid.x1 += (x.x1 - c.centroid.x1) / double(c.count);
        c.centroid.x2 += (x.x2 - c.centroid.x2) / double(c.count);
        c.centroid.x3 += (x.x3 - c.centroid.x3) / double(c.count);
    } else {
        cs.push_back(QCluster{x, q_new, 0.0, 1});
    }
}

void QTable::maintain(const policy::Policy& pi) {
    auto it = by_policy_.find(policy_key(pi));
    if (it == by_policy_.end()) return;
    auto& cs = it->second;
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < cs.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < cs.size() && !merged; ++j) {
                if (dist2(cs[i].centroid, cs[j].centroid) > radius_ * radius_) continue;
                QCluster& a = cs[i];
                const QCluster& b = cs[j];
                const double na = a.count, nb = b.count, n = na + nb;
                const double dq = b.q_mean - a.q_mean;
                // Chan et al. parallel combination
                a.q_m2 += b.q_m2 + dq * dq * na * nb / n;
                a.q_mean += dq * nb / n;
                a.centroid.x1 = (na * a.centroid.x1 + nb * b.centroid.x1) / n;
                a.centroid.x2 = (na * a.centroid.x2 + nb * b.centroid.x2) / n;
                a.centroid.x3 = (na * a.centroid.x3 + nb * b.centroid.x3) / n;
                a.count += b.count;
                cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(j));
                merged = true;
            }
        }
    }
}

void QTable::save_snapshot(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("QTable snapshot: cannot open " + path);
    char line[256];
    for (const auto& [key, cs] : by_policy_) {
        for (const auto& c : cs) {
            std::snprintf(line, sizeof line, "%.17g %.17g %.17g %.17g %.17g %.17g %d\n",
                          double(key) * 1e-9, c.centroid.x1, c.centroid.x2, c.centroid.x3,
                          c.q_mean, c.variance(), c.count);
            out << line;
        }
    }
}

double instant_reward(const env::StateVec& x, const RewardParams& p) {
    return p.tau1 * x.x2 * x.x2 + p.tau2 * x.x3 * x.x3;
}

double robust_reward(const std::vector<double>& rewards, double phi) {
    if (rewards.empty()) throw std::invalid_argument("robust_reward: empty sample");
    const double m = mean_of(rewards);
    return phi * m - (1.0 - phi) * sample_variance(rewards, m);
}

double eta(const std::vector<double>& q_samples, double phi) {
    if (q_samples.empty()) throw std::invalid_argument("eta: empty sample");
    const double m = mean_of(q_samples);
    return phi * m - (1.0 - phi) * sample_variance(q_samples, m);
}

double robust_value(const env::StateVec& x_next, const std::vector<policy::Policy>& candidates,
                    const QTable& table, double phi) {
    if (candidates.empty()) throw std::invalid_argument("robust_value: no candidates");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& pi : candidates) {
        const QCluster* c = table.find(pi, x_next);
        const double v = c ? c->q_mean - (1.0 - phi) * c->variance() : 0.0;
        if (v > best) best = v;
    }
    return best;
}

double robust_q_update(double q, double reward_tilde, double v_next, double p_weight,
                       const LearnParams& lp, double gamma) {
    if (!(p_weight >= 0.0 && p_weight <= 1.0))
        throw std::invalid_argument("robust_q_update: p_weight must be in [0,1]");
    validate(lp);
    return q + lp.beta * p_weight * (reward_tilde + gamma * v_next - q);
}

double standard_q_update(double q, double r, double v_next, const LearnParams& lp, double gamma) {
    validate(lp);
    return (1.0 - lp.beta) * q + lp.beta * (r + gamma * v_next);
}

double state_weight(const env::StateVec& x, const env::StateSample& sample, const QTable& table,
                    const policy::Policy& pi) {
    if (sample.empty()) throw std::invalid_argument("state_weight: empty sample");
    const auto* cs = table.clusters(pi);
    if (!cs || cs->empty()) return 1.0;  // single implicit bucket
    const int mine = nearest(*cs, x);
    int hits = 0;
    for (const auto& s : sample) hits += (nearest(*cs, s) == mine);
    return double(hits) / double(sample.size());
}

}  // namespace phcq::learner
