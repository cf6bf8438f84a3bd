#include "phcq/environment.hpp"

#include <cstddef>
#include <stdexcept>

namespace phcq::env {

ParamDraw draw_params(rng::Stream& stream, const ParamRanges& r) {
    ParamDraw p;
    p.kappa = stream.uniform(r.kappa_lo, r.kappa_hi);
    p.theta = stream.uniform(r.theta_lo, r.theta_hi);
    p.zeta = stream.uniform(r.zeta_lo, r.zeta_hi);
    p.upsilon = stream.uniform(r.upsilon_lo, r.upsilon_hi);
    return p;
}

StateVec step_deterministic(const StateVec& x, double action, const ParamDraw& p) {
    StateVec y;
    y.x1 = p.kappa * x.x1 + (1.0 - p.kappa) * x.x3;
    y.x2 = (1.0 - p.theta) * x.x2 + p.theta * p.zeta * action;
    y.x3 = y.x1 + p.upsilon * y.x2;
    return y;
}

namespace {

StateVec step_one(const StateVec& x, double action, std::uint64_t key, std::uint64_t index) {
    rng::Stream s(rng::fork(key, index));
    return step_deterministic(x, action, draw_params(s));
}

}  // namespace

StateSample step_sample_serial(const StateSample& sample, const std::vector<double>& actions,
                               std::uint64_t key) {
    if (actions.size() != sample.size())
        throw std::invalid_argument("step_sample: actions/sample length mismatch");
    StateSample out(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i)
        out[i] = step_one(sample[i], actions[i], key, i);
    return out;
}

StateSample step_sample(const StateSample& sample, const std::vector<double>& actions,
                        std::uint64_t key) {
    if (actions.size() != sample.size())
        throw std::invalid_argument("step_sample: actions/sample length mismatch");
    StateSample out(sample.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(sample.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            step_one(sample[static_cast<std::size_t>(i)], actions[static_cast<std::size_t>(i)],
                     key, static_cast<std::uint64_t>(i));
    return out;
}

StateSample apply_shock(StateSample sample, double magnitude) {
    for (auto& s : sample) s.x1 += magnitude;
    return sample;
}

namespace {

double rollout_one(StateVec x, double coeff, int horizon, double gamma, double tau1, double tau2,
                   std::uint64_t state_key) {
    rng::Stream s(state_key);
    double q = 0.0;
    double disc = 1.0;
    for (int t = 0; t < horizon; ++t) {
        const double a = coeff * x.x1;
        x = step_deterministic(x, a, draw_params(s));
        q += disc * (tau1 * x.x2 * x.x2 + tau2 * x.x3 * x.x3);
        disc *= gamma;
    }
    return q;
}

}  // namespace

std::vector<double> rollout_returns_serial(const StateSample& sample, double coeff, int horizon,
                                           double gamma, double tau1, double tau2,
                                           std::uint64_t key) {
    std::vector<double> q(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i)
        q[i] = rollout_one(sample[i], coeff, horizon, gamma, tau1, tau2, rng::fork(key, i));
    return q;
}

std::vector<double> rollout_returns(const StateSample& sample, double coeff, int horizon,
                                    double gamma, double tau1, double tau2, std::uint64_t key) {
    std::vector<double> q(sample.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(sample.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        q[static_cast<std::size_t>(i)] =
            rollout_one(sample[static_cast<std::size_t>(i)], coeff, horizon, gamma, tau1, tau2,
                        rng::fork(key, static_cast<std::uint64_t>(i)));
    return q;
}

}  // namespace phcq::env
