#include "phcq/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

namespace phcq::selection {

void validate(const SelectionConfig& cfg) {
    if (cfg.n0 < 2) throw std::invalid_argument("selection: n0 must be >= 2");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
        throw std::invalid_argument("selection: delta must be in (0,1)");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("selection: epsilon must be > 0");
    if (!(cfg.h > 0.0)) throw std::invalid_argument("selection: h must be > 0");
    if (cfg.max_samples < 0) throw std::invalid_argument("selection: max_samples must be >= 0");
}

double first_stage_variance(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("first_stage_variance: need at least 2 samples");
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / double(n);
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    return ss / double(n - 1);
}

int stopping_time(double S2, const SelectionConfig& cfg) {
    if (S2 < 0.0) throw std::invalid_argument("stopping_time: S2 must be >= 0");
    const double ratio = std::sqrt(S2) * cfg.h / cfg.epsilon;
    const double needed = std::ceil(ratio * ratio);
    int n_i = cfg.n0 + 1;
    if (needed > double(n_i)) {
        if (needed > 1e9) throw std::runtime_error("stopping_time: required sample size overflow");
        n_i = static_cast<int>(needed);
    }
    if (cfg.max_samples > 0) n_i = std::min(n_i, std::max(cfg.max_samples, cfg.n0 + 1));
    return n_i;
}

std::vector<double> dd_weights(int n_i, int n0, double S2, const SelectionConfig& cfg) {
    if (n_i < n0) throw std::invalid_argument("dd_weights: n_i must be >= n0");
    if (S2 == 0.0 || n_i == n0) return std::vector<double>(std::size_t(n_i), 1.0 / double(n_i));

    const double m = double(n_i);
    const double k2 = double(n_i - n0);
    const double target = (cfg.epsilon / cfg.h) * (cfg.epsilon / cfg.h);  // S^2 sum tau^2
    const double C = target / S2;
    const double disc = 1.0 - (m / double(n0)) * (1.0 - C * k2);
    if (disc < -1e-9)
        throw std::runtime_error("dd_weights: infeasible constraint (n_i inconsistent with S2)");
    const double a = (1.0 + std::sqrt(std::max(disc, 0.0))) / m;  // larger first-stage root
    const double b = (1.0 - double(n0) * a) / k2;

    std::vector<double> w(std::size_t(n_i), b);
    std::fill(w.begin(), w.begin() + n0, a);
    return w;
}

FirstStage run_first_stage(const std::vector<PopulationSampler>& oracles, int n0) {
    if (oracles.empty()) throw std::invalid_argument("selection: empty oracle list");
    if (n0 < 2) throw std::invalid_argument("selection: n0 must be >= 2");
    FirstStage fs;
    fs.samples.resize(oracles.size());
    for (std::size_t i = 0; i < oracles.size(); ++i) {
        auto& s = fs.samples[i];
        s.reserve(std::size_t(n0));
        for (int j = 0; j < n0; ++j) s.push_back(oracles[i]());
        fs.means.push_back(std::accumulate(s.begin(), s.end(), 0.0) / double(n0));
        fs.variances.push_back(first_stage_variance(s));
    }
    return fs;
}

SelectionResult finish_selection(const std::vector<PopulationSampler>& oracles,
                                 const FirstStage& fs, const SelectionConfig& cfg) {
    validate(cfg);
    const std::size_t k = oracles.size();
    if (fs.samples.size() != k)
        throw std::invalid_argument("finish_selection: first stage does not match oracles");

    SelectionResult res;
    res.per_population.resize(k);

    if (k == 1) {
        // single candidate: no comparison, first stage only
        auto& st = res.per_population[0];
        st.n_i = cfg.n0;
        st.sample_variance = fs.variances[0];
        st.weights.assign(std::size_t(cfg.n0), 1.0 / double(cfg.n0));
        st.weighted_mean = fs.means[0];
        res.best_index = 0;
        res.total_samples = cfg.n0;
        return res;
    }

    for (std::size_t i = 0; i < k; ++i) {
        auto& st = res.per_population[i];
        st.sample_variance = fs.variances[i];
        st.n_i = stopping_time(st.sample_variance, cfg);

        std::vector<double> obs = fs.samples[i];
        obs.reserve(std::size_t(st.n_i));
        for (int j = cfg.n0; j < st.n_i; ++j) obs.push_back(oracles[i]());

        // a capped stopping time can no longer satisfy the weight constraint;
        // fall back to uniform weights for that population
        const bool capped = cfg.max_samples > 0 && st.n_i == cfg.max_samples &&
                            st.n_i < stopping_time(st.sample_variance,
                                                   SelectionConfig{cfg.n0, cfg.delta, cfg.epsilon,
                                                                   cfg.h, 0});
        st.weights = capped ? std::vector<double>(std::size_t(st.n_i), 1.0 / double(st.n_i))
                            : dd_weights(st.n_i, cfg.n0, st.sample_variance, cfg);

        st.weighted_mean = 0.0;
        for (std::size_t j = 0; j < obs.size(); ++j) st.weighted_mean += st.weights[j] * obs[j];
        res.total_samples += st.n_i;
    }

    res.best_index = 0;
    for (std::size_t i = 1; i < k; ++i)
        if (res.per_population[i].weighted_mean >
            res.per_population[res.best_index].weighted_mean)
            res.best_index = static_cast<int>(i);
    return res;
}

SelectionResult select_best(const std::vector<PopulationSampler>& oracles,
                            const SelectionConfig& cfg) {
    if (oracles.size() > 1) validate(cfg);
    return finish_selection(oracles, run_first_stage(oracles, cfg.n0), cfg);
}

double solve_h(int k, double delta, int n0) {
    if (k < 2) throw std::invalid_argument("solve_h: k must be >= 2");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("solve_h: delta in (0,1)");
    if (n0 < 2) throw std::invalid_argument("solve_h: n0 must be >= 2");

    // the embedded hill climb re-solves the same (k, delta, n0) every period
    static std::mutex cache_mutex;
    static std::map<std::tuple<int, double, int>, double> cache;
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        if (auto it = cache.find({k, delta, n0}); it != cache.end()) return it->second;
    }

    const boost::math::students_t dist(double(n0 - 1));
    // P{correct selection at the least-favorable configuration} for given h
    auto p_cs = [&](double h) {
        // Simpson over a range wide enough for heavy t tails
        const double lo = -80.0, hi = 80.0;
        const int n = 8192;  // even
        const double dt = (hi - lo) / n;
        auto f = [&](double t) {
            return std::pow(boost::math::cdf(dist, t + h), k - 1) *
                   boost::math::pdf(dist, t);
        };
        double acc = f(lo) + f(hi);
        for (int i = 1; i < n; ++i) acc += f(lo + i * dt) * (i % 2 ? 4.0 : 2.0);
        return acc * dt / 3.0;
    };

    double lo = 0.0, hi = 1.0;
    while (p_cs(hi) < 1.0 - delta) {
        hi *= 2.0;
        if (hi > 1e4) throw std::runtime_error("solve_h: no root found");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        (p_cs(mid) < 1.0 - delta ? lo : hi) = mid;
    }
    const double h = 0.5 * (lo + hi);
    std::lock_guard<std::mutex> lock(cache_mutex);
    cache[{k, delta, n0}] = h;
    return h;
}

}  // namespace phcq::selection
