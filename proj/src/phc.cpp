#include "phcq/phc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phcq::phc {

void validate(const PhcConfig& cfg) {
    if (!(cfg.delta_total > 0.0 && cfg.delta_total < 1.0))
        throw std::invalid_argument("phc: delta_total must be in (0,1)");
    if (cfg.n0 < 2) throw std::invalid_argument("phc: n0 must be >= 2");
    if (cfg.max_iters < 1) throw std::invalid_argument("phc: max_iters must be >= 1");
    if (!(cfg.epsilon_floor > 0.0)) throw std::invalid_argument("phc: epsilon_floor must be > 0");
    if (!(cfg.spread_fraction >= 0.0))
        throw std::invalid_argument("phc: spread_fraction must be >= 0");
    if (!(cfg.step_decay > 0.0 && cfg.step_decay <= 1.0))
        throw std::invalid_argument("phc: step_decay must be in (0,1]");
    if (!(cfg.min_step > 0.0)) throw std::invalid_argument("phc: min_step must be > 0");
}

double epsilon_schedule(const std::vector<double>& etas, const PhcConfig& cfg) {
    if (etas.empty()) throw std::invalid_argument("epsilon_schedule: no candidates");
    const auto [lo, hi] = std::minmax_element(etas.begin(), etas.end());
    return std::max(cfg.epsilon_floor, cfg.spread_fraction * (*hi - *lo));
}

double delta_schedule(int omega, const PhcConfig& cfg) {
    if (omega < 0) throw std::invalid_argument("delta_schedule: omega must be >= 0");
    return cfg.delta_total * std::ldexp(1.0, -(omega + 1));
}

policy::Policy phc_explore(const policy::Policy& pi0, const SamplerFactory& factory,
                           const policy::TransformSet& ts, const PhcConfig& cfg,
                           PhcTrace* trace) {
    validate(cfg);
    policy::Policy pi = pi0;
    double step = ts.step;

    for (int omega = 0; omega < cfg.max_iters; ++omega) {
        const auto cands = policy::neighbors(pi, policy::TransformSet{step, ts.arity});
        if (cands.size() == 1) return pi;  // identity-only transform set

        std::vector<selection::PopulationSampler> oracles;
        oracles.reserve(cands.size());
        int incumbent = 0;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (cands[i].c == pi.c) incumbent = static_cast<int>(i);
            oracles.push_back(factory(cands[i], omega, static_cast<int>(i)));
        }

        const double delta_w = delta_schedule(omega, cfg);
        selection::SelectionConfig scfg;
        scfg.n0 = cfg.n0;
        scfg.delta = delta_w;
        scfg.max_samples = cfg.max_samples;
        scfg.h = cfg.h > 0.0
                     ? cfg.h
                     : selection::solve_h(static_cast<int>(cands.size()), delta_w, cfg.n0);

        const auto fs = selection::run_first_stage(oracles, cfg.n0);
        scfg.epsilon = epsilon_schedule(fs.means, cfg);
        const auto res = selection::finish_selection(oracles, fs, scfg);

        if (trace) {
            PhcRound r;
            r.omega = omega;
            r.step = step;
            r.epsilon = scfg.epsilon;
            r.delta = delta_w;
            for (const auto& c : cands) r.candidate_coeffs.push_back(c.c);
            for (const auto& st : res.per_population) {
                r.eta_bars.push_back(st.weighted_mean);
                r.n_i.push_back(st.n_i);
            }
            r.winner = res.best_index;
            r.samples = res.total_samples;
            trace->rounds.push_back(std::move(r));
            trace->total_samples += res.total_samples;
        }

        if (res.best_index == incumbent) {
            // re-selected: refine the neighborhood, or stop at the finest step
            if (cfg.step_decay < 1.0 && step * cfg.step_decay >= cfg.min_step) {
                step *= cfg.step_decay;
                continue;
            }
            return pi;
        }
        pi = cands[std::size_t(res.best_index)];
    }

    if (trace) trace->truncated = true;
    return pi;
}

policy::Policy semi_uniform_choose(const policy::Policy& best, const SemiUniformConfig& cfg,
                                   rng::Stream& stream) {
    if (cfg.catalog.policies.empty())
        throw std::invalid_argument("semi_uniform_choose: empty catalog");
    if (!(cfg.xi > 0.0 && cfg.xi < 1.0))
        throw std::invalid_argument("semi_uniform_choose: xi must be in (0,1)");
    if (stream.next_double() < cfg.xi) {
        const auto idx = static_cast<std::size_t>(stream.next_double() *
                                                  double(cfg.catalog.policies.size()));
        return cfg.catalog.policies[std::min(idx, cfg.catalog.policies.size() - 1)];
    }
    return best;
}

}  // namespace phcq::phc
