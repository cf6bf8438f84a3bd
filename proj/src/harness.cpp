#include "phcq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace phcq::harness {

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw std::invalid_argument("config: " + field + " " + why);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) bad_field("gamma", "must be in (0,1)");
    if (!(cfg.phi >= 0.0 && cfg.phi <= 1.0)) bad_field("phi", "must be in [0,1]");
    if (cfg.sample_size < 1) bad_field("sample_size", "must be >= 1");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) bad_field("delta", "must be in (0,1)");
    if (!(cfg.xi > 0.0 && cfg.xi < 1.0)) bad_field("xi", "must be in (0,1)");
    if (cfg.periods < 0) bad_field("periods", "must be >= 0");
    if (!std::isfinite(cfg.shock)) bad_field("shock", "must be finite");
    if (!(cfg.beta > 0.0 && cfg.beta <= 1.0)) bad_field("beta", "must be in (0,1]");
    if (!(cfg.match_radius > 0.0)) bad_field("match_radius", "must be > 0");
    if (!(cfg.step > 0.0)) bad_field("step", "must be > 0");
    if (cfg.arity < 1) bad_field("arity", "must be >= 1");
    if (!(cfg.step_decay > 0.0 && cfg.step_decay <= 1.0))
        bad_field("step_decay", "must be in (0,1]");
    if (!(cfg.min_step > 0.0)) bad_field("min_step", "must be > 0");
    if (cfg.n0 < 2) bad_field("n0", "must be >= 2");
    if (cfg.h < 0.0) bad_field("h", "must be >= 0");
    if (!(cfg.epsilon_floor > 0.0)) bad_field("epsilon_floor", "must be > 0");
    if (cfg.spread_fraction < 0.0) bad_field("spread_fraction", "must be >= 0");
    if (cfg.max_iters < 1) bad_field("max_iters", "must be >= 1");
    if (cfg.max_samples < 0) bad_field("max_samples", "must be >= 0");
    if (cfg.rollout_horizon < 1) bad_field("rollout_horizon", "must be >= 1");
}

namespace {

// stream index tags inside one period's key space
constexpr std::uint64_t kTagEnvStep = 0;
constexpr std::uint64_t kTagSemiChoose = 1;
constexpr std::uint64_t kTagPhcBase = 2;

struct PeriodRow {
    double coefficient;
    double reward;
    long env_samples;
    long selection_samples;
};

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);

    const learner::RewardParams rp{cfg.tau1, cfg.tau2, cfg.gamma, cfg.phi};
    const learner::LearnParams lp{cfg.beta};
    // the step size carries over between periods: each period resumes the
    // climb at the granularity where the previous exploration terminated,
    // so a converged run keeps refining instead of re-jittering at full step
    policy::TransformSet ts{cfg.step, cfg.arity};

    phc::PhcConfig pcfg;
    pcfg.delta_total = cfg.delta;
    pcfg.n0 = cfg.n0;
    pcfg.max_iters = cfg.max_iters;
    pcfg.epsilon_floor = cfg.epsilon_floor;
    pcfg.spread_fraction = cfg.spread_fraction;
    pcfg.h = cfg.h;
    pcfg.max_samples = cfg.max_samples;
    pcfg.step_decay = cfg.step_decay;
    pcfg.min_step = cfg.min_step;

    phc::SemiUniformConfig sucfg{cfg.xi, policy::make_catalog()};

    learner::QTable table(cfg.match_radius);
    policy::Policy pi{0.0};

    env::StateSample sample = env::apply_shock(
        env::StateSample(std::size_t(cfg.sample_size)), cfg.shock);
    // candidate policies are always evaluated against the reference shock
    // scenario; the live sample decays toward the origin, where every policy
    // looks alike and selection would be driven by noise alone
    const env::StateSample ref_sample = sample;

    long env_samples = 0;
    long selection_samples = 0;
    std::vector<PeriodRow> rows;
    rows.reserve(std::size_t(cfg.periods));

    for (int t = 0; t < cfg.periods; ++t) {
        const std::uint64_t period_key = rng::fork(cfg.seed, std::uint64_t(t));

        if (cfg.strategy == Strategy::phc) {
            // each candidate oracle draws eta over a fresh Monte Carlo rollout
            // of the reference sample; keys are split per (round, slot, draw)
            phc::SamplerFactory factory = [&](const policy::Policy& cand, int round, int slot) {
                const std::uint64_t cand_key = rng::fork(
                    rng::fork(period_key, kTagPhcBase + std::uint64_t(round)),
                    std::uint64_t(slot));
                auto counter = std::make_shared<std::uint64_t>(0);
                const double c = cand.c;
                return selection::PopulationSampler([&, cand_key, counter, c]() {
                    const auto q = env::rollout_returns(ref_sample, c, cfg.rollout_horizon,
                                                        cfg.gamma, cfg.tau1, cfg.tau2,
                                                        rng::fork(cand_key, (*counter)++));
                    env_samples += long(ref_sample.size()) * cfg.rollout_horizon;
                    return learner::eta(q, cfg.phi);
                });
            };
            phc::PhcTrace trace;
            pi = phc::phc_explore(pi, factory, ts, pcfg, &trace);
            selection_samples += trace.total_samples;
            if (!trace.rounds.empty()) ts.step = trace.rounds.back().step;
        } else {
            // exploit the best policy measured so far (by robust cluster value
            // on the current sample); nothing measured yet keeps the incumbent
            policy::Policy best = pi;
            double best_v = -std::numeric_limits<double>::infinity();
            for (const auto& cand : table.known_policies()) {
                double v = 0.0;
                for (const auto& x : sample)
                    v += learner::robust_value(x, {cand}, table, cfg.phi);
                v /= double(sample.size());
                if (v > best_v) {
                    best_v = v;
                    best = cand;
                }
            }
            rng::Stream choose(rng::fork(period_key, kTagSemiChoose));
            pi = phc::semi_uniform_choose(best, sucfg, choose);
        }

        // apply the chosen policy to the sample
        std::vector<double> actions(sample.size());
        for (std::size_t i = 0; i < sample.size(); ++i) actions[i] = policy::act(pi, sample[i]);
        const auto next = env::step_sample(sample, actions, rng::fork(period_key, kTagEnvStep));
        env_samples += long(sample.size());

        // robust reward over the post-action sample
        std::vector<double> rewards(next.size());
        for (std::size_t i = 0; i < next.size(); ++i)
            rewards[i] = learner::instant_reward(next[i], rp);
        const double r_tilde = learner::robust_reward(rewards, cfg.phi);

        // per-instance robust q-updates, then cluster maintenance
        const auto candidates = policy::neighbors(pi, ts);
        for (std::size_t i = 0; i < sample.size(); ++i) {
            const learner::QCluster* c = table.find(pi, sample[i]);
            const double q_old = c ? c->q_mean : 0.0;
            const double v_next = learner::robust_value(next[i], candidates, table, cfg.phi);
            const double p_w = learner::state_weight(sample[i], sample, table, pi);
            const double q_new = learner::robust_q_update(q_old, r_tilde, v_next, p_w, lp,
                                                          cfg.gamma);
            table.absorb(pi, sample[i], q_new);
        }
        table.maintain(pi);

        rows.push_back(PeriodRow{pi.c, r_tilde, env_samples, selection_samples});
        sample = next;
    }

    // assemble records; the final-policy average needs the full coefficient path
    std::vector<RunRecord> records;
    records.reserve(rows.size());
    const double c_final = rows.empty() ? 0.0 : rows.back().coefficient;
    double cum = 0.0, disc = 1.0;
    int active = 0;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        cum += disc * rows[t].reward;
        disc *= cfg.gamma;
        if (rows[t].coefficient == c_final) ++active;
        RunRecord r;
        r.period = static_cast<int>(t);
        r.coefficient = rows[t].coefficient;
        r.reward = rows[t].reward;
        r.cumulative_reward = cum;
        r.avg_final_policy = cum / double(std::max(active, 1));
        r.env_samples = rows[t].env_samples;
        r.selection_samples = rows[t].selection_samples;
        records.push_back(r);
    }
    return records;
}

int periods_to_convergence(const std::vector<RunRecord>& records, double band) {
    if (records.empty()) return 0;
    const double c_final = records.back().coefficient;
    int first = static_cast<int>(records.size());  // 1-based period of entry into the band
    for (std::size_t t = records.size(); t-- > 0;) {
        if (std::abs(records[t].coefficient - c_final) > band) break;
        first = static_cast<int>(t) + 1;
    }
    return first;
}

namespace {

bool same_but_strategy(const ExperimentConfig& a, const ExperimentConfig& b) {
    ExperimentConfig c = b;
    c.strategy = a.strategy;
    return a.gamma == c.gamma && a.tau1 == c.tau1 && a.tau2 == c.tau2 && a.phi == c.phi &&
           a.sample_size == c.sample_size && a.delta == c.delta && a.xi == c.xi &&
           a.periods == c.periods && a.shock == c.shock && a.seed == c.seed &&
           a.beta == c.beta && a.match_radius == c.match_radius && a.step == c.step &&
           a.arity == c.arity && a.step_decay == c.step_decay && a.min_step == c.min_step &&
           a.n0 == c.n0 && a.h == c.h && a.epsilon_floor == c.epsilon_floor &&
           a.spread_fraction == c.spread_fraction && a.max_iters == c.max_iters &&
           a.max_samples == c.max_samples && a.rollout_horizon == c.rollout_horizon;
}

}  // namespace

ComparisonSummary compare_strategies(const ExperimentConfig& cfg_phc,
                                     const ExperimentConfig& cfg_semi,
                                     const std::vector<std::uint64_t>& seeds) {
    if (!same_but_strategy(cfg_phc, cfg_semi))
        throw std::invalid_argument("compare_strategies: configs differ beyond strategy");
    if (seeds.empty()) throw std::invalid_argument("compare_strategies: no seeds");

    ComparisonSummary sum;
    for (const auto seed : seeds) {
        ExperimentConfig a = cfg_phc;
        a.seed = seed;
        ExperimentConfig b = cfg_semi;
        b.seed = seed;

        const auto ra = run_experiment(a);
        const auto rb = run_experiment(b);
        const int pa = periods_to_convergence(ra);
        const int pb = periods_to_convergence(rb);
        sum.phc.periods_to_convergence.push_back(pa);
        sum.phc.final_coefficients.push_back(ra.empty() ? 0.0 : ra.back().coefficient);
        sum.semi.periods_to_convergence.push_back(pb);
        sum.semi.final_coefficients.push_back(rb.empty() ? 0.0 : rb.back().coefficient);
        sum.speedups.push_back(double(pb) / double(std::max(pa, 1)));
    }
    sum.median_speedup = median(sum.speedups);
    return sum;
}

void emit_csv(const std::vector<RunRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    out << "period,coefficient,reward,cumulative_reward,avg_final_policy,"
           "env_samples,selection_samples\n";
    char line[512];
    for (const auto& r : records) {
        std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%ld,%ld\n", r.period,
                      r.coefficient, r.reward, r.cumulative_reward, r.avg_final_policy,
                      r.env_samples, r.selection_samples);
        out << line;
    }
    if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

std::vector<RunRecord> parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_csv: cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<RunRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        RunRecord r;
        if (std::sscanf(line.c_str(), "%d,%lg,%lg,%lg,%lg,%ld,%ld", &r.period, &r.coefficient,
                        &r.reward, &r.cumulative_reward, &r.avg_final_policy, &r.env_samples,
                        &r.selection_samples) != 7)
            throw std::runtime_error("parse_csv: malformed row in " + path);
        out.push_back(r);
    }
    return out;
}

void emit_plot_script(const std::vector<std::string>& csv_paths, const std::string& out_path) {
    if (csv_paths.empty()) throw std::invalid_argument("emit_plot_script: no csv paths");
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("emit_plot_script: cannot open " + out_path);
    out << "#!/usr/bin/env python3\n"
           "import csv\n"
           "import matplotlib.pyplot as plt\n\n"
           "paths = [\n";
    for (const auto& p : csv_paths) out << "    \"" << p << "\",\n";
    out << "]\n\n"
           "fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))\n"
           "for path in paths:\n"
           "    with open(path) as f:\n"
           "        rows = list(csv.DictReader(f))\n"
           "    t = [int(r['period']) for r in rows]\n"
           "    ax1.plot(t, [float(r['coefficient']) for r in rows], label=path)\n"
           "    ax2.plot(t, [float(r['avg_final_policy']) for r in rows], label=path)\n"
           "ax1.set_xlabel('period'); ax1.set_ylabel('policy coefficient')\n"
           "ax1.set_title('Convergence to the optimal policy')\n"
           "ax2.set_xlabel('period'); ax2.set_ylabel('avg cumulative reward')\n"
           "ax2.set_title('Convergence of the average cumulative reward')\n"
           "ax1.legend(); ax2.legend()\n"
           "fig.tight_layout()\n"
           "fig.savefig('phcq_plots.png', dpi=150)\n"
           "print('wrote phcq_plots.png')\n";
    if (!out) throw std::runtime_error("emit_plot_script: write failed for " + out_path);
}

}  // namespace phcq::harness
