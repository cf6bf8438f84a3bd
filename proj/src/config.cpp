#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "phcq/harness.hpp"

namespace phcq::harness {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct Setter {
    ExperimentConfig& cfg;

    void apply(const std::string& key, const std::string& raw) {
        if (key == "experiment.strategy") {
            if (raw == "phc")
                cfg.strategy = Strategy::phc;
            else if (raw == "semi_uniform" || raw == "semi")
                cfg.strategy = Strategy::semi_uniform;
            else
                throw std::invalid_argument("config: strategy must be phc or semi_uniform");
            return;
        }
        std::istringstream in(raw);
        bool ok = false;
        if (key == "experiment.gamma") ok = bool(in >> cfg.gamma);
        else if (key == "experiment.tau1") ok = bool(in >> cfg.tau1);
        else if (key == "experiment.tau2") ok = bool(in >> cfg.tau2);
        else if (key == "experiment.phi") ok = bool(in >> cfg.phi);
        else if (key == "experiment.sample_size") ok = bool(in >> cfg.sample_size);
        else if (key == "experiment.delta") ok = bool(in >> cfg.delta);
        else if (key == "experiment.xi") ok = bool(in >> cfg.xi);
        else if (key == "experiment.periods") ok = bool(in >> cfg.periods);
        else if (key == "experiment.shock") ok = bool(in >> cfg.shock);
        else if (key == "experiment.seed") ok = bool(in >> cfg.seed);
        else if (key == "learner.beta") ok = bool(in >> cfg.beta);
        else if (key == "learner.match_radius") ok = bool(in >> cfg.match_radius);
        else if (key == "policy.step") ok = bool(in >> cfg.step);
        else if (key == "policy.arity") ok = bool(in >> cfg.arity);
        else if (key == "policy.step_decay") ok = bool(in >> cfg.step_decay);
        else if (key == "policy.min_step") ok = bool(in >> cfg.min_step);
        else if (key == "selection.n0") ok = bool(in >> cfg.n0);
        else if (key == "selection.h") ok = bool(in >> cfg.h);
        else if (key == "selection.max_samples") ok = bool(in >> cfg.max_samples);
        else if (key == "phc.epsilon_floor") ok = bool(in >> cfg.epsilon_floor);
        else if (key == "phc.spread_fraction") ok = bool(in >> cfg.spread_fraction);
        else if (key == "phc.max_iters") ok = bool(in >> cfg.max_iters);
        else if (key == "phc.rollout_horizon") ok = bool(in >> cfg.rollout_horizon);
        else
            throw std::invalid_argument("config: unknown key " + key);
        if (!ok) throw std::invalid_argument("config: bad value for " + key + ": " + raw);
    }
};

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    ExperimentConfig cfg;
    Setter setter{cfg};
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[' && s.back() == ']') {
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        setter.apply(section.empty() ? key : section + "." + key, val);
    }
    validate(cfg);
    return cfg;
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("config: cannot open " + path + " for writing");
    char buf[2048];
    std::snprintf(buf, sizeof buf,
                  "[experiment]\n"
                  "gamma = %.17g\ntau1 = %.17g\ntau2 = %.17g\nphi = %.17g\n"
                  "sample_size = %d\ndelta = %.17g\nxi = %.17g\nperiods = %d\n"
                  "shock = %.17g\nseed = %llu\nstrategy = %s\n\n"
                  "[learner]\nbeta = %.17g\nmatch_radius = %.17g\n\n"
                  "[policy]\nstep = %.17g\narity = %d\nstep_decay = %.17g\nmin_step = %.17g\n\n"
                  "[selection]\nn0 = %d\nh = %.17g\nmax_samples = %d\n\n"
                  "[phc]\nepsilon_floor = %.17g\nspread_fraction = %.17g\n"
                  "max_iters = %d\nrollout_horizon = %d\n",
                  cfg.gamma, cfg.tau1, cfg.tau2, cfg.phi, cfg.sample_size, cfg.delta, cfg.xi,
                  cfg.periods, cfg.shock,
                  static_cast<unsigned long long>(cfg.seed),
                  cfg.strategy == Strategy::phc ? "phc" : "semi_uniform", cfg.beta,
                  cfg.match_radius, cfg.step, cfg.arity, cfg.step_decay, cfg.min_step, cfg.n0,
                  cfg.h, cfg.max_samples, cfg.epsilon_floor, cfg.spread_fraction, cfg.max_iters,
                  cfg.rollout_horizon);
    out << buf;
}

}  // namespace phcq::harness
