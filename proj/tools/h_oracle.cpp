// Monte Carlo oracle for the two-stage selection constant h(k, delta, n0).
//
// The weighted mean of each population standardizes to a t(n0-1) pivot, so at
// the least-favorable configuration (top mean exactly epsilon above the rest)
//   P{correct selection} = P{ T_best + h > T_j for all j != best }
// with T iid t(n0-1). This tool simulates that probability on a fixed set of
// t-draws (common random numbers, monotone in h) and bisects for the h where
// it equals 1 - delta. It is deliberately independent of the quadrature
// solver in the library so the two can cross-check each other.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phcq/rng.hpp"

namespace {

double t_draw(phcq::rng::Stream& s, int nu) {
    double chi2 = 0.0;
    for (int i = 0; i < nu; ++i) {
        const double z = s.normal();
        chi2 += z * z;
    }
    return s.normal() / std::sqrt(chi2 / double(nu));
}

}  // namespace

double mc_solve_h(int k, double delta, int n0, long trials, std::uint64_t seed) {
    const int nu = n0 - 1;
    phcq::rng::Stream s(seed);
    // T[trial] = (best pivot, max of the k-1 competitor pivots)
    std::vector<std::pair<double, double>> t(static_cast<std::size_t>(trials));
    for (auto& [best, rest] : t) {
        best = t_draw(s, nu);
        rest = t_draw(s, nu);
        for (int j = 2; j < k; ++j) rest = std::max(rest, t_draw(s, nu));
    }
    auto p_cs = [&](double h) {
        long wins = 0;
        for (const auto& [best, rest] : t) wins += (best + h > rest);
        return double(wins) / double(trials);
    };
    double lo = 0.0, hi = 32.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (p_cs(mid) < 1.0 - delta ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

#ifndef PHCQ_H_ORACLE_NO_MAIN
int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo solver for the two-stage selection constant h"};
    int k = 3, n0 = 10;
    double delta = 0.05;
    long trials = 2000000;
    std::uint64_t seed = 20240601;
    app.add_option("-k,--populations", k, "number of populations")->check(CLI::Range(2, 1000));
    app.add_option("-d,--delta", delta, "error probability");
    app.add_option("-n,--n0", n0, "first-stage sample size")->check(CLI::Range(2, 1000000));
    app.add_option("-t,--trials", trials, "Monte Carlo trials");
    app.add_option("-s,--seed", seed, "RNG seed");
    CLI11_PARSE(app, argc, argv);

    const double h = mc_solve_h(k, delta, n0, trials, seed);
    std::printf("h(k=%d, delta=%g, n0=%d) = %.6f  (%ld trials, se ~ %.2g on P{CS})\n", k, delta,
                n0, h, trials, std::sqrt(delta * (1 - delta) / double(trials)));
    return 0;
}
#endif
