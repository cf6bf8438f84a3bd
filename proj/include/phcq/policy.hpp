#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "phcq/environment.hpp"

// Linear feedback policies a = c*x1 and their local perturbation sets.
namespace phcq::policy {

struct Policy {
    double c = 0.0;
};

inline double act(const Policy& pi, const env::StateVec& x) { return pi.c * x.x1; }

// Symmetric fan of perturbed policies around the current one; always
// contains the current policy itself so hill-climbing can stand still.
struct TransformSet {
    double step = 0.05;
    int arity = 3;
};

inline std::vector<Policy> neighbors(const Policy& pi, const TransformSet& ts) {
    if (ts.arity < 1) throw std::invalid_argument("neighbors: arity must be >= 1");
    if (ts.step <= 0.0 && ts.arity > 1) throw std::invalid_argument("neighbors: step must be > 0");
    std::vector<Policy> out;
    out.reserve(static_cast<std::size_t>(ts.arity));
    const int half = (ts.arity - 1) / 2;
    // arity even: one extra neighbor on the negative side
    const int lo = -half - ((ts.arity - 1) % 2);
    for (int i = lo; i <= half; ++i) out.push_back(Policy{pi.c + ts.step * i});
    return out;
}

// Discretized coefficient grid for the semi-uniform baseline:
// -2.40, -2.39, ..., 0.29, 0.30.
struct PolicyCatalog {
    std::vector<Policy> policies;
};

inline PolicyCatalog make_catalog(double lo = -2.40, double hi = 0.30, double spacing = 0.01) {
    PolicyCatalog cat;
    const int n = static_cast<int>(std::lround((hi - lo) / spacing)) + 1;
    cat.policies.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cat.policies.push_back(Policy{lo + spacing * i});
    return cat;
}

}  // namespace phcq::policy
