#include <stdexcept>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include <doctest.h>

#include "phcq/learner.hpp"
#include "phcq/rng.hpp"

using namespace phcq;
using env::StateVec;
using learner::LearnParams;
using learner::QTable;
using learner::RewardParams;
using policy::Policy;

TEST_CASE("instant_reward is the quadratic penalty on x2, x3") {
    const RewardParams p;
    CHECK(learner::instant_reward(StateVec{7, 0, 0}, p) == 0.0);
    CHECK(learner::instant_reward(StateVec{0, 1, 2}, p) == doctest::Approx(-25.0));
    CHECK(learner::instant_reward(StateVec{0, -1, 2}, p) ==
          learner::instant_reward(StateVec{0, 1, 2}, p));
}

TEST_CASE("robust_reward") {
    CHECK(learner::robust_reward(std::vector<double>(8, 10.0), 0.5) == doctest::Approx(5.0));
    // mean 10, sample variance 4
    CHECK(learner::robust_reward({8, 12, 8, 12, 8, 12}, 0.5) ==
          doctest::Approx(0.5 * 10 - 0.5 * 4.8));
    CHECK_THROWS_AS((learner::robust_reward({}, 0.5)), std::invalid_argument);

    SUBCASE("phi = 1 is the sample mean, phi = 0 is minus the variance") {
        const std::vector<double> v{1, 2, 3, 4, 10};
        double mean = 0;
        for (double x : v) mean += x;
        mean /= double(v.size());
        double var = 0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= double(v.size() - 1);
        CHECK(learner::robust_reward(v, 1.0) == doctest::Approx(mean));
        CHECK(learner::robust_reward(v, 0.0) == doctest::Approx(-var));
    }
    SUBCASE("strictly decreasing in variance at fixed mean (phi < 1)") {
        // mean 0 in both, spread differs
        CHECK(learner::robust_reward({-1, 1}, 0.5) > learner::robust_reward({-2, 2}, 0.5));
        CHECK(learner::robust_reward({-1, 1}, 0.25) > learner::robust_reward({-3, 3}, 0.25));
    }
}

TEST_CASE("eta") {
    CHECK(learner::eta({1, 1, 1}, 0.5) == doctest::Approx(0.5));
    CHECK(learner::eta({0, 2}, 0.5) == doctest::Approx(-0.5));
    CHECK(learner::eta({1, 2, 3}, 0.0) == doctest::Approx(-1.0));
    CHECK_THROWS_AS((learner::eta({}, 0.5)), std::invalid_argument);
    rng::Stream s(3);
    for (int i = 0; i < 20; ++i) {
        const double c = s.uniform(-5, 5);
        const double phi = s.next_double();
        CHECK(learner::eta(std::vector<double>(5, c), phi) == doctest::Approx(phi * c));
    }
}

TEST_CASE("q updates") {
    const LearnParams lp{0.5};
    SUBCASE("robust update arithmetic") {
        CHECK(learner::robust_q_update(0.0, 1.0, 0.0, 1.0, lp, 0.9) == doctest::Approx(0.5));
        CHECK(learner::robust_q_update(3.0, 100.0, 50.0, 0.0, lp, 0.9) == 3.0);
        const double fixed = 1.0 + 0.9 * 2.0;
        CHECK(learner::robust_q_update(fixed, 1.0, 2.0, 1.0, lp, 0.9) == doctest::Approx(fixed));
    }
    SUBCASE("standard update arithmetic") {
        CHECK(learner::standard_q_update(99.0, 1.0, 2.0, LearnParams{1.0}, 0.9) ==
              doctest::Approx(1.0 + 0.9 * 2.0));
        CHECK(learner::standard_q_update(0.0, 1.0, 0.0, lp, 0.9) == doctest::Approx(0.5));
        CHECK_THROWS_AS((learner::standard_q_update(0, 0, 0, LearnParams{0.0}, 0.9)), std::invalid_argument);
    }
    SUBCASE("robust equals standard at P = 1") {
        rng::Stream s(8);
        for (int i = 0; i < 100; ++i) {
            const double q = s.uniform(-10, 10), r = s.uniform(-10, 10), v = s.uniform(-10, 10);
            const LearnParams b{s.uniform(0.05, 1.0)};
            const double g = s.uniform(0.1, 0.99);
            CHECK(learner::robust_q_update(q, r, v, 1.0, b, g) ==
                  doctest::Approx(learner::standard_q_update(q, r, v, b, g)).epsilon(1e-12));
        }
    }
    SUBCASE("bounded rewards keep q within +-M/(1-gamma)") {
        rng::Stream s(9);
        const double M = 5.0, gamma = 0.9, B = M / (1.0 - gamma);
        double q = 0.0;
        for (int i = 0; i < 5000; ++i) {
            const double r = s.uniform(-M, M);
            const double v = s.uniform(-B, B);
            q = learner::robust_q_update(q, r, v, s.next_double(), LearnParams{s.uniform(0.05, 1.0)},
                                         gamma);
            CHECK(std::abs(q) <= B + 1e-9);
        }
    }
}

TEST_CASE("cluster absorb") {
    QTable t(0.25);
    const Policy pi{-0.5};
    SUBCASE("cold start makes a singleton") {
        t.absorb(pi, StateVec{1, 0, 0}, 2.5);
        const auto* cs = t.clusters(pi);
        REQUIRE(cs);
        REQUIRE(cs->size() == 1);
        CHECK((*cs)[0].count == 1);
        CHECK((*cs)[0].q_mean == 2.5);
        CHECK((*cs)[0].variance() == 0.0);
    }
    SUBCASE("identical observations give zero variance") {
        t.absorb(pi, StateVec{1, 0, 0}, 2.5);
        t.absorb(pi, StateVec{1, 0, 0}, 2.5);
        const auto* cs = t.clusters(pi);
        REQUIRE(cs->size() == 1);
        CHECK((*cs)[0].count == 2);
        CHECK((*cs)[0].variance() == 0.0);
    }
    SUBCASE("two-point statistics") {
        t.absorb(pi, StateVec{1, 0, 0}, 0.0);
        t.absorb(pi, StateVec{1, 0, 0}, 2.0);
        const auto* cs = t.clusters(pi);
        REQUIRE(cs->size() == 1);
        CHECK((*cs)[0].q_mean == doctest::Approx(1.0));
        CHECK((*cs)[0].variance() == doctest::Approx(2.0));
    }
}

TEST_CASE("cluster maintain") {
    const Policy pi{0.0};
    SUBCASE("clusters farther apart than the radius are untouched") {
        QTable t(0.25);
        t.absorb(pi, StateVec{0, 0, 0}, 0.0);
        t.absorb(pi, StateVec{5, 5, 5}, 2.0);
        REQUIRE(t.clusters(pi)->size() == 2);
        t.maintain(pi);
        CHECK(t.clusters(pi)->size() == 2);
    }
    SUBCASE("coincident observations pool to batch statistics") {
        QTable t(0.25);
        t.absorb(pi, StateVec{0, 0, 0}, 0.0);
        t.absorb(pi, StateVec{0, 0, 0}, 0.0);
        t.absorb(pi, StateVec{0, 0, 0}, 3.0);
        const auto* cs = t.clusters(pi);
        REQUIRE(cs->size() == 1);
        CHECK((*cs)[0].q_mean == doctest::Approx(1.0));
        // batch oracle on {0,0,3}: mean 1, sample variance 3
        CHECK((*cs)[0].variance() == doctest::Approx(3.0));
    }
    SUBCASE("drifting centroids merge with pooled mean/variance") {
        // cluster B's running-mean centroid is dragged toward A until the
        // two fall within the radius; maintain must then merge them
        QTable t(1.0);
        t.absorb(pi, StateVec{0, 0, 0}, 10.0);     // A at 0
        t.absorb(pi, StateVec{1.5, 0, 0}, 2.0);    // B at 1.5
        t.absorb(pi, StateVec{0.76, 0, 0}, 4.0);   // nearer B: centroid 1.13
        t.absorb(pi, StateVec{0.6, 0, 0}, 6.0);    // nearer B: centroid ~0.953
        REQUIRE(t.clusters(pi)->size() == 2);
        t.maintain(pi);
        const auto* cs = t.clusters(pi);
        REQUIRE(cs->size() == 1);
        CHECK((*cs)[0].count == 4);
        // batch oracle on q's {10, 2, 4, 6}
        CHECK((*cs)[0].q_mean == doctest::Approx(5.5).epsilon(1e-9));
        CHECK((*cs)[0].variance() == doctest::Approx(35.0 / 3.0).epsilon(1e-9));
        CHECK((*cs)[0].centroid.x1 == doctest::Approx((1.5 + 0.76 + 0.6) / 4.0).epsilon(1e-9));
    }
}

TEST_CASE("absorb-then-maintain equals batch recomputation on a raw stream") {
    rng::Stream s(21);
    const Policy pi{-0.7};
    // two well-separated centers; observations scattered tightly around each
    const StateVec centers[2] = {StateVec{0, 0, 0}, StateVec{10, 10, 10}};
    QTable t(0.25);
    std::vector<double> qs[2];
    for (int i = 0; i < 100; ++i) {
        const int which = i % 2;
        StateVec x = centers[which];
        x.x1 += s.uniform(-0.01, 0.01);
        const double q = s.uniform(-3, 3);
        qs[which].push_back(q);
        t.absorb(pi, x, q);
        t.maintain(pi);
    }
    const auto* cs = t.clusters(pi);
    REQUIRE(cs);
    REQUIRE(cs->size() == 2);
    for (const auto& c : *cs) {
        const int which = c.centroid.x1 > 5 ? 1 : 0;
        const auto& raw = qs[which];
        double mean = 0;
        for (double q : raw) mean += q;
        mean /= double(raw.size());
        double var = 0;
        for (double q : raw) var += (q - mean) * (q - mean);
        var /= double(raw.size() - 1);
        CHECK(c.count == int(raw.size()));
        CHECK(c.q_mean == doctest::Approx(mean).epsilon(1e-9));
        CHECK(c.variance() == doctest::Approx(var).epsilon(1e-9));
    }
}

TEST_CASE("robust_value") {
    const double phi = 0.5;
    SUBCASE("zero-variance cluster") {
        QTable t(0.25);
        t.absorb(Policy{0.1}, StateVec{1, 1, 1}, 2.0);
        CHECK(learner::robust_value(StateVec{1, 1, 1}, {Policy{0.1}}, t, phi) ==
              doctest::Approx(2.0));
    }
    SUBCASE("max of variance-penalized values") {
        QTable t(0.25);
        t.absorb(Policy{0.1}, StateVec{0, 0, 0}, 1.0);
        t.absorb(Policy{0.1}, StateVec{0, 0, 0}, 1.0);  // Qbar 1, S2 0
        t.absorb(Policy{0.2}, StateVec{0, 0, 0}, 1.0);
        t.absorb(Policy{0.2}, StateVec{0, 0, 0}, 5.0);  // Qbar 3, S2 8 -> 3 - 4 = -1
        CHECK(learner::robust_value(StateVec{0, 0, 0}, {Policy{0.1}, Policy{0.2}}, t, phi) ==
              doctest::Approx(1.0));
    }
    SUBCASE("cold start scores zero") {
        QTable t(0.25);
        CHECK(learner::robust_value(StateVec{1, 2, 3}, {Policy{0.0}}, t, phi) == 0.0);
    }
}

TEST_CASE("state_weight") {
    const Policy pi{0.0};
    SUBCASE("identical sample carries all mass") {
        QTable t(0.25);
        env::StateSample sample(10, StateVec{1, 1, 1});
        CHECK(learner::state_weight(sample[0], sample, t, pi) == 1.0);
    }
    SUBCASE("even split across two clusters") {
        QTable t(0.25);
        t.absorb(pi, StateVec{0, 0, 0}, 0.0);
        t.absorb(pi, StateVec{10, 0, 0}, 0.0);
        env::StateSample sample;
        for (int i = 0; i < 5; ++i) sample.push_back(StateVec{0, 0, 0});
        for (int i = 0; i < 5; ++i) sample.push_back(StateVec{10, 0, 0});
        CHECK(learner::state_weight(sample[0], sample, t, pi) == doctest::Approx(0.5));
        CHECK(learner::state_weight(sample[9], sample, t, pi) == doctest::Approx(0.5));
    }
    SUBCASE("empirical frequency 10/50 and weights sum to 1") {
        QTable t(0.25);
        t.absorb(pi, StateVec{0, 0, 0}, 0.0);
        t.absorb(pi, StateVec{10, 0, 0}, 0.0);
        env::StateSample sample;
        for (int i = 0; i < 10; ++i) sample.push_back(StateVec{0, 0, 0});
        for (int i = 0; i < 40; ++i) sample.push_back(StateVec{10, 0, 0});
        CHECK(learner::state_weight(sample[0], sample, t, pi) == doctest::Approx(0.2));
        CHECK(learner::state_weight(sample[49], sample, t, pi) == doctest::Approx(0.8));
        // sum over the distinct clusters hit by the sample
        CHECK(learner::state_weight(sample[0], sample, t, pi) +
                  learner::state_weight(sample[49], sample, t, pi) ==
              doctest::Approx(1.0));
    }
}

TEST_CASE("snapshot writes one line per cluster") {
    QTable t(0.25);
    t.absorb(Policy{-0.5}, StateVec{1, 2, 3}, 4.0);
    t.absorb(Policy{0.25}, StateVec{0, 0, 0}, -1.0);
    const std::string path = "qtable_snapshot_test.txt";
    t.save_snapshot(path);
    std::ifstream in(path);
    REQUIRE(in.good());
    int lines = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 2);
    std::remove(path.c_str());
}
