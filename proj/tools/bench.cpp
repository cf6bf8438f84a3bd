// Serial vs OpenMP throughput of the Monte Carlo kernels.
#include <chrono>
#include <cstdio>
#include <vector>

#include "phcq/environment.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& f, int reps) {
    f();  // warm-up
    const auto t0 = clock_type::now();
    for (int i = 0; i < reps; ++i) f();
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    using namespace phcq;

    volatile double sink = 0.0;

    std::printf("%-28s %10s %10s %8s\n", "kernel", "serial ms", "omp ms", "speedup");
    for (const int n : {50, 1000, 20000}) {
        env::StateSample sample(static_cast<std::size_t>(n), env::StateVec{1.0, 0.2, -0.3});

        const double s_roll = time_ms(
            [&] { sink = env::rollout_returns_serial(sample, -0.69, 30, 0.988, -5, -5, 1)[0]; },
            5);
        const double p_roll = time_ms(
            [&] { sink = env::rollout_returns(sample, -0.69, 30, 0.988, -5, -5, 1)[0]; }, 5);
        std::printf("%-20s n=%-6d %10.3f %10.3f %8.2f\n", "rollout_returns", n, s_roll, p_roll,
                    s_roll / p_roll);

        const std::vector<double> actions(static_cast<std::size_t>(n), -0.5);
        const double s_step =
            time_ms([&] { sink = env::step_sample_serial(sample, actions, 2)[0].x1; }, 20);
        const double p_step =
            time_ms([&] { sink = env::step_sample(sample, actions, 2)[0].x1; }, 20);
        std::printf("%-20s n=%-6d %10.3f %10.3f %8.2f\n", "step_sample", n, s_step, p_step,
                    s_step / p_step);
    }
    (void)sink;
    return 0;
}
