#include <benchmark/benchmark.h>

#include <filesystem>

#include "circuflow/network_io.hpp"
#include "circuflow/robot/policy.hpp"
#include "circuflow/robot/training.hpp"
#include "circuflow/simulator.hpp"

namespace {

circuflow::Network bundled(const char* name) {
    return circuflow::load_network(std::filesystem::path(CIRCUFLOW_NETWORKS_DIR) / name);
}

void BM_SimulateCircular(benchmark::State& state) {
    const auto net = bundled("fig3c_synthetic_circular.json");
    const circuflow::Simulator sim(net);
    const auto cfg = circuflow::SimConfig::from(net);
    for (auto _ : state) benchmark::DoNotOptimize(sim.run(cfg));
}
BENCHMARK(BM_SimulateCircular)->Unit(benchmark::kMillisecond);

void BM_ClosedLoop1e5(benchmark::State& state) {
    const auto net = bundled("closed_loop.json");
    const circuflow::Simulator sim(net);
    const auto cfg = circuflow::SimConfig::from(net);
    for (auto _ : state) benchmark::DoNotOptimize(sim.run(cfg));
}
BENCHMARK(BM_ClosedLoop1e5)->Unit(benchmark::kMillisecond);

void BM_EvaluateServo(benchmark::State& state) {
    const circuflow::robot::ReacherConfig cfg;
    const circuflow::robot::ServoPolicy servo(cfg.arm);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            circuflow::robot::evaluate_policy(servo, static_cast<std::size_t>(state.range(0)), cfg, 1));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateServo)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
