#include "cmforge/curve.hpp"
#include "cmforge/modfns.hpp"

#include <benchmark/benchmark.h>

using namespace cmforge;

namespace {

struct ThetaInput {
    InvariantKind kind;
    std::vector<QuadForm> forms;
    long D;
};

ThetaInput theta_input(long D) {
    Discriminant disc = split_discriminant(D);
    InvariantKind kind = make_invariant(InvariantTag::J, disc);
    return {kind, invariant_n_system(kind, disc).forms, D};
}

void BM_theta_parallel(benchmark::State& st) {
    ThetaInput in = theta_input(-st.range(0));
    PrecisionBudget pb{st.range(1), 64};
    for (auto _ : st) benchmark::DoNotOptimize(evaluate_theta(in.kind, in.forms, in.D, pb));
}

void BM_theta_serial(benchmark::State& st) {
    ThetaInput in = theta_input(-st.range(0));
    PrecisionBudget pb{st.range(1), 64};
    for (auto _ : st) benchmark::DoNotOptimize(evaluate_theta_serial(in.kind, in.forms, in.D, pb));
}

void BM_count_parallel(benchmark::State& st) {
    WeierstrassCurve E{st.range(0), 3, 7};
    for (auto _ : st) benchmark::DoNotOptimize(naive_count(E));
}

void BM_count_serial(benchmark::State& st) {
    WeierstrassCurve E{st.range(0), 3, 7};
    for (auto _ : st) benchmark::DoNotOptimize(naive_count_serial(E));
}

}  // namespace

BENCHMARK(BM_theta_parallel)->Args({420, 512})->Args({1020, 1024})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_theta_serial)->Args({420, 512})->Args({1020, 1024})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_count_parallel)->Arg(10007)->Arg(1000003)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_count_serial)->Arg(10007)->Arg(1000003)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
