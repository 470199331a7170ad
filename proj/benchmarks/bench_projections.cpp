#include <pdfs/bench.hpp>
#include <pdfs/projections.hpp>

#include <benchmark/benchmark.h>

namespace {

// Unit-radius projections of a fixed Gaussian d x k matrix, mirroring the
// d-sweep at k = 10 and the k-sweep at d = 1000.
void run(benchmark::State& state, pdfs::BallKind kind) {
    const auto d = static_cast<pdfs::Index>(state.range(0));
    const auto k = static_cast<pdfs::Index>(state.range(1));
    const pdfs::Matrix v = pdfs::gaussian_matrix(d, k, 0);
    const pdfs::BallSpec ball{kind, 1.0};
    for (auto _ : state) {
        pdfs::Matrix w = pdfs::project(v, ball);
        benchmark::DoNotOptimize(w.data());
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * d * k);
}

void BM_L1(benchmark::State& s) { run(s, pdfs::BallKind::L1); }
void BM_L21(benchmark::State& s) { run(s, pdfs::BallKind::L21); }
void BM_L12(benchmark::State& s) { run(s, pdfs::BallKind::L12); }
void BM_Nuclear(benchmark::State& s) { run(s, pdfs::BallKind::Nuclear); }

void d_sweep(benchmark::internal::Benchmark* b) {
    for (int d : {1000, 2000, 4000, 8000, 16000}) b->Args({d, 10});
}

void k_sweep(benchmark::internal::Benchmark* b) {
    for (int k : {10, 50, 100, 200}) b->Args({1000, k});
}

} // namespace

BENCHMARK(BM_L1)->Apply(d_sweep)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_L21)->Apply(d_sweep)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_L12)->Apply(d_sweep)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Nuclear)->Apply(d_sweep)->Unit(benchmark::kMicrosecond);

BENCHMARK(BM_L1)->Apply(k_sweep)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_L21)->Apply(k_sweep)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Nuclear)->Apply(k_sweep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
