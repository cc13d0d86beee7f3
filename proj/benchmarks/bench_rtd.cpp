#include "rtd/datasets.hpp"
#include "rtd/grad.hpp"
#include "rtd/metrics.hpp"
#include "rtd/model.hpp"
#include "rtd/persistence.hpp"
#include "rtd/rcross.hpp"

#include <benchmark/benchmark.h>

using namespace rtd;

namespace {

void BM_VrBarcodeH1(benchmark::State& state) {
    const auto cloud = make_circle(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(vr_barcode(cloud, {0, 1}));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_VrBarcodeH1)->RangeMultiplier(2)->Range(16, 128)->Complexity();

// Cross barcode with and without the first-half exclusion, over the whole
// filtration; the gap is the saving from never building simplices inside
// the zero block.
void BM_CrossBarcode(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto x = make_circle(n, 2);
    const auto y = make_two_clusters(n, 3);
    CrossOptions opt;
    opt.truncate = false;
    opt.exclude_first_half = state.range(1) != 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rcross_barcode(x, y, 1, opt));
    }
    state.SetLabel(opt.exclude_first_half ? "exclude" : "full");
}
BENCHMARK(BM_CrossBarcode)->ArgsProduct({{20, 40, 60}, {0, 1}})->Unit(benchmark::kMillisecond);

// Degree 1 with the filtration cut once no later bar is possible.
void BM_CrossBarcodeTruncated(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto x = make_infinity_sign(n, 0.0, 10);
    const auto y = make_circle(n, 20);
    CrossOptions opt;
    opt.truncate = state.range(1) != 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rcross_barcode(x, y, 1, opt));
    }
    state.SetLabel(opt.truncate ? "prefix" : "whole");
}
BENCHMARK(BM_CrossBarcodeTruncated)->ArgsProduct({{50, 100}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_CrossBarcodeDegree2(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto x = make_random_square(n, 4);
    const auto y = make_random_square(n, 5);
    CrossOptions opt;
    opt.complex = state.range(1) != 0 ? CrossComplex::Cone : CrossComplex::Matrix;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rcross_barcode(x, y, 2, opt));
    }
    state.SetLabel(state.range(1) != 0 ? "cone" : "matrix");
}
BENCHMARK(BM_CrossBarcodeDegree2)->ArgsProduct({{12, 20}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Subgradient(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto x = make_circle(n, 6);
    const auto y = make_random_square(n, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rtd_subgradient(x, y));
    }
}
BENCHMARK(BM_Subgradient)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_LossAndGradient(benchmark::State& state) {
    const auto data = make_circle(80, 8);
    const auto params = MlpParams::init(2, 16, 3, 2, 9);
    for (auto _ : state) {
        benchmark::DoNotOptimize(loss_and_gradient(params, data, 1.0));
    }
}
BENCHMARK(BM_LossAndGradient)->Unit(benchmark::kMillisecond);

void BM_WassersteinH0(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto x = make_circle(n, 10);
    const auto z = make_random_square(n, 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wasserstein_h0(x, z));
    }
}
BENCHMARK(BM_WassersteinH0)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
