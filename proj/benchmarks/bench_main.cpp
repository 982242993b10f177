#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "edcascade/bivariate.hpp"
#include "edcascade/detection.hpp"
#include "edcascade/mcsim.hpp"
#include "edcascade/mellin.hpp"
#include "edcascade/specfun.hpp"

using namespace edcascade;

static void BM_MarcumQ(benchmark::State& state) {
    const double a = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(specfun::marcum_q(5.0, a, 4.0));
}
BENCHMARK(BM_MarcumQ)->Arg(1)->Arg(10)->Arg(40);

static void BM_InverseGammaQ(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(specfun::inverse_regularized_gamma_q(5.0, 0.1));
}
BENCHMARK(BM_InverseGammaQ);

// kernel at x = 10^(range/2 - 3)
static void BM_CascadedKernel(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    const double x = std::pow(10.0, 0.5 * static_cast<double>(state.range(1)) - 3.0);
    for (auto _ : state) benchmark::DoNotOptimize(mellin::cascaded_kernel(order, x));
}
BENCHMARK(BM_CascadedKernel)->ArgsProduct({{3, 5}, {0, 6, 10}})->Unit(benchmark::kMicrosecond);

static void BM_Bivariate(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    const double lambda = detection::threshold_from_pf(5.0, 0.1);
    const detection::Theorem1Params p{0.0, 5.0, std::sqrt(2.0), std::sqrt(lambda), 0.1,
                                      mellin::cascaded_kernel_spec(order)};
    const auto spec = detection::theorem1_bivariate_spec(p);
    for (auto _ : state) benchmark::DoNotOptimize(bivariate::bivariate_g(spec, {0.5 * lambda, 10.0}));
}
BENCHMARK(BM_Bivariate)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_AveragePd(benchmark::State& state) {
    const auto method = state.range(0) ? detection::Method::closed_form : detection::Method::quadrature;
    const int order = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(detection::avg_pd_cascaded(5.0, 0.1, 10.0, order, method));
    }
    state.SetLabel(state.range(0) ? "closed" : "quad");
}
BENCHMARK(BM_AveragePd)->ArgsProduct({{0, 1}, {1, 3, 5}})->Unit(benchmark::kMillisecond);

static void BM_MonteCarlo(benchmark::State& state) {
    detection::DetectorConfig cfg;
    cfg.u = 5.0;
    cfg.target_pf = 0.1;
    cfg.avg_snr = 10.0;
    cfg.order = 3;
    const auto method = state.range(0) ? mcsim::McMethod::semi_analytic : mcsim::McMethod::full_statistic;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mcsim::estimate_avg_pd(cfg, 100000, method, mcsim::RngStream(42, 0), {1}));
    }
    state.SetItemsProcessed(state.iterations() * 100000);
    state.SetLabel(mcsim::to_string(method));
}
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
