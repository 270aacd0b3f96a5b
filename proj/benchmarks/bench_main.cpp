#include <benchmark/benchmark.h>

#include <vector>

#include "hpl/analysis.hpp"
#include "hpl/fock.hpp"
#include "hpl/herald.hpp"
#include "hpl/spectral.hpp"

using namespace hpl;

namespace {

std::vector<double> reference_samples(std::size_t count) {
    const herald::ExperimentConfig c;
    const fock::QuadratureSampler sampler(herald::detection_referred_state(c));
    Rng rng = make_stream(1, stream_domain::sampling, 0);
    std::vector<double> x(count);
    for (double& v : x) v = sampler(rng);
    return x;
}

}  // namespace

static void BM_FockWavefunctions(benchmark::State& state) {
    const int n_max = static_cast<int>(state.range(0));
    std::vector<double> out(n_max + 1);
    double x = -3.0;
    for (auto _ : state) {
        fock::fock_wavefunctions(n_max, x, out);
        benchmark::DoNotOptimize(out.data());
        x = x > 3.0 ? -3.0 : x + 1e-3;
    }
}
BENCHMARK(BM_FockWavefunctions)->Arg(10)->Arg(60);

static void BM_QuadratureSampler(benchmark::State& state) {
    const fock::QuadratureSampler sampler(herald::detection_referred_state(herald::ExperimentConfig{}));
    Rng rng = make_stream(2, stream_domain::sampling, 0);
    for (auto _ : state) benchmark::DoNotOptimize(sampler(rng));
}
BENCHMARK(BM_QuadratureSampler);

static void BM_WignerGrid(benchmark::State& state) {
    const auto dist = herald::detection_referred_state(herald::ExperimentConfig{});
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(fock::wigner_of(dist, {-5, 5, -5, 5, n, n}).values.data());
}
BENCHMARK(BM_WignerGrid)->Arg(101)->Unit(benchmark::kMillisecond);

static void BM_TheoryMode(benchmark::State& state) {
    const herald::ExperimentConfig c;
    for (auto _ : state) benchmark::DoNotOptimize(herald::theory_mode(c).samples.data());
}
BENCHMARK(BM_TheoryMode)->Unit(benchmark::kMillisecond);

static void BM_SynthesizeFrame(benchmark::State& state) {
    const herald::ExperimentConfig c;
    const auto mode = herald::optical_mode(c);
    const fock::QuadratureSampler sampler(herald::ensemble_state(c));
    Rng rng = make_stream(c.seed, stream_domain::frames, 0);
    for (auto _ : state) benchmark::DoNotOptimize(herald::synthesize_frame(mode, sampler, c, rng).trace.data());
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SynthesizeFrame)->Unit(benchmark::kMicrosecond);

static void BM_Pca(benchmark::State& state) {
    herald::ExperimentConfig c;
    c.n_frames = static_cast<std::size_t>(state.range(0));
    const auto frames = herald::run_simulation(c, herald::optical_mode(c));
    for (auto _ : state) benchmark::DoNotOptimize(analysis::pca_modes(frames).eigenvalues.data());
}
BENCHMARK(BM_Pca)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_EmIteration(benchmark::State& state) {
    const auto x = reference_samples(static_cast<std::size_t>(state.range(0)));
    const analysis::TomographyOptions opt{fock::kDefaultNMax, 50, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(analysis::mle_tomography(x, opt).log_likelihood);
    state.SetItemsProcessed(state.iterations() * 50 * state.range(0));
}
BENCHMARK(BM_EmIteration)->Arg(20000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_MleConverged(benchmark::State& state) {
    const auto x = reference_samples(20000);
    for (auto _ : state) benchmark::DoNotOptimize(analysis::mle_tomography(x).iterations);
}
BENCHMARK(BM_MleConverged)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
