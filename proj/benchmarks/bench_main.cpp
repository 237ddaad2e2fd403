#include <benchmark/benchmark.h>

#include "eqlab/bayes.hpp"
#include "eqlab/markov.hpp"
#include "eqlab/mlp.hpp"
#include "eqlab/theory.hpp"
#include "eqlab/visiontask.hpp"

using namespace eqlab;

namespace {

void BM_TrainBatch(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const auto pool = sample_symbol_pool(32, d, 1);
    Rng r(2);
    for (auto _ : state) benchmark::DoNotOptimize(make_train_batch(pool, 128, {0.1}, r));
}
BENCHMARK(BM_TrainBatch)->Arg(64)->Arg(256);

void BM_ForwardBatch(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    auto [p, snap] = init_params(1024, 2 * d, 1.0, OutputScale::inv_sqrt_d, 3);
    Rng r(4);
    const auto b = make_test_batch(128, d, {}, r);
    for (auto _ : state) benchmark::DoNotOptimize(forward_centered_batch(p, snap, b.inputs));
}
BENCHMARK(BM_ForwardBatch)->Arg(64)->Arg(256);

void BM_SgdStep(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    auto [p, snap] = init_params(1024, 2 * d, 1.0, OutputScale::inv_sqrt_d, 5);
    const auto pool = sample_symbol_pool(32, d, 6);
    Rng r(7);
    const auto b = make_train_batch(pool, 128, {}, r);
    const double lr = learning_rate(1.0, d, 0.1, OutputScale::inv_sqrt_d);
    for (auto _ : state) sgd_step(p, snap, b, lr);
}
BENCHMARK(BM_SgdStep)->Arg(64)->Arg(256);

void BM_PsvrtBatch(benchmark::State& state) {
    PsvrtConfig cfg;
    const auto pats = make_psvrt_patterns(cfg);
    Rng r(8);
    for (auto _ : state) benchmark::DoNotOptimize(generate_psvrt_batch(cfg, pats, Split::train, 128, r));
}
BENCHMARK(BM_PsvrtBatch);

void BM_PentominoBatch(benchmark::State& state) {
    PentominoConfig cfg;
    cfg.train_shapes = choose_train_shapes(14, 9);
    Rng r(10);
    for (auto _ : state) benchmark::DoNotOptimize(generate_pentomino_batch(cfg, Split::train, 128, r));
}
BENCHMARK(BM_PentominoBatch);

void BM_NtkKernel(benchmark::State& state) {
    double u = -1.0, sum = 0.0;
    for (auto _ : state) {
        sum += ntk_kernel(u);
        u = u >= 1.0 ? -1.0 : u + 1e-3;
    }
    benchmark::DoNotOptimize(sum);
}
BENCHMARK(BM_NtkKernel);

void BM_DualClassifier(benchmark::State& state) {
    const int d = 32;
    const auto pool = sample_symbol_pool(600, d, 11);
    const auto clf = build_restricted_dual_classifier(pool, 1.0, balanced_bminus(d));
    Rng r(12);
    const auto b = make_test_batch(2000, d, {}, r);
    for (auto _ : state) benchmark::DoNotOptimize(dual_accuracy(clf, b));
}
BENCHMARK(BM_DualClassifier);

void BM_Markov(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_markov(16, 512, 50, ReadoutSign::positive, seed++));
    state.SetItemsProcessed(state.iterations() * 512 * 50);
}
BENCHMARK(BM_Markov);

void BM_BayesPosterior(benchmark::State& state) {
    const int d = 64;
    const auto pool = sample_symbol_pool(64, d, 13);
    const MemorizingPrior mem{0.1, pool};
    const GeneralizingPrior gen{0.1, d};
    Rng r(14);
    const auto b = make_test_batch(2, d, {0.1}, r);
    const Vector z1 = b.inputs.col(0).head(d), z2 = b.inputs.col(0).tail(d);
    if (state.range(0) == 0)
        for (auto _ : state) benchmark::DoNotOptimize(posterior_generalizing(z1, z2, gen));
    else
        for (auto _ : state) benchmark::DoNotOptimize(posterior_memorizing(z1, z2, mem));
}
BENCHMARK(BM_BayesPosterior)->Arg(0)->Arg(1);

}  // namespace
BENCHMARK_MAIN();
