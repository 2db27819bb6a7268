#include <benchmark/benchmark.h>

#include "daelab/adam.hpp"
#include "daelab/datasets.hpp"
#include "daelab/linalg.hpp"
#include "daelab/metrics.hpp"
#include "daelab/model.hpp"
#include "daelab/ops.hpp"

using namespace daelab;

namespace {

Tensor random_matrix(Rng& rng, std::size_t r, std::size_t c) {
    std::vector<double> v(r * c);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return Tensor::matrix(r, c, std::move(v));
}

const FactorDataset& xy_dataset() {
    static const FactorDataset ds = [] {
        ToyConfig config;
        config.variant = ToyVariant::XY;
        config.grid = 16;
        Rng rng(0, RngStream::data);
        return generate_toy_dataset(config, rng);
    }();
    return ds;
}

void BM_Matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    const auto a = random_matrix(rng, 64, n);
    const auto b = random_matrix(rng, n, n);
    for (auto _ : state) {
        Tape tape;
        auto c = ops::matmul(tape.constant(a), tape.constant(b));
        benchmark::DoNotOptimize(c.value().data.data());
    }
    state.SetItemsProcessed(state.iterations() * 64 * n * n);
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(256)->Arg(1024);

void BM_TrainStep(benchmark::State& state) {
    const auto& ds = xy_dataset();
    ModelConfig config;
    config.kind = state.range(0) == 0 ? ModelKind::dae : ModelKind::beta_vae;
    config.input_dim = ds.input_dim();
    config.latent_dim = 2;
    config.lambda.weights = {1.0, 1.0};
    auto model = make_model(config, 0);
    std::vector<double> batch(ds.images.begin(), ds.images.begin() + 64 * ds.input_dim());
    const auto x = Tensor::matrix(64, ds.input_dim(), std::move(batch));
    AdamState adam;
    Rng noise(0, RngStream::noise);
    for (auto _ : state) {
        Tape tape;
        const auto input = tape.constant(x);
        const auto result = forward(tape, model, input, noise, Mode::train);
        tape.backward(model_loss(model, result, input));
        adam_step(model.parameters(), adam);
    }
}
BENCHMARK(BM_TrainStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Pca(benchmark::State& state) {
    const auto& ds = xy_dataset();
    for (auto _ : state) {
        Rng rng(0, RngStream::pca);
        benchmark::DoNotOptimize(top_singular_values(std::span<const float>(ds.images), ds.size(), ds.input_dim(), 2, rng));
    }
}
BENCHMARK(BM_Pca)->Unit(benchmark::kMillisecond);

struct MetricInputs {
    FactorMatrix v;
    LatentMatrix z;
};

const MetricInputs& metric_inputs() {
    static const MetricInputs in = [] {
        Rng rng(5);
        MetricInputs out;
        out.v.rows = 10000;
        out.v.cardinalities = {16, 16, 5, 3};
        out.v.labels.resize(out.v.rows * 4);
        out.z = LatentMatrix(out.v.rows, 4);
        for (std::size_t i = 0; i < out.v.rows; ++i)
            for (std::size_t k = 0; k < 4; ++k) {
                const auto label = static_cast<std::uint32_t>(rng.below(out.v.cardinalities[k]));
                out.v.labels[i * 4 + k] = label;
                out.z.at(i, k) = label + 0.1 * rng.normal();
            }
        return out;
    }();
    return in;
}

void BM_ZDiff(benchmark::State& state) {
    const auto& in = metric_inputs();
    for (auto _ : state) {
        Rng rng(0, RngStream::metrics);
        benchmark::DoNotOptimize(z_diff_score(in.z, in.v, MetricConfig{}, rng));
    }
}
BENCHMARK(BM_ZDiff)->Unit(benchmark::kMillisecond);

void BM_ZVar(benchmark::State& state) {
    const auto& in = metric_inputs();
    for (auto _ : state) {
        Rng rng(0, RngStream::metrics);
        benchmark::DoNotOptimize(z_var_score(in.z, in.v, MetricConfig{}, rng));
    }
}
BENCHMARK(BM_ZVar)->Unit(benchmark::kMillisecond);

void BM_DciRf(benchmark::State& state) {
    const auto& in = metric_inputs();
    for (auto _ : state) {
        Rng rng(0, RngStream::metrics);
        benchmark::DoNotOptimize(dci_rf_score(in.z, in.v, MetricConfig{}, rng));
    }
}
BENCHMARK(BM_DciRf)->Unit(benchmark::kMillisecond);

void BM_MutualInformation(benchmark::State& state) {
    const auto& in = metric_inputs();
    for (auto _ : state) {
        benchmark::DoNotOptimize(jemmig_score(in.z, in.v, 20));
        benchmark::DoNotOptimize(dcimig_score(in.z, in.v, 20));
    }
}
BENCHMARK(BM_MutualInformation)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
