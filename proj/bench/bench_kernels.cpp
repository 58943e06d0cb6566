// Serial reference kernels against their OpenMP counterparts.
//
//   bench_kernels --benchmark_filter=scatter

#include "inkbridge/kernels.hpp"

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

namespace {

namespace k = inkbridge::kernels;

Eigen::MatrixXd centered_data(Eigen::Index n, Eigen::Index d) {
    std::srand(7);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(n, d);
    return x.rowwise() - x.colwise().mean();
}

template <bool Parallel>
void BM_scatter(benchmark::State &state) {
    const auto c = centered_data(state.range(0), state.range(1));
    for (auto _ : state) {
        auto s = Parallel ? k::omp::scatter(c) : k::serial::scatter(c);
        benchmark::DoNotOptimize(s.data());
    }
}

template <bool Parallel>
void BM_outer_residual_sq(benchmark::State &state) {
    const auto c = centered_data(state.range(0), state.range(1));
    const Eigen::MatrixXd s = k::serial::scatter(c) / static_cast<double>(c.rows());
    for (auto _ : state) {
        auto r = Parallel ? k::omp::outer_residual_sq(c, s) : k::serial::outer_residual_sq(c, s);
        benchmark::DoNotOptimize(r.data());
    }
}

template <bool Parallel>
void BM_project(benchmark::State &state) {
    const auto x = centered_data(state.range(0), state.range(1));
    const Eigen::VectorXd offset = Eigen::VectorXd::Zero(x.cols());
    const Eigen::MatrixXd basis = Eigen::MatrixXd::Random(std::min<Eigen::Index>(100, x.cols()), x.cols());
    for (auto _ : state) {
        auto z = Parallel ? k::omp::project(x, offset, basis) : k::serial::project(x, offset, basis);
        benchmark::DoNotOptimize(z.data());
    }
}

void sizes(benchmark::internal::Benchmark *b) {
    b->Args({1000, 128})->Args({1000, 512})->Args({4000, 256})->Unit(benchmark::kMillisecond);
}

} // namespace

BENCHMARK(BM_scatter<false>)->Name("scatter/serial")->Apply(sizes);
BENCHMARK(BM_scatter<true>)->Name("scatter/omp")->Apply(sizes)->UseRealTime();
BENCHMARK(BM_outer_residual_sq<false>)->Name("outer_residual_sq/serial")->Apply(sizes);
BENCHMARK(BM_outer_residual_sq<true>)->Name("outer_residual_sq/omp")->Apply(sizes)->UseRealTime();
BENCHMARK(BM_project<false>)->Name("project/serial")->Apply(sizes);
BENCHMARK(BM_project<true>)->Name("project/omp")->Apply(sizes)->UseRealTime();

BENCHMARK_MAIN();
