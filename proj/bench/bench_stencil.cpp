#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "nlspread/discrete_kernel.hpp"
#include "nlspread/stencil_kernels.hpp"

using namespace nlspread;

namespace {

struct Setup {
  DiscreteKernel dk;
  std::vector<double> padded;
  std::vector<double> out;

  explicit Setup(std::size_t n)
      : dk(Kernel::convolution(Density::gaussian(1.0)), SpatialGrid(-0.025 * static_cast<double>(n), 0.05, n)) {
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = 1.0 / (1.0 + std::exp(0.05 * static_cast<double>(i) - 50.0));
    padded = dk.pad(u, Extension::constant);
    out.resize(n);
  }
  kernels::StencilView view() const {
    return {dk.offsets(), dk.weights(), dk.reach(), false};
  }
};

template <bool Parallel>
void BM_apply(benchmark::State& state) {
  Setup s(static_cast<std::size_t>(state.range(0)));
  const auto v = s.view();
  for (auto _ : state) {
    if constexpr (Parallel) kernels::apply_padded(v, s.padded, s.out);
    else kernels::serial::apply_padded(v, s.padded, s.out);
    benchmark::DoNotOptimize(s.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<long>(s.dk.weights().size()));
}

template <bool Parallel>
void BM_euler(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ReactionKPP r(CoefficientProfile::constant(1.0));
  std::vector<double> u(n, 0.5), ku(n, 0.5), b(n, 1.0), slope(n, 1.0), out(n);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::euler_update(u, ku, b, slope, r, 0.1, out);
    else kernels::serial::euler_update(u, ku, b, slope, r, 0.1, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_perron(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> u(n), a(n), t(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::sin(0.01 * static_cast<double>(i));
    a[i] = 0.5 + 0.3 * std::cos(0.013 * static_cast<double>(i));
    t[i] = 1.2;
  }
  for (auto _ : state) {
    if constexpr (Parallel) kernels::perron_update(0.05, u, a, t, 1e-13, w);
    else kernels::serial::perron_update(0.05, u, a, t, 1e-13, w);
    benchmark::DoNotOptimize(w.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_apply<false>)->Arg(4096)->Arg(65536);
BENCHMARK(BM_apply<true>)->Arg(4096)->Arg(65536);
BENCHMARK(BM_euler<false>)->Arg(65536)->Arg(1 << 20);
BENCHMARK(BM_euler<true>)->Arg(65536)->Arg(1 << 20);
BENCHMARK(BM_perron<false>)->Arg(65536);
BENCHMARK(BM_perron<true>)->Arg(65536);

BENCHMARK_MAIN();
