#include <benchmark/benchmark.h>

#include "bloch/projector.hpp"
#include "common.hpp"

namespace {

using namespace bloch;

void BM_RieszQuadrature(benchmark::State& state) {
  const auto op = assemble(bench::mathieu_like(1, 1.0), bench::square_lattice(1),
                           bench::generic_t(1), 32.0);
  const auto spectrum = eigen_decompose(op);
  const auto clusters = cluster_multiplicities(spectrum);
  const Contour contour{clusters.values[0], 0.5 * min_cluster_gap(clusters, 1)};
  const int nodes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(riesz_projector_quadrature(op.matrix, contour, nodes));
}
BENCHMARK(BM_RieszQuadrature)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_RieszEigen(benchmark::State& state) {
  const auto op = assemble(bench::mathieu_like(1, 1.0), bench::square_lattice(1),
                           bench::generic_t(1), 32.0);
  for (auto _ : state) {
    const auto spectrum = eigen_decompose(op);
    benchmark::DoNotOptimize(riesz_projector_eigen(spectrum, cluster_multiplicities(spectrum), 0));
  }
}
BENCHMARK(BM_RieszEigen)->Unit(benchmark::kMillisecond);

}  // namespace
