#include <benchmark/benchmark.h>

#include <random>

#include "mebd/bcs.hpp"
#include "mebd/nf_ff.hpp"
#include "mebd/omp.hpp"
#include "mebd/pipeline.hpp"

namespace {

mebd::ScanGrid small_grid() { return mebd::build_grid(10.0, 7.0, 0.5); }

mebd::ArrayGeometry small_array() {
  return mebd::ArrayGeometry::row_clusters(4, 4, 0.5, mebd::ElementModel::cosine);
}

mebd::RestrictedBasis small_restricted(const mebd::OvercompleteBasis& basis,
                                       const mebd::ScanGrid& grid) {
  mebd::MeasurementSpec spec{10.0, 5, 5};
  return mebd::restrict(basis, mebd::measurement_indices(spec, grid));
}

const mebd::OvercompleteBasis& shared_basis() {
  static const mebd::OvercompleteBasis basis = [] {
    const mebd::ScanGrid grid = small_grid();
    const mebd::ArrayGeometry geom = small_array();
    mebd::ExcitationVector nominal{Eigen::VectorXcd::Ones(geom.cluster_count())};
    std::vector<mebd::UncertaintyDescriptor> descs;
    for (int s = 0; s < geom.cluster_count(); ++s) {
      descs.push_back({s + 1, mebd::UncertaintyKind::magnitude, s, 0.0, 1.0, 5});
      descs.push_back({s + 5, mebd::UncertaintyKind::phase, s, -3.14159, 3.14159, 5});
    }
    return mebd::build_basis(geom, nominal, descs, grid, mebd::TruncationRule::fixed(2));
  }();
  return basis;
}

void BM_Radiate(benchmark::State& state) {
  const mebd::ScanGrid grid = small_grid();
  const mebd::ArrayGeometry geom = small_array();
  mebd::ExcitationVector exc{Eigen::VectorXcd::Ones(geom.cluster_count())};
  for (auto _ : state) benchmark::DoNotOptimize(mebd::radiate(geom, exc, grid));
}
BENCHMARK(BM_Radiate);

void BM_SolveBcs(benchmark::State& state) {
  const mebd::OvercompleteBasis& basis = shared_basis();
  const mebd::ScanGrid grid = small_grid();
  const mebd::RestrictedBasis restricted = small_restricted(basis, grid);
  Eigen::VectorXcd d = restricted.matrix.col(3) * mebd::Complex(1.5, -0.5);
  for (auto _ : state) benchmark::DoNotOptimize(mebd::solve_bcs(restricted, d, 1e-2, {}));
}
BENCHMARK(BM_SolveBcs);

void BM_SolveOmp(benchmark::State& state) {
  const mebd::OvercompleteBasis& basis = shared_basis();
  const mebd::ScanGrid grid = small_grid();
  const mebd::RestrictedBasis restricted = small_restricted(basis, grid);
  Eigen::VectorXcd d = restricted.matrix.col(3) * mebd::Complex(1.5, -0.5);
  for (auto _ : state) benchmark::DoNotOptimize(mebd::solve_omp(restricted, d, {}));
}
BENCHMARK(BM_SolveOmp);

void BM_NfToFf(benchmark::State& state) {
  const mebd::ScanGrid grid = small_grid();
  const mebd::ArrayGeometry geom = small_array();
  mebd::ExcitationVector exc{Eigen::VectorXcd::Ones(geom.cluster_count())};
  const mebd::FieldMap field = mebd::radiate(geom, exc, grid);
  for (auto _ : state) benchmark::DoNotOptimize(mebd::nf_to_ff(field, 4));
}
BENCHMARK(BM_NfToFf);

}  // namespace

BENCHMARK_MAIN();
