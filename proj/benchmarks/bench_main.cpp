#include <benchmark/benchmark.h>

#include "gapmode/birman.hpp"
#include "gapmode/bulk.hpp"
#include "gapmode/geometry.hpp"
#include "gapmode/greens.hpp"
#include "gapmode/strip.hpp"

namespace {

using namespace gapmode;

DielectricMap vein_map(double t) {
  std::vector<Shape> bg = {Shape::fill(9.0), Shape::rect(1.0, 0.5, 0.5, 0.75, 0.75)};
  std::vector<Shape> defect = {Shape::fill(9.0 + t),
                               Shape::rect(1.0, 0.5, 0.5, 0.75, 0.75)};
  return DielectricMap::build(bg, defect, 1, 48);
}

void BM_bulk_assemble(benchmark::State& state) {
  DielectricMap map = vein_map(1.0);
  PlaneWaveBasis basis(static_cast<int>(state.range(0)));
  BulkAssembler assembler(map, basis);
  for (auto _ : state) {
    auto h = assembler.at(kPi, 0.0);
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK(BM_bulk_assemble)->Arg(4)->Arg(6)->Arg(8);

void BM_bulk_eigensolve(benchmark::State& state) {
  DielectricMap map = vein_map(1.0);
  PlaneWaveBasis basis(static_cast<int>(state.range(0)));
  BulkAssembler assembler(map, basis);
  Eigen::MatrixXcd h = assembler.at(kPi, 0.0);
  for (auto _ : state) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    benchmark::DoNotOptimize(es.eigenvalues().data());
  }
}
BENCHMARK(BM_bulk_eigensolve)->Arg(4)->Arg(6)->Arg(8);

void BM_build_strip(benchmark::State& state) {
  DielectricMap map = vein_map(1.0);
  for (auto _ : state) {
    auto sys = build_strip(map, kPi, static_cast<int>(state.range(0)), 4);
    benchmark::DoNotOptimize(sys.second.s1().data());
  }
}
BENCHMARK(BM_build_strip)->Arg(7)->Arg(11)->Unit(benchmark::kMillisecond);

void BM_kappa_eval(benchmark::State& state) {
  DielectricMap map = vein_map(1.0);
  auto [space, forms] = build_strip(map, kPi, 7, 4);
  BlochDecomposition decomp = diagonalize_background(space, forms);
  DefectSubspace sub = build_defect_subspace(space, forms, decomp);
  double mu = 0.5 * (1.0 / 7.1 + 1.0 / 5.3);
  for (auto _ : state) {
    double k = kappa(space, decomp, sub, mu);
    benchmark::DoNotOptimize(k);
  }
}
BENCHMARK(BM_kappa_eval)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
