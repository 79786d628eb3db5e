#include <array>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "agesvd/cluster.hpp"
#include "agesvd/io/ppm.hpp"
#include "agesvd/linalg.hpp"
#include "agesvd/regress.hpp"

namespace {

using agesvd::Matrix;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (auto& v : m.values()) v = dist(rng);
  return m;
}

void BM_Svd(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto cols = static_cast<std::size_t>(state.range(1));
  const Matrix x = random_matrix(rows, cols, 1);
  for (auto _ : state) benchmark::DoNotOptimize(agesvd::svd(x));
}
BENCHMARK(BM_Svd)->Args({19, 19})->Args({38, 19})->Args({64, 64})->Args({128, 128});

void BM_OlsFit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix x = random_matrix(n, 3, 2);
  std::vector<double> y(n);
  std::vector<agesvd::NamedColumn> predictors(2);
  predictors[0].name = "a";
  predictors[1].name = "b";
  for (std::size_t i = 0; i < n; ++i) {
    predictors[0].values.push_back(x(i, 0));
    predictors[1].values.push_back(x(i, 1));
    y[i] = 1.0 + 2.0 * x(i, 0) - x(i, 1) + 0.1 * x(i, 2);
  }
  for (auto _ : state) benchmark::DoNotOptimize(agesvd::ols_fit(y, predictors, true, "y"));
}
BENCHMARK(BM_OlsFit)->Arg(19)->Arg(200)->Arg(2000);

void BM_GmmFit(benchmark::State& state) {
  const Matrix x = random_matrix(static_cast<std::size_t>(state.range(0)), 2, 3);
  const auto k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(agesvd::fit_gmm_em(x, k, agesvd::CovarianceFamily::full, 0));
}
BENCHMARK(BM_GmmFit)->Args({19, 2})->Args({19, 4})->Args({500, 4});

void BM_BicGrid(benchmark::State& state) {
  const Matrix x = random_matrix(19, 2, 4);
  constexpr std::array families{agesvd::CovarianceFamily::spherical, agesvd::CovarianceFamily::diagonal,
                                agesvd::CovarianceFamily::full};
  for (auto _ : state) benchmark::DoNotOptimize(agesvd::select_by_bic(x, 1, 6, families, 0));
}
BENCHMARK(BM_BicGrid);

void BM_ImageRankApprox(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> byte(0, 255);
  agesvd::io::RgbImage img;
  img.width = side;
  img.height = side;
  img.pixels.resize(3 * side * side);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(byte(rng));
  for (auto _ : state) benchmark::DoNotOptimize(agesvd::io::rank_approx(img, 8));
}
BENCHMARK(BM_ImageRankApprox)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
