#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "svgauge/correlation.h"
#include "svgauge/feature_transform.h"
#include "svgauge/pooling.h"
#include "svgauge/rasterizer.h"
#include "svgauge/svg_document.h"
#include "svgauge/tfidf.h"

namespace svgauge {
namespace {

std::string BusySvg(int shapes) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 100);
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 100 100\">";
  for (int i = 0; i < shapes; ++i) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"%.1f\" fill=\"#%06x\"/>"
                  "<path d=\"M%.1f %.1f L%.1f %.1f Q50 50 %.1f %.1f Z\" stroke=\"black\"/>",
                  u(rng), u(rng), u(rng) / 4, static_cast<unsigned>(rng() & 0xffffff), u(rng),
                  u(rng), u(rng), u(rng), u(rng), u(rng));
    svg += buf;
  }
  return svg + "</svg>";
}

void BM_ParseAndValidate(benchmark::State& state) {
  const std::string svg = BusySvg(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ParseAndValidate(svg));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(svg.size()));
}
BENCHMARK(BM_ParseAndValidate)->Arg(10)->Arg(100);

void BM_Rasterize(benchmark::State& state) {
  const SvgDocument doc = ParseAndValidate(BusySvg(20));
  const int size = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Rasterize(doc, size));
}
BENCHMARK(BM_Rasterize)->Arg(32)->Arg(224);

void BM_FitFeatureTransform(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), d = static_cast<int>(state.range(1));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<EmbeddingVector> corpus(n);
  for (auto& v : corpus) {
    v.values.resize(d);
    for (double& x : v.values) x = g(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(FitFeatureTransform(corpus, 128, true));
}
BENCHMARK(BM_FitFeatureTransform)->Args({1000, 64})->Args({2000, 512});

void BM_GemPooling(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  FeatureGrid grid;
  grid.h = grid.w = 14;
  grid.dim = 768;
  grid.data.resize(static_cast<size_t>(grid.h * grid.w * grid.dim));
  for (double& x : grid.data) x = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(Pool(grid, PoolingStrategy::Gem(3.0)));
}
BENCHMARK(BM_GemPooling);

void BM_Correlations(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> level(1, 5);
  std::normal_distribution<double> g;
  std::vector<double> x(static_cast<size_t>(state.range(0))), y(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] = g(rng);
    y[i] = level(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(Correlations(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Correlations)->RangeMultiplier(4)->Range(64, 65536)->Complexity(benchmark::oNLogN);

void BM_TfIdfVectorize(benchmark::State& state) {
  const std::vector<std::string> corpus = {"a red circle with a blue square",
                                           "a smiling sun above green hills",
                                           "a black cat sitting on a red mat"};
  const TfIdfModel model = FitTfIdf(corpus);
  for (auto _ : state) {
    benchmark::DoNotOptimize(TfIdfVectorize(model, "a red cat with a blue hat on green hills"));
  }
}
BENCHMARK(BM_TfIdfVectorize);

}  // namespace
}  // namespace svgauge

BENCHMARK_MAIN();
