#include <cmath>

#include <benchmark/benchmark.h>

#include <bcsfit/bcs.hpp>
#include <bcsfit/diagnostics.hpp>
#include <bcsfit/regress.hpp>
#include <bcsfit/rng.hpp>
#include <bcsfit/specfun.hpp>

using namespace bcsfit;

namespace {

DgfFamily family_of(int64_t index) {
  const FamilyTag tag = kAllFamilies[static_cast<std::size_t>(index)];
  switch (tag) {
    case FamilyTag::BCT: return DgfFamily::make(tag, 4.0);
    case FamilyTag::BCPE: return DgfFamily::make(tag, 1.5);
    case FamilyTag::BCHP: return DgfFamily::make(tag, 1.2);
    case FamilyTag::BCSL:
    case FamilyTag::BCSN: return DgfFamily::make(tag, 2.0);
    default: return DgfFamily::make(tag);
  }
}

RegressionData zero_adjusted_data(std::size_t n, std::uint64_t seed) {
  UniformStream u(seed);
  const auto f = DgfFamily::make(FamilyTag::BCLOII);
  RegressionData d;
  d.y.resize(n);
  d.X.resize(n, 2);
  d.S.resize(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = specfun::std_normal_quantile(u.next());
    d.X(i, 0) = d.S(i, 0) = 1.0;
    d.X(i, 1) = x;
    const double a = 1.0 / (1.0 + std::exp(0.85 - 0.5 * x));
    const double v = u.next(), b = u.next();
    d.y[i] = v < a ? 0.0 : bcs::quantile(b, {std::exp(1.0 + 0.4 * x), 0.4, 0.4}, f);
  }
  d.Z = d.X;
  return d;
}

void BM_LogPdf(benchmark::State& state) {
  const auto f = family_of(state.range(0));
  const BcsParams p{2.0, 0.4, 0.3};
  double y = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcs::log_pdf(y, p, f));
    y = y < 8.0 ? y * 1.01 : 0.5;
  }
  state.SetLabel(f.label());
}
BENCHMARK(BM_LogPdf)->DenseRange(0, 7);

void BM_Quantile(benchmark::State& state) {
  const auto f = family_of(state.range(0));
  const BcsParams p{2.0, 0.4, 0.3};
  double q = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcs::quantile(q, p, f));
    q = q < 0.98 ? q + 0.0137 : 0.01;
  }
  state.SetLabel(f.label());
}
BENCHMARK(BM_Quantile)->DenseRange(0, 7);

void BM_FitZabcs(benchmark::State& state) {
  const auto d = zero_adjusted_data(static_cast<std::size_t>(state.range(0)), 3);
  ModelSpec spec;
  spec.family = DgfFamily::make(FamilyTag::BCLOII);
  for (auto _ : state) benchmark::DoNotOptimize(regress::fit_zabcs(d, spec).loglik);
}
BENCHMARK(BM_FitZabcs)->Arg(500)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_LocalInfluence(benchmark::State& state) {
  const auto d = zero_adjusted_data(static_cast<std::size_t>(state.range(0)), 5);
  ModelSpec spec;
  spec.family = DgfFamily::make(FamilyTag::BCLOII);
  const auto fit = regress::fit_zabcs(d, spec);
  for (auto _ : state) benchmark::DoNotOptimize(diagnostics::local_influence(fit, d).cdmax);
}
BENCHMARK(BM_LocalInfluence)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
