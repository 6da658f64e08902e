#include <benchmark/benchmark.h>

#include <hnoma/analytic.hpp>
#include <hnoma/hadamard.hpp>
#include <hnoma/modem.hpp>
#include <hnoma/montecarlo.hpp>
#include <hnoma/noma.hpp>
#include <hnoma/rng.hpp>

#include <complex>
#include <vector>

static void BM_Fwht(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  hnoma::RngStream rng(1, 2, 3, 4, 5);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.gauss();
  for (auto _ : state) {
    hnoma::fwht(v);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * n);
}
BENCHMARK(BM_Fwht)->Arg(8)->Arg(64)->Arg(1024)->Arg(65536);

static void BM_QamDemap(benchmark::State& state) {
  const auto qam = hnoma::build_square_qam(static_cast<int>(state.range(0)));
  hnoma::RngStream rng(3, 0, 0, 0);
  std::vector<std::complex<double>> samples(1024);
  for (auto& s : samples) s = 0.3 * rng.cn01();
  for (auto _ : state) {
    int acc = 0;
    for (const auto& s : samples) acc += hnoma::ml_demap(s, {1.0, 0.0}, qam);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(samples.size()));
}
BENCHMARK(BM_QamDemap)->Arg(4)->Arg(16)->Arg(64);

static void BM_SicDecode(benchmark::State& state) {
  const int layers = static_cast<int>(state.range(0));
  std::vector<double> alphas;
  double w = 1.0, sum = 0.0;
  for (int i = 0; i < layers; ++i) sum += (w *= 4.0);
  w = 1.0;
  for (int i = 0; i < layers; ++i) alphas.push_back((w *= 4.0) / sum);
  std::sort(alphas.rbegin(), alphas.rend());
  const auto p = hnoma::PowerProfile::make(1.0, alphas);
  const auto qam = hnoma::build_square_qam(4);
  std::vector<const hnoma::Constellation*> alph(layers, &qam);
  hnoma::RngStream rng(5, 0, 0, 0);
  const std::complex<double> y = 0.4 * rng.cn01();
  for (auto _ : state) {
    auto rep = hnoma::sic_decode(y, {1.0, 0.0}, p, alph);
    benchmark::DoNotOptimize(rep.labels.data());
  }
}
BENCHMARK(BM_SicDecode)->Arg(2)->Arg(4)->Arg(8);

static void BM_HnomaBlock(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto h = hnoma::build_hadamard(static_cast<std::size_t>(n));
  const auto pam = hnoma::pam_for_hadamard(n);
  std::vector<double> alphas;
  double w = 1.0, sum = 0.0;
  for (int i = 0; i < n; ++i) sum += (w *= 50.0);
  w = 1.0;
  for (int i = 0; i < n; ++i) alphas.push_back((w *= 50.0) / sum);
  std::sort(alphas.rbegin(), alphas.rend());
  const auto p = hnoma::PowerProfile::make(1.0, alphas);
  std::vector<int> bits(n);
  for (int i = 0; i < n; ++i) bits[i] = i & 1;
  for (auto _ : state) {
    const auto x = hnoma::hnoma_encode_block(bits, p, h, pam);
    auto dec = hnoma::hnoma_decode_block(x, {1.0, 0.0}, p, h, pam);
    benchmark::DoNotOptimize(dec.bits.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * n);
}
BENCHMARK(BM_HnomaBlock)->Arg(2)->Arg(4)->Arg(8);

static void BM_RayleighTailAverage(benchmark::State& state) {
  double t = 0.31;
  for (auto _ : state) {
    double v = hnoma::rayleigh_q_average(t, 177.8);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_RayleighTailAverage);

static void BM_TwoUserClosedForm(benchmark::State& state) {
  hnoma::AnalyticConfig cfg;
  for (auto _ : state) {
    double v = hnoma::user1_average_ber_closed(cfg, 177.8) +
               hnoma::user2_average_ber(cfg, 177.8);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_TwoUserClosedForm);

static void BM_ScenarioPoint(benchmark::State& state) {
  hnoma::ScenarioConfig cfg;
  cfg.scheme = hnoma::Scheme::tnoma;
  cfg.user_count = 2;
  cfg.distances = {6.015, 1.0};
  cfg.alphas = {0.7, 0.3};
  cfg.modulation_orders = {4, 4};
  cfg.snr_grid_db = {20.0};
  cfg.stop.min_errors = 1;
  cfg.stop.max_bits = 1 << 16;
  for (auto _ : state) {
    cfg.seed++;  // fresh draws each iteration
    auto curves = hnoma::run_scenario(cfg);
    benchmark::DoNotOptimize(curves.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          (2 << 16));
}
BENCHMARK(BM_ScenarioPoint)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
