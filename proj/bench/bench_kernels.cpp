// Parallel kernels against their serial references.
#include "arnnsci/eigensolver.hpp"
#include "arnnsci/reference.hpp"
#include "arnnsci/sampler.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>

using namespace arnnsci;

namespace {

const IntegralTable& table() {
  static const IntegralTable t = load_fcidump(std::string(ARNNSCI_FIXTURE_DIR) + "/h2o_631g.fcidump");
  return t;
}

const std::vector<Configuration>& basis() {
  static const auto b = [] {
    const auto& t = table();
    auto all = cisd_space(aufbau(t.n_spin_orbitals(), t.n_electrons), sector_of(t));
    all.resize(std::min<std::size_t>(all.size(), 3000));
    return all;
  }();
  return b;
}

const SparseMatrix& hamiltonian() {
  static const SparseMatrix h = assemble_subspace(basis(), table());
  return h;
}

const ArnnModel& model() {
  static const ArnnModel m = [] {
    ArnnConfig cfg;
    cfg.n_bits = table().n_spin_orbitals();
    cfg.n_layers = 4;
    cfg.features_per_bit = 8;
    cfg.seed = 3;
    return init_model(cfg);
  }();
  return m;
}

std::vector<WeightedConfiguration> weighted(std::size_t n) {
  std::vector<WeightedConfiguration> out;
  const auto& b = basis();
  for (std::size_t i = 0; i < n; ++i) out.push_back({b[i % b.size()], 1.0});
  return out;
}

void BM_assemble_parallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(assemble_subspace(basis(), table()));
}
void BM_assemble_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serial::assemble_subspace(basis(), table()));
}

void BM_matvec_parallel(benchmark::State& st) {
  const auto& h = hamiltonian();
  std::vector<double> x(h.dim, 1.0), y(h.dim);
  for (auto _ : st) {
    h.multiply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
}
void BM_matvec_serial(benchmark::State& st) {
  const auto& h = hamiltonian();
  std::vector<double> x(h.dim, 1.0), y(h.dim);
  for (auto _ : st) {
    serial::multiply(h, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_log_prob_parallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(log_prob_batch(model(), basis()));
}
void BM_log_prob_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serial::log_prob_batch(model(), basis()));
}

void BM_gradient_parallel(benchmark::State& st) {
  const auto batch = weighted(1024);
  for (auto _ : st) benchmark::DoNotOptimize(log_prob_grad(model(), batch));
}
void BM_gradient_serial(benchmark::State& st) {
  const auto batch = weighted(1024);
  for (auto _ : st) benchmark::DoNotOptimize(serial::log_prob_grad(model(), batch));
}

void BM_sample_fast(benchmark::State& st) {
  ArnnConfig cfg;
  cfg.n_bits = table().n_spin_orbitals();
  cfg.seed = 5;
  cfg.init_scale = 3.0;  // peaked enough that the prefix tree stays narrow
  const auto m = init_model(cfg);
  const auto n = static_cast<std::uint64_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(sample_fast(m, n, 1.0, 11));
}

}  // namespace

BENCHMARK(BM_assemble_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_matvec_parallel)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_matvec_serial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_log_prob_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_log_prob_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gradient_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gradient_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sample_fast)->RangeMultiplier(100)->Range(1000, 1'000'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
