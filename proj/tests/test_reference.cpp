#include "arnnsci/reference.hpp"

#include "arnnsci/eigensolver.hpp"
#include "arnnsci/rng.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace arnnsci;

namespace {

std::vector<Configuration> random_configs(int m, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Configuration> out;
  const u64 mask = m == 64 ? ~u64{0} : (u64{1} << m) - 1;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(rng() & mask, m);
  return out;
}

ArnnModel model(int m, int layers, int features, Activation act, std::uint64_t seed) {
  ArnnConfig cfg;
  cfg.n_bits = m;
  cfg.n_layers = layers;
  cfg.features_per_bit = features;
  cfg.activation = act;
  cfg.seed = seed;
  auto out = init_model(cfg);
  // nonzero biases so they enter the comparison
  SplitMix64 rng(seed + 1);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (const auto& lay : out.layout)
    for (std::size_t r = 0; r < lay.rows(m); ++r) out.params[lay.bias_offset + r] = u(rng);
  return out;
}

}  // namespace

TEST_CASE("parallel assembly matches the serial reference") {
  for (const char* name : {"h4_sto3g", "lih_sto3g", "h2o_sto3g"}) {
    CAPTURE(name);
    const auto t = fixtures::load(name);
    const auto basis = enumerate_sector(sector_of(t), kFciGuard);
    const auto ref = serial::assemble_subspace(basis, t);
    for (std::size_t limit : {std::size_t{0}, basis.size()}) {
      const auto par = assemble_subspace(basis, t, limit);
      REQUIRE(par.dim == ref.dim);
      CHECK(par.row_ptr == ref.row_ptr);
      CHECK(par.col == ref.col);
      for (std::size_t k = 0; k < ref.nnz(); ++k) CHECK(std::abs(par.val[k] - ref.val[k]) <= 1e-13);
    }
  }
}

TEST_CASE("parallel matvec is bit-identical to the serial loop") {
  const auto t = fixtures::load("h2o_sto3g");
  const auto basis = enumerate_sector(sector_of(t), kFciGuard);
  const auto h = assemble_subspace(basis, t);
  std::vector<double> x(h.dim);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (auto& v : x) v = g(rng);
  std::vector<double> y(h.dim);
  std::vector<double> z(h.dim);
  h.multiply(x, y);
  serial::multiply(h, x, z);
  CHECK(y == z);
  CHECK_THROWS_AS(serial::multiply(h, std::vector<double>(3), z), std::invalid_argument);
}

TEST_CASE("batched log probabilities match the serial forward pass") {
  for (auto act : {Activation::selu, Activation::tanh}) {
    for (int layers : {1, 2, 4}) {
      CAPTURE(layers);
      const auto m = model(12, layers, 3, act, 40 + static_cast<std::uint64_t>(layers));
      const auto configs = random_configs(12, 300, 5);
      const auto par = log_prob_batch(m, configs);
      const auto ref = serial::log_prob_batch(m, configs);
      for (std::size_t i = 0; i < configs.size(); ++i) CHECK(std::abs(par[i] - ref[i]) <= 1e-12 * (1.0 + std::abs(ref[i])));
    }
  }
}

TEST_CASE("chunked gradient matches the serial accumulation") {
  for (int layers : {1, 2, 3}) {
    CAPTURE(layers);
    const auto m = model(10, layers, 4, Activation::selu, 90 + static_cast<std::uint64_t>(layers));
    const auto configs = random_configs(10, 1000, 8);
    std::vector<WeightedConfiguration> batch;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> w(0.0, 2.0);
    for (const auto& c : configs) batch.push_back({c, w(rng)});
    const auto par = log_prob_grad(m, batch);
    const auto ref = serial::log_prob_grad(m, batch);
    CHECK(par.value == doctest::Approx(ref.value).epsilon(1e-12));
    double scale = 0.0;
    for (double g : ref.grad) scale = std::max(scale, std::abs(g));
    for (std::size_t p = 0; p < ref.grad.size(); ++p) CHECK(std::abs(par.grad[p] - ref.grad[p]) <= 1e-12 * scale);
  }
}
