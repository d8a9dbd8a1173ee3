#pragma once

#include "arnnsci/arnn.hpp"
#include "arnnsci/sampler.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace helpers {

/// Random model with large random output biases, so that conditionals are
/// far from 1/2 and the distribution is peaked.
inline arnnsci::ArnnModel peaked_model(int m, std::uint64_t seed, double bias_lo = 7.0, double bias_hi = 9.0) {
  arnnsci::ArnnConfig cfg;
  cfg.n_bits = m;
  cfg.n_layers = 2;
  cfg.features_per_bit = 4;
  cfg.seed = seed;
  auto model = arnnsci::init_model(cfg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(bias_lo, bias_hi);
  const auto& last = model.layout.back();
  for (int q = 0; q < m; ++q) {
    const double b = (rng() & 1U) ? mag(rng) : -mag(rng);
    model.params[last.bias_offset + 2 * static_cast<std::size_t>(q)] = 0.5 * b;
    model.params[last.bias_offset + 2 * static_cast<std::size_t>(q) + 1] = -0.5 * b;
  }
  return model;
}

/// Exhaustive distribution of the per-conditional deformation.
inline std::vector<double> deformed_distribution(const arnnsci::ArnnModel& model, double beta) {
  const int m = model.n_bits();
  std::vector<double> p(std::size_t{1} << m);
  for (arnnsci::u64 b = 0; b < p.size(); ++b) {
    const auto rows = arnnsci::conditional_log_probs(model, {b, m});
    double v = 1.0;
    for (int q = 0; q < m; ++q) {
      const double p1 = arnnsci::deformed_p1(rows[static_cast<std::size_t>(q)][0], rows[static_cast<std::size_t>(q)][1], beta);
      v *= ((b >> q) & 1U) ? p1 : 1.0 - p1;
    }
    p[b] = v;
  }
  return p;
}

/// One draw at a time, bit by bit; the textbook sampler.
inline std::vector<std::uint64_t> sequential_counts(const arnnsci::ArnnModel& model, std::uint64_t n, double beta,
                                                    std::uint64_t seed) {
  const int m = model.n_bits();
  std::vector<std::uint64_t> counts(std::size_t{1} << m, 0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t k = 0; k < n; ++k) {
    arnnsci::u64 bits = 0;
    for (int q = 0; q < m; ++q) {
      const auto rows = arnnsci::conditional_log_probs(model, {bits, m});
      const double p1 = arnnsci::deformed_p1(rows[static_cast<std::size_t>(q)][0], rows[static_cast<std::size_t>(q)][1], beta);
      if (u(rng) < p1) bits |= arnnsci::u64{1} << q;
    }
    ++counts[bits];
  }
  return counts;
}

}  // namespace helpers
