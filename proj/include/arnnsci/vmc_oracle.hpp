#pragma once

/**
 * @file vmc_oracle.hpp
 * @brief Local-energy estimator and the sampled Upsilon/Lambda functional.
 *
 * Validation only; nothing on the SCI hot path depends on these.
 *
 *   E_loc(n) = sum_n' H_nn' Psi(n') / Psi(n)
 *   Upsilon  = sum_{n,n' in S} e^{-i lambda(n)} a_n H_nn' e^{i lambda(n')} a_n',  a_n = sqrt(N_n / |S|)
 *   Lambda   = sum_{n in S} |e^{i lambda(n)} a_n|^2 = 1 for real lambda
 *
 * |S| is the total sample count, so <H> = Upsilon / Lambda.
 */

#include "arnnsci/arnn.hpp"
#include "arnnsci/integrals.hpp"
#include "arnnsci/state.hpp"
#include "arnnsci/trainer.hpp"

#include <span>
#include <vector>

namespace arnnsci {

struct LocalEnergySample {
  Configuration config;
  double e_loc = 0.0;
  std::uint64_t weight = 0;
};

/// E_loc(c) with Psi(n') = 0 outside psi.support. Throws std::invalid_argument
/// when c has no (or a zero) amplitude in psi.
[[nodiscard]] double local_energy(const SparseState& psi, const Configuration& c, const IntegralTable& t);

/// sum_n P(n) E_loc(n) with the exact Born weights of psi; equals <H>.
[[nodiscard]] double local_energy_expectation(const SparseState& psi, const IntegralTable& t);

/// One sample per training entry, weighted by its count.
[[nodiscard]] std::vector<LocalEnergySample> local_energy_samples(const SparseState& psi, const TrainingSet& counts,
                                                                  const IntegralTable& t);

/// Count-weighted mean of E_loc.
[[nodiscard]] double sample_mean(std::span<const LocalEnergySample> samples);

struct UpsilonLambda {
  double upsilon = 0.0;
  double lambda = 0.0;
  [[nodiscard]] double energy() const { return upsilon / lambda; }
};

/// Truncated functional over the sampled subspace. counts may be fractional
/// (reweighted amplitudes); lambda holds one real phase per configuration.
[[nodiscard]] UpsilonLambda upsilon_lambda(std::span<const Configuration> support, std::span<const double> counts,
                                           std::span<const double> lambda, const IntegralTable& t);

/// Same, from a training set whose support must lie inside psi0's support.
[[nodiscard]] UpsilonLambda upsilon_lambda(const SparseState& psi0, const TrainingSet& counts,
                                           std::span<const double> lambda, const IntegralTable& t);

/// Metropolis acceptance ratio |Psi(to) / Psi(from)|^2.
[[nodiscard]] double metropolis_ratio(double psi_from, double psi_to);

/// Same ratio for a network, where |Psi|^2 = P: exp(log P(to) - log P(from)).
[[nodiscard]] double metropolis_ratio(const ArnnModel& m, const Configuration& from, const Configuration& to);

}  // namespace arnnsci
