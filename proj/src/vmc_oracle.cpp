#include "arnnsci/vmc_oracle.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

namespace arnnsci {

namespace {

std::unordered_map<Configuration, double> amplitude_map(const SparseState& psi) {
  std::unordered_map<Configuration, double> out;
  out.reserve(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) out.emplace(psi.support[i], psi.amplitudes[i]);
  return out;
}

double local_energy(const SparseState& psi, const std::unordered_map<Configuration, double>& amp,
                    const Configuration& c, const IntegralTable& t) {
  const auto it = amp.find(c);
  if (it == amp.end() || it->second == 0.0)
    throw std::invalid_argument(fmt::format("local_energy: {} has no amplitude", c.to_string()));
  double sum = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    if (psi.amplitudes[j] == 0.0) continue;
    const auto h = slater_condon(c, psi.support[j], t);
    if (h.excitation_degree <= 2) sum += h.value * psi.amplitudes[j];
  }
  return sum / it->second;
}

}  // namespace

double local_energy(const SparseState& psi, const Configuration& c, const IntegralTable& t) {
  return local_energy(psi, amplitude_map(psi), c, t);
}

double local_energy_expectation(const SparseState& psi, const IntegralTable& t) {
  const auto amp = amplitude_map(psi);
  const double norm = psi.norm_squared();
  if (!(norm > 0.0)) throw std::invalid_argument("local_energy_expectation: zero state");
  double e = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double a = psi.amplitudes[i];
    if (a == 0.0) continue;
    e += a * a / norm * local_energy(psi, amp, psi.support[i], t);
  }
  return e;
}

std::vector<LocalEnergySample> local_energy_samples(const SparseState& psi, const TrainingSet& counts,
                                                    const IntegralTable& t) {
  const auto amp = amplitude_map(psi);
  std::vector<LocalEnergySample> out;
  out.reserve(counts.entries.size());
  for (const auto& e : counts.entries) out.push_back({e.config, local_energy(psi, amp, e.config, t), e.count});
  return out;
}

double sample_mean(std::span<const LocalEnergySample> samples) {
  double sum = 0.0;
  double w = 0.0;
  for (const auto& s : samples) {
    sum += static_cast<double>(s.weight) * s.e_loc;
    w += static_cast<double>(s.weight);
  }
  if (!(w > 0.0)) throw std::invalid_argument("sample_mean: no weight");
  return sum / w;
}

UpsilonLambda upsilon_lambda(std::span<const Configuration> support, std::span<const double> counts,
                             std::span<const double> lambda, const IntegralTable& t) {
  const std::size_t n = support.size();
  if (counts.size() != n || lambda.size() != n)
    throw std::invalid_argument("upsilon_lambda: support, counts and lambda differ in length");
  double total = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0)) throw std::invalid_argument("upsilon_lambda: negative count");
    total += c;
  }
  if (!(total > 0.0)) throw std::invalid_argument("upsilon_lambda: no samples");

  std::vector<std::complex<double>> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::polar(std::sqrt(counts[i] / total), lambda[i]);

  std::complex<double> ups = 0.0;
  double lam = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lam += std::norm(z[i]);
    if (z[i] == 0.0) continue;
    std::complex<double> row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (z[j] == 0.0) continue;
      const auto h = slater_condon(support[i], support[j], t);
      if (h.excitation_degree <= 2) row += h.value * z[j];
    }
    ups += std::conj(z[i]) * row;
  }
  return {ups.real(), lam};
}

UpsilonLambda upsilon_lambda(const SparseState& psi0, const TrainingSet& counts, std::span<const double> lambda,
                             const IntegralTable& t) {
  const std::unordered_set<Configuration> in_support(psi0.support.begin(), psi0.support.end());
  std::vector<Configuration> support;
  std::vector<double> c;
  for (const auto& e : counts.entries) {
    if (!in_support.count(e.config))
      throw std::invalid_argument(fmt::format("upsilon_lambda: {} is outside the reference support",
                                              e.config.to_string()));
    support.push_back(e.config);
    c.push_back(static_cast<double>(e.count));
  }
  return upsilon_lambda(support, c, lambda, t);
}

double metropolis_ratio(double psi_from, double psi_to) {
  if (psi_from == 0.0) throw std::invalid_argument("metropolis_ratio: zero amplitude at the current state");
  const double r = psi_to / psi_from;
  return r * r;
}

double metropolis_ratio(const ArnnModel& m, const Configuration& from, const Configuration& to) {
  return std::exp(log_prob(m, to) - log_prob(m, from));
}

}  // namespace arnnsci
