#include "arnnsci/trainer.hpp"

#include "arnnsci/rng.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace arnnsci {

ProbabilityTable rescale_sparse(const SparseState& state, double beta0) {
  if (state.support.empty()) throw std::invalid_argument("rescale_sparse: empty state");
  if (!(beta0 > 0.0)) throw std::invalid_argument("rescale_sparse: beta0 must be positive");
  ProbabilityTable out;
  out.support = state.support;
  out.p.resize(state.size());
  // |a|^(2 beta0) relative to the largest weight, to stay clear of underflow
  double amax = 0.0;
  for (double a : state.amplitudes) amax = std::max(amax, std::abs(a));
  if (amax == 0.0) throw std::invalid_argument("rescale_sparse: all amplitudes are zero");
  double total = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    out.p[i] = std::pow(std::abs(state.amplitudes[i]) / amax, 2.0 * beta0);
    total += out.p[i];
  }
  for (double& v : out.p) v /= total;
  return out;
}

TrainingSet draw_training_set(const ProbabilityTable& p, std::uint64_t n_samples, std::uint64_t seed) {
  std::mt19937_64 rng(derive_stream(seed, "training-set"));
  TrainingSet out;
  std::uint64_t remaining = n_samples;
  double mass = 0.0;
  for (double v : p.p) mass += v;
  for (std::size_t i = 0; i < p.p.size() && remaining > 0; ++i) {
    std::uint64_t k = remaining;
    if (i + 1 < p.p.size()) {
      const double frac = mass > 0.0 ? std::clamp(p.p[i] / mass, 0.0, 1.0) : 0.0;
      k = std::binomial_distribution<std::uint64_t>(remaining, frac)(rng);
    }
    mass -= p.p[i];
    remaining -= k;
    if (k > 0) out.entries.push_back({p.support[i], k});
  }
  out.total = n_samples - remaining;
  return out;
}

double data_nll(const TrainingSet& data, const ArnnModel& model) {
  std::vector<Configuration> configs;
  configs.reserve(data.entries.size());
  for (const auto& e : data.entries) configs.push_back(e.config);
  const auto lp = log_prob_batch(model, configs);
  double s = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i) s -= static_cast<double>(data.entries[i].count) * lp[i];
  return s / static_cast<double>(data.total);
}

TrainResult train(ArnnModel& model, const TrainingSet& data, const TrainPlan& plan) {
  if (data.entries.empty() || data.total == 0) throw std::invalid_argument("train: empty training set");
  if (!(plan.learning_rate > 0.0)) throw std::invalid_argument("train: learning rate must be positive");
  if (plan.minibatch_size < 1) throw std::invalid_argument("train: minibatch size must be positive");
  TrainResult result;
  if (plan.epochs <= 0) return result;

  std::vector<double> weights;
  weights.reserve(data.entries.size());
  for (const auto& e : data.entries) weights.push_back(static_cast<double>(e.count));
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::mt19937_64 rng(derive_stream(plan.seed, "minibatch"));

  const std::size_t n_params = model.n_params();
  std::vector<double> m1(n_params, 0.0), m2(n_params, 0.0);
  const auto steps_per_epoch = static_cast<int>(
      std::max<std::uint64_t>(1, (data.total + static_cast<std::uint64_t>(plan.minibatch_size) - 1) /
                                     static_cast<std::uint64_t>(plan.minibatch_size)));
  const double inv_b = 1.0 / plan.minibatch_size;
  std::vector<std::uint32_t> hits(data.entries.size(), 0);
  std::vector<WeightedConfiguration> batch;
  std::uint64_t step = 0;

  for (int epoch = 0; epoch < plan.epochs; ++epoch) {
    for (int mb = 0; mb < steps_per_epoch; ++mb) {
      std::fill(hits.begin(), hits.end(), 0U);
      for (int k = 0; k < plan.minibatch_size; ++k) ++hits[pick(rng)];
      batch.clear();
      for (std::size_t i = 0; i < hits.size(); ++i)
        if (hits[i]) batch.push_back({data.entries[i].config, hits[i] * inv_b});
      const auto g = log_prob_grad(model, batch, true, derive_stream(plan.seed, "dropout", step));
      const double nll = -g.value;
      if (!std::isfinite(nll))
        throw TrainingDiverged(fmt::format("non-finite loss at epoch {}, minibatch {}", epoch, mb));
      result.trace.push_back({epoch, mb, nll});
      ++step;
      const double c1 = 1.0 - std::pow(plan.adam_beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(plan.adam_beta2, static_cast<double>(step));
      for (std::size_t p = 0; p < n_params; ++p) {
        const double grad = -g.grad[p];  // descend the NLL
        m1[p] = plan.adam_beta1 * m1[p] + (1.0 - plan.adam_beta1) * grad;
        m2[p] = plan.adam_beta2 * m2[p] + (1.0 - plan.adam_beta2) * grad * grad;
        model.params[p] -= plan.learning_rate * (m1[p] / c1) / (std::sqrt(m2[p] / c2) + plan.adam_eps);
      }
    }
    const double epoch_loss = data_nll(data, model);
    if (!std::isfinite(epoch_loss)) throw TrainingDiverged(fmt::format("non-finite data NLL after epoch {}", epoch));
    result.epoch_nll.push_back(epoch_loss);
    result.epochs_run = epoch + 1;
    const int w = plan.early_stop_window;
    if (w > 0 && epoch >= w) {
      const double before = result.epoch_nll[static_cast<std::size_t>(epoch - w)];
      const double gain = (before - epoch_loss) / std::max(std::abs(before), 1e-300);
      if (gain < plan.early_stop_tol) {
        result.stopped_early = true;
        break;
      }
    }
  }
  spdlog::debug("trained {} epochs, data NLL {:.6f}", result.epochs_run,
                result.epoch_nll.empty() ? 0.0 : result.epoch_nll.back());
  return result;
}

double kl_divergence_exact(const ProbabilityTable& p, const ArnnModel& model) {
  const auto lp = log_prob_batch(model, p.support);
  double s = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i)
    if (p.p[i] > 0.0) s += p.p[i] * (std::log(p.p[i]) - lp[i]);
  return s;
}

void write_loss_csv(std::ostream& out, const TrainResult& r) {
  out << "epoch,minibatch,nll\n";
  for (const auto& rec : r.trace) out << fmt::format("{},{},{:.17g}\n", rec.epoch, rec.minibatch, rec.nll);
}

}  // namespace arnnsci
