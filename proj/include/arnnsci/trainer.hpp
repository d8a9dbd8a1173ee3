#pragma once

/**
 * @file trainer.hpp
 * @brief Maximum-likelihood fitting of the ARNN to configuration counts.
 *
 * Minimizing the negative log-likelihood -<log P_model>_data is the same as
 * minimizing KL(P_data || P_model), since the data entropy does not depend
 * on the parameters. Nothing here sees the Hamiltonian.
 */

#include "arnnsci/arnn.hpp"
#include "arnnsci/state.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace arnnsci {

struct ProbabilityTable {
  std::vector<Configuration> support;
  std::vector<double> p;
};

/// p_n proportional to |amplitude_n|^(2 beta0), normalized over the support.
[[nodiscard]] ProbabilityTable rescale_sparse(const SparseState& state, double beta0);

struct TrainingEntry {
  Configuration config;
  std::uint64_t count = 0;
};

struct TrainingSet {
  std::vector<TrainingEntry> entries;
  std::uint64_t total = 0;
};

/// Multinomial draw of n_samples from p (sequential conditional binomials),
/// zero counts dropped, support order kept.
[[nodiscard]] TrainingSet draw_training_set(const ProbabilityTable& p, std::uint64_t n_samples,
                                            std::uint64_t seed);

struct TrainPlan {
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 200;
  int minibatch_size = 256;
  double early_stop_tol = 1e-4;   // relative improvement of the data NLL ...
  int early_stop_window = 10;     // ... over this many epochs
  std::uint64_t seed = 0;
};

struct LossRecord {
  int epoch = 0;
  int minibatch = 0;
  double nll = 0.0;  // mean over the minibatch
};

struct TrainResult {
  std::vector<LossRecord> trace;
  std::vector<double> epoch_nll;  // exact data NLL after each epoch
  int epochs_run = 0;
  bool stopped_early = false;
};

struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// ADAM on minibatch NLL. An epoch is ceil(N_T / minibatch) steps; each step
/// draws `minibatch_size` entries with probability proportional to count.
/// Moments start from zero on every call.
TrainResult train(ArnnModel& model, const TrainingSet& data, const TrainPlan& plan);

/// sum_n p(n) (log p(n) - log P_model(n)) over the table's support.
[[nodiscard]] double kl_divergence_exact(const ProbabilityTable& p, const ArnnModel& model);

/// Mean negative log-likelihood of the data under the model.
[[nodiscard]] double data_nll(const TrainingSet& data, const ArnnModel& model);

void write_loss_csv(std::ostream& out, const TrainResult& r);

}  // namespace arnnsci
