#pragma once

/**
 * @file driver.hpp
 * @brief The selected-CI loop.
 *
 * Iteration 0 diagonalizes the seed's raw support (or samples of the exact
 * ground state) together with the forced CISD configurations. Each later
 * iteration rescales the previous state by beta0, draws N_T training
 * samples, trains an ARNN, samples it at temperature beta, and diagonalizes
 * in the union of the sampled basis and the previous support. When that
 * union exceeds the cap it is pruned back (forced set first, then the
 * largest amplitudes of the union's ground state) and re-diagonalized. A
 * candidate that would raise the energy is rejected in favour of the
 * previous state, so recorded energies never increase.
 */

#include "arnnsci/arnn.hpp"
#include "arnnsci/eigensolver.hpp"
#include "arnnsci/integrals.hpp"
#include "arnnsci/sampler.hpp"
#include "arnnsci/state.hpp"
#include "arnnsci/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace arnnsci {

enum class SeedKind { hf, cisd, gs_sample };

[[nodiscard]] std::string to_string(SeedKind k);
[[nodiscard]] SeedKind seed_kind_from_string(const std::string& name);

struct StageConfig {
  int n_layers = 2;
  int features_per_bit = 4;
  double dropout_rate = 0.05;
  std::uint64_t n_train = 10'000;  // N_T
  int epochs = 200;
  int minibatch_size = 256;
  double learning_rate = 1e-3;
};

/// Small then large network: layers and features double, N_T grows tenfold.
[[nodiscard]] std::vector<StageConfig> default_stages();

struct BetaSchedule {
  bool automatic = false;           // find_beta for the first few iterations
  int automatic_iterations = 3;
  std::vector<double> values;       // per-iteration beta from iteration 1; then 1
  bool use_seed_default = true;     // hf: 0.1, 0.6; cisd: 0.4; gs_sample: none
};

struct RunConfig {
  std::filesystem::path fcidump_path;
  SeedKind seed_kind = SeedKind::hf;
  std::uint64_t n_gs_samples = 1000;      // N_N^(0), gs_sample only
  std::uint64_t n_network_samples = 0;    // N_N; 0 = ceil(1 / p(N_CA-th))
  std::size_t n_unique_cap = 0;           // N_U; 0 = 2 N_CA
  BetaSchedule beta_schedule;
  double beta0 = 0.4;
  std::vector<StageConfig> stages = default_stages();
  Activation activation = Activation::selu;
  bool warm_start = false;
  int max_iterations = 60;
  double epsilon_ha = 1e-5;
  int patience = 3;
  std::uint64_t rng_seed = 1;
  std::uint64_t fci_guard = kFciGuard;
  double chem_acc = kChemicalAccuracy;
  std::optional<double> stop_below_delta_e;  // optional early exit once Delta E is reached
  std::filesystem::path output_dir;          // empty: nothing written
  bool write_loss_trace = false;

  void validate() const;
};

struct IterationRecord {
  int index = 0;
  double energy = 0.0;
  std::optional<double> delta_e;
  std::size_t n_unique = 0;
  double beta = 1.0;
  std::uint64_t discarded = 0;
  int stage = 0;
  double seconds = 0.0;
  bool kept_previous = false;
};

enum class RunStatus { converged, max_iterations, reached_target };

struct Reference {
  SparseState ground_state;
  std::size_t n_ca = 0;
  std::uint64_t expected_samples = 0;
};

struct RunContext {
  IntegralTable table;
  SymmetrySector sector;
  std::vector<Configuration> forced;  // CISD configurations
  std::optional<Reference> reference;
  std::size_t cap = 0;
  std::uint64_t n_network_samples = 0;
};

struct RunResult {
  std::vector<IterationRecord> records;
  SparseState final_state;
  RunStatus status = RunStatus::max_iterations;
  std::optional<Reference> reference;
  std::size_t cap = 0;
  std::uint64_t n_network_samples = 0;
};

inline constexpr std::size_t kCisdGuard = 200'000;
inline constexpr std::uint64_t kFallbackNetworkSamples = 1'000'000;

/// Loads integrals, the forced set and (when the sector is small enough)
/// the FCI reference, and resolves automatic N_N and N_U.
[[nodiscard]] RunContext prepare(const RunConfig& cfg, IntegralTable table);

[[nodiscard]] SparseState build_seed(const RunConfig& cfg, const RunContext& ctx);

/// Diagonalizes the seed's raw data; returns Psi_0.
[[nodiscard]] std::pair<SparseState, IterationRecord> iteration_zero(const SparseState& seed, const RunConfig& cfg,
                                                                     const RunContext& ctx);

struct IterationOutput {
  SparseState state;
  IterationRecord record;
  ArnnModel model;
  TrainResult training;
};

/// One pass of rescale, train, sample, select and diagonalize.
[[nodiscard]] IterationOutput run_iteration(const SparseState& psi_prev, int index, int stage, const RunConfig& cfg,
                                            const RunContext& ctx, const ArnnModel* warm = nullptr);

/// Beta used at iteration i >= 1 (nullopt: search for it).
[[nodiscard]] std::optional<double> beta_for_iteration(const RunConfig& cfg, int index);

[[nodiscard]] RunResult run(const RunConfig& cfg);
[[nodiscard]] RunResult run(const RunConfig& cfg, IntegralTable table);

/// records.csv columns: i,energy_Ha,delta_e_Ha,n_unique,beta,discarded,stage,seconds
inline constexpr const char* kRecordsHeader = "i,energy_Ha,delta_e_Ha,n_unique,beta,discarded,stage,seconds";
void write_records_csv(std::ostream& out, const std::vector<IterationRecord>& records);
[[nodiscard]] std::vector<IterationRecord> read_records_csv(std::istream& in);
void write_state_csv(std::ostream& out, const SparseState& s);

}  // namespace arnnsci
