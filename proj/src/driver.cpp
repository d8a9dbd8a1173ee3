#include "arnnsci/driver.hpp"

#include "arnnsci/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace arnnsci {

std::string to_string(SeedKind k) {
  switch (k) {
    case SeedKind::hf: return "hf";
    case SeedKind::cisd: return "cisd";
    case SeedKind::gs_sample: return "gs_sample";
  }
  return "?";
}

SeedKind seed_kind_from_string(const std::string& name) {
  if (name == "hf") return SeedKind::hf;
  if (name == "cisd") return SeedKind::cisd;
  if (name == "gs_sample") return SeedKind::gs_sample;
  throw std::invalid_argument(fmt::format("unknown seed kind '{}' (expected hf, cisd or gs_sample)", name));
}

std::vector<StageConfig> default_stages() {
  StageConfig small;
  StageConfig large;
  large.n_layers = 4;
  large.features_per_bit = 8;
  large.dropout_rate = 0.1;
  large.n_train = 100'000;
  return {small, large};
}

void RunConfig::validate() const {
  if (stages.empty()) throw std::invalid_argument("at least one model stage is required");
  for (const auto& s : stages) {
    if (s.n_layers < 1 || s.features_per_bit < 1) throw std::invalid_argument("stage widths must be positive");
    if (s.n_train < 1) throw std::invalid_argument("stage n_train must be positive");
    if (!(s.dropout_rate >= 0.0 && s.dropout_rate < 1.0)) throw std::invalid_argument("stage dropout outside [0, 1)");
    if (!(s.learning_rate > 0.0)) throw std::invalid_argument("stage learning rate must be positive");
    if (s.minibatch_size < 1) throw std::invalid_argument("stage minibatch size must be positive");
  }
  if (!(epsilon_ha > 0.0)) throw std::invalid_argument("epsilon_ha must be positive");
  if (patience < 1) throw std::invalid_argument("patience must be at least 1");
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be non-negative");
  if (!(beta0 > 0.0 && beta0 <= 1.0)) throw std::invalid_argument("beta0 must lie in (0, 1]");
  for (double b : beta_schedule.values)
    if (!(b > 0.0)) throw std::invalid_argument("scheduled beta values must be positive");
  if (seed_kind == SeedKind::gs_sample && n_gs_samples < 1)
    throw std::invalid_argument("gs_sample seeds need n_gs_samples >= 1");
}

RunContext prepare(const RunConfig& cfg, IntegralTable table) {
  cfg.validate();
  RunContext ctx;
  ctx.table = std::move(table);
  ctx.sector = sector_of(ctx.table);
  const int m = ctx.table.n_spin_orbitals();
  const auto hf = aufbau(m, ctx.table.n_electrons);
  if (!passes_symmetry(hf, ctx.sector))
    throw std::invalid_argument("the aufbau determinant is outside the target symmetry sector");
  ctx.forced = cisd_space(hf, ctx.sector);
  if (ctx.forced.size() > kCisdGuard)
    throw GuardExceeded(fmt::format("CISD space has {} configurations, above {}", ctx.forced.size(), kCisdGuard));

  if (count_symmetric(ctx.sector) <= cfg.fci_guard) {
    Reference ref;
    ref.ground_state = fci_reference(ctx.table, ctx.sector, cfg.fci_guard);
    ref.n_ca = n_ca(ref.ground_state, ctx.table, cfg.chem_acc);
    ref.expected_samples = expected_samples(ref.ground_state, ref.n_ca);
    spdlog::info("FCI reference {:.10f} Ha, N_CA = {}, 1/p(N_CA) = {}", ref.ground_state.energy, ref.n_ca,
                 ref.expected_samples);
    ctx.reference = std::move(ref);
  }
  if (cfg.seed_kind == SeedKind::gs_sample && !ctx.reference)
    throw GuardExceeded("gs_sample seeds need an FCI reference, but the sector exceeds the guard");
  if (cfg.n_unique_cap > 0) {
    ctx.cap = cfg.n_unique_cap;
  } else if (ctx.reference) {
    ctx.cap = 2 * ctx.reference->n_ca;
  } else {
    throw std::invalid_argument("n_unique_cap must be given when no FCI reference is computable");
  }
  if (cfg.n_network_samples > 0) {
    ctx.n_network_samples = cfg.n_network_samples;
  } else if (ctx.reference) {
    ctx.n_network_samples = ctx.reference->expected_samples;
  } else {
    ctx.n_network_samples = kFallbackNetworkSamples;
    spdlog::warn("no FCI reference; using N_N = {}", kFallbackNetworkSamples);
  }
  return ctx;
}

SparseState build_seed(const RunConfig& cfg, const RunContext& ctx) {
  switch (cfg.seed_kind) {
    case SeedKind::hf: {
      const auto hf = aufbau(ctx.table.n_spin_orbitals(), ctx.table.n_electrons);
      return point_mass(hf, slater_condon(hf, hf, ctx.table).value);
    }
    case SeedKind::cisd:
      return subspace_ground_state(ctx.forced, ctx.table);
    case SeedKind::gs_sample:
      if (!ctx.reference) throw GuardExceeded("no FCI reference for a gs_sample seed");
      return ctx.reference->ground_state;
  }
  throw std::logic_error("unreachable seed kind");
}

namespace {

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::optional<double> delta(const RunContext& ctx, double e) {
  if (!ctx.reference) return std::nullopt;
  return e - ctx.reference->ground_state.energy;
}

SampleBatch as_batch(const TrainingSet& t) {
  SampleBatch b;
  b.n_requested = t.total;
  for (const auto& e : t.entries) b.entries.push_back({e.config, e.count, 0.0});
  return b;
}

// Forced entries first, then the largest amplitudes of `s`, up to `limit`.
std::vector<Configuration> prune(const SparseState& s, const std::vector<Configuration>& forced, std::size_t limit) {
  std::vector<Configuration> out;
  std::unordered_set<Configuration> taken;
  for (const auto& c : forced)
    if (taken.insert(c).second) out.push_back(c);
  for (auto i : s.order_by_weight()) {
    if (out.size() >= limit) break;
    if (taken.insert(s.support[i]).second) out.push_back(s.support[i]);
  }
  return out;
}

}  // namespace

std::pair<SparseState, IterationRecord> iteration_zero(const SparseState& seed, const RunConfig& cfg,
                                                       const RunContext& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  SampleBatch batch;
  if (cfg.seed_kind == SeedKind::gs_sample) {
    const auto p = rescale_sparse(seed, 1.0);
    batch = as_batch(draw_training_set(p, cfg.n_gs_samples, derive_stream(cfg.rng_seed, "gs-sample")));
    batch = filter_physical(batch, ctx.sector);
  } else {
    // the deterministic seed support enters as-is
    for (std::size_t i = 0; i < seed.size(); ++i) batch.entries.push_back({seed.support[i], 1, 0.0});
  }
  const auto basis = select_unique(batch, ctx.cap, ctx.forced);
  auto state = subspace_ground_state(basis, ctx.table);
  IterationRecord rec;
  rec.index = 0;
  rec.energy = state.energy;
  rec.delta_e = delta(ctx, state.energy);
  rec.n_unique = basis.size();
  rec.beta = 1.0;
  rec.discarded = batch.n_discarded_unphysical;
  rec.stage = 0;
  rec.seconds = elapsed(t0);
  return {std::move(state), rec};
}

std::optional<double> beta_for_iteration(const RunConfig& cfg, int index) {
  const auto& b = cfg.beta_schedule;
  if (b.automatic) {
    if (index <= b.automatic_iterations) return std::nullopt;
    return 1.0;
  }
  std::vector<double> values = b.values;
  if (values.empty() && b.use_seed_default) {
    if (cfg.seed_kind == SeedKind::hf) values = {0.1, 0.6};
    if (cfg.seed_kind == SeedKind::cisd) values = {0.4};
  }
  if (index >= 1 && static_cast<std::size_t>(index) <= values.size())
    return values[static_cast<std::size_t>(index - 1)];
  return 1.0;
}

IterationOutput run_iteration(const SparseState& psi_prev, int index, int stage, const RunConfig& cfg,
                              const RunContext& ctx, const ArnnModel* warm) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& sc = cfg.stages.at(static_cast<std::size_t>(stage));
  const auto iter = static_cast<std::uint64_t>(index);

  const auto p = rescale_sparse(psi_prev, cfg.beta0);
  const auto data = draw_training_set(p, sc.n_train, derive_stream(cfg.rng_seed, "train-data", iter));

  ArnnConfig ac;
  ac.n_bits = ctx.table.n_spin_orbitals();
  ac.n_layers = sc.n_layers;
  ac.features_per_bit = sc.features_per_bit;
  ac.dropout_rate = sc.dropout_rate;
  ac.activation = cfg.activation;
  ac.seed = derive_stream(cfg.rng_seed, "model", iter);
  ArnnModel model = warm ? *warm : init_model(ac);

  TrainPlan plan;
  plan.learning_rate = sc.learning_rate;
  plan.epochs = sc.epochs;
  plan.minibatch_size = sc.minibatch_size;
  plan.seed = derive_stream(cfg.rng_seed, "train", iter);
  auto training = train(model, data, plan);

  const auto beta = beta_for_iteration(cfg, index);
  SampleBatch batch;
  double beta_used = 1.0;
  const auto sample_seed = derive_stream(cfg.rng_seed, "sample", iter);
  if (beta) {
    beta_used = *beta;
    batch = filter_physical(sample_fast(model, ctx.n_network_samples, beta_used, sample_seed), ctx.sector);
  } else {
    auto found = find_beta(model, ctx.n_network_samples, ctx.cap, ctx.sector, sample_seed);
    beta_used = found.beta;
    batch = std::move(found.batch);
  }

  const auto sampled = select_unique(batch, ctx.cap, ctx.forced);
  std::vector<Configuration> expanded = sampled;
  {
    std::unordered_set<Configuration> seen(sampled.begin(), sampled.end());
    for (const auto& c : psi_prev.support)
      if (seen.insert(c).second) expanded.push_back(c);
  }
  const std::size_t limit = std::max(ctx.cap, ctx.forced.size());
  auto candidate = subspace_ground_state(expanded, ctx.table);
  if (expanded.size() > limit) {
    const auto pruned = prune(candidate, ctx.forced, limit);
    candidate = subspace_ground_state(pruned, ctx.table);
  }

  IterationOutput out{std::move(candidate), {}, std::move(model), std::move(training)};
  auto& rec = out.record;
  if (out.state.energy > psi_prev.energy) {
    spdlog::info("iteration {}: candidate {:.10f} above previous {:.10f}; keeping previous state", index,
                 out.state.energy, psi_prev.energy);
    out.state = psi_prev;
    rec.kept_previous = true;
  }
  rec.index = index;
  rec.energy = out.state.energy;
  rec.delta_e = delta(ctx, out.state.energy);
  rec.n_unique = out.state.size();
  rec.beta = beta_used;
  rec.discarded = batch.n_discarded_unphysical;
  rec.stage = stage;
  rec.seconds = elapsed(t0);
  return out;
}

RunResult run(const RunConfig& cfg) { return run(cfg, load_fcidump(cfg.fcidump_path)); }

RunResult run(const RunConfig& cfg, IntegralTable table) {
  const auto ctx = prepare(cfg, std::move(table));
  RunResult result;
  result.reference = ctx.reference;
  result.cap = ctx.cap;
  result.n_network_samples = ctx.n_network_samples;

  const bool write = !cfg.output_dir.empty();
  if (write) std::filesystem::create_directories(cfg.output_dir);
  auto flush_records = [&] {
    if (!write) return;
    std::ofstream out(cfg.output_dir / "records.csv");
    write_records_csv(out, result.records);
  };
  auto log_record = [](const IterationRecord& r) {
    spdlog::info("iter {:>3}  E = {:.10f}  dE = {}  N_U = {}  beta = {:.3f}  stage {}  {:.1f}s", r.index, r.energy,
                 r.delta_e ? fmt::format("{:.3e}", *r.delta_e) : std::string("n/a"), r.n_unique, r.beta, r.stage,
                 r.seconds);
  };
  auto reached = [&](const IterationRecord& r) {
    return cfg.stop_below_delta_e && r.delta_e && *r.delta_e < *cfg.stop_below_delta_e;
  };

  const auto seed = build_seed(cfg, ctx);
  auto [state, rec0] = iteration_zero(seed, cfg, ctx);
  result.records.push_back(rec0);
  log_record(rec0);
  flush_records();

  const int n_stages = static_cast<int>(cfg.stages.size());
  int stage = 0;
  int stalled = 0;
  std::optional<ArnnModel> last_model;
  int last_model_stage = -1;
  result.status = reached(rec0) ? RunStatus::reached_target : RunStatus::max_iterations;

  for (int i = 1; i <= cfg.max_iterations && result.status == RunStatus::max_iterations; ++i) {
    const ArnnModel* warm = cfg.warm_start && last_model && last_model_stage == stage ? &*last_model : nullptr;
    auto out = run_iteration(state, i, stage, cfg, ctx, warm);
    const double improvement = state.energy - out.state.energy;
    if (write && cfg.write_loss_trace) {
      std::ofstream loss(cfg.output_dir / fmt::format("loss_iter{}.csv", i));
      write_loss_csv(loss, out.training);
    }
    result.records.push_back(out.record);
    log_record(out.record);
    flush_records();
    state = std::move(out.state);
    last_model = std::move(out.model);
    last_model_stage = stage;
    if (write) save_checkpoint(cfg.output_dir / fmt::format("model_stage{}.ckpt", stage), *last_model);

    if (reached(result.records.back())) {
      result.status = RunStatus::reached_target;
      break;
    }
    stalled = improvement < cfg.epsilon_ha ? stalled + 1 : 0;
    if (stalled >= cfg.patience) {
      if (stage + 1 < n_stages) {
        ++stage;
        stalled = 0;
        spdlog::info("energy stalled; switching to model stage {}", stage);
      } else {
        result.status = RunStatus::converged;
      }
    }
  }
  result.final_state = std::move(state);
  if (write) {
    std::ofstream out(cfg.output_dir / "final_state.csv");
    write_state_csv(out, result.final_state);
  }
  return result;
}

void write_records_csv(std::ostream& out, const std::vector<IterationRecord>& records) {
  out << kRecordsHeader << '\n';
  for (const auto& r : records)
    out << fmt::format("{},{:.17g},{},{},{:.17g},{},{},{:.3f}\n", r.index, r.energy,
                       r.delta_e ? fmt::format("{:.17g}", *r.delta_e) : std::string(), r.n_unique, r.beta,
                       r.discarded, r.stage, r.seconds);
}

std::vector<IterationRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordsHeader)
    throw std::runtime_error(fmt::format("records CSV header must be '{}'", kRecordsHeader));
  std::vector<IterationRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 8) throw std::runtime_error(fmt::format("records CSV line {} has {} fields", line_no, f.size()));
    IterationRecord r;
    try {
      r.index = std::stoi(f[0]);
      r.energy = std::stod(f[1]);
      if (!f[2].empty()) r.delta_e = std::stod(f[2]);
      r.n_unique = std::stoul(f[3]);
      r.beta = std::stod(f[4]);
      r.discarded = std::stoull(f[5]);
      r.stage = std::stoi(f[6]);
      r.seconds = std::stod(f[7]);
    } catch (const std::exception&) {
      throw std::runtime_error(fmt::format("records CSV line {} is malformed", line_no));
    }
    out.push_back(r);
  }
  return out;
}

void write_state_csv(std::ostream& out, const SparseState& s) {
  out << "bitstring,amplitude\n";
  for (auto i : s.order_by_weight())
    out << fmt::format("{},{:.17g}\n", s.support[i].to_string(), s.amplitudes[i]);
}

}  // namespace arnnsci
