// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any
// failure. Each criterion also carries a wall-time budget.

#include "arnnsci/arnn.hpp"
#include "arnnsci/cli.hpp"
#include "arnnsci/determinant.hpp"
#include "arnnsci/driver.hpp"
#include "arnnsci/eigensolver.hpp"
#include "arnnsci/integrals.hpp"
#include "arnnsci/sampler.hpp"
#include "arnnsci/trainer.hpp"
#include "arnnsci/vmc_oracle.hpp"
#include "fixtures.hpp"
#include "model_helpers.hpp"
#include "oracles/second_quantization.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace arnnsci;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("exception: {}", e.what())};
  }
  const double s = seconds_since(t0);
  const bool in_time = s < budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  fmt::print("{} {}: {}{} ({:.2f} s, budget {:g} s)\n", pass ? "PASS" : "FAIL", name, o.detail,
             in_time ? "" : "; over budget", s, budget_s);
  std::fflush(stdout);
}

const char* const kFciFixtures[] = {"h2_sto3g", "h4_sto3g", "lih_sto3g", "h2o_sto3g"};

SparseState fci(const IntegralTable& t) { return fci_reference(t, sector_of(t), kFciGuard); }

ArnnModel random_model(int m, int layers, int features, std::uint64_t seed, Activation act = Activation::selu) {
  ArnnConfig cfg;
  cfg.n_bits = m;
  cfg.n_layers = layers;
  cfg.features_per_bit = features;
  cfg.activation = act;
  cfg.seed = seed;
  return init_model(cfg);
}

// Random nonzero biases too: with zero biases the first row's pre-activation
// sits exactly on the SELU kink, where the derivative is one-sided.
ArnnModel jittered_model(int m, int layers, int features, std::uint64_t seed, Activation act) {
  auto model = random_model(m, layers, features, seed, act);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (std::size_t p = 0; p < model.n_params(); ++p)
    if (!model.is_masked(p)) model.params[p] += u(rng);
  return model;
}

// Small model fitted to Born samples of the H4 ground state.
ArnnModel h4_model() {
  const auto t = fixtures::load("h4_sto3g");
  const auto gs = fci(t);
  const auto data = draw_training_set(rescale_sparse(gs, 1.0), 100'000, 21);
  auto model = random_model(t.n_spin_orbitals(), 2, 4, 22);
  TrainPlan plan;
  plan.epochs = 200;
  plan.seed = 23;
  (void)train(model, data, plan);
  return model;
}

std::vector<double> dense_frequencies(const SampleBatch& b, int m) {
  std::vector<double> f(std::size_t{1} << m, 0.0);
  const double n = static_cast<double>(b.total_count());
  for (const auto& e : b.entries) f[e.config.bits] += static_cast<double>(e.count) / n;
  return f;
}

double rayleigh(const SparseState& psi, const IntegralTable& t) {
  const auto h = assemble_subspace(psi.support, t);
  std::vector<double> y(psi.size());
  h.multiply(psi.amplitudes, y);
  double num = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) num += psi.amplitudes[i] * y[i];
  return num / psi.norm_squared();
}

Outcome sector_counts() {
  const bool ok = count_sector(24, 14, true) == 627'264 && count_sector(26, 10, true) == 1'656'369 &&
                  count_sector(28, 16, true) == 9'018'009 && count_sector(36, 12, true) == 344'622'096 &&
                  count_fock_space(24) == 16'777'216 && count_fock_space(26) == 67'108'864 &&
                  count_fock_space(28) == 268'435'456 && count_fock_space(36) == 68'719'476'736ULL;
  return {ok, fmt::format("count_sector(36,12)={} count_fock_space(36)={}", count_sector(36, 12, true),
                          count_fock_space(36))};
}

Outcome normalization() {
  double worst = 0.0;
  int models = 0;
  for (int m : {6, 10, 14})
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto model = random_model(m, 1 + static_cast<int>(seed), 3, 100 + seed,
                                      seed == 1 ? Activation::tanh : Activation::selu);
      std::vector<Configuration> all;
      all.reserve(std::size_t{1} << m);
      for (u64 b = 0; b < (u64{1} << m); ++b) all.push_back({b, m});
      const auto lp = log_prob_batch(model, all);
      double sum = 0.0;
      for (double v : lp) sum += std::exp(v);
      worst = std::max(worst, std::abs(sum - 1.0));
      ++models;
    }
  return {worst < 1e-8, fmt::format("{} models, max |sum P - 1| = {:.2e}", models, worst)};
}

Outcome gradient_fd() {
  constexpr double h = 1e-5;
  double worst = 0.0;
  int checked = 0;
  std::mt19937_64 rng(5);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const int m = 6 + static_cast<int>(k % 3) * 2;
    const auto model = jittered_model(m, 1 + static_cast<int>(k % 3), 2 + static_cast<int>(k % 2) * 2, 200 + k,
                                    k % 2 ? Activation::tanh : Activation::selu);
    std::vector<WeightedConfiguration> batch;
    for (int i = 0; i < 4; ++i) batch.push_back({Configuration{rng() & ((u64{1} << m) - 1), m}, 0.25 + 0.25 * i});
    const auto g = log_prob_grad(model, batch);
    auto value = [&](const ArnnModel& mm) {
      double v = 0.0;
      for (const auto& wc : batch) v += wc.weight * log_prob(mm, wc.config);
      return v;
    };
    int here = 0;
    while (here < 6) {
      const std::size_t p = rng() % model.n_params();
      if (model.is_masked(p)) continue;
      auto plus = model;
      auto minus = model;
      plus.params[p] += h;
      minus.params[p] -= h;
      const double fd = (value(plus) - value(minus)) / (2 * h);
      const double scale = std::max(std::abs(fd), std::abs(g.grad[p]));
      worst = std::max(worst, scale > 0.0 ? std::abs(fd - g.grad[p]) / scale : 0.0);
      ++here;
      ++checked;
    }
  }
  return {checked >= 50 && worst < 1e-6,
          fmt::format("{} parameters over 10 models, max relative error {:.2e}", checked, worst)};
}

Outcome hamiltonian_oracle() {
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const auto t = oracle::random_table(4, 4, 300 + trial);
    const int m = t.n_spin_orbitals();
    const auto h = oracle::hamiltonian(t);
    const std::size_t dim = std::size_t{1} << m;
    for (u64 a = 0; a < dim; ++a)
      for (u64 b = 0; b < dim; ++b) worst = std::max(worst, std::abs(slater_condon({a, m}, {b, m}, t).value - h[a * dim + b]));
  }
  return {worst < 1e-12, fmt::format("M=8, 5 tables, all 65536 pairs each, max |diff| = {:.2e}", worst)};
}

Outcome fci_fixtures() {
  double worst = 0.0;
  std::string detail;
  for (const char* stem : kFciFixtures) {
    const auto gs = fci(fixtures::load(stem));
    const double d = std::abs(gs.energy - fixtures::reference(stem)["e_fci"].get<double>());
    worst = std::max(worst, d);
    detail += fmt::format("{} {:.10f}; ", stem, gs.energy);
  }
  return {worst < 1e-7, detail + fmt::format("max |diff| = {:.2e}", worst)};
}

Outcome temperature_scaling(const ArnnModel& model) {
  const int m = model.n_bits();
  constexpr std::uint64_t n = 1'000'000;
  bool ok = true;
  std::string detail;
  for (double beta : {0.3, 0.5, 1.0}) {
    const auto p = helpers::deformed_distribution(model, beta);
    const auto f = dense_frequencies(sample_fast(model, n, beta, 31), m);
    double l1 = 0.0, floor = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      l1 += std::abs(f[i] - p[i]);
      floor += std::sqrt(p[i] * (1.0 - p[i]));
    }
    floor *= std::sqrt(2.0 / (std::numbers::pi * static_cast<double>(n)));
    ok = ok && l1 < 0.01;
    detail += fmt::format("beta={} L1={:.4f} (noise {:.4f}); ", beta, l1, floor);
  }
  const auto b = sample_fast(model, n, 1e-9, 32);
  const double cells = static_cast<double>(std::size_t{1} << m);
  const double mean = static_cast<double>(n) / cells;
  const double sigma = std::sqrt(static_cast<double>(n) * (1.0 / cells) * (1.0 - 1.0 / cells));
  double worst = b.entries.size() == static_cast<std::size_t>(cells) ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& e : b.entries) worst = std::max(worst, std::abs(static_cast<double>(e.count) - mean) / sigma);
  ok = ok && worst < 5.0;
  detail += fmt::format("beta=1e-9 max deviation {:.2f} sigma", worst);
  return {ok, detail};
}

Outcome sampling_scaling(const ArnnModel& model) {
  auto best_time = [&](std::uint64_t n, std::size_t& unique) {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < 21; ++r) {
      const auto t0 = Clock::now();
      const auto b = sample_fast(model, n, 1.0, 40 + static_cast<std::uint64_t>(r));
      best = std::min(best, seconds_since(t0));
      unique = b.entries.size();
    }
    return best;
  };
  std::size_t u_small = 0, u_large = 0;
  const double t_small = best_time(100'000, u_small);
  const double t_large = best_time(10'000'000, u_large);
  return {t_large <= 1.5 * t_small,
          fmt::format("N=1e5: {:.3f} ms ({} unique); N=1e7: {:.3f} ms ({} unique); ratio {:.2f}", 1e3 * t_small,
                      u_small, 1e3 * t_large, u_large, t_large / t_small)};
}

Outcome end_to_end() {
  bool ok = true;
  std::string detail;
  for (SeedKind kind : {SeedKind::hf, SeedKind::cisd, SeedKind::gs_sample}) {
    RunConfig cfg;
    cfg.fcidump_path = fixtures::path("h2o_sto3g.fcidump");
    cfg.seed_kind = kind;
    cfg.n_gs_samples = 1000;
    cfg.max_iterations = 8;
    cfg.rng_seed = 1;
    const auto r = run(cfg);
    const double e_fci = r.reference->ground_state.energy;
    std::optional<int> first;
    for (const auto& rec : r.records)
      if (rec.index <= 8 && rec.energy - e_fci < 1.6e-3 && !first) first = rec.index;
    const double final_de = r.records.back().energy - e_fci;
    ok = ok && first.has_value() && r.cap == 2 * r.reference->n_ca;
    detail += fmt::format("{}: cap {} first i={} final dE={:.2e}; ", to_string(kind), r.cap,
                          first ? std::to_string(*first) : "none", final_de);
  }
  cli::FciOptions opt;
  opt.fcidump = fixtures::path("c2h2_sto3g.fcidump");
  opt.chem_acc = kChemicalAccuracy;
  cli::FciReport report;
  std::ostringstream sink;
  const int code = cli::cmd_fci(opt, sink, &report);
  const bool anchor = code == cli::kExitOk && report.n_ca && *report.n_ca >= 400 && *report.n_ca <= 1600;
  detail += fmt::format("N_CA(C2H2)={}", report.n_ca ? std::to_string(*report.n_ca) : "none");
  return {ok && anchor, detail};
}

Outcome monotonicity() {
  std::mt19937_64 rng(77);
  const char* const stems[] = {"h4_sto3g", "lih_sto3g"};
  const SeedKind kinds[] = {SeedKind::hf, SeedKind::cisd, SeedKind::gs_sample};
  int runs = 0, records = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 20; ++k) {
    const std::string stem = stems[k % 2];
    RunConfig cfg;
    cfg.fcidump_path = fixtures::path(stem + ".fcidump");
    cfg.seed_kind = kinds[k % 3];
    cfg.rng_seed = rng();
    cfg.n_unique_cap = 4 + rng() % 60;
    cfg.n_gs_samples = 200 + rng() % 2000;
    cfg.max_iterations = 5;
    cfg.warm_start = (k % 4) == 3;
    cfg.stages = default_stages();
    for (auto& s : cfg.stages) {
      s.n_train = 1000 + rng() % 3000;
      s.epochs = 2 + static_cast<int>(rng() % 6);
    }
    if (k % 5 == 4) cfg.beta_schedule.automatic = true;
    const auto r = run(cfg);
    for (std::size_t i = 1; i < r.records.size(); ++i)
      worst = std::max(worst, r.records[i].energy - r.records[i - 1].energy);
    records += static_cast<int>(r.records.size());
    ++runs;
  }
  return {runs == 20 && worst <= 1e-12,
          fmt::format("{} runs, {} records, max E_i - E_(i-1) = {:.2e}", runs, records, worst)};
}

Outcome appendix_oracle() {
  double worst_eloc = 0.0;
  for (const char* stem : kFciFixtures) {
    const auto t = fixtures::load(stem);
    const auto gs = fci(t);
    auto perturbed = gs;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (auto& a : perturbed.amplitudes) a *= u(rng);
    const auto cisd = subspace_ground_state(cisd_space(aufbau(t.n_spin_orbitals(), t.n_electrons), sector_of(t)), t);
    for (const SparseState* s : {&gs, static_cast<const SparseState*>(&perturbed), &cisd})
      worst_eloc = std::max(worst_eloc, std::abs(local_energy_expectation(*s, t) - rayleigh(*s, t)));
  }

  double worst_ups = 0.0;
  std::size_t max_dim = 0;
  for (const char* stem : kFciFixtures) {
    const auto t = fixtures::load(stem);
    auto order = born_order(fci(t));
    order.resize(std::min<std::size_t>(order.size(), 50));
    const std::size_t n = order.size();
    max_dim = std::max(max_dim, n);
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd h(ni, ni);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = slater_condon(order[i], order[j], t).value;
    // steepest descent on x_n = cos(lambda_n) sqrt(N_n), exact 2x2 line search
    Eigen::VectorXd x = Eigen::VectorXd::Ones(ni).normalized();
    double e = x.dot(h * x);
    for (int it = 0; it < 20000; ++it) {
      const Eigen::VectorXd g = h * x - e * x;
      if (g.norm() < 1e-11) break;
      Eigen::MatrixXd v(ni, 2);
      v.col(0) = x;
      v.col(1) = (g - x.dot(g) * x).normalized();
      const Eigen::Matrix2d small = v.transpose() * h * v;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(small);
      x = (v * es.eigenvectors().col(0)).normalized();
      e = x.dot(h * x);
    }
    std::vector<double> counts(n), lambda(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = x[static_cast<Eigen::Index>(i)];
      counts[i] = xi * xi;
      lambda[i] = xi < 0.0 ? std::numbers::pi : 0.0;
    }
    const double ups = upsilon_lambda(order, counts, lambda, t).energy();
    worst_ups = std::max(worst_ups, std::abs(ups - subspace_ground_state(order, t).energy));
  }
  return {worst_eloc < 1e-9 && worst_ups < 1e-8 && max_dim <= 50,
          fmt::format("max |<E_loc> - R| = {:.2e}; max |Upsilon - E_sub| = {:.2e} (dim <= {})", worst_eloc, worst_ups,
                      max_dim)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  criterion("sector combinatorics", 1, sector_counts);
  criterion("ARNN normalization", 30, normalization);
  criterion("gradient oracle", 60, gradient_fd);
  criterion("Hamiltonian oracle", 120, hamiltonian_oracle);
  criterion("FCI fixtures", 600, fci_fixtures);
  const auto t0 = Clock::now();
  const auto model = h4_model();
  const double train_s = seconds_since(t0);
  fmt::print("info: H4 model trained in {:.2f} s\n", train_s);
  criterion("temperature scaling", 60, [&] { return temperature_scaling(model); });
  criterion("fast-sampling scaling", 60, [&] { return sampling_scaling(model); });
  criterion("end-to-end convergence", 1800, end_to_end);
  criterion("monotonicity suite", 600, monotonicity);
  criterion("local-energy oracle", 60, appendix_oracle);
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
