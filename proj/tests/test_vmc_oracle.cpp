#include "arnnsci/vmc_oracle.hpp"

#include "arnnsci/eigensolver.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace arnnsci;

namespace {

const char* const kFixtures[] = {"h2_sto3g", "h4_sto3g", "lih_sto3g", "h2o_sto3g"};

SparseState fci(const IntegralTable& t) { return fci_reference(t, sector_of(t), kFciGuard); }

double rayleigh(const SparseState& psi, const IntegralTable& t) {
  const auto h = assemble_subspace(psi.support, t);
  std::vector<double> y(psi.size());
  h.multiply(psi.amplitudes, y);
  double num = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) num += psi.amplitudes[i] * y[i];
  return num / psi.norm_squared();
}

SparseState perturbed(SparseState s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (auto& a : s.amplitudes) a *= u(rng);
  return s;
}

}  // namespace

TEST_CASE("local energy of an eigenstate is its energy") {
  const auto t = fixtures::load("h2_sto3g");
  const auto gs = fci(t);
  const double e = fixtures::reference("h2_sto3g")["e_fci"].get<double>();
  for (std::size_t i = 0; i < gs.size(); ++i)
    if (std::abs(gs.amplitudes[i]) > 1e-12) CHECK(local_energy(gs, gs.support[i], t) == doctest::Approx(e).epsilon(1e-9));
}

TEST_CASE("local energy of a point mass is the diagonal") {
  const auto t = fixtures::load("h4_sto3g");
  const auto hf = aufbau(8, 4);
  const auto psi = point_mass(hf, 0.0);
  CHECK(local_energy(psi, hf, t) == doctest::Approx(fixtures::reference("h4_sto3g")["e_hf"].get<double>()).epsilon(1e-12));
  CHECK_THROWS_AS((void)local_energy(psi, aufbau(8, 2), t), std::invalid_argument);
}

TEST_CASE("Born-weighted local energy equals the Rayleigh quotient") {
  for (const char* name : kFixtures) {
    CAPTURE(name);
    const auto t = fixtures::load(name);
    const auto gs = fci(t);
    CHECK(std::abs(local_energy_expectation(gs, t) - gs.energy) < 1e-9);
    // a state that is not an eigenvector
    auto s = perturbed(gs, 3);
    CHECK(std::abs(local_energy_expectation(s, t) - rayleigh(s, t)) < 1e-9);
  }
  const auto t = fixtures::load("h4_sto3g");
  const auto cisd = subspace_ground_state(cisd_space(aufbau(8, 4), sector_of(t)), t);
  const auto s = perturbed(cisd, 11);
  CHECK(std::abs(local_energy_expectation(s, t) - rayleigh(s, t)) < 1e-9);
}

TEST_CASE("sampled local energies average to the eigenvalue") {
  const auto t = fixtures::load("lih_sto3g");
  const auto gs = fci(t);
  const auto counts = draw_training_set(rescale_sparse(gs, 1.0), 5000, 9);
  const auto samples = local_energy_samples(gs, counts, t);
  REQUIRE(samples.size() == counts.entries.size());
  for (const auto& s : samples) CHECK(s.e_loc == doctest::Approx(gs.energy).epsilon(1e-9));
  CHECK(sample_mean(samples) == doctest::Approx(gs.energy).epsilon(1e-9));
}

TEST_CASE("Upsilon at the subspace eigenvector is the subspace energy") {
  for (const char* name : kFixtures) {
    CAPTURE(name);
    const auto t = fixtures::load(name);
    const auto basis = cisd_space(aufbau(t.n_spin_orbitals(), t.n_electrons), sector_of(t));
    const auto sub = subspace_ground_state(basis, t);
    std::vector<double> counts;
    std::vector<double> lambda;
    for (double a : sub.amplitudes) {
      counts.push_back(a * a);
      lambda.push_back(a < 0.0 ? std::numbers::pi : 0.0);
    }
    const auto ul = upsilon_lambda(sub.support, counts, lambda, t);
    CHECK(ul.lambda == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(ul.upsilon - sub.energy) < 1e-9);
  }
}

TEST_CASE("Upsilon of a single configuration is its diagonal element") {
  const auto t = fixtures::load("h4_sto3g");
  const auto hf = aufbau(8, 4);
  const std::vector<Configuration> s{hf};
  const std::vector<double> c{17.0};
  const std::vector<double> l{0.0};
  const auto ul = upsilon_lambda(s, c, l, t);
  CHECK(ul.upsilon == doctest::Approx(slater_condon(hf, hf, t).value).epsilon(1e-14));
  CHECK(ul.lambda == doctest::Approx(1.0));
}

TEST_CASE("Upsilon is bounded below by the subspace energy") {
  const auto t = fixtures::load("lih_sto3g");
  const auto basis = cisd_space(aufbau(12, 4), sector_of(t));
  const auto e0 = subspace_ground_state(basis, t).energy;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  std::uniform_int_distribution<int> count(0, 40);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> c(basis.size());
    std::vector<double> l(basis.size());
    for (auto& x : c) x = count(rng);
    c[0] += 1.0;
    for (auto& x : l) x = phase(rng);
    const auto ul = upsilon_lambda(basis, c, l, t);
    CHECK(ul.lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ul.upsilon >= e0 - 1e-10);
  }
}

TEST_CASE("minimizing Upsilon over counts and phases recovers the subspace energy") {
  // Steepest descent with exact line search (2x2 Rayleigh-Ritz) on the
  // real vector x_n = cos(lambda_n) sqrt(N_n); H from Slater-Condon rules.
  for (const char* name : {"lih_sto3g", "h2o_sto3g"}) {
    CAPTURE(name);
    const auto t = fixtures::load(name);
    const auto gs = fci(t);
    auto order = born_order(gs);
    order.resize(std::min<std::size_t>(order.size(), 50));
    const std::size_t n = order.size();
    Eigen::MatrixXd h(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) h(i, j) = slater_condon(order[i], order[j], t).value;

    Eigen::VectorXd x = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)).normalized();
    double e = x.dot(h * x);
    for (int it = 0; it < 20000; ++it) {
      const Eigen::VectorXd g = h * x - e * x;
      if (g.norm() < 1e-11) break;
      Eigen::MatrixXd v(n, 2);
      v.col(0) = x;
      v.col(1) = (g - x.dot(g) * x).normalized();
      const Eigen::Matrix2d small = v.transpose() * h * v;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(small);
      x = (v * es.eigenvectors().col(0)).normalized();
      e = x.dot(h * x);
    }
    std::vector<double> counts(n);
    std::vector<double> lambda(n);
    for (std::size_t i = 0; i < n; ++i) {
      counts[i] = x[static_cast<Eigen::Index>(i)] * x[static_cast<Eigen::Index>(i)];
      lambda[i] = x[static_cast<Eigen::Index>(i)] < 0.0 ? std::numbers::pi : 0.0;
    }
    const auto ul = upsilon_lambda(order, counts, lambda, t);
    const auto exact = subspace_ground_state(order, t);
    CHECK(std::abs(ul.energy() - exact.energy) < 1e-8);
  }
}

TEST_CASE("training-set overload and support check") {
  const auto t = fixtures::load("h4_sto3g");
  const auto gs = fci(t);
  const auto counts = draw_training_set(rescale_sparse(gs, 1.0), 100000, 4);
  std::vector<double> lambda;
  for (const auto& e : counts.entries) {
    const auto it = std::find(gs.support.begin(), gs.support.end(), e.config);
    lambda.push_back(gs.amplitudes[static_cast<std::size_t>(it - gs.support.begin())] < 0.0 ? std::numbers::pi : 0.0);
  }
  const auto ul = upsilon_lambda(gs, counts, lambda, t);
  CHECK(ul.lambda == doctest::Approx(1.0));
  CHECK(ul.upsilon >= gs.energy - 1e-10);
  CHECK(ul.upsilon - gs.energy < 1e-3);

  const auto hf = point_mass(aufbau(8, 4), 0.0);
  CHECK_THROWS_AS((void)upsilon_lambda(hf, counts, lambda, t), std::invalid_argument);
}

TEST_CASE("Metropolis ratio") {
  CHECK(metropolis_ratio(0.5, -0.25) == doctest::Approx(0.25));
  CHECK(metropolis_ratio(-2.0, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)metropolis_ratio(0.0, 1.0), std::invalid_argument);

  ArnnConfig cfg;
  cfg.n_bits = 8;
  cfg.seed = 21;
  const auto m = init_model(cfg);
  const Configuration a(0b00110011, 8);
  const Configuration b(0b01010011, 8);
  const double pa = std::exp(log_prob(m, a));
  const double pb = std::exp(log_prob(m, b));
  CHECK(metropolis_ratio(m, a, b) == doctest::Approx(pb / pa).epsilon(1e-12));
  CHECK(metropolis_ratio(m, a, b) * metropolis_ratio(m, b, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(metropolis_ratio(m, a, b) == doctest::Approx(metropolis_ratio(std::sqrt(pa), std::sqrt(pb))).epsilon(1e-12));
}
