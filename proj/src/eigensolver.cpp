#include "arnnsci/eigensolver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace arnnsci {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double residual_norm(const SparseMatrix& h, std::span<const double> x, double e) {
  std::vector<double> y(x.size());
  h.multiply(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (y[i] - e * x[i]) * (y[i] - e * x[i]);
  return std::sqrt(s);
}

void fix_sign(std::vector<double>& v) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  if (v[arg] < 0.0)
    for (double& x : v) x = -x;
}

void normalize(std::vector<double>& v) {
  const double n = std::sqrt(dot(v, v));
  for (double& x : v) x /= n;
}

Eigenpair dense_solve(const SparseMatrix& h) {
  const auto d = h.to_dense();
  const auto n = static_cast<Eigen::Index>(h.dim);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(d.data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NotConverged("dense eigensolver failed", std::numeric_limits<double>::infinity());
  Eigenpair out;
  out.energy = es.eigenvalues()(0);
  out.gap = n > 1 ? es.eigenvalues()(1) - es.eigenvalues()(0) : std::numeric_limits<double>::infinity();
  out.vector.assign(es.eigenvectors().col(0).data(), es.eigenvectors().col(0).data() + n);
  return out;
}

Eigenpair lanczos(const SparseMatrix& h, const EigenOptions& opt) {
  const std::size_t n = h.dim;
  // start on the lowest diagonal element, with a small deterministic spread
  std::size_t arg = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (h.diagonal(i) < h.diagonal(arg)) arg = i;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1e-3 * std::sin(static_cast<double>(i) + 1.0);
  x[arg] = 1.0;
  normalize(x);

  int matvecs = 0;
  double best_residual = std::numeric_limits<double>::infinity();
  const std::size_t kmax = std::max<std::size_t>(2, std::min(opt.krylov_max, n));
  std::vector<std::vector<double>> basis;
  std::vector<double> w(n);
  while (true) {
    basis.clear();
    basis.push_back(x);
    std::vector<double> alpha, beta;
    double energy = 0.0, gap = std::numeric_limits<double>::infinity();
    Eigen::VectorXd ritz;
    for (std::size_t j = 0;; ++j) {
      h.multiply(basis[j], w);
      ++matvecs;
      alpha.push_back(dot(w, basis[j]));
      // full reorthogonalization, twice is enough
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& v : basis) {
          const double c = dot(w, v);
          for (std::size_t i = 0; i < n; ++i) w[i] -= c * v[i];
        }
      const double b = std::sqrt(dot(w, w));

      const auto k = static_cast<Eigen::Index>(alpha.size());
      Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
      for (Eigen::Index i = 0; i < k; ++i) {
        tri(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
      energy = es.eigenvalues()(0);
      gap = k > 1 ? es.eigenvalues()(1) - energy : std::numeric_limits<double>::infinity();
      ritz = es.eigenvectors().col(0);
      const double estimate = std::abs(b * ritz(k - 1));
      const bool invariant = b < 1e-14 * std::max(1.0, std::abs(energy));
      if (estimate <= 0.1 * opt.tol || invariant || basis.size() >= kmax || matvecs >= opt.max_matvecs) {
        break;
      }
      beta.push_back(b);
      for (double& v : w) v /= b;
      basis.push_back(w);
    }
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const double c = ritz(static_cast<Eigen::Index>(j));
      for (std::size_t i = 0; i < n; ++i) x[i] += c * basis[j][i];
    }
    normalize(x);
    const double r = residual_norm(h, x, energy);
    ++matvecs;
    best_residual = std::min(best_residual, r);
    if (r <= opt.tol) {
      Eigenpair out;
      out.energy = energy;
      out.vector = x;
      out.gap = gap;
      out.matvecs = matvecs;
      return out;
    }
    if (matvecs >= opt.max_matvecs)
      throw NotConverged(fmt::format("Lanczos did not converge in {} matvecs (best residual {:.3e})", matvecs,
                                     best_residual),
                         best_residual);
  }
}

}  // namespace

Eigenpair lowest_eigenpair(const SparseMatrix& h, const EigenOptions& opt) {
  if (h.dim == 0) throw std::invalid_argument("lowest_eigenpair: empty matrix");
  Eigenpair out;
  if (h.dim == 1) {
    out.energy = h.at(0, 0);
    out.vector = {1.0};
    out.gap = std::numeric_limits<double>::infinity();
  } else if (h.dim <= opt.dense_limit) {
    out = dense_solve(h);
  } else {
    out = lanczos(h, opt);
  }
  fix_sign(out.vector);
  // Rayleigh quotient of the returned vector, then an explicit residual check
  std::vector<double> y(h.dim);
  h.multiply(out.vector, y);
  out.energy = dot(out.vector, y);
  out.residual = residual_norm(h, out.vector, out.energy);
  if (out.residual > opt.tol)
    throw NotConverged(fmt::format("eigenpair residual {:.3e} exceeds tolerance {:.1e}", out.residual, opt.tol),
                       out.residual);
  if (out.gap < kDegeneracyGap)
    spdlog::warn("near-degenerate ground state (gap {:.2e} Ha); returning the sign-fixed vector", out.gap);
  return out;
}

SparseState subspace_ground_state(std::span<const Configuration> basis, const IntegralTable& t,
                                  const EigenOptions& opt) {
  const auto h = assemble_subspace(basis, t);
  auto pair = lowest_eigenpair(h, opt);
  SparseState s;
  s.support.assign(basis.begin(), basis.end());
  s.amplitudes = std::move(pair.vector);
  s.energy = pair.energy;
  return s;
}

SparseState fci_reference(const IntegralTable& t, const SymmetrySector& s, std::uint64_t guard,
                          const EigenOptions& opt) {
  const auto size = count_symmetric(s);
  if (size > guard)
    throw GuardExceeded(fmt::format("symmetry sector has {} configurations, above the FCI guard {}", size, guard));
  const auto basis = enumerate_sector(s, guard);
  if (basis.empty()) throw std::invalid_argument("symmetry sector is empty");
  return subspace_ground_state(basis, t, opt);
}

std::vector<Configuration> born_order(const SparseState& gs) {
  std::vector<Configuration> out;
  out.reserve(gs.size());
  for (auto i : gs.order_by_weight()) out.push_back(gs.support[i]);
  return out;
}

std::size_t n_ca(const SparseState& gs, const IntegralTable& t, double chem_acc) {
  if (gs.support.empty()) throw std::invalid_argument("n_ca: empty state");
  const auto sorted = born_order(gs);
  const std::size_t n = sorted.size();
  auto ok = [&](std::size_t k) {
    const auto e = subspace_ground_state(std::span<const Configuration>(sorted.data(), k), t).energy;
    return e <= gs.energy + chem_acc;
  };
  if (std::isinf(chem_acc) || ok(1)) return 1;
  // gallop: find hi with ok(hi), lo with !ok(lo)
  std::size_t lo = 1, hi = 2;
  while (hi < n && !ok(hi)) {
    lo = hi;
    hi *= 2;
  }
  if (hi >= n) hi = n;  // the full support reproduces gs.energy
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

std::uint64_t expected_samples(const SparseState& gs, std::size_t k) {
  if (k < 1 || k > gs.size()) throw std::out_of_range("expected_samples: index outside the support");
  const auto order = gs.order_by_weight();
  const double a = gs.amplitudes[order[k - 1]];
  const double p = a * a;
  if (!(p > 0.0)) throw std::domain_error("expected_samples: configuration has zero probability");
  return static_cast<std::uint64_t>(std::ceil(1.0 / p));
}

}  // namespace arnnsci
