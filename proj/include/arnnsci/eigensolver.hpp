#pragma once

/**
 * @file eigensolver.hpp
 * @brief Lowest eigenpair of subspace Hamiltonians, FCI references and N_CA.
 *
 * Matrices up to kDenseLimit are solved densely. Larger ones use Lanczos with
 * full reorthogonalization, restarted from the current Ritz vector whenever
 * the Krylov basis reaches kKrylovMax vectors.
 */

#include "arnnsci/integrals.hpp"
#include "arnnsci/sparse.hpp"
#include "arnnsci/state.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace arnnsci {

inline constexpr std::size_t kDenseLimit = 2000;
inline constexpr std::size_t kKrylovMax = 120;
inline constexpr int kMaxMatvecs = 500;
inline constexpr double kEigenTol = 1e-9;
inline constexpr double kDegeneracyGap = 1e-8;
inline constexpr double kChemicalAccuracy = 1.6e-3;
inline constexpr std::uint64_t kFciGuard = 1'000'000;

struct NotConverged : std::runtime_error {
  NotConverged(const std::string& what, double best_residual)
      : std::runtime_error(what), residual(best_residual) {}
  double residual;
};

struct Eigenpair {
  double energy = 0.0;
  std::vector<double> vector;  // normalized, largest |entry| positive
  double residual = 0.0;       // ||H x - E x||, from an explicit matvec
  double gap = 0.0;            // estimate of E_1 - E_0 (infinite for dim 1)
  int matvecs = 0;
};

struct EigenOptions {
  double tol = kEigenTol;
  std::size_t dense_limit = kDenseLimit;
  std::size_t krylov_max = kKrylovMax;
  int max_matvecs = kMaxMatvecs;
};

[[nodiscard]] Eigenpair lowest_eigenpair(const SparseMatrix& h, const EigenOptions& opt = {});

/// Assemble H on `basis` and return its ground state (support = basis).
[[nodiscard]] SparseState subspace_ground_state(std::span<const Configuration> basis, const IntegralTable& t,
                                                const EigenOptions& opt = {});

/// Exact ground state over the whole symmetry sector.
[[nodiscard]] SparseState fci_reference(const IntegralTable& t, const SymmetrySector& s,
                                        std::uint64_t guard = kFciGuard, const EigenOptions& opt = {});

/// Support of gs sorted by Born probability, descending, ties lexicographic.
[[nodiscard]] std::vector<Configuration> born_order(const SparseState& gs);

/// Smallest k such that the k most probable configurations of gs give a
/// subspace energy within chem_acc of gs.energy. Galloping then bisection.
[[nodiscard]] std::size_t n_ca(const SparseState& gs, const IntegralTable& t, double chem_acc = kChemicalAccuracy);

/// ceil(1 / p_k) for the k-th most probable configuration (1-based).
[[nodiscard]] std::uint64_t expected_samples(const SparseState& gs, std::size_t k);

}  // namespace arnnsci
