#pragma once

/**
 * @file integrals.hpp
 * @brief FCIDUMP ingestion and Slater-Condon matrix elements of
 *
 *   H = E_core + sum_pq h_pq a+_p a_q + 1/2 sum_pqrs (pq|rs) a+_p a+_r a_s a_q
 *
 * with spin-orbital integrals built from the spatial ones and spin deltas.
 * Two-electron integrals are stored in chemists' notation (pq|rs); the
 * antisymmetrized combinations <pq||rs> = (pr|qs) - (ps|qr) are formed at
 * evaluation time.
 */

#include "arnnsci/determinant.hpp"
#include "arnnsci/sparse.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace arnnsci {

struct FcidumpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Spatial-orbital integrals of one molecule. Energies in Hartree.
struct IntegralTable {
  int n_spatial = 0;
  int n_electrons = 0;
  int ms2 = 0;
  double core_energy = 0.0;
  std::vector<double> h1;  // n^2, symmetric
  std::vector<double> h2;  // n^4, (pq|rs) with all 8 permutations filled
  std::vector<std::uint8_t> orbital_irreps;
  std::uint8_t target_irrep = 0;

  IntegralTable() = default;
  IntegralTable(int n_spatial, int n_electrons);

  [[nodiscard]] int n_spin_orbitals() const noexcept { return 2 * n_spatial; }

  [[nodiscard]] double one_body(int p, int q) const noexcept {
    return h1[static_cast<std::size_t>(p * n_spatial + q)];
  }
  [[nodiscard]] double two_body(int p, int q, int r, int s) const noexcept {
    const auto n = static_cast<std::size_t>(n_spatial);
    return h2[((static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)) * n +
               static_cast<std::size_t>(r)) * n + static_cast<std::size_t>(s)];
  }

  void set_one_body(int p, int q, double v);
  /// Sets (pq|rs) and its 7 symmetry partners.
  void set_two_body(int p, int q, int r, int s, double v);

  /// Largest violation of the h1 / 8-fold h2 symmetries.
  [[nodiscard]] double symmetry_violation() const;
};

[[nodiscard]] SymmetrySector sector_of(const IntegralTable& t);

/// Parses FCIDUMP text: `&FCI NORB=..,NELEC=..,MS2=..,ORBSYM=..,ISYM=.. &END`
/// followed by `value i j k l` lines (1-based, chemists' order; k=l=0 is a
/// one-body term and i=j=k=l=0 the core energy). Molpro irrep k maps to the
/// XOR label k-1.
[[nodiscard]] IntegralTable parse_fcidump(std::istream& in);
[[nodiscard]] IntegralTable load_fcidump(const std::filesystem::path& path);

/// Writes a table back in FCIDUMP form (unique permutations only).
void write_fcidump(std::ostream& out, const IntegralTable& t);

struct MatrixElement {
  double value = 0.0;
  int excitation_degree = 0;  // 0, 1, 2, or 3 meaning "more than two"
};

/// <a|H|b>. Degree is decided from a ^ b before any integral is touched.
[[nodiscard]] MatrixElement slater_condon(const Configuration& a, const Configuration& b,
                                          const IntegralTable& t);

/// Sign of the normal-ordered string that turns b into a; exposed for tests.
[[nodiscard]] int excitation_phase(const Configuration& a, const Configuration& b);

struct DuplicateConfiguration : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kAllPairsLimit = 5000;

/// Hamiltonian restricted to `basis` (rows/columns in basis order). Bases
/// up to kAllPairsLimit are assembled from all pairs, larger ones through
/// excitation connectivity. Rows are built in parallel.
[[nodiscard]] SparseMatrix assemble_subspace(std::span<const Configuration> basis,
                                             const IntegralTable& t,
                                             std::size_t all_pairs_limit = kAllPairsLimit);

}  // namespace arnnsci
