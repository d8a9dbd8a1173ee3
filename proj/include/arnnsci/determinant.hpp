#pragma once

/**
 * @file determinant.hpp
 * @brief Bit-packed electronic configurations (Slater determinant labels).
 *
 * Bit q of `bits` is the occupation n_q of spin-orbital q. The first half of
 * the bits (0 .. M/2-1) is the spin-down block, the second half the spin-up
 * block. Within each block spatial orbitals run in decreasing energy, so the
 * lowest spatial orbital p = 0 sits at the *end* of its block:
 *
 *   spin-down of p -> bit M/2 - 1 - p
 *   spin-up   of p -> bit M   - 1 - p
 *
 * With this layout the closed-shell reference of 4 electrons in 4 spatial
 * orbitals reads (0,0,1,1,0,0,1,1) left to right.
 */

#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arnnsci {

using u64 = std::uint64_t;

inline constexpr int kMaxSpinOrbitals = 64;

enum class SpinBlock { down, up };

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GuardExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Occupation bitstring of M <= 64 spin-orbitals.
struct Configuration {
  u64 bits = 0;
  int n_spin_orbitals = 0;

  constexpr Configuration() = default;
  constexpr Configuration(u64 b, int m) : bits(b), n_spin_orbitals(m) {}

  [[nodiscard]] constexpr bool occupied(int q) const noexcept { return (bits >> q) & u64{1}; }
  [[nodiscard]] constexpr int popcount() const noexcept { return std::popcount(bits); }

  constexpr bool operator==(const Configuration&) const = default;

  /// Parse "0011..." read left to right as (n_0, ..., n_{M-1}).
  static Configuration from_string(std::string_view text);
  [[nodiscard]] std::string to_string() const;
};

/// Lexicographic order on (n_0, n_1, ..., n_{M-1}); the first differing
/// occupation decides, with 0 < 1.
[[nodiscard]] constexpr bool lex_less(u64 a, u64 b) noexcept {
  const u64 diff = a ^ b;
  if (diff == 0) return false;
  const u64 lowest = diff & (~diff + 1);
  return (a & lowest) == 0;
}

struct LexLess {
  constexpr bool operator()(const Configuration& a, const Configuration& b) const noexcept {
    return lex_less(a.bits, b.bits);
  }
};

[[nodiscard]] constexpr int spin_orbital_bit(int spatial, SpinBlock spin, int m) noexcept {
  return spin == SpinBlock::down ? m / 2 - 1 - spatial : m - 1 - spatial;
}
[[nodiscard]] constexpr int spatial_of_bit(int bit, int m) noexcept {
  return bit < m / 2 ? m / 2 - 1 - bit : m - 1 - bit;
}
[[nodiscard]] constexpr SpinBlock spin_of_bit(int bit, int m) noexcept {
  return bit < m / 2 ? SpinBlock::down : SpinBlock::up;
}
[[nodiscard]] constexpr u64 block_mask(SpinBlock block, int m) noexcept {
  const int half = m / 2;
  const u64 low = half >= 64 ? ~u64{0} : ((u64{1} << half) - 1);
  return block == SpinBlock::down ? low : (low << half);
}

/// Particle-number and point-group sector that physical configurations
/// must belong to. Irreps are XOR labels of Z2^3 (totally symmetric = 0).
struct SymmetrySector {
  int n_electrons = 0;
  bool require_sz_zero = true;
  std::uint8_t target_irrep = 0;
  std::vector<std::uint8_t> orbital_irreps;  // one per spatial orbital

  [[nodiscard]] int n_spin_orbitals() const noexcept {
    return 2 * static_cast<int>(orbital_irreps.size());
  }
  /// Sector with all orbitals totally symmetric.
  static SymmetrySector trivial(int n_spatial, int n_electrons, bool sz_zero = true);
};

[[nodiscard]] int popcount_block(const Configuration& c, SpinBlock block);

/// XOR of the irreps of all occupied spatial orbitals (doubly occupied cancel).
[[nodiscard]] std::uint8_t configuration_irrep(const Configuration& c,
                                               const std::vector<std::uint8_t>& orbital_irreps);

[[nodiscard]] bool passes_symmetry(const Configuration& c, const SymmetrySector& s);

[[nodiscard]] u64 binomial(int n, int k);

/// C(M/2, N_e/2)^2 with sz_zero, C(M, N_e) otherwise.
[[nodiscard]] u64 count_sector(int m, int n_electrons, bool sz_zero);

/// 2^M, the unconstrained Fock-space dimension.
[[nodiscard]] u64 count_fock_space(int m);

/// Exact size of the symmetry-respecting sector (particle number, Sz and
/// irrep), counted by a per-irrep dynamic program without enumeration.
[[nodiscard]] u64 count_symmetric(const SymmetrySector& s);

inline constexpr u64 kEnumerationGuard = 100'000'000;

/// Every configuration passing `s`, each once, in lexicographic order.
/// Throws GuardExceeded when count_symmetric(s) > guard.
[[nodiscard]] std::vector<Configuration> enumerate_sector(const SymmetrySector& s,
                                                          u64 guard = kEnumerationGuard);

enum class ExcitationOrder { singles, doubles };

/// Calls `visit(excited)` once for every spin-preserving single or double
/// excitation of c.
void for_each_excitation(const Configuration& c, ExcitationOrder order,
                         const std::function<void(const Configuration&)>& visit);

[[nodiscard]] std::vector<Configuration> excitations(const Configuration& c, ExcitationOrder order);

/// Closed-shell aufbau determinant: the lowest N_e/2 spatial orbitals doubly occupied.
[[nodiscard]] Configuration aufbau(int m, int n_electrons);

/// Reference plus all singles and doubles that pass `s`, reference first,
/// then lexicographic.
[[nodiscard]] std::vector<Configuration> cisd_space(const Configuration& reference,
                                                    const SymmetrySector& s);

}  // namespace arnnsci

template <>
struct std::hash<arnnsci::Configuration> {
  std::size_t operator()(const arnnsci::Configuration& c) const noexcept {
    // splitmix64 finalizer
    arnnsci::u64 z = c.bits + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};
