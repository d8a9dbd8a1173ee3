#include "arnnsci/determinant.hpp"

#include <algorithm>
#include <array>
#include <fmt/format.h>

namespace arnnsci {

Configuration Configuration::from_string(std::string_view text) {
  if (text.size() > static_cast<std::size_t>(kMaxSpinOrbitals))
    throw DimensionError(fmt::format("bitstring of length {} exceeds {} spin-orbitals", text.size(),
                                     kMaxSpinOrbitals));
  u64 bits = 0;
  for (std::size_t q = 0; q < text.size(); ++q) {
    if (text[q] == '1')
      bits |= u64{1} << q;
    else if (text[q] != '0')
      throw std::invalid_argument(fmt::format("invalid character '{}' in bitstring", text[q]));
  }
  return {bits, static_cast<int>(text.size())};
}

std::string Configuration::to_string() const {
  std::string out(static_cast<std::size_t>(n_spin_orbitals), '0');
  for (int q = 0; q < n_spin_orbitals; ++q)
    if (occupied(q)) out[static_cast<std::size_t>(q)] = '1';
  return out;
}

SymmetrySector SymmetrySector::trivial(int n_spatial, int n_electrons, bool sz_zero) {
  SymmetrySector s;
  s.n_electrons = n_electrons;
  s.require_sz_zero = sz_zero;
  s.orbital_irreps.assign(static_cast<std::size_t>(n_spatial), 0);
  return s;
}

int popcount_block(const Configuration& c, SpinBlock block) {
  return std::popcount(c.bits & block_mask(block, c.n_spin_orbitals));
}

std::uint8_t configuration_irrep(const Configuration& c,
                                 const std::vector<std::uint8_t>& orbital_irreps) {
  std::uint8_t irrep = 0;
  u64 rest = c.bits;
  while (rest) {
    const int bit = std::countr_zero(rest);
    rest &= rest - 1;
    irrep ^= orbital_irreps[static_cast<std::size_t>(spatial_of_bit(bit, c.n_spin_orbitals))];
  }
  return irrep;
}

bool passes_symmetry(const Configuration& c, const SymmetrySector& s) {
  if (c.n_spin_orbitals != s.n_spin_orbitals())
    throw DimensionError(fmt::format("configuration has {} spin-orbitals, sector expects {}",
                                     c.n_spin_orbitals, s.n_spin_orbitals()));
  if (c.popcount() != s.n_electrons) return false;
  if (s.require_sz_zero &&
      popcount_block(c, SpinBlock::down) != popcount_block(c, SpinBlock::up))
    return false;
  return configuration_irrep(c, s.orbital_irreps) == s.target_irrep;
}

u64 binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  u64 r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<u64>(n - k + i) / static_cast<u64>(i);
  return r;
}

u64 count_sector(int m, int n_electrons, bool sz_zero) {
  if (n_electrons < 0 || n_electrons > m)
    throw std::invalid_argument(fmt::format("N_e = {} outside [0, {}]", n_electrons, m));
  if (!sz_zero) return binomial(m, n_electrons);
  if (n_electrons % 2 != 0)
    throw std::invalid_argument("an odd electron count cannot have Sz = 0");
  if (m % 2 != 0) throw DimensionError("Sz-resolved counting needs an even number of spin-orbitals");
  const u64 per_spin = binomial(m / 2, n_electrons / 2);
  return per_spin * per_spin;
}

u64 count_fock_space(int m) {
  if (m < 0 || m >= 64) throw DimensionError(fmt::format("2^{} does not fit in 64 bits", m));
  return u64{1} << m;
}

namespace {

using IrrepCounts = std::array<u64, 8>;

// counts[k][g]: number of k-electron strings over the spatial orbitals with irrep g.
std::vector<IrrepCounts> string_counts(const std::vector<std::uint8_t>& irreps) {
  const std::size_t n = irreps.size();
  std::vector<IrrepCounts> counts(n + 1, IrrepCounts{});
  counts[0][0] = 1;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t k = p + 1; k-- > 0;) {
      for (int g = 0; g < 8; ++g)
        counts[k + 1][static_cast<std::size_t>(g ^ irreps[p])] += counts[k][static_cast<std::size_t>(g)];
    }
  }
  return counts;
}

// All k-subsets of n spatial orbitals as bitmasks (bit p = spatial orbital p), Gosper order.
std::vector<u64> spatial_strings(int n, int k) {
  std::vector<u64> out;
  if (k < 0 || k > n) return out;
  if (k == 0) return {0};
  u64 x = (u64{1} << k) - 1;
  const u64 limit = n >= 64 ? 0 : (u64{1} << n);
  while (limit == 0 || x < limit) {
    out.push_back(x);
    const u64 c = x & (~x + 1);
    const u64 r = x + c;
    if (r == 0) break;
    x = (((x ^ r) >> 2) / c) | r;
  }
  return out;
}

u64 place_block(u64 spatial_mask, SpinBlock block, int m) {
  u64 bits = 0;
  while (spatial_mask) {
    const int p = std::countr_zero(spatial_mask);
    spatial_mask &= spatial_mask - 1;
    bits |= u64{1} << spin_orbital_bit(p, block, m);
  }
  return bits;
}

}  // namespace

u64 count_symmetric(const SymmetrySector& s) {
  const int n = static_cast<int>(s.orbital_irreps.size());
  for (auto g : s.orbital_irreps)
    if (g > 7) throw std::invalid_argument("orbital irrep outside Z2^3");
  if (s.target_irrep > 7) throw std::invalid_argument("target irrep outside Z2^3");
  if (s.n_electrons < 0 || s.n_electrons > 2 * n) return 0;
  const auto counts = string_counts(s.orbital_irreps);
  u64 total = 0;
  auto combine = [&](int nd, int nu) {
    if (nd < 0 || nd > n || nu < 0 || nu > n) return;
    for (int g = 0; g < 8; ++g)
      total += counts[static_cast<std::size_t>(nd)][static_cast<std::size_t>(g)] *
               counts[static_cast<std::size_t>(nu)][static_cast<std::size_t>(g ^ s.target_irrep)];
  };
  if (s.require_sz_zero) {
    if (s.n_electrons % 2 != 0) return 0;
    combine(s.n_electrons / 2, s.n_electrons / 2);
  } else {
    for (int nd = 0; nd <= s.n_electrons; ++nd) combine(nd, s.n_electrons - nd);
  }
  return total;
}

std::vector<Configuration> enumerate_sector(const SymmetrySector& s, u64 guard) {
  const u64 expected = count_symmetric(s);
  if (expected > guard)
    throw GuardExceeded(
        fmt::format("sector holds {} configurations, enumeration guard is {}", expected, guard));
  const int n = static_cast<int>(s.orbital_irreps.size());
  const int m = 2 * n;

  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(expected));
  auto combine = [&](int nd, int nu) {
    if (nd < 0 || nd > n || nu < 0 || nu > n) return;
    std::array<std::vector<u64>, 8> down_by_irrep;
    std::array<std::vector<u64>, 8> up_by_irrep;
    for (u64 str : spatial_strings(n, nd)) {
      const auto g = configuration_irrep(Configuration{place_block(str, SpinBlock::down, m), m},
                                         s.orbital_irreps);
      down_by_irrep[g].push_back(place_block(str, SpinBlock::down, m));
    }
    for (u64 str : spatial_strings(n, nu)) {
      const auto g = configuration_irrep(Configuration{place_block(str, SpinBlock::up, m), m},
                                         s.orbital_irreps);
      up_by_irrep[g].push_back(place_block(str, SpinBlock::up, m));
    }
    for (int g = 0; g < 8; ++g)
      for (u64 d : down_by_irrep[static_cast<std::size_t>(g)])
        for (u64 u : up_by_irrep[static_cast<std::size_t>(g ^ s.target_irrep)])
          out.emplace_back(d | u, m);
  };
  if (s.require_sz_zero) {
    if (s.n_electrons % 2 == 0) combine(s.n_electrons / 2, s.n_electrons / 2);
  } else {
    for (int nd = 0; nd <= s.n_electrons; ++nd) combine(nd, s.n_electrons - nd);
  }
  std::sort(out.begin(), out.end(), LexLess{});
  return out;
}

void for_each_excitation(const Configuration& c, ExcitationOrder order,
                         const std::function<void(const Configuration&)>& visit) {
  const int m = c.n_spin_orbitals;
  const u64 full = m >= 64 ? ~u64{0} : ((u64{1} << m) - 1);
  const std::array<u64, 2> blocks{block_mask(SpinBlock::down, m), block_mask(SpinBlock::up, m)};

  auto bits_of = [](u64 mask) {
    std::vector<int> out;
    while (mask) {
      out.push_back(std::countr_zero(mask));
      mask &= mask - 1;
    }
    return out;
  };

  if (order == ExcitationOrder::singles) {
    for (u64 block : blocks) {
      const auto occ = bits_of(c.bits & block);
      const auto vir = bits_of(~c.bits & full & block);
      for (int i : occ)
        for (int a : vir) visit(Configuration{c.bits ^ (u64{1} << i) ^ (u64{1} << a), m});
    }
    return;
  }

  // same-spin pairs
  for (u64 block : blocks) {
    const auto occ = bits_of(c.bits & block);
    const auto vir = bits_of(~c.bits & full & block);
    for (std::size_t i = 0; i < occ.size(); ++i)
      for (std::size_t j = i + 1; j < occ.size(); ++j)
        for (std::size_t a = 0; a < vir.size(); ++a)
          for (std::size_t b = a + 1; b < vir.size(); ++b)
            visit(Configuration{c.bits ^ (u64{1} << occ[i]) ^ (u64{1} << occ[j]) ^
                                    (u64{1} << vir[a]) ^ (u64{1} << vir[b]),
                                m});
  }
  // opposite-spin pairs
  const auto occ_d = bits_of(c.bits & blocks[0]);
  const auto vir_d = bits_of(~c.bits & full & blocks[0]);
  const auto occ_u = bits_of(c.bits & blocks[1]);
  const auto vir_u = bits_of(~c.bits & full & blocks[1]);
  for (int i : occ_d)
    for (int a : vir_d) {
      const u64 down_moved = c.bits ^ (u64{1} << i) ^ (u64{1} << a);
      for (int j : occ_u)
        for (int b : vir_u) visit(Configuration{down_moved ^ (u64{1} << j) ^ (u64{1} << b), m});
    }
}

std::vector<Configuration> excitations(const Configuration& c, ExcitationOrder order) {
  std::vector<Configuration> out;
  for_each_excitation(c, order, [&](const Configuration& e) { out.push_back(e); });
  return out;
}

Configuration aufbau(int m, int n_electrons) {
  if (m % 2 != 0 || m > kMaxSpinOrbitals) throw DimensionError("aufbau needs an even M <= 64");
  if (n_electrons % 2 != 0 || n_electrons > m)
    throw std::invalid_argument("aufbau determinant needs an even N_e <= M");
  u64 bits = 0;
  for (int p = 0; p < n_electrons / 2; ++p)
    bits |= (u64{1} << spin_orbital_bit(p, SpinBlock::down, m)) |
            (u64{1} << spin_orbital_bit(p, SpinBlock::up, m));
  return {bits, m};
}

std::vector<Configuration> cisd_space(const Configuration& reference, const SymmetrySector& s) {
  std::vector<Configuration> rest;
  auto keep = [&](const Configuration& e) {
    if (passes_symmetry(e, s)) rest.push_back(e);
  };
  for_each_excitation(reference, ExcitationOrder::singles, keep);
  for_each_excitation(reference, ExcitationOrder::doubles, keep);
  std::sort(rest.begin(), rest.end(), LexLess{});
  std::vector<Configuration> out;
  out.reserve(rest.size() + 1);
  if (passes_symmetry(reference, s)) out.push_back(reference);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace arnnsci
