#pragma once

// Brute-force second quantization: every fermionic operator on M modes is a
// 2^M x 2^M matrix with at most one nonzero per column, built as a
// Jordan-Wigner Kronecker product and composed by matrix multiplication.
// Shares no code with the Slater-Condon path.

#include "arnnsci/integrals.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// Column b maps to (row[b], coef[b]); coef 0 means an all-zero column.
struct MonomialMatrix {
  std::vector<std::uint64_t> row;
  std::vector<double> coef;
};

inline MonomialMatrix kron2(const MonomialMatrix& hi, const MonomialMatrix& lo) {
  const std::size_t nl = lo.row.size();
  MonomialMatrix out;
  out.row.resize(hi.row.size() * nl);
  out.coef.resize(hi.row.size() * nl);
  for (std::size_t h = 0; h < hi.row.size(); ++h)
    for (std::size_t l = 0; l < nl; ++l) {
      out.row[h * nl + l] = hi.row[h] * nl + lo.row[l];
      out.coef[h * nl + l] = hi.coef[h] * lo.coef[l];
    }
  return out;
}

// Single-mode factors acting on occupation |n>, n = 0 or 1.
inline MonomialMatrix identity2() { return {{0, 1}, {1.0, 1.0}}; }
inline MonomialMatrix parity2() { return {{0, 1}, {1.0, -1.0}}; }
inline MonomialMatrix lower2() { return {{0, 0}, {0.0, 1.0}}; }  // |1> -> |0>

// a_q = (I on modes > q) x sigma- x (Z on modes < q); mode q is bit q of the index.
inline MonomialMatrix annihilator(int q, int m) {
  MonomialMatrix acc{{0}, {1.0}};
  for (int mode = m - 1; mode >= 0; --mode) {
    const MonomialMatrix f = mode > q ? identity2() : mode == q ? lower2() : parity2();
    acc = kron2(acc, f);
  }
  return acc;
}

inline MonomialMatrix transpose(const MonomialMatrix& a) {
  MonomialMatrix out{std::vector<std::uint64_t>(a.row.size(), 0), std::vector<double>(a.row.size(), 0.0)};
  for (std::size_t b = 0; b < a.row.size(); ++b)
    if (a.coef[b] != 0.0) {
      out.row[a.row[b]] = b;
      out.coef[a.row[b]] = a.coef[b];
    }
  return out;
}

// (A B) column b = A applied to column b of B.
inline MonomialMatrix multiply(const MonomialMatrix& a, const MonomialMatrix& b) {
  MonomialMatrix out{std::vector<std::uint64_t>(b.row.size(), 0), std::vector<double>(b.row.size(), 0.0)};
  for (std::size_t c = 0; c < b.row.size(); ++c) {
    if (b.coef[c] == 0.0) continue;
    const auto mid = b.row[c];
    out.row[c] = a.row[mid];
    out.coef[c] = a.coef[mid] * b.coef[c];
  }
  return out;
}

inline void accumulate(std::vector<double>& dense, std::size_t dim, const MonomialMatrix& op, double scale) {
  for (std::size_t c = 0; c < dim; ++c)
    if (op.coef[c] != 0.0) dense[op.row[c] * dim + c] += scale * op.coef[c];
}

// Spatial orbital and spin of spin-orbital bit q: down block first, lowest
// spatial orbital at the end of each block.
inline int spatial(int q, int m) { return q < m / 2 ? m / 2 - 1 - q : m - 1 - q; }
inline int spin(int q, int m) { return q < m / 2 ? 0 : 1; }

/// Dense row-major 2^M x 2^M matrix of
///   E_core + sum h_pq a+_P a_Q + 1/2 sum (pq|rs) a+_P a+_R a_S a_Q
/// over spin-orbitals P,Q,R,S with spin(P)=spin(Q), spin(R)=spin(S).
inline std::vector<double> hamiltonian(const arnnsci::IntegralTable& t) {
  const int m = t.n_spin_orbitals();
  const std::size_t dim = std::size_t{1} << m;
  std::vector<MonomialMatrix> a(static_cast<std::size_t>(m)), ad(static_cast<std::size_t>(m));
  for (int q = 0; q < m; ++q) {
    a[static_cast<std::size_t>(q)] = annihilator(q, m);
    ad[static_cast<std::size_t>(q)] = transpose(a[static_cast<std::size_t>(q)]);
  }
  std::vector<double> h(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) h[i * dim + i] = t.core_energy;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      if (spin(p, m) != spin(q, m)) continue;
      const double v = t.one_body(spatial(p, m), spatial(q, m));
      if (v != 0.0) accumulate(h, dim, multiply(ad[p], a[q]), v);
    }
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      if (spin(p, m) != spin(q, m)) continue;
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) {
          if (spin(r, m) != spin(s, m)) continue;
          const double v = t.two_body(spatial(p, m), spatial(q, m), spatial(r, m), spatial(s, m));
          if (v == 0.0) continue;
          const auto op = multiply(ad[p], multiply(ad[r], multiply(a[s], a[q])));
          accumulate(h, dim, op, 0.5 * v);
        }
    }
  return h;
}

/// Random real integrals with the full permutational symmetry.
inline arnnsci::IntegralTable random_table(int n_spatial, int n_electrons, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  arnnsci::IntegralTable t(n_spatial, n_electrons);
  t.core_energy = u(rng);
  for (int p = 0; p < n_spatial; ++p)
    for (int q = 0; q <= p; ++q) t.set_one_body(p, q, u(rng));
  for (int p = 0; p < n_spatial; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r < n_spatial; ++r)
        for (int s = 0; s <= r; ++s)
          if (p * (p + 1) / 2 + q >= r * (r + 1) / 2 + s) t.set_two_body(p, q, r, s, 0.5 * u(rng));
  return t;
}

}  // namespace oracle
