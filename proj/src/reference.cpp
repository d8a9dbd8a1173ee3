#include "arnnsci/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arnnsci::serial {

SparseMatrix assemble_subspace(std::span<const Configuration> basis, const IntegralTable& t) {
  const std::size_t n = basis.size();
  SparseMatrix a;
  a.dim = n;
  a.row_ptr.assign(1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && basis[i] == basis[j]) throw DuplicateConfiguration("serial::assemble_subspace: duplicate basis entry");
      const auto me = slater_condon(basis[i], basis[j], t);
      if (me.value != 0.0 || i == j) {
        a.col.push_back(static_cast<std::uint32_t>(j));
        a.val.push_back(me.value);
      }
    }
    a.row_ptr.push_back(a.col.size());
  }
  return a;
}

void multiply(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.dim || y.size() != a.dim) throw std::invalid_argument("serial::multiply: size mismatch");
  for (std::size_t i = 0; i < a.dim; ++i) {
    double s = 0.0;
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[i] = s;
  }
}

namespace {

bool connected(const LayerLayout& lay, std::size_t r, std::size_t c) {
  const auto out_bit = r / static_cast<std::size_t>(lay.out_features);
  const auto in_bit = c / static_cast<std::size_t>(lay.in_features);
  return lay.strict ? in_bit < out_bit : in_bit <= out_bit;
}

struct Pass {
  std::vector<std::vector<double>> a;  // a[0] = input, a[l+1] = output of layer l
  std::vector<std::vector<double>> z;
};

Pass forward(const ArnnModel& m, const Configuration& c) {
  if (c.n_spin_orbitals != m.n_bits()) throw DimensionError("serial::log_prob: bit count mismatch");
  const int mb = m.n_bits();
  Pass p;
  p.a.emplace_back();
  for (int q = 0; q < mb; ++q) p.a[0].push_back(c.occupied(q) ? 1.0 : -1.0);
  for (std::size_t l = 0; l < m.layout.size(); ++l) {
    const auto& lay = m.layout[l];
    const std::size_t rows = lay.rows(mb);
    const std::size_t cols = lay.cols(mb);
    std::vector<double> z(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      double s = m.params[lay.bias_offset + r];
      for (std::size_t k = 0; k < cols; ++k)
        if (connected(lay, r, k)) s += m.params[lay.weight_offset + r * cols + k] * p.a[l][k];
      z[r] = s;
    }
    std::vector<double> a(rows);
    const bool last = l + 1 == m.layout.size();
    for (std::size_t r = 0; r < rows; ++r) a[r] = last ? z[r] : detail::activate(m.config.activation, z[r]);
    p.z.push_back(std::move(z));
    p.a.push_back(std::move(a));
  }
  return p;
}

}  // namespace

double log_prob(const ArnnModel& m, const Configuration& c) {
  const auto p = forward(m, c);
  const auto& logits = p.z.back();
  double s = 0.0;
  for (int q = 0; q < m.n_bits(); ++q) {
    const double z0 = logits[2 * static_cast<std::size_t>(q)];
    const double z1 = logits[2 * static_cast<std::size_t>(q) + 1];
    const double lse = std::max(z0, z1) + std::log1p(std::exp(-std::abs(z0 - z1)));
    s += (c.occupied(q) ? z1 : z0) - lse;
  }
  return s;
}

std::vector<double> log_prob_batch(const ArnnModel& m, std::span<const Configuration> batch) {
  std::vector<double> out;
  out.reserve(batch.size());
  for (const auto& c : batch) out.push_back(serial::log_prob(m, c));
  return out;
}

Gradient log_prob_grad(const ArnnModel& m, std::span<const WeightedConfiguration> batch) {
  const int mb = m.n_bits();
  Gradient out;
  out.grad.assign(m.n_params(), 0.0);
  for (const auto& e : batch) {
    const auto p = forward(m, e.config);
    out.value += e.weight * serial::log_prob(m, e.config);
    // d/dz of log softmax at the observed bit
    std::vector<double> delta(p.z.back().size());
    for (int q = 0; q < mb; ++q) {
      const auto i0 = 2 * static_cast<std::size_t>(q);
      const double z0 = p.z.back()[i0];
      const double z1 = p.z.back()[i0 + 1];
      const double p1 = 1.0 / (1.0 + std::exp(z0 - z1));
      const double n = e.config.occupied(q) ? 1.0 : 0.0;
      delta[i0] = e.weight * ((1.0 - n) - (1.0 - p1));
      delta[i0 + 1] = e.weight * (n - p1);
    }
    for (std::size_t l = m.layout.size(); l-- > 0;) {
      const auto& lay = m.layout[l];
      const std::size_t rows = lay.rows(mb);
      const std::size_t cols = lay.cols(mb);
      std::vector<double> back(cols, 0.0);
      for (std::size_t r = 0; r < rows; ++r) {
        out.grad[lay.bias_offset + r] += delta[r];
        for (std::size_t k = 0; k < cols; ++k) {
          if (!connected(lay, r, k)) continue;
          out.grad[lay.weight_offset + r * cols + k] += delta[r] * p.a[l][k];
          back[k] += m.params[lay.weight_offset + r * cols + k] * delta[r];
        }
      }
      if (l == 0) break;
      for (std::size_t k = 0; k < cols; ++k) back[k] *= detail::activate_derivative(m.config.activation, p.z[l - 1][k]);
      delta = std::move(back);
    }
  }
  return out;
}

}  // namespace arnnsci::serial
