#include "arnnsci/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arnnsci {

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= dim || j >= dim) throw std::out_of_range("SparseMatrix::at index out of range");
  const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
  if (it == last || *it != j) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

double SparseMatrix::diagonal(std::size_t i) const { return at(i, i); }

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != dim || y.size() != dim) throw std::invalid_argument("SparseMatrix::multiply size mismatch");
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(dim); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double acc = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += val[k] * x[col[k]];
    y[i] = acc;
  }
}

SparseMatrix SparseMatrix::leading_block(std::size_t k) const {
  if (k > dim) throw std::out_of_range("leading_block larger than matrix");
  SparseMatrix out;
  out.dim = k;
  out.row_ptr.assign(k + 1, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      if (col[p] >= k) break;
      out.col.push_back(col[p]);
      out.val.push_back(val[p]);
    }
    out.row_ptr[i + 1] = out.col.size();
  }
  return out;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> d(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) d[i * dim + col[p]] = val[p];
  return d;
}

SparseMatrix SparseMatrix::from_dense(std::span<const double> dense, std::size_t dim, double drop_below) {
  if (dense.size() != dim * dim) throw std::invalid_argument("from_dense: size is not dim^2");
  SparseMatrix out;
  out.dim = dim;
  out.row_ptr.assign(dim + 1, 0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = dense[i * dim + j];
      if (i == j || std::abs(v) > drop_below) {
        out.col.push_back(static_cast<std::uint32_t>(j));
        out.val.push_back(v);
      }
    }
    out.row_ptr[i + 1] = out.col.size();
  }
  return out;
}

}  // namespace arnnsci
