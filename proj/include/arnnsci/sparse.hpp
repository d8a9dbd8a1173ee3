#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace arnnsci {

/// Real symmetric matrix in CSR form. Both triangles are stored so that a
/// row-parallel matvec needs no atomics; columns within a row are sorted.
struct SparseMatrix {
  std::size_t dim = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  [[nodiscard]] std::size_t nnz() const noexcept { return val.size(); }
  [[nodiscard]] double diagonal(std::size_t i) const;
  [[nodiscard]] double at(std::size_t i, std::size_t j) const;

  /// y = A x, parallel over rows; each row is reduced in column order so the
  /// result is bit-identical for any thread count.
  void multiply(std::span<const double> x, std::span<double> y) const;

  /// Leading k x k principal block.
  [[nodiscard]] SparseMatrix leading_block(std::size_t k) const;

  /// Symmetric dense copy (row-major), for small problems and tests.
  [[nodiscard]] std::vector<double> to_dense() const;

  static SparseMatrix from_dense(std::span<const double> dense, std::size_t dim,
                                 double drop_below = 0.0);
};

}  // namespace arnnsci
