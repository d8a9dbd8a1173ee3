#pragma once

#include "arnnsci/determinant.hpp"

#include <vector>

namespace arnnsci {

/// Normalized real vector over a set of configurations; the SCI iterate.
struct SparseState {
  std::vector<Configuration> support;
  std::vector<double> amplitudes;
  double energy = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return support.size(); }
  [[nodiscard]] double norm_squared() const;
  /// Throws std::invalid_argument on size mismatch, duplicates or a norm off by > tol.
  void validate(double tol = 1e-10) const;
  /// Entries sorted by |amplitude| descending, ties lexicographic.
  [[nodiscard]] std::vector<std::size_t> order_by_weight() const;
};

[[nodiscard]] SparseState point_mass(const Configuration& c, double energy);

}  // namespace arnnsci
