#include "arnnsci/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

namespace arnnsci {

double SparseState::norm_squared() const {
  double s = 0.0;
  for (double a : amplitudes) s += a * a;
  return s;
}

void SparseState::validate(double tol) const {
  if (support.size() != amplitudes.size())
    throw std::invalid_argument(
        fmt::format("state has {} configurations but {} amplitudes", support.size(), amplitudes.size()));
  if (support.empty()) throw std::invalid_argument("state is empty");
  std::unordered_set<Configuration> seen(support.begin(), support.end());
  if (seen.size() != support.size()) throw std::invalid_argument("state support has duplicates");
  if (std::abs(norm_squared() - 1.0) > tol)
    throw std::invalid_argument(fmt::format("state norm^2 = {:.15g}, expected 1", norm_squared()));
}

std::vector<std::size_t> SparseState::order_by_weight() const {
  std::vector<std::size_t> idx(support.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double wa = std::abs(amplitudes[a]);
    const double wb = std::abs(amplitudes[b]);
    if (wa != wb) return wa > wb;
    return lex_less(support[a].bits, support[b].bits);
  });
  return idx;
}

SparseState point_mass(const Configuration& c, double energy) { return {{c}, {1.0}, energy}; }

}  // namespace arnnsci
