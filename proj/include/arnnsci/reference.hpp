#pragma once

/**
 * @file reference.hpp
 * @brief Plain serial versions of the OpenMP kernels.
 *
 * Written without shared helpers so that tests can compare the parallel
 * kernels against an independent code path, and the benchmark can report
 * the speed-up.
 */

#include "arnnsci/arnn.hpp"
#include "arnnsci/integrals.hpp"
#include "arnnsci/sparse.hpp"

#include <span>
#include <vector>

namespace arnnsci::serial {

/// All-pairs Slater-Condon assembly, one row at a time.
[[nodiscard]] SparseMatrix assemble_subspace(std::span<const Configuration> basis, const IntegralTable& t);

/// y = A x.
void multiply(const SparseMatrix& a, std::span<const double> x, std::span<double> y);

/// Evaluation-mode forward pass with the mask applied explicitly.
[[nodiscard]] double log_prob(const ArnnModel& m, const Configuration& c);
[[nodiscard]] std::vector<double> log_prob_batch(const ArnnModel& m, std::span<const Configuration> batch);

/// Evaluation-mode gradient of sum_i w_i log P(n_i), accumulated sample by sample.
[[nodiscard]] Gradient log_prob_grad(const ArnnModel& m, std::span<const WeightedConfiguration> batch);

}  // namespace arnnsci::serial
