#pragma once

/**
 * @file plot.hpp
 * @brief Static SVG figures: Delta E against iteration, and the filling of
 * the most important configurations.
 */

#include "arnnsci/driver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace arnnsci {

struct ConvergenceSeries {
  std::string label;
  std::vector<IterationRecord> records;
};

/// Log-scale Delta E against iteration with a dashed line at chem_acc.
/// Records without Delta E are skipped; values <= 0 are drawn at the floor.
void write_convergence_svg(std::ostream& out, const std::vector<ConvergenceSeries>& series, double chem_acc);

struct BornEntry {
  Configuration config;
  double probability = 0.0;
};

/// Born table CSV: rank,bitstring,probability,cumulative (rank order).
void write_born_table(std::ostream& out, const SparseState& gs);
[[nodiscard]] std::vector<BornEntry> read_born_table(std::istream& in);

/// Configurations listed in a state CSV (bitstring,amplitude).
[[nodiscard]] std::vector<Configuration> read_state_support(std::istream& in);

/// Fraction of each of `bins` equal slices of the first n_top Born-ranked
/// configurations that appear in `support`.
[[nodiscard]] std::vector<double> filling_fractions(const std::vector<BornEntry>& born,
                                                    const std::vector<Configuration>& support, std::size_t n_top,
                                                    int bins = 100);

struct FillingSeries {
  std::string label;
  std::vector<double> fractions;
};

/// Bar chart of filling fractions; the dashed line marks n_ca within n_top.
void write_filling_svg(std::ostream& out, const std::vector<FillingSeries>& series, std::size_t n_ca,
                       std::size_t n_top);

}  // namespace arnnsci
