#pragma once

/**
 * @file cli.hpp
 * @brief Command-line front end: run, fci, seed, sample, inspect, plot.
 *
 * Exit codes: 0 success (run: converged or target reached), 1 error,
 * 2 run stopped at max_iterations, 3 guard exceeded.
 */

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace arnnsci::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitMaxIterations = 2;
inline constexpr int kExitGuard = 3;

struct RunOptions {
  std::filesystem::path config_path;
  std::vector<std::string> overrides;
  std::filesystem::path output_dir;  // empty: the config's output_dir, else ./arnnsci_run
};

struct FciOptions {
  std::filesystem::path fcidump;
  std::uint64_t guard = 1'000'000;
  std::optional<double> chem_acc;  // print N_CA when set
  std::filesystem::path born_table;  // empty: not written
};

struct FciReport {
  double energy = 0.0;
  std::size_t dimension = 0;
  std::optional<std::size_t> n_ca;
  std::optional<std::uint64_t> expected_samples;
};

struct SeedOptions {
  std::filesystem::path config_path;
  std::vector<std::string> overrides;
  std::filesystem::path output_dir;
};

struct SampleOptions {
  std::filesystem::path checkpoint;
  std::uint64_t n_samples = 1'000'000;
  double beta = 1.0;
  std::uint64_t seed = 1;
  std::filesystem::path fcidump;  // optional: filter to its symmetry sector
  std::filesystem::path output;   // CSV; empty: summary only
};

struct PlotOptions {
  std::vector<std::filesystem::path> records;  // records CSVs or run directories
  std::filesystem::path output = "convergence.svg";
  double chem_acc = 1.6e-3;
  std::filesystem::path born_table;  // enables the filling plot
  std::vector<std::filesystem::path> states;
  std::size_t n_ca = 0;  // required with born_table
  int bins = 100;
  std::filesystem::path filling_output = "filling.svg";
};

int cmd_run(const RunOptions& opt, std::ostream& out);
int cmd_fci(const FciOptions& opt, std::ostream& out, FciReport* report = nullptr);
int cmd_seed(const SeedOptions& opt, std::ostream& out);
int cmd_sample(const SampleOptions& opt, std::ostream& out);
int cmd_inspect(const std::filesystem::path& file, std::ostream& out);
int cmd_plot(const PlotOptions& opt, std::ostream& out);

/// Full command line; applies ARNNSCI_THREADS before dispatch.
int main(int argc, char** argv);

}  // namespace arnnsci::cli
