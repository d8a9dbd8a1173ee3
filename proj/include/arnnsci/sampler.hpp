#pragma once

/**
 * @file sampler.hpp
 * @brief Temperature-scaled auto-regressive sampling by prefix splitting.
 *
 * N draws are pushed through the conditionals together: at bit q every live
 * prefix with count c sends Binomial(c, p1) draws to the n_q = 1 child, with
 *
 *   p1 = P_q(1)^beta / (P_q(0)^beta + P_q(1)^beta).
 *
 * Work grows with the number of distinct prefixes, not with N.
 */

#include "arnnsci/arnn.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace arnnsci {

struct SampleEntry {
  Configuration config;
  std::uint64_t count = 0;
  double log_prob = 0.0;  // undeformed model log P(n)
};

struct SampleBatch {
  std::vector<SampleEntry> entries;
  std::uint64_t n_requested = 0;
  double beta = 1.0;
  std::uint64_t n_discarded_unphysical = 0;  // draws removed by filter_physical
  std::uint64_t n_unique_discarded = 0;

  [[nodiscard]] std::uint64_t total_count() const;
};

/// Exact binomial draws up to this many trials, normal approximation above.
inline constexpr std::uint64_t kExactBinomialLimit = 1'000'000;

/// Deformed conditional P(n_q = 1) for log-probabilities {lp0, lp1}.
[[nodiscard]] double deformed_p1(double lp0, double lp1, double beta);

/// n draws from the beta-deformed distribution; entries in lexicographic order.
/// Each prefix split uses its own stream derived from (seed, q, prefix).
[[nodiscard]] SampleBatch sample_fast(const ArnnModel& m, std::uint64_t n, double beta, std::uint64_t seed);

/// Drops configurations outside the sector and tallies the discarded draws.
[[nodiscard]] SampleBatch filter_physical(const SampleBatch& b, const SymmetrySector& s);

/// Forced configurations first, then sampled ones by count desc, log_prob
/// desc, lexicographic; at most max(cap, |forced|) entries.
[[nodiscard]] std::vector<Configuration> select_unique(const SampleBatch& b, std::size_t cap,
                                                       const std::vector<Configuration>& forced);

struct BetaProbe {
  double beta = 0.0;
  std::size_t n_unique = 0;
};

struct BetaSearch {
  double beta = 1.0;
  SampleBatch batch;
  std::vector<BetaProbe> probes;
  bool reached = false;
};

inline constexpr double kBetaMin = 0.05;
inline constexpr int kBetaMaxProbes = 12;

/// Bisection on beta in [kBetaMin, 1] for about `target_unique` physical
/// unique configurations (accepted within +-10%). Returns the closest probe.
[[nodiscard]] BetaSearch find_beta(const ArnnModel& m, std::uint64_t n, std::size_t target_unique,
                                   const std::optional<SymmetrySector>& s, std::uint64_t seed);

void write_sample_csv(std::ostream& out, const SampleBatch& b);

}  // namespace arnnsci
