#include "arnnsci/sampler.hpp"

#include "arnnsci/rng.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace arnnsci {

std::uint64_t SampleBatch::total_count() const {
  std::uint64_t s = 0;
  for (const auto& e : entries) s += e.count;
  return s;
}

double deformed_p1(double lp0, double lp1, double beta) {
  // sigmoid(beta (lp1 - lp0)), written to avoid overflow on either side
  const double x = beta * (lp1 - lp0);
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

std::uint64_t split_count(std::uint64_t count, double p1, std::uint64_t stream) {
  if (p1 <= 0.0) return 0;
  if (p1 >= 1.0) return count;
  SplitMix64 rng(stream);
  if (count <= kExactBinomialLimit) return std::binomial_distribution<std::uint64_t>(count, p1)(rng);
  const double mean = static_cast<double>(count) * p1;
  const double sd = std::sqrt(mean * (1.0 - p1));
  const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
  const double k = std::round(mean + sd * z);
  return static_cast<std::uint64_t>(std::clamp(k, 0.0, static_cast<double>(count)));
}

struct Live {
  u64 bits = 0;
  std::uint64_t count = 0;
  double log_prob = 0.0;
};

}  // namespace

SampleBatch sample_fast(const ArnnModel& m, std::uint64_t n, double beta, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_fast: need at least one sample");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("sample_fast: beta must be positive");
  const int mb = m.n_bits();
  const std::size_t cs = m.cache_size();

  std::vector<Live> live{{0, n, 0.0}};
  std::vector<double> caches(cs, 0.0);
  std::vector<std::array<double, 2>> lp;
  std::vector<std::uint64_t> ones;

  for (int q = 0; q < mb; ++q) {
    const std::size_t nl = live.size();
    lp.resize(nl);
    ones.resize(nl);
    bool finite = true;
#pragma omp parallel for schedule(dynamic, 16) reduction(&& : finite)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(nl); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      std::span<double> cache(caches.data() + i * cs, cs);
      lp[i] = extend_prefix(m, cache, live[i].bits, q);
      if (!std::isfinite(lp[i][0]) || !std::isfinite(lp[i][1])) {
        finite = false;
        continue;
      }
      const double p1 = deformed_p1(lp[i][0], lp[i][1], beta);
      ones[i] = split_count(live[i].count, p1, derive_stream(seed, "split", q, live[i].bits));
    }
    if (!finite) throw std::runtime_error(fmt::format("sample_fast: non-finite conditional at bit {}", q));

    std::vector<Live> next;
    next.reserve(2 * nl);
    std::vector<std::size_t> parent;
    parent.reserve(2 * nl);
    for (std::size_t i = 0; i < nl; ++i) {
      const std::uint64_t c1 = ones[i];
      const std::uint64_t c0 = live[i].count - c1;
      if (c0) {
        next.push_back({live[i].bits, c0, live[i].log_prob + lp[i][0]});
        parent.push_back(i);
      }
      if (c1) {
        next.push_back({live[i].bits | (u64{1} << q), c1, live[i].log_prob + lp[i][1]});
        parent.push_back(i);
      }
    }
    if (q + 1 < mb && cs > 0) {
      std::vector<double> next_caches(next.size() * cs);
      for (std::size_t k = 0; k < next.size(); ++k)
        std::copy_n(caches.begin() + static_cast<std::ptrdiff_t>(parent[k] * cs), cs,
                    next_caches.begin() + static_cast<std::ptrdiff_t>(k * cs));
      caches.swap(next_caches);
    } else {
      caches.assign(next.size() * cs, 0.0);
    }
    live.swap(next);
  }

  SampleBatch out;
  out.n_requested = n;
  out.beta = beta;
  out.entries.reserve(live.size());
  for (const auto& l : live) out.entries.push_back({{l.bits, mb}, l.count, l.log_prob});
  std::sort(out.entries.begin(), out.entries.end(),
            [](const SampleEntry& a, const SampleEntry& b) { return lex_less(a.config.bits, b.config.bits); });
  return out;
}

SampleBatch filter_physical(const SampleBatch& b, const SymmetrySector& s) {
  SampleBatch out;
  out.n_requested = b.n_requested;
  out.beta = b.beta;
  out.n_discarded_unphysical = b.n_discarded_unphysical;
  out.n_unique_discarded = b.n_unique_discarded;
  for (const auto& e : b.entries) {
    if (passes_symmetry(e.config, s)) {
      out.entries.push_back(e);
    } else {
      out.n_discarded_unphysical += e.count;
      ++out.n_unique_discarded;
    }
  }
  return out;
}

std::vector<Configuration> select_unique(const SampleBatch& b, std::size_t cap,
                                         const std::vector<Configuration>& forced) {
  std::vector<Configuration> out;
  std::unordered_set<Configuration> taken;
  for (const auto& c : forced)
    if (taken.insert(c).second) out.push_back(c);
  const std::size_t limit = std::max(cap, out.size());
  if (cap < out.size())
    spdlog::warn("unique cap {} is below the {} forced configurations; keeping all forced ones", cap, out.size());

  std::vector<const SampleEntry*> ranked;
  ranked.reserve(b.entries.size());
  for (const auto& e : b.entries)
    if (!taken.count(e.config)) ranked.push_back(&e);
  std::sort(ranked.begin(), ranked.end(), [](const SampleEntry* x, const SampleEntry* y) {
    if (x->count != y->count) return x->count > y->count;
    if (x->log_prob != y->log_prob) return x->log_prob > y->log_prob;
    return lex_less(x->config.bits, y->config.bits);
  });
  for (const auto* e : ranked) {
    if (out.size() >= limit) break;
    if (taken.insert(e->config).second) out.push_back(e->config);
  }
  return out;
}

BetaSearch find_beta(const ArnnModel& m, std::uint64_t n, std::size_t target_unique,
                     const std::optional<SymmetrySector>& s, std::uint64_t seed) {
  if (target_unique < 1) throw std::invalid_argument("find_beta: target must be at least 1");
  BetaSearch best;
  double best_gap = std::numeric_limits<double>::infinity();
  const auto target = static_cast<double>(target_unique);
  int probe_index = 0;

  auto probe = [&](double beta) {
    auto batch = sample_fast(m, n, beta, derive_stream(seed, "beta-probe", probe_index++));
    if (s) batch = filter_physical(batch, *s);
    const std::size_t u = batch.entries.size();
    best.probes.push_back({beta, u});
    spdlog::debug("beta probe {:.4f}: {} unique", beta, u);
    const double gap = std::abs(static_cast<double>(u) - target);
    if (gap < best_gap) {
      best_gap = gap;
      best.beta = beta;
      best.batch = std::move(batch);
    }
    return u;
  };
  auto accepted = [&](std::size_t u) { return std::abs(static_cast<double>(u) - target) <= 0.1 * target; };

  const std::size_t at_one = probe(1.0);
  if (at_one >= target_unique || accepted(at_one)) {
    // the first probe is the closest so far, so best holds the beta = 1 batch
    best.reached = true;
    return best;
  }
  const std::size_t at_min = probe(kBetaMin);
  if (accepted(at_min)) {
    best.reached = true;
    return best;
  }
  if (at_min < target_unique) {
    spdlog::warn("find_beta: {} unique at beta = {} is short of the target {}", at_min, kBetaMin, target_unique);
    return best;
  }
  double lo = kBetaMin;  // too many unique
  double hi = 1.0;       // too few
  while (probe_index < kBetaMaxProbes) {
    const double mid = 0.5 * (lo + hi);
    const std::size_t u = probe(mid);
    if (accepted(u)) {
      best.reached = true;
      break;
    }
    if (u > target_unique)
      lo = mid;
    else
      hi = mid;
  }
  return best;
}

void write_sample_csv(std::ostream& out, const SampleBatch& b) {
  out << "bitstring,count,log_prob\n";
  for (const auto& e : b.entries) out << fmt::format("{},{},{:.17g}\n", e.config.to_string(), e.count, e.log_prob);
}

}  // namespace arnnsci
