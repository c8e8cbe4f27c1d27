#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include "amqsec/amq.hpp"
#include "amqsec/analysis.hpp"
#include "amqsec/games.hpp"
#include "amqsec/parallel.hpp"

namespace amqsec {

struct LoadFactorResult {
  std::vector<double> fractions;
  double mean = 0;
  double min = 0;
};

/// Fraction of bucket slots occupied when an insertion first returns bottom.
inline double load_factor_trial(const AmqDescriptor& d, std::uint64_t seed) {
  if (d.family == Family::bloom) throw std::invalid_argument("load factor applies to Cuckoo filters");
  FilterInstance f(d, OracleSet::keyed(derive_seed(seed, 1)));
  CoinSource coins(derive_seed(seed, 2));
  const auto slots = static_cast<double>(d.cuckoo_params().slots());
  while (true) {
    const double occupied = static_cast<double>(f.occupied());
    if (!f.insert(random_element(coins, 16), coins)) return occupied / slots;
  }
}

inline LoadFactorResult load_factor_experiment(const AmqDescriptor& d, std::size_t trials, std::uint64_t seed,
                                               unsigned max_workers = 0) {
  LoadFactorResult r;
  r.fractions = parallel_map<double>(
      trials, [&](std::size_t i) { return load_factor_trial(d, derive_seed(seed, i)); }, max_workers);
  if (!r.fractions.empty()) {
    r.mean = std::accumulate(r.fractions.begin(), r.fractions.end(), 0.0) / static_cast<double>(trials);
    r.min = *std::min_element(r.fractions.begin(), r.fractions.end());
  }
  return r;
}

struct FpExperiment {
  std::uint64_t inserted = 0;
  std::uint64_t probes = 0;
  std::uint64_t positives = 0;
  double fp = 0;
  double sigma = 0;
  double bound = 0;
  /// Bloom only: the asymptotic estimate.
  double estimate = 0;
  double load = 0;
};

namespace detail {

inline void probe_fp(const AmqDescriptor& d, const NaiSample& s, std::uint64_t probes, CoinSource& coins,
                     FpExperiment& r) {
  std::unordered_set<DomainElement, DomainElementHash> inserted(s.elements.begin(), s.elements.end());
  r.inserted = s.elements.size();
  for (std::uint64_t i = 0; i < probes; ++i) {
    DomainElement y = random_element(coins, 16);
    if (inserted.count(y)) continue;
    ++r.probes;
    r.positives += s.filter.query(y) ? 1 : 0;
  }
  r.fp = r.probes ? static_cast<double>(r.positives) / static_cast<double>(r.probes) : 0;
  r.sigma = r.probes ? std::sqrt(r.fp * (1 - r.fp) / static_cast<double>(r.probes)) : 0;
  if (d.family == Family::bloom) {
    auto b = bloom_nai_fp_bound(d.bloom_params().m, d.bloom_params().k, r.inserted);
    r.bound = b.bound;
    r.estimate = b.estimate;
    r.load = static_cast<double>(s.filter.occupied()) / static_cast<double>(d.bloom_params().m);
  } else {
    r.bound = nai_fp_for(d, r.inserted);
    r.load = static_cast<double>(s.filter.occupied()) / static_cast<double>(d.cuckoo_params().slots());
  }
}

}  // namespace detail

/// Honest Monte-Carlo FP: n distinct random insertions under a keyed oracle,
/// then fresh random probes that were never inserted.
inline FpExperiment honest_fp_experiment(const AmqDescriptor& d, std::uint64_t n, std::uint64_t probes,
                                         std::uint64_t seed) {
  CoinSource coins(derive_seed(seed, 7));
  NaiSample s = nai_gen(d, n, OracleSet::keyed(seed), coins, 16);
  FpExperiment r;
  detail::probe_fp(d, s, probes, coins, r);
  return r;
}

/// As honest_fp_experiment, but for Cuckoo filters: inserts distinct random
/// elements until the occupied fraction of slots reaches target_load or an
/// insertion fails. Elements whose tag is already present occupy no slot.
inline FpExperiment honest_fp_at_load(const AmqDescriptor& d, double target_load, std::uint64_t probes,
                                      std::uint64_t seed) {
  if (d.family == Family::bloom) throw std::invalid_argument("fill-to-load applies to Cuckoo filters");
  if (!(target_load > 0 && target_load <= 1)) throw std::invalid_argument("target load must lie in (0, 1]");
  CoinSource coins(derive_seed(seed, 7));
  NaiSample s = nai_gen(d, 0, OracleSet::keyed(seed), coins, 16);
  std::unordered_set<DomainElement, DomainElementHash> seen;
  const double goal = target_load * static_cast<double>(d.cuckoo_params().slots());
  while (static_cast<double>(s.filter.occupied()) < goal) {
    DomainElement x = random_element(coins, 16);
    if (!seen.insert(x).second) continue;
    bool ok = s.filter.insert(x, coins);
    s.elements.push_back(std::move(x));
    if (!ok) break;
  }
  FpExperiment r;
  detail::probe_fp(d, s, probes, coins, r);
  return r;
}

struct NaiCheckResult {
  Distribution real;
  Distribution ideal;
  double distance = 0;
  std::size_t trials = 0;
};

/// Rep of n fresh elements followed by one Reveal, q_t = 0; compares the
/// empirical final-state distributions of the two correctness-game worlds.
inline NaiCheckResult nai_check(const AmqDescriptor& d, std::size_t n, std::size_t trials, std::uint64_t seed,
                                unsigned max_workers = 0) {
  AdversaryStrategy adv;
  adv.budget = {n, 0, 0, 1};
  adv.run = [n](GameOracles& o, CoinSource& coins) {
    std::vector<DomainElement> v;
    while (v.size() < n) {
      auto x = random_element(coins, kFreshElementBytes);
      if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(std::move(x));
    }
    o.rep(v);
    return o.reveal().value_or(Bytes{});
  };
  auto sample = [&](World w) {
    return parallel_map<std::string>(
        trials,
        [&](std::size_t i) { return to_hex(run_real_or_ideal(adv, d, w, derive_seed(seed, i), i, false).output); },
        max_workers);
  };
  NaiCheckResult r;
  r.trials = trials;
  r.real = empirical_distribution(sample(World::real));
  r.ideal = empirical_distribution(sample(World::ideal));
  Distribution p = r.real, q = r.ideal;
  align_support(p, q);
  r.distance = statistical_distance(p, q);
  return r;
}

}  // namespace amqsec
