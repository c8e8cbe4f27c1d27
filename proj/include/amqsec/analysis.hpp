#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "amqsec/amq.hpp"

namespace amqsec {

inline double clamp_probability(long double p) {
  if (!(p >= 0.0L)) return 0.0;
  if (p > 1.0L) return 1.0;
  return static_cast<double>(p);
}

struct BloomFpBound {
  double bound;
  double estimate;
};

/// Upper bound (1 - e^{-(n+0.5)k/(m-1)})^k and estimate (1 - e^{-nk/m})^k.
inline BloomFpBound bloom_nai_fp_bound(std::uint64_t m, unsigned k, std::uint64_t n) {
  if (m < 2) throw std::invalid_argument("bloom_nai_fp_bound requires m >= 2");
  if (k < 1) throw std::invalid_argument("bloom_nai_fp_bound requires k >= 1");
  const long double kk = k;
  const long double a = (static_cast<long double>(n) + 0.5L) * kk / static_cast<long double>(m - 1);
  const long double e = static_cast<long double>(n) * kk / static_cast<long double>(m);
  long double bound = std::pow(-std::expm1(-a), kk);
  long double estimate = n == 0 ? 0.0L : std::pow(-std::expm1(-e), kk);
  return {clamp_probability(bound), clamp_probability(estimate)};
}

/// 1 - (1 - 2^{-lambda_T})^{2s+1}, plus (2s+2)^2 / 2^{range_bits+1} for the
/// PRF-wrapped variant with a range of 2^{range_bits} points.
inline double cuckoo_nai_fp_bound(std::uint64_t s, unsigned lambda_t, std::optional<unsigned> wrapped_range_bits = {}) {
  if (s < 1) throw std::invalid_argument("cuckoo_nai_fp_bound requires s >= 1");
  if (lambda_t < 1) throw std::invalid_argument("cuckoo_nai_fp_bound requires lambda_T >= 1");
  const long double per_slot = std::ldexp(1.0L, -static_cast<int>(lambda_t));
  long double p = -std::expm1(static_cast<long double>(2 * s + 1) * std::log1p(-per_slot));
  if (wrapped_range_bits) {
    const long double t = static_cast<long double>(2 * s + 2);
    p += std::ldexp(t * t, -static_cast<int>(*wrapped_range_bits) - 1);
  }
  return clamp_probability(p);
}

struct QueryBudget {
  std::uint64_t n = 0;
  std::uint64_t q_u = 0;
  std::uint64_t q_t = 0;
  std::uint64_t q_v = 0;
};

struct BoundReport {
  double nai_fp = 0;
  double eps_prf = 0;
  double adversarial_bound = 0;
  std::optional<std::uint64_t> storage_bits;
  std::optional<PublicParams> pp;
  QueryBudget budget;
  bool immutable = false;
  /// Set when a descriptor is known: true for Bloom and PRF-wrapped Cuckoo.
  std::optional<bool> alpha_beta_one;
};

/// eps' = eps + 2 q_t P(n + q_u), or eps' = eps in the immutable setting.
inline BoundReport adversarial_correctness_bound(double eps_prf, const QueryBudget& budget, double nai_fp,
                                                 bool immutable = false) {
  if (!(eps_prf >= 0 && eps_prf <= 1)) throw std::invalid_argument("eps_prf must lie in [0, 1]");
  if (!(nai_fp >= 0 && nai_fp <= 1)) throw std::invalid_argument("nai_fp must lie in [0, 1]");
  if (immutable && budget.q_u != 0) throw std::invalid_argument("immutable setting forbids Up queries");
  BoundReport r;
  r.nai_fp = nai_fp;
  r.eps_prf = eps_prf;
  r.budget = budget;
  r.immutable = immutable;
  long double v = eps_prf;
  if (!immutable) v += 2.0L * static_cast<long double>(budget.q_t) * nai_fp;
  r.adversarial_bound = clamp_probability(v);
  return r;
}

inline std::uint64_t cuckoo_storage_bits(std::uint64_t s, unsigned lambda_i, unsigned lambda_t) {
  if (lambda_i >= 64) throw std::overflow_error("storage does not fit in 64 bits");
  unsigned __int128 v = static_cast<unsigned __int128>(s) * lambda_t;
  v <<= lambda_i;
  if (v > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("storage does not fit in 64 bits");
  return static_cast<std::uint64_t>(v);
}

/// m for Bloom filters, s * 2^lambda_I * lambda_T for Cuckoo filters.
inline std::uint64_t storage_bits(const AmqDescriptor& d) {
  if (d.family == Family::bloom) return d.bloom_params().m;
  const auto& pp = d.cuckoo_params();
  return cuckoo_storage_bits(pp.s, pp.lambda_i, pp.lambda_t);
}

/// NAI false-positive probability of a descriptor after n insertions.
inline double nai_fp_for(const AmqDescriptor& d, std::uint64_t n) {
  switch (d.family) {
    case Family::bloom: return bloom_nai_fp_bound(d.bloom_params().m, d.bloom_params().k, n).bound;
    case Family::cuckoo: return cuckoo_nai_fp_bound(d.cuckoo_params().s, d.cuckoo_params().lambda_t);
    case Family::prf_wrapped_cuckoo: return cuckoo_nai_fp_bound(d.cuckoo_params().s, d.cuckoo_params().lambda_t, 256);
  }
  throw std::invalid_argument("unknown filter family");
}

/// Bound report for a concrete descriptor with P evaluated at n + q_u.
inline BoundReport bound_report(const AmqDescriptor& d, const QueryBudget& budget, double eps_prf,
                                bool immutable = false) {
  BoundReport r = adversarial_correctness_bound(eps_prf, budget, nai_fp_for(d, budget.n + budget.q_u), immutable);
  r.storage_bits = storage_bits(d);
  r.pp = d.pp;
  r.alpha_beta_one = d.alpha == 1 && d.beta == 1;
  return r;
}

struct PrivacyReport {
  double eps_prf = 0;
  double guess_bound = 0;
  double rep_privacy_bound = 0;
  double min_entropy = 0;
};

/// guess = min(1, (q_u + q_t) 2^{-H}); Rep privacy = eps + guess.
inline PrivacyReport privacy_guessing_bound(std::uint64_t q_u, std::uint64_t q_t, double min_entropy_bits,
                                            double eps_prf) {
  if (!(min_entropy_bits >= 0)) throw std::invalid_argument("min-entropy must be non-negative");
  if (!(eps_prf >= 0 && eps_prf <= 1)) throw std::invalid_argument("eps_prf must lie in [0, 1]");
  PrivacyReport r;
  r.eps_prf = eps_prf;
  r.min_entropy = min_entropy_bits;
  const long double q = static_cast<long double>(q_u) + static_cast<long double>(q_t);
  r.guess_bound = clamp_probability(q * std::exp2(-static_cast<long double>(min_entropy_bits)));
  r.rep_privacy_bound = clamp_probability(static_cast<long double>(eps_prf) + r.guess_bound);
  return r;
}

// Parameter sweep.

struct PlanCandidate {
  Family family = Family::bloom;
  std::uint64_t m = 0;
  unsigned k = 0;
  std::uint32_t s = 0;
  unsigned lambda_i = 0;
  unsigned lambda_t = 0;

  static PlanCandidate bloom(std::uint64_t m, unsigned k) { return {Family::bloom, m, k, 0, 0, 0}; }
  static PlanCandidate cuckoo(std::uint32_t s, unsigned lambda_i, unsigned lambda_t) {
    return {Family::cuckoo, 0, 0, s, lambda_i, lambda_t};
  }
  std::uint64_t storage() const {
    return family == Family::bloom ? m : cuckoo_storage_bits(s, lambda_i, lambda_t);
  }
  friend bool operator==(const PlanCandidate&, const PlanCandidate&) = default;
};

struct CurvePoint {
  PlanCandidate pp;
  std::uint64_t storage_bits = 0;
  double log2_eps_prime = 0;
  double log2_honest_fp = 0;
  std::uint64_t worst_t = 0;
};

inline constexpr double kCuckooFeasibleLoad = 0.95;

namespace detail {

inline constexpr long double kLn2 = 0.693147180559945309417232121458176568L;

inline long double log_add_exp(long double a, long double b) {
  if (a == -std::numeric_limits<long double>::infinity()) return b;
  if (b == -std::numeric_limits<long double>::infinity()) return a;
  long double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(1 - e^-a) for a > 0.
inline long double log1mexp(long double a) {
  return a > kLn2 ? std::log1p(-std::exp(-a)) : std::log(-std::expm1(-a));
}

}  // namespace detail

/// Natural log of the NAI false-positive probability after n insertions.
inline long double log_nai_fp(const PlanCandidate& c, long double n) {
  if (c.family == Family::bloom) {
    if (c.m < 2 || c.k < 1) throw std::invalid_argument("Bloom candidate requires m >= 2, k >= 1");
    const long double a = (n + 0.5L) * c.k / static_cast<long double>(c.m - 1);
    return c.k * detail::log1mexp(a);
  }
  if (c.s < 1 || c.lambda_t < 1) throw std::invalid_argument("Cuckoo candidate requires s >= 1, lambda_T >= 1");
  const long double per_slot = std::ldexp(1.0L, -static_cast<int>(c.lambda_t));
  return detail::log1mexp(-static_cast<long double>(2 * c.s + 1) * std::log1p(-per_slot));
}

inline bool cuckoo_feasible(const PlanCandidate& c, std::uint64_t items) {
  return static_cast<long double>(items) <= kCuckooFeasibleLoad * c.s * std::ldexp(1.0L, static_cast<int>(c.lambda_i));
}

struct WorstCase {
  long double log_value;  // natural log of eps + (1 + 2t) P(n + q - t)
  std::uint64_t t;
};

/// Maximum over the split q_t = t, q_u = q - t of the real-world FP bound
/// eps + (1 + 2t) P(n + q - t); the summand in t is log-concave, so an
/// integer ternary search finds the maximiser.
inline WorstCase worst_case_over_split(const PlanCandidate& c, std::uint64_t n, std::uint64_t q,
                                       long double log_eps) {
  auto f = [&](std::uint64_t t) {
    return std::log1p(2.0L * static_cast<long double>(t)) +
           log_nai_fp(c, static_cast<long double>(n) + static_cast<long double>(q - t));
  };
  std::uint64_t lo = 0, hi = q;
  while (hi - lo > 2) {
    std::uint64_t m1 = lo + (hi - lo) / 3;
    std::uint64_t m2 = hi - (hi - lo) / 3;
    if (f(m1) < f(m2))
      lo = m1 + 1;
    else
      hi = m2;
  }
  std::uint64_t best = lo;
  long double best_v = f(lo);
  for (std::uint64_t t = lo + 1; t <= hi; ++t) {
    long double v = f(t);
    if (v > best_v) best_v = v, best = t;
  }
  return {std::min(detail::log_add_exp(log_eps, best_v), 0.0L), best};
}

struct SweepConfig {
  Family family = Family::bloom;
  std::uint64_t n = 0;
  std::uint64_t q = 0;
  double eps_prf_log2 = -256;
  std::vector<PlanCandidate> grid;
};

struct SweepResult {
  std::vector<CurvePoint> points;
  std::size_t dropped_infeasible = 0;
};

/// Default candidate grid: Bloom m = round(2^{e/8}) over ten octaves above
/// n+q with k in [1, 32]; Cuckoo s in {4, 8}, the three smallest feasible
/// lambda_I and lambda_T in [1, 64].
inline std::vector<PlanCandidate> default_grid(Family family, std::uint64_t n, std::uint64_t q) {
  const std::uint64_t items = std::max<std::uint64_t>(n + q, 2);
  std::vector<PlanCandidate> grid;
  if (family == Family::bloom) {
    const int base = static_cast<int>(std::floor(std::log2(static_cast<long double>(items))));
    std::uint64_t prev = 0;
    for (int e = 8 * base; e <= 8 * (base + 10); ++e) {
      auto m = static_cast<std::uint64_t>(std::llround(std::exp2(static_cast<long double>(e) / 8)));
      if (m == prev || m < 2) continue;
      prev = m;
      for (unsigned k = 1; k <= 32; ++k) grid.push_back(PlanCandidate::bloom(m, k));
    }
    return grid;
  }
  for (std::uint32_t s : {4u, 8u}) {
    unsigned li = 0;
    while (!cuckoo_feasible(PlanCandidate::cuckoo(s, li, 1), items)) ++li;
    for (unsigned d = 0; d < 3; ++d)
      for (unsigned lt = 1; lt <= 64; ++lt) grid.push_back(PlanCandidate::cuckoo(s, li + d, lt));
  }
  return grid;
}

inline SweepResult parameter_sweep(const SweepConfig& cfg) {
  if (cfg.grid.empty()) throw std::invalid_argument("parameter sweep requires a non-empty grid");
  SweepResult res;
  const long double log_eps = static_cast<long double>(cfg.eps_prf_log2) * detail::kLn2;
  const std::uint64_t items = cfg.n + cfg.q;
  for (const auto& c : cfg.grid) {
    if (c.family != cfg.family) throw std::invalid_argument("grid candidate family differs from sweep family");
    if (c.family != Family::bloom && !cuckoo_feasible(c, items)) {
      ++res.dropped_infeasible;
      continue;
    }
    WorstCase w = worst_case_over_split(c, cfg.n, cfg.q, log_eps);
    CurvePoint p;
    p.pp = c;
    p.storage_bits = c.storage();
    p.log2_eps_prime = static_cast<double>(w.log_value / detail::kLn2);
    p.log2_honest_fp = static_cast<double>(log_nai_fp(c, static_cast<long double>(items)) / detail::kLn2);
    p.worst_t = w.t;
    res.points.push_back(p);
  }
  std::stable_sort(res.points.begin(), res.points.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return std::tie(a.storage_bits, a.pp.k, a.pp.s, a.pp.lambda_i, a.pp.lambda_t) <
           std::tie(b.storage_bits, b.pp.k, b.pp.s, b.pp.lambda_i, b.pp.lambda_t);
  });
  return res;
}

struct MatchedStorage {
  CurvePoint adversarial;
  CurvePoint honest;
  double ratio;
};

/// Cheapest points meeting a log2 FP target on the adversarial and honest
/// curves, and the ratio of their storage.
inline std::optional<MatchedStorage> matched_storage(const std::vector<CurvePoint>& points, double target_log2) {
  const CurvePoint* adv = nullptr;
  const CurvePoint* honest = nullptr;
  for (const auto& p : points) {
    if (p.log2_eps_prime <= target_log2 && (!adv || p.storage_bits < adv->storage_bits)) adv = &p;
    if (p.log2_honest_fp <= target_log2 && (!honest || p.storage_bits < honest->storage_bits)) honest = &p;
  }
  if (!adv || !honest) return std::nullopt;
  return MatchedStorage{*adv, *honest,
                        static_cast<double>(adv->storage_bits) / static_cast<double>(honest->storage_bits)};
}

}  // namespace amqsec
