#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>
#include <vector>

#include "amqsec/amq.hpp"
#include "amqsec/analysis.hpp"
#include "amqsec/bloom.hpp"
#include "amqsec/cuckoo.hpp"
#include "amqsec/games.hpp"

namespace amqsec {

/// Toy public index function: FNV-1a double hashing, no key.
class PublicIndexHash {
 public:
  IndexVector operator()(const DomainElement& x, const BloomParams& pp) const {
    std::uint64_t h1 = fnv(x, 0xcbf29ce484222325ULL);
    std::uint64_t h2 = fnv(x, 0x84222325cbf29ce4ULL) | 1u;
    IndexVector v(pp.k);
    for (unsigned i = 0; i < pp.k; ++i) v[i] = (h1 + i * h2) % pp.m + 1;
    return v;
  }

 private:
  static std::uint64_t fnv(const DomainElement& x, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (std::uint8_t b : x.bytes()) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

enum class HashTarget { weak_public, keyed };

namespace detail {

/// The attacker's local model of a Bloom state under the public hash.
class PublicBloomModel {
 public:
  explicit PublicBloomModel(BloomParams pp) : pp_(pp), bits_(pp.m) {}
  IndexVector indices(const DomainElement& x) const { return hash_(x, pp_); }
  void add(const DomainElement& x) {
    for (auto i : indices(x)) bits_.set(i - 1);
  }
  std::size_t new_bits(const DomainElement& x) const {
    std::set<std::uint64_t> fresh;
    for (auto i : indices(x))
      if (!bits_.test(i - 1)) fresh.insert(i);
    return fresh.size();
  }
  bool predicts(const DomainElement& x) const { return bloom_qry_id(indices(x), bits_); }
  const BloomState& bits() const { return bits_; }

 private:
  BloomParams pp_;
  PublicIndexHash hash_;
  BloomState bits_;
};

template <class Fn>
auto with_bloom_target(HashTarget target, const BloomParams& pp, std::uint64_t seed, Fn&& fn) {
  if (target == HashTarget::weak_public) {
    RealWorld<BloomFilter<PublicIndexHash>> game(BloomFilter<PublicIndexHash>(pp, PublicIndexHash{}),
                                                 derive_seed(seed, 2));
    return fn(game);
  }
  auto f = OracleSet::keyed(derive_seed(seed, 1)).f;
  RealWorld<BloomFilter<OracleIndexFn>> game(BloomFilter<OracleIndexFn>(pp, OracleIndexFn(f)), derive_seed(seed, 2));
  return fn(game);
}

inline std::vector<DomainElement> fresh_elements(CoinSource& coins, std::size_t n,
                                                 std::unordered_set<DomainElement, DomainElementHash>& used) {
  std::vector<DomainElement> v;
  while (v.size() < n) {
    DomainElement x = random_element(coins, kFreshElementBytes);
    if (used.insert(x).second) v.push_back(std::move(x));
  }
  return v;
}

}  // namespace detail

struct PollutionConfig {
  std::uint64_t m = 4096;
  unsigned k = 4;
  std::uint64_t n = 64;
  std::uint64_t q_u = 256;
  /// Attacker-selected probes (one Qry each).
  std::uint64_t probes = 10000;
  /// Uniformly random probes, reported separately.
  std::uint64_t uniform_probes = 10000;
  std::size_t candidates_per_up = 256;
  std::size_t max_tries_per_probe = 1u << 22;
  double eps_prf = std::ldexp(1.0, -256);
  std::uint64_t seed = 1;
};

struct PollutionResult {
  double adversarial_fp = 0;
  double adversarial_sigma = 0;
  double uniform_fp = 0;
  std::uint64_t probes = 0;
  std::uint64_t uniform_probes = 0;
  std::uint64_t ups_used = 0;
  /// NAI bound P(n + q_u).
  double honest_bound = 0;
  /// eps + 2 q_t P(n + q_u) with q_t = 1 per probe.
  double envelope = 0;
};

/// Greedy pollution: each Up inserts the candidate setting the most new
/// bits in the attacker's public-hash model; probes are fresh elements the
/// model predicts positive.
inline PollutionResult attack_pollution_bloom(HashTarget target, const PollutionConfig& cfg) {
  const BloomParams pp{cfg.m, cfg.k};
  pp.validate();
  PollutionResult res;
  res.honest_bound = bloom_nai_fp_bound(cfg.m, cfg.k, cfg.n + cfg.q_u).bound;
  res.envelope = adversarial_correctness_bound(cfg.eps_prf, {cfg.n, cfg.q_u, 1, 0}, res.honest_bound).adversarial_bound;

  std::uint64_t adv_hits = 0, adv_probes = 0, uni_hits = 0;
  AdversaryStrategy adv;
  adv.budget = {cfg.n, cfg.q_u, cfg.probes + cfg.uniform_probes, 0};
  adv.run = [&](GameOracles& o, CoinSource& coins) {
    detail::PublicBloomModel model(pp);
    std::unordered_set<DomainElement, DomainElementHash> used;
    auto v = detail::fresh_elements(coins, cfg.n, used);
    o.rep(v);
    for (const auto& x : v) model.add(x);
    for (std::uint64_t u = 0; u < cfg.q_u; ++u) {
      auto cands = detail::fresh_elements(coins, cfg.candidates_per_up, used);
      std::size_t best = 0, best_gain = 0;
      for (std::size_t c = 0; c < cands.size(); ++c) {
        std::size_t g = model.new_bits(cands[c]);
        if (g > best_gain) best_gain = g, best = c;
      }
      o.up(cands[best]);
      model.add(cands[best]);
      ++res.ups_used;
    }
    for (std::uint64_t p = 0; p < cfg.probes; ++p) {
      for (std::size_t t = 0; t < cfg.max_tries_per_probe; ++t) {
        DomainElement y = random_element(coins, kFreshElementBytes);
        if (used.count(y) || !model.predicts(y)) continue;
        ++adv_probes;
        adv_hits += o.qry(y) ? 1 : 0;
        break;
      }
    }
    for (std::uint64_t p = 0; p < cfg.uniform_probes; ++p) {
      DomainElement y = random_element(coins, kFreshElementBytes);
      if (used.count(y)) continue;
      uni_hits += o.qry(y) ? 1 : 0;
    }
    return Bytes{};
  };
  detail::with_bloom_target(target, pp, cfg.seed, [&](GameBackend& game) {
    detail::play(game, adv, cfg.seed, World::real, 0, false);
    return 0;
  });
  res.probes = adv_probes;
  res.uniform_probes = cfg.uniform_probes;
  if (adv_probes) {
    res.adversarial_fp = static_cast<double>(adv_hits) / static_cast<double>(adv_probes);
    res.adversarial_sigma = std::sqrt(res.adversarial_fp * (1 - res.adversarial_fp) / static_cast<double>(adv_probes));
  }
  if (cfg.uniform_probes) res.uniform_fp = static_cast<double>(uni_hits) / static_cast<double>(cfg.uniform_probes);
  return res;
}

struct TscConfig {
  std::uint64_t m = 4096;
  unsigned k = 4;
  std::uint64_t n = 64;
  std::uint64_t q_u = 64;
  std::size_t candidates_per_up = 4096;
  double eps_prf = std::ldexp(1.0, -256);
  std::uint64_t seed = 1;
};

struct TscResult {
  bool success = false;
  std::uint64_t ups_used = 0;
  /// Target bits still unset in the attacker's model when the budget ended.
  std::size_t uncovered_bits = 0;
};

/// eps + 2|L| P + P^|L|: the envelope on target-set coverage success.
inline double tsc_envelope(double nai_fp, std::size_t target_size, double eps_prf) {
  long double v = static_cast<long double>(eps_prf) + 2.0L * target_size * nai_fp +
                  std::pow(static_cast<long double>(nai_fp), static_cast<long double>(target_size));
  return clamp_probability(v);
}

/// Covers the bits of L under the public-hash model by Up calls on other
/// elements, never on L itself, then queries every element of L.
inline TscResult attack_target_set_coverage(HashTarget target, const std::vector<DomainElement>& L,
                                            const TscConfig& cfg) {
  const BloomParams pp{cfg.m, cfg.k};
  pp.validate();
  TscResult res;
  AdversaryStrategy adv;
  adv.budget = {cfg.n, cfg.q_u, L.size(), 0};
  adv.run = [&](GameOracles& o, CoinSource& coins) {
    detail::PublicBloomModel model(pp);
    std::unordered_set<DomainElement, DomainElementHash> used(L.begin(), L.end());
    auto v = detail::fresh_elements(coins, cfg.n, used);
    o.rep(v);
    for (const auto& x : v) model.add(x);
    std::set<std::uint64_t> want;
    for (const auto& x : L)
      for (auto i : model.indices(x))
        if (!model.bits().test(i - 1)) want.insert(i);
    while (!want.empty() && res.ups_used < cfg.q_u) {
      auto cands = detail::fresh_elements(coins, cfg.candidates_per_up, used);
      std::size_t best = 0, best_gain = 0;
      for (std::size_t c = 0; c < cands.size(); ++c) {
        std::set<std::uint64_t> hit;
        for (auto i : model.indices(cands[c]))
          if (want.count(i)) hit.insert(i);
        if (hit.size() > best_gain) best_gain = hit.size(), best = c;
      }
      if (best_gain == 0) continue;
      o.up(cands[best]);
      ++res.ups_used;
      for (auto i : model.indices(cands[best])) want.erase(i);
      model.add(cands[best]);
    }
    res.uncovered_bits = want.size();
    bool all = true;
    for (const auto& x : L) all = o.qry(x) && all;
    res.success = all;
    return guess_bytes(all);
  };
  detail::with_bloom_target(target, pp, cfg.seed, [&](GameBackend& game) {
    detail::play(game, adv, cfg.seed, World::real, 0, false);
    return 0;
  });
  return res;
}

struct CuckooPiConfig {
  std::uint64_t q_u = 300;
  std::uint64_t q_v = 301;
  /// Tag re-insertions that must land in the learned bucket before guessing c = 0.
  unsigned tests = 3;
};

namespace detail {

/// Learns H_I(t) = b xor b' for every tag t seen moving from bucket b to b'
/// between two snapshots. Ambiguous moves are skipped; contradicting
/// observations poison the tag.
inline void learn_relocations(const CuckooState& before, const CuckooState& after,
                              std::map<std::uint32_t, std::uint64_t>& learned, std::set<std::uint32_t>& poisoned) {
  std::map<std::uint32_t, std::vector<std::uint64_t>> gained;
  std::vector<std::pair<std::uint32_t, std::uint64_t>> lost;
  for (std::uint64_t b = 0; b < before.bucket_count(); ++b) {
    std::multiset<std::uint32_t> pb(before.bucket(b).begin(), before.bucket(b).end());
    std::multiset<std::uint32_t> pa(after.bucket(b).begin(), after.bucket(b).end());
    for (auto t : pb) {
      auto it = pa.find(t);
      if (it != pa.end())
        pa.erase(it);
      else
        lost.emplace_back(t, b);
    }
    for (auto t : pa) gained[t].push_back(b);
  }
  for (auto [t, b] : lost) {
    auto it = gained.find(t);
    if (it == gained.end() || it->second.size() != 1) continue;
    std::uint64_t d = b ^ it->second.front();
    auto [pos, fresh] = learned.emplace(t, d);
    if (!fresh && pos->second != d) poisoned.insert(t);
  }
}

}  // namespace detail

/// Distinguisher for the PI game against the original Cuckoo filter. It
/// learns H_I(T) for observed tags from evictions, then inserts the public
/// encoding of T and checks through Reveal whether it lands in bucket
/// H_I(T); with c = 0 it always does.
inline AdversaryStrategy make_cuckoo_pi_adversary(const CuckooPiConfig& cfg) {
  AdversaryStrategy adv;
  adv.budget = {0, cfg.q_u, 0, cfg.q_v};
  adv.run = [cfg](GameOracles& o, CoinSource& coins) -> Bytes {
    const bool fallback = coins.bit();
    o.rep({});
    auto snap = o.reveal();
    if (!snap) return guess_bytes(fallback);
    DecodedState prev = deserialize_state(*snap);
    const auto pp = std::get<CuckooParams>(prev.pp);
    std::map<std::uint32_t, std::uint64_t> learned;
    std::set<std::uint32_t> poisoned, tested;
    unsigned passed = 0;
    while (true) {
      while (passed < cfg.tests) {
        const auto& st = std::get<CuckooState>(prev.state);
        std::optional<std::pair<std::uint32_t, std::uint64_t>> pick;
        for (auto [t, d] : learned) {
          if (poisoned.count(t) || tested.count(t) || st.full(d)) continue;
          pick.emplace(t, d);
          break;
        }
        if (!pick) break;
        tested.insert(pick->first);
        const std::uint32_t before = st.load(pick->second);
        if (!o.up(encode_tag(pick->first, pp.lambda_t))) goto done;
        auto next = o.reveal();
        if (!next) goto done;
        prev = deserialize_state(*next);
        if (std::get<CuckooState>(prev.state).load(pick->second) != before + 1) return guess_bytes(true);
        ++passed;
      }
      if (passed >= cfg.tests) return guess_bytes(false);
      if (!o.up(random_element(coins, kFreshElementBytes))) break;
      auto next = o.reveal();
      if (!next) break;
      DecodedState cur = deserialize_state(*next);
      detail::learn_relocations(std::get<CuckooState>(prev.state), std::get<CuckooState>(cur.state), learned,
                                poisoned);
      prev = std::move(cur);
    }
  done:
    if (passed > 0) return guess_bytes(false);
    return guess_bytes(fallback);
  };
  return adv;
}

}  // namespace amqsec
