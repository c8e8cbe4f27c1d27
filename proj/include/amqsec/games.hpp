#pragma once

#include <sodium.h>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "amqsec/amq.hpp"
#include "amqsec/analysis.hpp"
#include "amqsec/coins.hpp"
#include "amqsec/domain.hpp"
#include "amqsec/parallel.hpp"

namespace amqsec {

enum class World { real = 0, ideal = 1 };

inline std::string to_string(World w) { return w == World::real ? "real" : "ideal"; }

/// Oracle interface handed to an adversary. A false/empty return is the
/// bottom answer.
class GameOracles {
 public:
  virtual ~GameOracles() = default;
  virtual bool rep(const std::vector<DomainElement>& v) = 0;
  virtual bool up(const DomainElement& x) = 0;
  virtual bool qry(const DomainElement& x) = 0;
  virtual std::optional<Bytes> reveal() = 0;
};

/// Game-side oracles that also expose the serialized state to the harness.
class GameBackend : public GameOracles {
 public:
  virtual Bytes state_bytes() const = 0;
};

using Adversary = std::function<Bytes(GameOracles&, CoinSource&)>;

struct AdversaryStrategy {
  Adversary run;
  QueryBudget budget;
};

inline Bytes guess_bytes(bool bit) { return Bytes{static_cast<std::uint8_t>(bit ? 1 : 0)}; }
inline bool guess_bit(const Bytes& out) { return !out.empty() && (out[0] & 1u); }

struct TranscriptEntry {
  std::uint64_t trial = 0;
  std::string world;
  std::string op;
  std::string input_hash;
  bool answer = false;
  std::string state_digest;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

inline std::string short_digest(std::span<const std::uint8_t> b) {
  detail::ensure_sodium();
  std::uint8_t out[16];
  crypto_generichash(out, sizeof out, b.data(), b.size(), nullptr, 0);
  return to_hex(out);
}

inline void write_transcript_jsonl(std::ostream& os, const std::vector<TranscriptEntry>& entries) {
  for (const auto& e : entries) {
    nlohmann::json j = {{"trial", e.trial},          {"world", e.world},   {"op", e.op},
                        {"input-hash", e.input_hash}, {"answer", e.answer}, {"state-digest", e.state_digest}};
    os << j.dump() << '\n';
  }
}

/// Enforces a QueryBudget in front of a backend (bottom past each limit)
/// and optionally records a transcript.
class BudgetedOracles : public GameOracles {
 public:
  BudgetedOracles(GameBackend& inner, QueryBudget budget, std::vector<TranscriptEntry>* transcript = nullptr,
                  std::uint64_t trial = 0, std::string world = {})
      : inner_(&inner), budget_(budget), transcript_(transcript), trial_(trial), world_(std::move(world)) {}

  bool rep(const std::vector<DomainElement>& v) override {
    ++rep_calls_;
    bool b = false;
    if (v.size() <= budget_.n) b = inner_->rep(v);
    Bytes cat;
    for (const auto& x : v) cat.insert(cat.end(), x.raw().begin(), x.raw().end());
    record("rep", cat, b);
    return b;
  }
  bool up(const DomainElement& x) override {
    bool b = ups_ < budget_.q_u ? (++ups_, inner_->up(x)) : false;
    record("up", x.raw(), b);
    return b;
  }
  bool qry(const DomainElement& x) override {
    bool b = qrys_ < budget_.q_t ? (++qrys_, inner_->qry(x)) : false;
    record("qry", x.raw(), b);
    return b;
  }
  std::optional<Bytes> reveal() override {
    std::optional<Bytes> s;
    if (reveals_ < budget_.q_v) {
      ++reveals_;
      s = inner_->reveal();
    }
    record("reveal", {}, s.has_value());
    return s;
  }

  std::uint64_t up_calls() const { return ups_; }
  std::uint64_t qry_calls() const { return qrys_; }
  std::uint64_t reveal_calls() const { return reveals_; }
  std::uint64_t rep_calls() const { return rep_calls_; }

 private:
  void record(const char* op, std::span<const std::uint8_t> input, bool answer) {
    if (!transcript_) return;
    transcript_->push_back({trial_, world_, op, short_digest(input), answer, short_digest(inner_->state_bytes())});
  }

  GameBackend* inner_;
  QueryBudget budget_;
  std::vector<TranscriptEntry>* transcript_;
  std::uint64_t trial_;
  std::string world_;
  std::uint64_t ups_ = 0, qrys_ = 0, reveals_ = 0, rep_calls_ = 0;
};

/// Real-world oracles: the filter answers directly, gated by the init flag.
template <class Filter>
class RealWorld : public GameBackend {
 public:
  RealWorld(Filter filter, std::uint64_t coin_seed) : filter_(std::move(filter)), coins_(coin_seed) {}

  bool rep(const std::vector<DomainElement>& v) override {
    if (init_) return false;
    init_ = true;
    for (const auto& x : v) filter_.insert(x, coins_);
    return true;
  }
  bool up(const DomainElement& x) override {
    if (!init_) return false;
    return filter_.insert(x, coins_);
  }
  bool qry(const DomainElement& x) override {
    if (!init_) return false;
    return filter_.query(x);
  }
  std::optional<Bytes> reveal() override { return serialize_filter(filter_); }
  Bytes state_bytes() const override { return serialize_filter(filter_); }

  const Filter& filter() const { return filter_; }

 private:
  Filter filter_;
  CoinSource coins_;
  bool init_ = false;
};

/// Ideal-world simulator for the correctness game. The filter must run on
/// a random oracle and expose query_random_range_point for qry^Id.
template <class Filter>
class CorrectnessSimulator : public GameBackend {
 public:
  CorrectnessSimulator(Filter filter, std::uint64_t coin_seed) : filter_(std::move(filter)), coins_(coin_seed) {}

  bool rep(const std::vector<DomainElement>& v) override {
    if (init_) return false;
    init_ = true;
    for (const auto& x : v) up(x);
    return true;
  }

  bool up(const DomainElement& x) override {
    if (!init_) return false;
    if (!inserted_.count(x)) {
      bool b = filter_.insert(x, coins_);
      up_enabled_ = b;
      if (b) {
        inserted_.insert(x);
        ++ctr_;
      }
      return b;
    }
    return up_enabled_;
  }

  bool qry(const DomainElement& x) override {
    if (!init_) return false;
    ++i_;
    if (inserted_.count(x) || fplist_.count(x)) return true;
    auto it = calq_.find(x);
    if (it != calq_.end() && it->second == ctr_) return false;
    calq_[x] = ctr_;
    bool a = filter_.query_random_range_point(coins_);
    if (a) fplist_.insert(x);
    return a;
  }

  std::optional<Bytes> reveal() override { return serialize_filter(filter_); }
  Bytes state_bytes() const override { return serialize_filter(filter_); }

  const Filter& filter() const { return filter_; }
  bool up_enabled() const { return up_enabled_; }
  std::uint64_t qry_counter() const { return i_; }
  std::uint64_t ctr() const { return ctr_; }
  bool is_inserted(const DomainElement& x) const { return inserted_.count(x) != 0; }
  bool on_fplist(const DomainElement& x) const { return fplist_.count(x) != 0; }
  std::size_t fplist_size() const { return fplist_.size(); }
  std::optional<std::uint64_t> calq(const DomainElement& x) const {
    auto it = calq_.find(x);
    if (it == calq_.end()) return std::nullopt;
    return it->second;
  }

 private:
  Filter filter_;
  CoinSource coins_;
  bool init_ = false;
  bool up_enabled_ = true;
  std::unordered_set<DomainElement, DomainElementHash> inserted_;
  std::unordered_set<DomainElement, DomainElementHash> fplist_;
  std::unordered_map<DomainElement, std::uint64_t, DomainElementHash> calq_;
  std::uint64_t i_ = 0;
  std::uint64_t ctr_ = 0;
};

struct GameOutcome {
  Bytes output;
  std::vector<TranscriptEntry> transcript;
};

namespace detail {

inline GameOutcome play(GameBackend& backend, const AdversaryStrategy& adv, std::uint64_t seed, World world,
                        std::uint64_t trial, bool record) {
  GameOutcome out;
  BudgetedOracles oracles(backend, adv.budget, record ? &out.transcript : nullptr, trial, to_string(world));
  CoinSource adv_coins(derive_seed(seed, 3));
  out.output = adv.run(oracles, adv_coins);
  return out;
}

}  // namespace detail

/// Runs the correctness game: keyed oracles in the real world, the
/// simulator over random oracles in the ideal world. The adversary's coins
/// depend only on the seed, so both worlds see the same adversary.
inline GameOutcome run_real_or_ideal(const AdversaryStrategy& adv, const AmqDescriptor& d, World world,
                                     std::uint64_t seed, std::uint64_t trial = 0, bool record = true) {
  if (world == World::real) {
    RealWorld<FilterInstance> game(FilterInstance(d, OracleSet::keyed(derive_seed(seed, 1))), derive_seed(seed, 2));
    return detail::play(game, adv, seed, world, trial, record);
  }
  CorrectnessSimulator<FilterInstance> sim(FilterInstance(d, OracleSet::random(derive_seed(seed, 1))),
                                           derive_seed(seed, 2));
  return detail::play(sim, adv, seed, world, trial, record);
}

inline constexpr std::size_t kFreshElementBytes = 32;

/// Lazily sampled permutation of the domain: fresh uniform images with
/// retry on collision.
class LazyPermutation {
 public:
  explicit LazyPermutation(std::uint64_t seed) : coins_(seed) {}

  const DomainElement& operator()(const DomainElement& x) {
    auto it = fwd_.find(x);
    if (it != fwd_.end()) return it->second;
    DomainElement y;
    do {
      y = random_element(coins_, kFreshElementBytes);
    } while (!images_.insert(y).second);
    return fwd_.emplace(x, std::move(y)).first->second;
  }

  std::size_t size() const { return fwd_.size(); }

 private:
  CoinSource coins_;
  std::unordered_map<DomainElement, DomainElement, DomainElementHash> fwd_;
  std::unordered_set<DomainElement, DomainElementHash> images_;
};

/// PI game oracles over a random-oracle filter; c = 1 routes every input
/// through a lazy random permutation.
template <class Filter>
class PiGame : public GameBackend {
 public:
  PiGame(Filter filter, bool c, std::uint64_t seed)
      : filter_(std::move(filter)), coins_(derive_seed(seed, 2)) {
    if (c) pi_.emplace(derive_seed(seed, 4));
  }

  bool rep(const std::vector<DomainElement>& v) override {
    if (init_) return false;
    init_ = true;
    for (const auto& x : v) filter_.insert(route(x), coins_);
    return true;
  }
  bool up(const DomainElement& x) override {
    if (!init_) return false;
    return filter_.insert(route(x), coins_);
  }
  bool qry(const DomainElement& x) override {
    if (!init_) return false;
    return filter_.query(route(x));
  }
  std::optional<Bytes> reveal() override { return serialize_filter(filter_); }
  Bytes state_bytes() const override { return serialize_filter(filter_); }

 private:
  DomainElement route(const DomainElement& x) { return pi_ ? (*pi_)(x) : x; }

  Filter filter_;
  CoinSource coins_;
  std::optional<LazyPermutation> pi_;
  bool init_ = false;
};

/// Returns the adversary's guess bit in the PI game with hidden bit c.
inline bool run_pi_game(const AdversaryStrategy& adv, const AmqDescriptor& d, bool c, std::uint64_t seed) {
  PiGame<FilterInstance> game(FilterInstance(d, OracleSet::random(derive_seed(seed, 1))), c, seed);
  return guess_bit(detail::play(game, adv, seed, c ? World::ideal : World::real, 0, false).output);
}

/// Injective lazy map with a reserved set Y: in-set elements map into
/// Y \ Values(P), others into the complement of Values(P) and Y.
class LazyInjection {
 public:
  explicit LazyInjection(std::uint64_t seed) : coins_(seed) {}

  /// Adds a fresh element outside Y to Y and returns it.
  DomainElement reserve() {
    DomainElement y;
    do {
      y = random_element(coins_, kFreshElementBytes);
    } while (values_.count(y) || !y_.insert(y).second);
    y_free_.push_back(y);
    return y;
  }

  /// in_set: the ElemLeak answer, or nullopt when no leakage is available.
  const DomainElement& map(const DomainElement& x, std::optional<bool> in_set) {
    auto it = p_.find(x);
    if (it != p_.end()) return it->second;
    DomainElement y;
    if (in_set.value_or(false)) {
      if (y_free_.empty()) throw std::logic_error("no unused reserved element left for an in-set input");
      std::size_t j = coins_.below(y_free_.size());
      std::swap(y_free_[j], y_free_.back());
      y = std::move(y_free_.back());
      y_free_.pop_back();
    } else {
      do {
        y = random_element(coins_, kFreshElementBytes);
      } while (y_.count(y) || values_.count(y));
    }
    values_.insert(y);
    return p_.emplace(x, std::move(y)).first->second;
  }

  bool in_reserved(const DomainElement& y) const { return y_.count(y) != 0; }
  bool is_value(const DomainElement& y) const { return values_.count(y) != 0; }
  std::size_t size() const { return p_.size(); }
  std::size_t reserved() const { return y_.size(); }

 private:
  CoinSource coins_;
  std::unordered_map<DomainElement, DomainElement, DomainElementHash> p_;
  std::unordered_set<DomainElement, DomainElementHash> values_;
  std::unordered_set<DomainElement, DomainElementHash> y_;
  std::vector<DomainElement> y_free_;
};

enum class PrivacyVariant { elem_rep, rep };

/// Leakage oracles available to the privacy simulator.
class Leakage {
 public:
  Leakage(const std::vector<DomainElement>& v, bool elem_leak_available)
      : v_(v.begin(), v.end()), elem_available_(elem_leak_available) {}

  std::size_t rep_leak() {
    if (rep_calls_++ > 0) throw std::logic_error("RepLeak consulted more than once");
    return v_.size();
  }
  std::optional<bool> elem_leak(const DomainElement& x) const {
    if (!elem_available_) return std::nullopt;
    return v_.count(x) != 0;
  }
  std::size_t rep_leak_calls() const { return rep_calls_; }

 private:
  std::unordered_set<DomainElement, DomainElementHash> v_;
  bool elem_available_;
  std::size_t rep_calls_ = 0;
};

/// Privacy simulator: RepSim inserts |V| fresh reserved elements, and every
/// Up/Qry input is routed through the lazy injection.
template <class Filter>
class PrivacySimulator : public GameBackend {
 public:
  PrivacySimulator(Filter filter, Leakage& leak, std::uint64_t seed)
      : filter_(std::move(filter)), leak_(&leak), coins_(derive_seed(seed, 2)), per_(derive_seed(seed, 5)) {
    std::size_t n = leak_->rep_leak();
    for (std::size_t i = 0; i < n; ++i) filter_.insert(per_.reserve(), coins_);
  }

  bool rep(const std::vector<DomainElement>&) override { return false; }
  bool up(const DomainElement& x) override { return filter_.insert(per(x), coins_); }
  bool qry(const DomainElement& x) override { return filter_.query(per(x)); }
  std::optional<Bytes> reveal() override { return serialize_filter(filter_); }
  Bytes state_bytes() const override { return serialize_filter(filter_); }

  const LazyInjection& injection() const { return per_; }

 private:
  DomainElement per(const DomainElement& x) { return per_.map(x, leak_->elem_leak(x)); }

  Filter filter_;
  Leakage* leak_;
  CoinSource coins_;
  LazyInjection per_;
};

/// Real-world privacy oracles: the filter already holds V; Rep is closed.
template <class Filter>
class PrivacyReal : public GameBackend {
 public:
  PrivacyReal(Filter filter, const std::vector<DomainElement>& v, std::uint64_t seed)
      : filter_(std::move(filter)), coins_(derive_seed(seed, 2)) {
    for (const auto& x : v) filter_.insert(x, coins_);
  }
  bool rep(const std::vector<DomainElement>&) override { return false; }
  bool up(const DomainElement& x) override { return filter_.insert(x, coins_); }
  bool qry(const DomainElement& x) override { return filter_.query(x); }
  std::optional<Bytes> reveal() override { return serialize_filter(filter_); }
  Bytes state_bytes() const override { return serialize_filter(filter_); }

 private:
  Filter filter_;
  CoinSource coins_;
};

/// Records the elements an adversary sends to Up and Qry.
class QuerySetRecorder : public GameBackend {
 public:
  explicit QuerySetRecorder(GameBackend& inner) : inner_(&inner) {}
  bool rep(const std::vector<DomainElement>& v) override { return inner_->rep(v); }
  bool up(const DomainElement& x) override {
    w_.insert(x);
    return inner_->up(x);
  }
  bool qry(const DomainElement& x) override {
    w_.insert(x);
    return inner_->qry(x);
  }
  std::optional<Bytes> reveal() override { return inner_->reveal(); }
  Bytes state_bytes() const override { return inner_->state_bytes(); }
  const std::unordered_set<DomainElement, DomainElementHash>& queried() const { return w_; }

 private:
  GameBackend* inner_;
  std::unordered_set<DomainElement, DomainElementHash> w_;
};

struct PrivacyOutcome {
  Bytes out;
  std::vector<DomainElement> v;
  /// Set when an element of V was sent to Up or Qry.
  bool w_intersects_v = false;
  std::size_t rep_leak_calls = 0;
};

/// Runs the second-stage adversary of the Elem-Rep (or Rep) privacy game
/// and returns the distinguisher input (out, V).
inline PrivacyOutcome run_elem_rep_privacy(const AdversaryStrategy& adv2, const AmqDescriptor& d,
                                           const std::vector<DomainElement>& v, World world,
                                           PrivacyVariant variant, std::uint64_t seed) {
  PrivacyOutcome res;
  res.v = v;
  std::unique_ptr<GameBackend> backend;
  std::optional<Leakage> leak;
  if (world == World::real) {
    backend = std::make_unique<PrivacyReal<FilterInstance>>(
        FilterInstance(d, OracleSet::keyed(derive_seed(seed, 1))), v, seed);
  } else {
    leak.emplace(v, variant == PrivacyVariant::elem_rep);
    backend = std::make_unique<PrivacySimulator<FilterInstance>>(
        FilterInstance(d, OracleSet::random(derive_seed(seed, 1))), *leak, seed);
  }
  QuerySetRecorder rec(*backend);
  res.out = detail::play(rec, adv2, seed, world, 0, false).output;
  for (const auto& x : v)
    if (rec.queried().count(x)) res.w_intersects_v = true;
  if (leak) res.rep_leak_calls = leak->rep_leak_calls();
  return res;
}

struct AdvantageEstimate {
  double advantage = 0;
  double half_width = 0;
  double p0 = 0;
  double p1 = 0;
  std::size_t per_world = 0;
};

/// run(world_bit, seed) returns the distinguisher's output bit. Trials are
/// split evenly across the two worlds; trial j of each world uses the same
/// seed. Reports |p1 - p0| with a 95% normal-approximation half-width.
inline AdvantageEstimate estimate_advantage(const std::function<bool(int, std::uint64_t)>& run, std::size_t trials,
                                            std::uint64_t seed, unsigned max_workers = 0) {
  if (trials < 100) throw std::invalid_argument("estimate_advantage requires at least 100 trials");
  const std::size_t per_world = trials / 2;
  auto hits = parallel_map<int>(
      per_world,
      [&](std::size_t j) {
        std::uint64_t s = derive_seed(seed, j);
        return (run(0, s) ? 1 : 0) | (run(1, s) ? 2 : 0);
      },
      max_workers);
  std::size_t c0 = 0, c1 = 0;
  for (int h : hits) {
    c0 += h & 1;
    c1 += (h >> 1) & 1;
  }
  AdvantageEstimate e;
  e.per_world = per_world;
  const double n = static_cast<double>(per_world);
  e.p0 = static_cast<double>(c0) / n;
  e.p1 = static_cast<double>(c1) / n;
  e.advantage = std::abs(e.p1 - e.p0);
  e.half_width = 1.96 * std::sqrt(e.p1 * (1 - e.p1) / n + e.p0 * (1 - e.p0) / n);
  return e;
}

/// Advantage of a strategy in the PI game (world bit = c).
inline AdvantageEstimate estimate_pi_advantage(const AdversaryStrategy& adv, const AmqDescriptor& d,
                                               std::size_t trials, std::uint64_t seed) {
  return estimate_advantage([&](int c, std::uint64_t s) { return run_pi_game(adv, d, c == 1, s); }, trials, seed);
}

}  // namespace amqsec
