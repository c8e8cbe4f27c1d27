#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "amqsec/bloom.hpp"
#include "amqsec/coins.hpp"
#include "amqsec/cuckoo.hpp"
#include "amqsec/domain.hpp"
#include "amqsec/prf.hpp"

namespace amqsec {

enum class Family : std::uint8_t { bloom = 1, cuckoo = 2, prf_wrapped_cuckoo = 3 };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::bloom: return "bloom";
    case Family::cuckoo: return "cuckoo";
    case Family::prf_wrapped_cuckoo: return "prf_wrapped_cuckoo";
  }
  return "unknown";
}

inline Family parse_family(const std::string& s) {
  if (s == "bloom") return Family::bloom;
  if (s == "cuckoo") return Family::cuckoo;
  if (s == "prf_wrapped_cuckoo" || s == "prf-wrapped-cuckoo" || s == "wrapped") return Family::prf_wrapped_cuckoo;
  throw std::invalid_argument("unknown filter family: " + s);
}

using PublicParams = std::variant<BloomParams, CuckooParams>;

/// Family, public parameters and oracle-call counts per up (alpha) and qry (beta).
struct AmqDescriptor {
  Family family = Family::bloom;
  PublicParams pp;
  unsigned alpha = 1;
  unsigned beta = 1;

  static AmqDescriptor bloom(BloomParams pp) {
    pp.validate();
    return {Family::bloom, pp, 1, 1};
  }
  static AmqDescriptor cuckoo(CuckooParams pp) {
    pp.validate();
    return {Family::cuckoo, pp, 3 + pp.num, 3};
  }
  static AmqDescriptor prf_wrapped_cuckoo(CuckooParams pp) {
    pp.validate();
    return {Family::prf_wrapped_cuckoo, pp, 1, 1};
  }

  const BloomParams& bloom_params() const { return std::get<BloomParams>(pp); }
  const CuckooParams& cuckoo_params() const { return std::get<CuckooParams>(pp); }
  bool f_decomposable() const { return family != Family::cuckoo; }
};

using FilterState = std::variant<BloomState, CuckooState>;

// Canonical serialization, version 1, little-endian.

inline constexpr std::uint8_t kSerializationVersion = 1;

namespace detail {

inline void put_le(Bytes& out, std::uint64_t v, int n) {
  for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  std::uint64_t le(int n) {
    if (pos_ + static_cast<std::size_t>(n) > b_.size()) throw std::invalid_argument("truncated filter state");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{b_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (pos_ + n > b_.size()) throw std::invalid_argument("truncated filter state");
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Bytes serialize_state(const BloomParams& pp, const BloomState& st) {
  Bytes out{kSerializationVersion, static_cast<std::uint8_t>(Family::bloom)};
  detail::put_le(out, pp.m, 8);
  detail::put_le(out, pp.k, 4);
  Bytes payload = st.to_bytes();
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

inline Bytes serialize_state(const CuckooParams& pp, const CuckooState& st, Family family = Family::cuckoo) {
  Bytes out{kSerializationVersion, static_cast<std::uint8_t>(family)};
  detail::put_le(out, pp.s, 4);
  detail::put_le(out, pp.lambda_i, 4);
  detail::put_le(out, pp.lambda_t, 4);
  detail::put_le(out, pp.num, 4);
  out.push_back(st.disabled() ? 1 : 0);
  const int tag_bytes = static_cast<int>((pp.lambda_t + 7) / 8);
  for (std::uint64_t i = 0; i < st.bucket_count(); ++i) {
    detail::put_le(out, st.load(i), 2);
    for (auto t : st.bucket(i)) detail::put_le(out, t, tag_bytes);
  }
  out.push_back(st.stash() ? 1 : 0);
  if (st.stash()) detail::put_le(out, *st.stash(), tag_bytes);
  return out;
}

struct DecodedState {
  Family family;
  PublicParams pp;
  FilterState state;
};

inline DecodedState deserialize_state(std::span<const std::uint8_t> bytes) {
  detail::Reader r(bytes);
  if (r.le(1) != kSerializationVersion) throw std::invalid_argument("unsupported serialization version");
  auto fam = static_cast<Family>(r.le(1));
  if (fam == Family::bloom) {
    BloomParams pp{r.le(8), static_cast<unsigned>(r.le(4))};
    pp.validate();
    auto payload = r.take((pp.m + 7) / 8);
    DecodedState d{fam, pp, BloomState::from_bytes(pp.m, payload)};
    if (!r.done()) throw std::invalid_argument("trailing bytes after filter state");
    return d;
  }
  if (fam != Family::cuckoo && fam != Family::prf_wrapped_cuckoo) throw std::invalid_argument("unknown family byte");
  CuckooParams pp;
  pp.s = static_cast<std::uint32_t>(r.le(4));
  pp.lambda_i = static_cast<unsigned>(r.le(4));
  pp.lambda_t = static_cast<unsigned>(r.le(4));
  pp.num = static_cast<unsigned>(r.le(4));
  pp.validate();
  bool disabled = r.le(1) != 0;
  const int tag_bytes = static_cast<int>((pp.lambda_t + 7) / 8);
  CuckooState st = cuckoo_setup(pp);
  for (std::uint64_t i = 0; i < pp.buckets(); ++i) {
    auto load = r.le(2);
    if (load > pp.s) throw std::invalid_argument("bucket load exceeds s");
    for (std::uint64_t j = 0; j < load; ++j) st.append(i, static_cast<std::uint32_t>(r.le(tag_bytes)));
  }
  if (r.le(1) != 0) st.set_stash(static_cast<std::uint32_t>(r.le(tag_bytes)));
  if (disabled != st.disabled()) throw std::invalid_argument("disabled flag inconsistent with stash");
  if (!r.done()) throw std::invalid_argument("trailing bytes after filter state");
  return {fam, pp, std::move(st)};
}

template <class I>
Bytes serialize_filter(const BloomFilter<I>& f) {
  return serialize_state(f.params(), f.state());
}
template <class H>
Bytes serialize_filter(const CuckooFilter<H>& f) {
  return serialize_state(f.params(), f.state(), Family::cuckoo);
}
template <class H>
Bytes serialize_filter(const PrfWrappedCuckoo<H>& f) {
  return serialize_state(f.params(), f.state(), Family::prf_wrapped_cuckoo);
}

/// Oracle handles for a filter: f indexes Bloom filters and wraps Cuckoo
/// inputs; g provides H_T and H_I.
struct OracleSet {
  OracleHandle f;
  OracleHandle g;

  static OracleSet keyed(std::uint64_t seed) {
    CoinSource coins(derive_seed(seed, 0x6B6579));
    auto f = std::make_shared<FunctionOracle>(FunctionOracle::keyed_from_coins(coins));
    auto g = std::make_shared<FunctionOracle>(FunctionOracle::keyed_from_coins(coins));
    return {f, g};
  }
  static OracleSet random(std::uint64_t seed) {
    auto f = std::make_shared<FunctionOracle>(FunctionOracle::random(derive_seed(seed, 0x66)));
    auto g = std::make_shared<FunctionOracle>(FunctionOracle::random(derive_seed(seed, 0x67)));
    return {f, g};
  }
};

/// Runtime-polymorphic filter built from a descriptor and its oracles.
class FilterInstance {
 public:
  using Impl = std::variant<BloomFilter<OracleIndexFn>, CuckooFilter<OracleCuckooHashes>,
                            PrfWrappedCuckoo<OracleCuckooHashes>>;

  FilterInstance(AmqDescriptor d, OracleSet oracles) : d_(std::move(d)), oracles_(oracles), impl_(make(d_, oracles)) {}

  const AmqDescriptor& descriptor() const { return d_; }
  const OracleSet& oracles() const { return oracles_; }
  const Impl& impl() const { return impl_; }
  Impl& impl() { return impl_; }

  template <class Coins>
  bool insert(const DomainElement& x, Coins& coins) {
    return std::visit([&](auto& f) { return f.insert(x, coins); }, impl_);
  }
  bool query(const DomainElement& x) const {
    return std::visit([&](const auto& f) { return f.query(x); }, impl_);
  }
  bool query_random_range_point(CoinSource& coins) const {
    return std::visit([&](const auto& f) { return f.query_random_range_point(coins); }, impl_);
  }
  bool disabled() const {
    return std::visit([](const auto& f) { return f.disabled(); }, impl_);
  }
  std::uint64_t occupied() const {
    return std::visit([](const auto& f) { return f.occupied(); }, impl_);
  }
  FilterState state() const {
    return std::visit([](const auto& f) -> FilterState { return f.state(); }, impl_);
  }
  void set_state(FilterState s) {
    std::visit(
        [&](auto& f) {
          using S = typename std::decay_t<decltype(f)>::State;
          f.set_state(std::get<S>(std::move(s)));
        },
        impl_);
  }
  Bytes serialize() const {
    return std::visit([](const auto& f) { return serialize_filter(f); }, impl_);
  }

 private:
  static Impl make(const AmqDescriptor& d, const OracleSet& o) {
    switch (d.family) {
      case Family::bloom:
        return BloomFilter<OracleIndexFn>(d.bloom_params(), OracleIndexFn(o.f));
      case Family::cuckoo:
        return CuckooFilter<OracleCuckooHashes>(d.cuckoo_params(), OracleCuckooHashes(o.g));
      case Family::prf_wrapped_cuckoo:
        return prf_wrap(CuckooFilter<OracleCuckooHashes>(d.cuckoo_params(), OracleCuckooHashes(o.g)), o.f);
    }
    throw std::invalid_argument("unknown filter family");
  }

  AmqDescriptor d_;
  OracleSet oracles_;
  Impl impl_;
};

template <class I>
FilterState filter_state(const BloomFilter<I>& f) {
  return f.state();
}
template <class H>
FilterState filter_state(const CuckooFilter<H>& f) {
  return f.state();
}
template <class H>
FilterState filter_state(const PrfWrappedCuckoo<H>& f) {
  return f.state();
}
inline FilterState filter_state(const FilterInstance& f) { return f.state(); }

inline Bytes serialize_filter(const FilterInstance& f) { return f.serialize(); }

struct NaiSample {
  FilterInstance filter;
  std::vector<DomainElement> elements;
  std::size_t retries = 0;
};

/// Setup followed by n insertions of distinct uniformly sampled elements.
inline NaiSample nai_gen(const AmqDescriptor& d, std::size_t n, const OracleSet& oracles, CoinSource& coins,
                         std::size_t element_len = 32) {
  NaiSample out{FilterInstance(d, oracles), {}, 0};
  std::unordered_set<DomainElement, DomainElementHash> seen;
  out.elements.reserve(n);
  while (out.elements.size() < n) {
    DomainElement x = random_element(coins, element_len);
    if (!seen.insert(x).second) {
      ++out.retries;
      continue;
    }
    out.filter.insert(x, coins);
    out.elements.push_back(std::move(x));
  }
  return out;
}

// Operation traces and the consistency rules.

enum class OpKind { up, qry };

struct TraceRecord {
  OpKind op;
  DomainElement input;
  std::optional<Bytes> coins;
  bool returned;
  FilterState state_before;
  FilterState state_after;
};

struct OperationTrace {
  std::vector<TraceRecord> records;
};

/// Records up/qry calls on a filter with per-call coin seeds.
template <class Filter>
class TraceRecorder {
 public:
  TraceRecorder(Filter& f, std::uint64_t seed) : f_(&f), coins_(seed) {}

  bool up(const DomainElement& x) {
    std::uint64_t s = coins_.next_u64();
    Bytes coin_bytes;
    detail::put_le(coin_bytes, s, 8);
    CoinSource op_coins(s);
    FilterState before = filter_state(*f_);
    bool b = f_->insert(x, op_coins);
    trace_.records.push_back({OpKind::up, x, std::move(coin_bytes), b, std::move(before), filter_state(*f_)});
    return b;
  }

  bool qry(const DomainElement& x) {
    FilterState before = filter_state(*f_);
    bool b = f_->query(x);
    trace_.records.push_back({OpKind::qry, x, std::nullopt, b, std::move(before), filter_state(*f_)});
    return b;
  }

  const OperationTrace& trace() const { return trace_; }
  OperationTrace take() { return std::move(trace_); }

 private:
  Filter* f_;
  CoinSource coins_;
  OperationTrace trace_;
};

enum class Rule { element_permanence, permanent_disabling, reinsertion_invariance, monotonicity, qry_mutation };

inline std::string to_string(Rule r) {
  switch (r) {
    case Rule::element_permanence: return "element_permanence";
    case Rule::permanent_disabling: return "permanent_disabling";
    case Rule::reinsertion_invariance: return "reinsertion_invariance";
    case Rule::monotonicity: return "monotonicity";
    case Rule::qry_mutation: return "qry_mutation";
  }
  return "unknown";
}

struct Violation {
  Rule rule;
  std::size_t record;
};

struct ConsistencyReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::size_t count(Rule r) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [r](const Violation& v) { return v.rule == r; }));
  }
};

class TraceStructureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline bool state_grows(const FilterState& before, const FilterState& after) {
  if (before.index() != after.index()) return false;
  if (auto* b = std::get_if<BloomState>(&before)) return b->subset_of(std::get<BloomState>(after));
  auto tb = std::get<CuckooState>(before).tag_multiset();
  auto ta = std::get<CuckooState>(after).tag_multiset();
  return std::includes(ta.begin(), ta.end(), tb.begin(), tb.end());
}

}  // namespace detail

/// Flags element-permanence, permanent-disabling, reinsertion-invariance and
/// state-monotonicity violations, plus qry calls that changed the state.
inline ConsistencyReport check_consistency(const OperationTrace& trace) {
  ConsistencyReport rep;
  std::unordered_set<DomainElement, DomainElementHash> positive;
  bool disabled = false;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    if (i > 0 && !(trace.records[i - 1].state_after == r.state_before))
      throw TraceStructureError("record " + std::to_string(i) + " does not continue the previous state");
    const bool changed = !(r.state_before == r.state_after);
    if (r.op == OpKind::qry) {
      if (changed) rep.violations.push_back({Rule::qry_mutation, i});
      if (r.returned) {
        positive.insert(r.input);
      } else if (positive.count(r.input)) {
        rep.violations.push_back({Rule::element_permanence, i});
      }
      continue;
    }
    if (disabled && (r.returned || changed)) rep.violations.push_back({Rule::permanent_disabling, i});
    if (!r.returned) disabled = true;
    if (positive.count(r.input) && changed) rep.violations.push_back({Rule::reinsertion_invariance, i});
    if (!detail::state_grows(r.state_before, r.state_after)) rep.violations.push_back({Rule::monotonicity, i});
  }
  return rep;
}

// Finite distributions and statistical distance.

using Distribution = std::map<std::string, double>;

/// Adds zero-mass entries so both distributions share one support.
inline void align_support(Distribution& p, Distribution& q) {
  for (const auto& [z, _] : p) q.try_emplace(z, 0.0);
  for (const auto& [z, _] : q) p.try_emplace(z, 0.0);
}

inline Distribution empirical_distribution(const std::vector<std::string>& samples) {
  Distribution d;
  if (samples.empty()) return d;
  const double w = 1.0 / static_cast<double>(samples.size());
  for (const auto& s : samples) d[s] += w;
  return d;
}

/// Half the l1 distance; supports must coincide (see align_support).
inline double statistical_distance(const Distribution& p, const Distribution& q) {
  auto check = [](const Distribution& d) {
    double sum = 0;
    for (const auto& [z, v] : d) {
      if (!(v >= 0.0)) throw std::invalid_argument("distribution has a negative or NaN mass");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("distribution does not sum to 1");
  };
  check(p);
  check(q);
  if (p.size() != q.size()) throw std::domain_error("distributions have different supports");
  double total = 0;
  auto it = q.begin();
  for (const auto& [z, v] : p) {
    if (it->first != z) throw std::domain_error("distributions have different supports");
    total += std::abs(v - it->second);
    ++it;
  }
  return std::clamp(total / 2.0, 0.0, 1.0);
}

}  // namespace amqsec
