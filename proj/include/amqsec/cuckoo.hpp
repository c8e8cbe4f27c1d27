#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "amqsec/coins.hpp"
#include "amqsec/domain.hpp"
#include "amqsec/prf.hpp"

namespace amqsec {

inline constexpr unsigned kDefaultCuckooNum = 500;
inline constexpr std::uint8_t kTagDomainTag = 1;
inline constexpr std::uint8_t kBucketDomainTag = 2;
inline constexpr std::uint8_t kTagEncodingPrefix = 0x7F;

struct CuckooParams {
  std::uint32_t s = 0;
  unsigned lambda_i = 0;
  unsigned lambda_t = 0;
  unsigned num = kDefaultCuckooNum;

  void validate() const {
    if (s < 1 || s > 0xFFFF) throw std::invalid_argument("Cuckoo s must lie in [1, 65535]");
    if (lambda_i < 1 || lambda_i > 32) throw std::invalid_argument("Cuckoo lambda_I must lie in [1, 32]");
    if (lambda_t < 1 || lambda_t > 32) throw std::invalid_argument("Cuckoo lambda_T must lie in [1, 32]");
    if (num < 1) throw std::invalid_argument("Cuckoo num must be >= 1");
  }
  std::uint64_t buckets() const { return std::uint64_t{1} << lambda_i; }
  std::uint64_t slots() const { return buckets() * s; }
  friend bool operator==(const CuckooParams&, const CuckooParams&) = default;
};

/// Public injective encoding of a tag as a domain element: a prefix byte
/// followed by ceil(lambda_T/8) big-endian bytes.
inline DomainElement encode_tag(std::uint32_t tag, unsigned lambda_t) {
  std::size_t len = (lambda_t + 7) / 8;
  Bytes b(1 + len);
  b[0] = kTagEncodingPrefix;
  for (std::size_t i = 0; i < len; ++i) b[1 + i] = static_cast<std::uint8_t>(tag >> (8 * (len - 1 - i)));
  return DomainElement(std::move(b));
}

/// Buckets of s slots with occupied slots forming a prefix, plus the stash.
class CuckooState {
 public:
  CuckooState() = default;
  CuckooState(std::uint64_t buckets, std::uint32_t s) : s_(s), slots_(buckets * s, 0), load_(buckets, 0) {}

  std::uint64_t bucket_count() const { return load_.size(); }
  std::uint32_t slots_per_bucket() const { return s_; }
  std::uint32_t load(std::uint64_t i) const { return load_[i]; }
  bool full(std::uint64_t i) const { return load_[i] >= s_; }

  std::span<const std::uint32_t> bucket(std::uint64_t i) const {
    return {slots_.data() + i * s_, static_cast<std::size_t>(load_[i])};
  }
  bool contains(std::uint64_t i, std::uint32_t tag) const {
    auto b = bucket(i);
    return std::find(b.begin(), b.end(), tag) != b.end();
  }
  void append(std::uint64_t i, std::uint32_t tag) {
    if (full(i)) throw std::logic_error("append to a full bucket");
    slots_[i * s_ + load_[i]++] = tag;
  }
  /// Replaces the tag at 0-based slot j of a full bucket; returns the old tag.
  std::uint32_t swap_slot(std::uint64_t i, std::uint32_t j, std::uint32_t tag) {
    std::swap(slots_[i * s_ + j], tag);
    return tag;
  }

  const std::optional<std::uint32_t>& stash() const { return stash_; }
  void set_stash(std::uint32_t tag) { stash_ = tag; }
  bool disabled() const { return stash_.has_value(); }

  std::uint64_t occupied() const {
    std::uint64_t c = 0;
    for (auto l : load_) c += l;
    return c;
  }

  /// Sorted multiset of stored tags, stash included.
  std::vector<std::uint32_t> tag_multiset() const {
    std::vector<std::uint32_t> out;
    for (std::uint64_t i = 0; i < bucket_count(); ++i) {
      auto b = bucket(i);
      out.insert(out.end(), b.begin(), b.end());
    }
    if (stash_) out.push_back(*stash_);
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const CuckooState& a, const CuckooState& b) {
    if (a.s_ != b.s_ || a.load_ != b.load_ || a.stash_ != b.stash_) return false;
    for (std::uint64_t i = 0; i < a.bucket_count(); ++i)
      if (!std::equal(a.bucket(i).begin(), a.bucket(i).end(), b.bucket(i).begin())) return false;
    return true;
  }

 private:
  std::uint32_t s_ = 0;
  std::vector<std::uint32_t> slots_;
  std::vector<std::uint32_t> load_;
  std::optional<std::uint32_t> stash_;
};

inline CuckooState cuckoo_setup(const CuckooParams& pp) {
  pp.validate();
  return CuckooState(pp.buckets(), pp.s);
}

/// Insertion core on a precomputed (tag, i1); alt(tag) returns H_I(tag).
template <class AltFn, class Coins>
bool cuckoo_up_core(std::uint32_t tag, std::uint64_t i1, CuckooState& sigma, const CuckooParams& pp, AltFn&& alt,
                    Coins& coins) {
  if (sigma.disabled()) return false;
  const std::uint64_t i2 = i1 ^ alt(tag);
  if (sigma.contains(i1, tag) || sigma.contains(i2, tag)) return true;
  for (std::uint64_t i : {i1, i2}) {
    if (!sigma.full(i)) {
      sigma.append(i, tag);
      return true;
    }
  }
  std::uint64_t i = coins.bit() ? i2 : i1;
  for (unsigned g = 0; g < pp.num; ++g) {
    auto slot = static_cast<std::uint32_t>(coins.below(pp.s));
    tag = sigma.swap_slot(i, slot, tag);
    i = i ^ alt(tag);
    if (!sigma.full(i)) {
      sigma.append(i, tag);
      return true;
    }
  }
  sigma.set_stash(tag);
  return true;
}

template <class AltFn>
bool cuckoo_qry_core(std::uint32_t tag, std::uint64_t i1, const CuckooState& sigma, AltFn&& alt) {
  const std::uint64_t i2 = i1 ^ alt(tag);
  return sigma.contains(i1, tag) || sigma.contains(i2, tag) || sigma.stash() == tag;
}

/// H_T and H_I derived from one oracle by domain separation.
class OracleCuckooHashes {
 public:
  explicit OracleCuckooHashes(OracleHandle g) : g_(std::move(g)) {}
  std::uint32_t tag(const DomainElement& x, const CuckooParams& pp) const {
    return static_cast<std::uint32_t>(derive_bits_u64(*g_, x, pp.lambda_t, kTagDomainTag));
  }
  std::uint64_t index(const DomainElement& x, const CuckooParams& pp) const {
    return derive_bits_u64(*g_, x, pp.lambda_i, kBucketDomainTag);
  }
  const OracleHandle& oracle() const { return g_; }

 private:
  OracleHandle g_;
};

template <class Hashes, class Coins>
std::pair<bool, CuckooState> cuckoo_up(const DomainElement& x, CuckooState sigma, const Hashes& h,
                                       const CuckooParams& pp, Coins& coins) {
  auto alt = [&](std::uint32_t t) { return h.index(encode_tag(t, pp.lambda_t), pp); };
  bool b = cuckoo_up_core(h.tag(x, pp), h.index(x, pp), sigma, pp, alt, coins);
  return {b, std::move(sigma)};
}

template <class Hashes>
bool cuckoo_qry(const DomainElement& x, const CuckooState& sigma, const Hashes& h, const CuckooParams& pp) {
  auto alt = [&](std::uint32_t t) { return h.index(encode_tag(t, pp.lambda_t), pp); };
  return cuckoo_qry_core(h.tag(x, pp), h.index(x, pp), sigma, alt);
}

/// Insertion-only Cuckoo filter over a hash policy providing tag(x, pp) and index(x, pp).
template <class Hashes = OracleCuckooHashes>
class CuckooFilter {
 public:
  using State = CuckooState;
  using Params = CuckooParams;

  CuckooFilter(CuckooParams pp, Hashes h) : pp_(pp), h_(std::move(h)), state_(cuckoo_setup(pp)) {
    if (pp_.lambda_t <= kAltTableMaxBits) {
      alt_table_.resize(std::size_t{1} << pp_.lambda_t);
      for (std::uint32_t t = 0; t < alt_table_.size(); ++t) alt_table_[t] = h_.index(encode_tag(t, pp_.lambda_t), pp_);
    }
  }

  /// Tags of at most this many bits get H_I(tag) tabulated at construction.
  static constexpr unsigned kAltTableMaxBits = 10;

  const CuckooParams& params() const { return pp_; }
  const CuckooState& state() const { return state_; }
  void set_state(CuckooState s) { state_ = std::move(s); }
  const Hashes& hashes() const { return h_; }

  std::uint32_t tag_of(const DomainElement& x) const { return h_.tag(x, pp_); }
  std::uint64_t index_of(const DomainElement& x) const { return h_.index(x, pp_); }
  std::uint64_t alt_of(std::uint32_t tag) const {
    if (!alt_table_.empty()) return alt_table_[tag];
    return h_.index(encode_tag(tag, pp_.lambda_t), pp_);
  }

  template <class Coins>
  bool insert(const DomainElement& x, Coins& coins) {
    auto alt = [this](std::uint32_t t) { return alt_of(t); };
    return cuckoo_up_core(tag_of(x), index_of(x), state_, pp_, alt, coins);
  }

  bool query(const DomainElement& x) const {
    auto alt = [this](std::uint32_t t) { return alt_of(t); };
    return cuckoo_qry_core(tag_of(x), index_of(x), state_, alt);
  }

  /// Query on a uniformly random (tag, first bucket) pair.
  bool query_random_range_point(CoinSource& coins) const {
    auto tag = static_cast<std::uint32_t>(coins.below(std::uint64_t{1} << pp_.lambda_t));
    auto i1 = coins.below(pp_.buckets());
    auto alt = [this](std::uint32_t t) { return alt_of(t); };
    return cuckoo_qry_core(tag, i1, state_, alt);
  }

  bool disabled() const { return state_.disabled(); }
  std::uint64_t occupied() const { return state_.occupied(); }

 private:
  CuckooParams pp_;
  Hashes h_;
  CuckooState state_;
  std::vector<std::uint64_t> alt_table_;
};

/// Cuckoo filter whose inputs are first mapped through F and re-encoded as
/// domain elements; F is the only oracle applied to x.
template <class Hashes = OracleCuckooHashes>
class PrfWrappedCuckoo {
 public:
  using State = CuckooState;
  using Params = CuckooParams;

  PrfWrappedCuckoo(CuckooFilter<Hashes> inner, OracleHandle f) : inner_(std::move(inner)), f_(std::move(f)) {}

  const CuckooParams& params() const { return inner_.params(); }
  const CuckooState& state() const { return inner_.state(); }
  void set_state(CuckooState s) { inner_.set_state(std::move(s)); }
  const CuckooFilter<Hashes>& inner() const { return inner_; }
  const OracleHandle& wrapper_oracle() const { return f_; }

  DomainElement range_of(const DomainElement& x) const { return DomainElement(f_->evaluate(x)); }

  template <class Coins>
  bool insert(const DomainElement& x, Coins& coins) {
    return inner_.insert(range_of(x), coins);
  }
  bool query(const DomainElement& x) const { return inner_.query(range_of(x)); }

  template <class Coins>
  bool insert_range(const DomainElement& y, Coins& coins) {
    return inner_.insert(y, coins);
  }
  bool query_range(const DomainElement& y) const { return inner_.query(y); }

  bool query_random_range_point(CoinSource& coins) const {
    return inner_.query(random_element(coins, f_->output_len()));
  }

  bool disabled() const { return inner_.disabled(); }
  std::uint64_t occupied() const { return inner_.occupied(); }

 private:
  CuckooFilter<Hashes> inner_;
  OracleHandle f_;
};

template <class Hashes>
PrfWrappedCuckoo<Hashes> prf_wrap(CuckooFilter<Hashes> inner, OracleHandle f) {
  return PrfWrappedCuckoo<Hashes>(std::move(inner), std::move(f));
}

}  // namespace amqsec
