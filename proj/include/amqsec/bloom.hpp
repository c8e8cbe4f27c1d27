#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "amqsec/coins.hpp"
#include "amqsec/domain.hpp"
#include "amqsec/prf.hpp"

namespace amqsec {

struct BloomParams {
  std::uint64_t m = 0;
  unsigned k = 0;

  void validate() const {
    if (m < 1) throw std::invalid_argument("Bloom m must be >= 1");
    if (k < 1 || k > 64) throw std::invalid_argument("Bloom k must lie in [1, 64]");
  }
  friend bool operator==(const BloomParams&, const BloomParams&) = default;
};

/// Bit vector of length m; index i in [m] maps to bit i-1.
class BloomState {
 public:
  BloomState() = default;
  explicit BloomState(std::uint64_t m) : m_(m), words_((m + 63) / 64, 0) {}

  std::uint64_t size() const { return m_; }
  bool test(std::uint64_t bit) const { return (words_[bit / 64] >> (bit % 64)) & 1u; }
  void set(std::uint64_t bit) { words_[bit / 64] |= std::uint64_t{1} << (bit % 64); }

  std::uint64_t popcount() const {
    std::uint64_t c = 0;
    for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
  }

  /// True iff every 1-bit of this state is also set in other.
  bool subset_of(const BloomState& other) const {
    if (m_ != other.m_) return false;
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }

  /// ceil(m/8) bytes, LSB-first within each byte.
  Bytes to_bytes() const {
    Bytes out((m_ + 7) / 8, 0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
    return out;
  }

  static BloomState from_bytes(std::uint64_t m, std::span<const std::uint8_t> bytes) {
    if (bytes.size() != (m + 7) / 8) throw std::invalid_argument("Bloom payload length mismatch");
    BloomState s(m);
    for (std::size_t i = 0; i < bytes.size(); ++i) s.words_[i / 8] |= std::uint64_t{bytes[i]} << (8 * (i % 8));
    if (m % 64 != 0 && !s.words_.empty() && (s.words_.back() >> (m % 64)) != 0)
      throw std::invalid_argument("Bloom payload has bits beyond m");
    return s;
  }

  friend bool operator==(const BloomState&, const BloomState&) = default;

 private:
  std::uint64_t m_ = 0;
  std::vector<std::uint64_t> words_;
};

inline void check_index_vector(std::uint64_t m, unsigned k, const IndexVector& v) {
  if (v.size() != k) throw std::domain_error("index vector length differs from k");
  for (auto i : v)
    if (i < 1 || i > m) throw std::domain_error("index outside [m]");
}

/// The m-bit bitmap with bit i-1 set for every index i in v.
inline BloomState bitmap(std::uint64_t m, unsigned k, const IndexVector& v) {
  check_index_vector(m, k, v);
  BloomState b(m);
  for (auto i : v) b.set(i - 1);
  return b;
}

inline BloomState bloom_setup(const BloomParams& pp) {
  pp.validate();
  return BloomState(pp.m);
}

// Identity-oracle core: the filter run on a precomputed range point.

inline bool bloom_up_id(const IndexVector& v, BloomState& sigma) {
  for (auto i : v) sigma.set(i - 1);
  return true;
}

inline bool bloom_qry_id(const IndexVector& v, const BloomState& sigma) {
  for (auto i : v)
    if (!sigma.test(i - 1)) return false;
  return true;
}

inline std::pair<bool, BloomState> bloom_up(const DomainElement& x, BloomState sigma, FunctionOracle& f,
                                            const BloomParams& pp) {
  IndexVector v = derive_index_vector(f, x, pp.m, pp.k);
  bool b = bloom_up_id(v, sigma);
  return {b, std::move(sigma)};
}

inline bool bloom_qry(const DomainElement& x, const BloomState& sigma, FunctionOracle& f, const BloomParams& pp) {
  return bloom_qry_id(derive_index_vector(f, x, pp.m, pp.k), sigma);
}

/// Index function backed by a FunctionOracle.
class OracleIndexFn {
 public:
  explicit OracleIndexFn(OracleHandle f) : f_(std::move(f)) {}
  IndexVector operator()(const DomainElement& x, const BloomParams& pp) const {
    return derive_index_vector(*f_, x, pp.m, pp.k);
  }
  const OracleHandle& oracle() const { return f_; }

 private:
  OracleHandle f_;
};

/// Bloom filter over an index function policy IndexFn: (x, pp) -> IndexVector.
template <class IndexFn = OracleIndexFn>
class BloomFilter {
 public:
  using State = BloomState;
  using Params = BloomParams;

  BloomFilter(BloomParams pp, IndexFn fn) : pp_(pp), fn_(std::move(fn)), state_(bloom_setup(pp)) {}

  const BloomParams& params() const { return pp_; }
  const BloomState& state() const { return state_; }
  void set_state(BloomState s) {
    if (s.size() != pp_.m) throw std::invalid_argument("state length differs from m");
    state_ = std::move(s);
  }
  const IndexFn& index_fn() const { return fn_; }

  IndexVector range_of(const DomainElement& x) const { return fn_(x, pp_); }

  template <class Coins>
  bool insert(const DomainElement& x, Coins&) {
    return bloom_up_id(range_of(x), state_);
  }
  bool insert(const DomainElement& x) { return bloom_up_id(range_of(x), state_); }

  bool query(const DomainElement& x) const { return bloom_qry_id(range_of(x), state_); }

  bool insert_range(const IndexVector& v) {
    check_index_vector(pp_.m, pp_.k, v);
    return bloom_up_id(v, state_);
  }
  bool query_range(const IndexVector& v) const {
    check_index_vector(pp_.m, pp_.k, v);
    return bloom_qry_id(v, state_);
  }

  /// qry^Id on a uniformly sampled range point of [m]^k.
  bool query_random_range_point(CoinSource& coins) const {
    IndexVector v(pp_.k);
    for (auto& i : v) i = coins.below(pp_.m) + 1;
    return bloom_qry_id(v, state_);
  }

  bool disabled() const { return false; }
  std::uint64_t occupied() const { return state_.popcount(); }

 private:
  BloomParams pp_;
  IndexFn fn_;
  BloomState state_;
};

}  // namespace amqsec
