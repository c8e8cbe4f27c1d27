#pragma once

#include <sodium.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "amqsec/coins.hpp"
#include "amqsec/domain.hpp"

namespace amqsec {

enum class OracleMode { keyed, random };

namespace detail {

inline void ensure_sodium() {
  static const int status = sodium_init();
  if (status < 0) throw std::runtime_error("libsodium initialisation failed");
}

inline void append_le32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace detail

/// A keyed pseudorandom function or a lazily sampled random function.
///
/// Keyed mode evaluates keyed BLAKE2b; outputs longer than 64 bytes are
/// produced block-wise over a little-endian block counter. Random mode
/// memoizes uniformly sampled outputs drawn from a seeded generator.
class FunctionOracle {
 public:
  static FunctionOracle keyed(Bytes key, std::size_t output_len = 32) {
    if (key.size() != 16 && key.size() != 32) throw std::invalid_argument("PRF key must be 128 or 256 bits");
    if (output_len == 0) throw std::invalid_argument("output_len must be positive");
    detail::ensure_sodium();
    FunctionOracle f(OracleMode::keyed, output_len);
    f.key_ = std::move(key);
    return f;
  }

  /// Accepts 32 or 64 hex characters.
  static FunctionOracle keyed_from_hex(std::string_view hex, std::size_t output_len = 32) {
    if (hex.size() != 32 && hex.size() != 64) throw std::invalid_argument("key must be 32 or 64 hex characters");
    return keyed(from_hex(hex), output_len);
  }

  /// Fresh 256-bit key drawn from the coin source.
  static FunctionOracle keyed_from_coins(CoinSource& coins, std::size_t output_len = 32) {
    Bytes key(32);
    coins.fill(key);
    return keyed(std::move(key), output_len);
  }

  static FunctionOracle random(std::uint64_t seed, std::size_t output_len = 32) {
    if (output_len == 0) throw std::invalid_argument("output_len must be positive");
    FunctionOracle f(OracleMode::random, output_len);
    f.seed_ = seed;
    f.engine_.seed(seed);
    return f;
  }

  FunctionOracle(const FunctionOracle& o)
      : mode_(o.mode_), output_len_(o.output_len_), key_(o.key_), seed_(o.seed_), engine_(o.engine_),
        memo_(o.memo_), calls_(o.calls_.load(std::memory_order_relaxed)) {}
  FunctionOracle& operator=(const FunctionOracle& o) {
    if (this != &o) {
      mode_ = o.mode_;
      output_len_ = o.output_len_;
      key_ = o.key_;
      seed_ = o.seed_;
      engine_ = o.engine_;
      memo_ = o.memo_;
      calls_.store(o.calls_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    }
    return *this;
  }
  FunctionOracle(FunctionOracle&& o) noexcept : FunctionOracle(static_cast<const FunctionOracle&>(o)) {}
  FunctionOracle& operator=(FunctionOracle&& o) noexcept { return *this = static_cast<const FunctionOracle&>(o); }

  OracleMode mode() const { return mode_; }
  std::size_t output_len() const { return output_len_; }
  std::uint64_t call_count() const { return calls_.load(std::memory_order_relaxed); }

  Bytes evaluate(std::span<const std::uint8_t> x) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    if (mode_ == OracleMode::keyed) return keyed_eval(x);
    std::string k(reinterpret_cast<const char*>(x.data()), x.size());
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    Bytes out(output_len_);
    for (std::size_t i = 0; i < out.size(); i += 8) {
      std::uint64_t w = engine_();
      for (std::size_t b = 0; b < 8 && i + b < out.size(); ++b) out[i + b] = static_cast<std::uint8_t>(w >> (8 * b));
    }
    memo_.emplace(std::move(k), out);
    return out;
  }

  Bytes evaluate(const DomainElement& x) { return evaluate(x.bytes()); }

 private:
  FunctionOracle(OracleMode mode, std::size_t output_len) : mode_(mode), output_len_(output_len) {}

  Bytes keyed_eval(std::span<const std::uint8_t> x) const {
    Bytes out(output_len_);
    if (output_len_ <= crypto_generichash_BYTES_MAX) {
      std::size_t len = std::max<std::size_t>(output_len_, crypto_generichash_BYTES_MIN);
      std::uint8_t buf[crypto_generichash_BYTES_MAX];
      crypto_generichash(buf, len, x.data(), x.size(), key_.data(), key_.size());
      std::copy_n(buf, output_len_, out.begin());
      return out;
    }
    Bytes input;
    input.reserve(x.size() + 4);
    for (std::uint32_t block = 0; std::size_t{block} * crypto_generichash_BYTES_MAX < output_len_; ++block) {
      input.clear();
      detail::append_le32(input, block);
      input.insert(input.end(), x.begin(), x.end());
      std::uint8_t buf[crypto_generichash_BYTES_MAX];
      crypto_generichash(buf, sizeof buf, input.data(), input.size(), key_.data(), key_.size());
      std::size_t off = std::size_t{block} * crypto_generichash_BYTES_MAX;
      std::size_t n = std::min<std::size_t>(crypto_generichash_BYTES_MAX, output_len_ - off);
      std::copy_n(buf, n, out.begin() + static_cast<std::ptrdiff_t>(off));
    }
    return out;
  }

  OracleMode mode_;
  std::size_t output_len_;
  Bytes key_;
  std::uint64_t seed_ = 0;
  std::mt19937_64 engine_;
  std::unordered_map<std::string, Bytes> memo_;
  std::atomic<std::uint64_t> calls_{0};
};

using OracleHandle = std::shared_ptr<FunctionOracle>;

/// Bit reader over the blocks evaluate(tag || le32(j) || x), j = 0, 1, ...
/// Bits are consumed most-significant first within each byte.
class OracleStream {
 public:
  OracleStream(FunctionOracle& oracle, std::uint8_t tag, std::span<const std::uint8_t> x)
      : oracle_(&oracle), tag_(tag), x_(x) {}

  std::uint64_t read_bits(unsigned nbits) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < nbits; ++i) {
      if (bitpos_ == buffer_.size() * 8) refill();
      std::uint8_t byte = buffer_[bitpos_ / 8];
      v = (v << 1) | ((byte >> (7 - bitpos_ % 8)) & 1u);
      ++bitpos_;
    }
    return v;
  }

  std::size_t blocks_used() const { return block_; }

 private:
  void refill() {
    Bytes input;
    input.reserve(5 + x_.size());
    input.push_back(tag_);
    detail::append_le32(input, block_++);
    input.insert(input.end(), x_.begin(), x_.end());
    buffer_ = oracle_->evaluate(input);
    bitpos_ = 0;
  }

  FunctionOracle* oracle_;
  std::uint8_t tag_;
  std::span<const std::uint8_t> x_;
  Bytes buffer_;
  std::size_t bitpos_ = 0;
  std::uint32_t block_ = 0;
};

inline constexpr std::uint8_t kIndexDomainTag = 0;

/// k indices in [m] (1-based).
using IndexVector = std::vector<std::uint64_t>;

inline unsigned ceil_log2(std::uint64_t m) { return m <= 1 ? 0u : static_cast<unsigned>(std::bit_width(m - 1)); }

/// Unbiased index derivation: rejection sampling on ceil(log2 m)-bit chunks.
inline IndexVector derive_index_vector(FunctionOracle& oracle, const DomainElement& x, std::uint64_t m, unsigned k) {
  if (m < 1 || k < 1) throw std::invalid_argument("derive_index_vector requires m >= 1 and k >= 1");
  IndexVector v(k, 1);
  if (m == 1) return v;
  const unsigned nbits = ceil_log2(m);
  OracleStream stream(oracle, kIndexDomainTag, x.bytes());
  for (unsigned i = 0; i < k; ++i) {
    std::uint64_t c;
    do {
      c = stream.read_bits(nbits);
    } while (c >= m);
    v[i] = c + 1;
  }
  return v;
}

/// nbits of the oracle stream under domain_tag, packed big-endian into
/// ceil(nbits/8) bytes with the unused leading bits zero.
inline Bytes derive_bits(FunctionOracle& oracle, const DomainElement& x, unsigned nbits, std::uint8_t domain_tag) {
  if (nbits < 1 || nbits > 256) throw std::invalid_argument("derive_bits requires 1 <= nbits <= 256");
  OracleStream stream(oracle, domain_tag, x.bytes());
  Bytes out((nbits + 7) / 8, 0);
  unsigned lead = static_cast<unsigned>(out.size() * 8 - nbits);
  for (unsigned i = 0; i < nbits; ++i) {
    unsigned pos = lead + i;
    if (stream.read_bits(1)) out[pos / 8] |= static_cast<std::uint8_t>(0x80u >> (pos % 8));
  }
  return out;
}

inline std::uint64_t derive_bits_u64(FunctionOracle& oracle, const DomainElement& x, unsigned nbits,
                                     std::uint8_t domain_tag) {
  if (nbits < 1 || nbits > 64) throw std::invalid_argument("derive_bits_u64 requires 1 <= nbits <= 64");
  OracleStream stream(oracle, domain_tag, x.bytes());
  return stream.read_bits(nbits);
}

}  // namespace amqsec
