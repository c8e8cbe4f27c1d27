#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "amqsec/coins.hpp"

namespace amqsec {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kMaxElementBytes = std::size_t{1} << 16;

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

/// Parses an even-length hex string; throws std::invalid_argument otherwise.
inline Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

/// An element of the filter domain: a byte string of at most 2^16 bytes.
class DomainElement {
 public:
  DomainElement() = default;

  explicit DomainElement(Bytes bytes) : bytes_(std::move(bytes)) {
    if (bytes_.size() > kMaxElementBytes) throw std::length_error("domain element exceeds 2^16 bytes");
  }

  static DomainElement from_string(std::string_view s) {
    return DomainElement(Bytes(s.begin(), s.end()));
  }

  static DomainElement from_u64(std::uint64_t v) {
    Bytes b(8);
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return DomainElement(std::move(b));
  }

  std::span<const std::uint8_t> bytes() const { return bytes_; }
  const Bytes& raw() const { return bytes_; }
  std::size_t size() const { return bytes_.size(); }
  std::string hex() const { return to_hex(bytes_); }

  friend bool operator==(const DomainElement&, const DomainElement&) = default;
  friend auto operator<=>(const DomainElement&, const DomainElement&) = default;

 private:
  Bytes bytes_;
};

struct DomainElementHash {
  std::size_t operator()(const DomainElement& x) const noexcept {
    std::string_view view(reinterpret_cast<const char*>(x.raw().data()), x.size());
    return std::hash<std::string_view>{}(view);
  }
};

/// Fresh uniformly random element of the given byte length.
inline DomainElement random_element(CoinSource& coins, std::size_t len = 32) {
  Bytes b(len);
  coins.fill(b);
  return DomainElement(std::move(b));
}

}  // namespace amqsec
