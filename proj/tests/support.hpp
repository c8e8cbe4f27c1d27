#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>
#include <vector>

#include "amqsec/amqsec.hpp"

namespace amqsec::test {

/// Upper critical value of the chi-square distribution at significance alpha.
inline double chi_square_critical(double df, double alpha) {
  boost::math::chi_squared dist(df);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

inline double chi_square_statistic(const std::vector<std::uint64_t>& counts, double expected) {
  double chi = 0;
  for (auto c : counts) chi += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  return chi;
}

/// Coins replayed from fixed scripts.
class ScriptedCoins {
 public:
  ScriptedCoins(std::deque<bool> bits, std::deque<std::uint64_t> values) : bits_(bits), values_(values) {}
  bool bit() {
    if (bits_.empty()) throw std::logic_error("bit script exhausted");
    bool b = bits_.front();
    bits_.pop_front();
    return b;
  }
  std::uint64_t below(std::uint64_t n) {
    if (values_.empty()) throw std::logic_error("value script exhausted");
    auto v = values_.front();
    values_.pop_front();
    if (v >= n) throw std::logic_error("scripted value out of range");
    return v;
  }

 private:
  std::deque<bool> bits_;
  std::deque<std::uint64_t> values_;
};

/// Bloom index function defined by a table.
struct StubIndexFn {
  std::map<DomainElement, IndexVector> table;
  IndexVector operator()(const DomainElement& x, const BloomParams&) const { return table.at(x); }
};

/// Cuckoo hashes defined by tables; unknown encoded tags map to bucket 0.
struct StubCuckooHashes {
  std::map<DomainElement, std::uint32_t> tags;
  std::map<DomainElement, std::uint64_t> buckets;
  std::uint32_t tag(const DomainElement& x, const CuckooParams&) const { return tags.at(x); }
  std::uint64_t index_of(const DomainElement& x, const CuckooParams&) const {
    auto it = buckets.find(x);
    return it == buckets.end() ? 0 : it->second;
  }
  std::uint64_t index(const DomainElement& x, const CuckooParams& pp) const { return index_of(x, pp); }
};

inline DomainElement el(const char* s) { return DomainElement::from_string(s); }

}  // namespace amqsec::test
