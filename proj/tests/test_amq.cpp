#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "support.hpp"

using namespace amqsec;
using amqsec::test::chi_square_critical;
using amqsec::test::chi_square_statistic;
using amqsec::test::el;

namespace {

TEST(Family, ParseRoundTrip) {
  for (auto f : {Family::bloom, Family::cuckoo, Family::prf_wrapped_cuckoo}) EXPECT_EQ(parse_family(to_string(f)), f);
  EXPECT_THROW(parse_family("quotient"), std::invalid_argument);
}

TEST(NaiGen, ZeroInsertionsGivesSetupState) {
  CoinSource coins(1);
  auto b = nai_gen(AmqDescriptor::bloom({64, 3}), 0, OracleSet::random(1), coins);
  EXPECT_EQ(std::get<BloomState>(b.filter.state()), bloom_setup({64, 3}));
  EXPECT_TRUE(b.elements.empty());
  auto c = nai_gen(AmqDescriptor::cuckoo({2, 3, 8, 500}), 0, OracleSet::random(1), coins);
  EXPECT_EQ(std::get<CuckooState>(c.filter.state()), cuckoo_setup({2, 3, 8, 500}));
}

TEST(NaiGen, ElementsAreDistinct) {
  CoinSource coins(2);
  auto s = nai_gen(AmqDescriptor::bloom({1024, 3}), 2000, OracleSet::random(3), coins, 2);
  std::set<DomainElement> uniq(s.elements.begin(), s.elements.end());
  EXPECT_EQ(uniq.size(), 2000u);
  EXPECT_GT(s.retries, 0u);
}

TEST(NaiGen, SingleBitPositionUniformForM8K1) {
  const int runs = 100000;
  std::vector<std::uint64_t> counts(8, 0);
  auto d = AmqDescriptor::bloom({8, 1});
  for (int r = 0; r < runs; ++r) {
    CoinSource coins(derive_seed(77, r));
    auto s = nai_gen(d, 1, OracleSet::random(derive_seed(78, r)), coins);
    const auto st = std::get<BloomState>(s.filter.state());
    ASSERT_EQ(st.popcount(), 1u);
    for (std::uint64_t i = 0; i < 8; ++i)
      if (st.test(i)) ++counts[i];
  }
  EXPECT_LT(chi_square_statistic(counts, runs / 8.0), chi_square_critical(7, 0.001));
}

TEST(NaiGen, CuckooTwoElementsInDistinctBucketsBothStored) {
  auto d = AmqDescriptor::cuckoo({1, 2, 4, 500});
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    CoinSource coins(seed);
    auto s = nai_gen(d, 2, OracleSet::random(seed + 1000), coins);
    const auto& f = std::get<CuckooFilter<>>(s.filter.impl());
    auto t0 = f.tag_of(s.elements[0]), t1 = f.tag_of(s.elements[1]);
    if (t0 == t1 || f.index_of(s.elements[0]) == f.index_of(s.elements[1])) continue;
    ++checked;
    auto tags = f.state().tag_multiset();
    EXPECT_EQ(tags, (std::vector<std::uint32_t>{std::min(t0, t1), std::max(t0, t1)}));
    EXPECT_FALSE(f.state().stash().has_value());
  }
  EXPECT_GT(checked, 10);
}

// Random traces: zero violations for every family.
OperationTrace random_trace(const AmqDescriptor& d, std::uint64_t seed, int ops) {
  FilterInstance f(d, OracleSet::random(seed));
  TraceRecorder<FilterInstance> rec(f, derive_seed(seed, 9));
  CoinSource coins(derive_seed(seed, 10));
  std::vector<DomainElement> pool;
  for (int i = 0; i < 24; ++i) pool.push_back(random_element(coins, 4));
  for (int i = 0; i < ops; ++i) {
    const auto& x = pool[coins.below(pool.size())];
    if (coins.bit())
      rec.up(x);
    else
      rec.qry(x);
  }
  return rec.take();
}

TEST(Consistency, RandomTracesHaveNoViolations) {
  for (auto d : {AmqDescriptor::bloom({64, 3}), AmqDescriptor::cuckoo({1, 3, 4, 6}),
                 AmqDescriptor::prf_wrapped_cuckoo({1, 3, 4, 6})}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto report = check_consistency(random_trace(d, seed, 100));
      ASSERT_TRUE(report.ok()) << to_string(d.family) << " seed " << seed << ": "
                               << to_string(report.violations.front().rule);
    }
  }
}

TEST(Consistency, ReinsertionIsByteIdentical) {
  for (auto d : {AmqDescriptor::bloom({128, 4}), AmqDescriptor::cuckoo({2, 4, 6, 20}),
                 AmqDescriptor::prf_wrapped_cuckoo({2, 4, 6, 20})}) {
    FilterInstance f(d, OracleSet::keyed(7));
    CoinSource coins(8);
    for (int i = 0; i < 60; ++i) {
      auto x = random_element(coins, 3);
      if (!f.query(x)) {
        f.insert(x, coins);
        continue;
      }
      auto before = f.serialize();
      for (std::uint64_t c = 0; c < 5; ++c) {
        CoinSource other(c);
        f.insert(x, other);
        ASSERT_EQ(f.serialize(), before);
      }
    }
  }
}

BloomState bits(std::initializer_list<std::uint64_t> idx) {
  BloomState s(8);
  for (auto i : idx) s.set(i);
  return s;
}

TraceRecord rec(OpKind op, const char* x, bool b, FilterState before, FilterState after) {
  return {op, el(x), std::nullopt, b, std::move(before), std::move(after)};
}

TEST(Consistency, PlantedClearedBitIsMonotonicityViolation) {
  OperationTrace t;
  t.records.push_back(rec(OpKind::up, "a", true, bits({}), bits({1, 2})));
  t.records.push_back(rec(OpKind::up, "b", true, bits({1, 2}), bits({2, 3})));
  auto r = check_consistency(t);
  EXPECT_EQ(r.count(Rule::monotonicity), 1u);
  EXPECT_EQ(r.violations.front().record, 1u);
}

TEST(Consistency, PlantedEnableAfterDisableIsFlagged) {
  OperationTrace t;
  t.records.push_back(rec(OpKind::up, "a", false, bits({}), bits({})));
  t.records.push_back(rec(OpKind::up, "b", true, bits({}), bits({4})));
  EXPECT_EQ(check_consistency(t).count(Rule::permanent_disabling), 1u);
}

TEST(Consistency, PlantedLostPositiveIsPermanenceViolation) {
  OperationTrace t;
  t.records.push_back(rec(OpKind::qry, "a", true, bits({1}), bits({1})));
  t.records.push_back(rec(OpKind::up, "b", true, bits({1}), bits({1, 5})));
  t.records.push_back(rec(OpKind::qry, "a", false, bits({1, 5}), bits({1, 5})));
  EXPECT_EQ(check_consistency(t).count(Rule::element_permanence), 1u);
}

TEST(Consistency, PlantedReinsertionChangeIsFlagged) {
  OperationTrace t;
  t.records.push_back(rec(OpKind::qry, "a", true, bits({1}), bits({1})));
  t.records.push_back(rec(OpKind::up, "a", true, bits({1}), bits({1, 6})));
  EXPECT_EQ(check_consistency(t).count(Rule::reinsertion_invariance), 1u);
}

TEST(Consistency, PlantedQueryMutationIsFlagged) {
  OperationTrace t;
  t.records.push_back(rec(OpKind::qry, "a", false, bits({}), bits({0})));
  EXPECT_EQ(check_consistency(t).count(Rule::qry_mutation), 1u);
}

TEST(Consistency, PlantedCuckooTagLossIsFlagged) {
  CuckooParams pp{1, 1, 4, 1};
  auto s0 = cuckoo_setup(pp);
  auto s1 = s0;
  s1.append(0, 3);
  auto s2 = cuckoo_setup(pp);
  s2.append(1, 4);
  OperationTrace t;
  t.records.push_back(rec(OpKind::up, "a", true, s0, s1));
  t.records.push_back(rec(OpKind::up, "b", true, s1, s2));
  EXPECT_EQ(check_consistency(t).count(Rule::monotonicity), 1u);
}

TEST(Consistency, BrokenChainIsStructuralError) {
  OperationTrace t;
  t.records.push_back(rec(OpKind::up, "a", true, bits({}), bits({1})));
  t.records.push_back(rec(OpKind::up, "b", true, bits({2}), bits({2, 3})));
  EXPECT_THROW(check_consistency(t), TraceStructureError);
}

TEST(StatisticalDistance, Examples) {
  Distribution p{{"a", 0.5}, {"b", 0.5}};
  Distribution q{{"a", 1.0}, {"b", 0.0}};
  EXPECT_DOUBLE_EQ(statistical_distance(p, p), 0.0);
  EXPECT_DOUBLE_EQ(statistical_distance(p, q), 0.5);
  Distribution x{{"x", 1.0}, {"y", 0.0}}, y{{"x", 0.0}, {"y", 1.0}};
  EXPECT_DOUBLE_EQ(statistical_distance(x, y), 1.0);
}

TEST(StatisticalDistance, Errors) {
  Distribution p{{"a", 1.0}}, q{{"b", 1.0}};
  EXPECT_THROW(statistical_distance(p, q), std::domain_error);
  align_support(p, q);
  EXPECT_DOUBLE_EQ(statistical_distance(p, q), 1.0);
  Distribution bad{{"a", 0.7}};
  Distribution ok{{"a", 1.0}};
  EXPECT_THROW(statistical_distance(bad, ok), std::invalid_argument);
}

TEST(StatisticalDistance, EmpiricalDistribution) {
  auto d = empirical_distribution({"a", "b", "a", "a"});
  EXPECT_DOUBLE_EQ(d["a"], 0.75);
  EXPECT_DOUBLE_EQ(d["b"], 0.25);
}

TEST(Serialization, RejectsBadInput) {
  EXPECT_THROW(deserialize_state(Bytes{}), std::invalid_argument);
  EXPECT_THROW(deserialize_state(Bytes{2, 1}), std::invalid_argument);
  EXPECT_THROW(deserialize_state(Bytes{1, 9}), std::invalid_argument);
  auto good = serialize_state(BloomParams{8, 1}, bits({1}));
  auto d = deserialize_state(good);
  EXPECT_EQ(std::get<BloomState>(d.state), bits({1}));
  good.push_back(0);
  EXPECT_THROW(deserialize_state(good), std::invalid_argument);
}

TEST(MonteCarlo, FalsePositiveRateNonDecreasingInN) {
  auto d = AmqDescriptor::bloom({2048, 4});
  double prev = 0, prev_sigma = 0;
  for (std::uint64_t n : {50, 100, 200, 400}) {
    auto r = honest_fp_experiment(d, n, 40000, 3);
    EXPECT_GE(r.fp + 3 * std::hypot(r.sigma, prev_sigma), prev) << "n=" << n;
    prev = r.fp;
    prev_sigma = r.sigma;
  }
}

}  // namespace
