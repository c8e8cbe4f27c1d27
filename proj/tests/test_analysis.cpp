#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "support.hpp"

using namespace amqsec;
namespace orc = amqsec::oracle;
using orc::Dec;

namespace {

constexpr double kRel = 1e-12;

TEST(BloomBound, WorkedExample) {
  auto r = bloom_nai_fp_bound(1024, 7, 100);
  EXPECT_NEAR(r.bound, 7.5e-3, 0.1e-3);
  EXPECT_LE(orc::rel_err(r.bound, orc::bloom_bound(1024, 7, 100)), kRel);
  EXPECT_LE(orc::rel_err(r.estimate, orc::bloom_estimate(1024, 7, 100)), kRel);
}

TEST(BloomBound, EmptyEstimateIsZero) { EXPECT_EQ(bloom_nai_fp_bound(1024, 7, 0).estimate, 0.0); }

TEST(BloomBound, RejectsTinyM) {
  EXPECT_THROW(bloom_nai_fp_bound(1, 1, 1), std::invalid_argument);
  EXPECT_THROW(bloom_nai_fp_bound(8, 0, 1), std::invalid_argument);
}

TEST(BloomBound, MatchesHighPrecisionOnRandomGrid) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t m = 2 + rng() % (1u << 24);
    unsigned k = 1 + rng() % 32;
    std::uint64_t n = rng() % (4 * m);
    auto r = bloom_nai_fp_bound(m, k, n);
    ASSERT_LE(orc::rel_err(r.bound, orc::bloom_bound(m, k, n)), kRel) << m << ' ' << k << ' ' << n;
    ASSERT_LE(orc::rel_err(r.estimate, orc::bloom_estimate(m, k, n)), kRel) << m << ' ' << k << ' ' << n;
  }
}

TEST(BloomBound, MonotoneInNAndAboveEstimate) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t m = 2 + rng() % 100000;
    unsigned k = 1 + rng() % 32;
    std::uint64_t n = rng() % (2 * m);
    auto a = bloom_nai_fp_bound(m, k, n), b = bloom_nai_fp_bound(m, k, n + 1);
    EXPECT_GE(b.bound, a.bound);
    EXPECT_GE(a.bound, a.estimate);
    EXPECT_GE(a.bound, 0.0);
    EXPECT_LE(a.bound, 1.0);
  }
}

TEST(CuckooBound, WorkedExamples) {
  EXPECT_NEAR(cuckoo_nai_fp_bound(4, 8), 3.46e-2, 0.01e-2);
  EXPECT_LE(orc::rel_err(cuckoo_nai_fp_bound(4, 8), orc::cuckoo_bound(4, 8)), kRel);
  EXPECT_LE(orc::rel_err(cuckoo_nai_fp_bound(1, 64), Dec(3) * pow(Dec(2), -64)), 1e-15);
  EXPECT_EQ(cuckoo_nai_fp_bound(1, 64), cuckoo_nai_fp_bound(1, 64));
}

TEST(CuckooBound, WrappedTermAdds) {
  double base = cuckoo_nai_fp_bound(4, 8);
  EXPECT_DOUBLE_EQ(cuckoo_nai_fp_bound(4, 8, 20) - base, 50 * std::ldexp(1.0, -20));
  EXPECT_LE(orc::rel_err(cuckoo_nai_fp_bound(4, 8, 256), orc::cuckoo_bound(4, 8, 256)), kRel);
  // 50 * 2^-256 is below double resolution next to the NAI term.
  EXPECT_EQ(cuckoo_nai_fp_bound(4, 8, 256), base);
}

TEST(CuckooBound, MatchesHighPrecisionOnRandomGrid) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t s = 1 + rng() % 64;
    unsigned lt = 1 + rng() % 64;
    int rb = (rng() & 1) ? static_cast<int>(rng() % 300) : -1;
    double got = rb >= 0 ? cuckoo_nai_fp_bound(s, lt, static_cast<unsigned>(rb)) : cuckoo_nai_fp_bound(s, lt);
    ASSERT_LE(orc::rel_err(got, orc::cuckoo_bound(s, lt, rb)), kRel) << s << ' ' << lt << ' ' << rb;
  }
}

TEST(AdversarialBound, WorkedExamples) {
  const double eps = std::ldexp(1.0, -256);
  auto r = adversarial_correctness_bound(eps, {0, 0, 1024, 0}, std::ldexp(1.0, -20));
  EXPECT_LE(orc::rel_err(r.adversarial_bound, pow(Dec(2), -9)), 1e-12);
  EXPECT_EQ(adversarial_correctness_bound(eps, {100, 0, 1000, 0}, 0.01, true).adversarial_bound, eps);
  EXPECT_EQ(adversarial_correctness_bound(eps, {100, 50, 0, 0}, 0.01).adversarial_bound, eps);
  EXPECT_THROW(adversarial_correctness_bound(eps, {100, 1, 0, 0}, 0.01, true), std::invalid_argument);
  EXPECT_EQ(adversarial_correctness_bound(0.5, {0, 0, 1000, 0}, 0.5).adversarial_bound, 1.0);
}

TEST(AdversarialBound, MatchesHighPrecisionOnRandomGrid) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    double eps = std::ldexp(u(rng), -static_cast<int>(rng() % 300));
    double p = std::ldexp(u(rng), -static_cast<int>(rng() % 60));
    std::uint64_t qt = rng() % (1ull << (rng() % 40));
    bool imm = rng() % 4 == 0;
    QueryBudget b{rng() % 1000, imm ? 0 : rng() % 1000, qt, 0};
    auto r = adversarial_correctness_bound(eps, b, p, imm);
    ASSERT_LE(orc::rel_err(r.adversarial_bound, orc::adversarial(Dec(eps), qt, Dec(p), imm)), kRel);
  }
}

TEST(AdversarialBound, MonotoneInBudget) {
  auto d = AmqDescriptor::bloom({1u << 14, 6});
  const double eps = std::ldexp(1.0, -256);
  std::mt19937_64 rng(15);
  for (int i = 0; i < 300; ++i) {
    QueryBudget b{rng() % 2000, rng() % 2000, rng() % 2000, 0};
    double base = bound_report(d, b, eps).adversarial_bound;
    for (int f = 0; f < 3; ++f) {
      QueryBudget c = b;
      (f == 0 ? c.n : f == 1 ? c.q_u : c.q_t) += 1 + rng() % 100;
      EXPECT_GE(bound_report(d, c, eps).adversarial_bound, base);
    }
  }
}

TEST(BoundReport, DescriptorFields) {
  QueryBudget b{128, 0, 1 << 10, 0};
  auto r = bound_report(AmqDescriptor::cuckoo({4, 15, 8, 500}), b, 0);
  EXPECT_EQ(*r.storage_bits, 1u << 20);
  EXPECT_FALSE(*r.alpha_beta_one);
  EXPECT_TRUE(*bound_report(AmqDescriptor::prf_wrapped_cuckoo({4, 15, 8, 500}), b, 0).alpha_beta_one);
  EXPECT_TRUE(*bound_report(AmqDescriptor::bloom({64, 2}), b, 0).alpha_beta_one);
}

TEST(PrivacyBound, WorkedExamples) {
  auto r = privacy_guessing_bound(512, 512, 32, 0);
  EXPECT_EQ(r.guess_bound, std::ldexp(1.0, -22));
  EXPECT_EQ(privacy_guessing_bound(1, 0, 0, 0).guess_bound, 1.0);
  const double eps = std::ldexp(1.0, -256);
  EXPECT_EQ(privacy_guessing_bound(0, 0, 32, eps).rep_privacy_bound, eps);
  EXPECT_THROW(privacy_guessing_bound(1, 1, -1, 0), std::invalid_argument);
}

TEST(PrivacyBound, MatchesHighPrecisionOnRandomGrid) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t qu = rng() % (1ull << (rng() % 40)), qt = rng() % (1ull << (rng() % 40));
    double h = u(rng) * 128;
    double eps = std::ldexp(u(rng), -static_cast<int>(rng() % 300));
    auto r = privacy_guessing_bound(qu, qt, h, eps);
    Dec g = orc::guess(qu, qt, Dec(h));
    ASSERT_LE(orc::rel_err(r.guess_bound, g), kRel);
    ASSERT_LE(orc::rel_err(r.rep_privacy_bound, orc::clamp01(Dec(eps) + Dec(r.guess_bound))), kRel);
  }
}

TEST(Storage, Examples) {
  EXPECT_EQ(storage_bits(AmqDescriptor::bloom({1u << 20, 4})), 1u << 20);
  EXPECT_EQ(storage_bits(AmqDescriptor::cuckoo({4, 15, 8, 500})), 1u << 20);
  EXPECT_EQ(cuckoo_storage_bits(1, 0, 13), 13u);
  EXPECT_THROW(cuckoo_storage_bits(1u << 20, 60, 64), std::overflow_error);
}

TEST(Clamp, Edges) {
  EXPECT_EQ(clamp_probability(-1), 0.0);
  EXPECT_EQ(clamp_probability(2), 1.0);
  EXPECT_EQ(clamp_probability(std::numeric_limits<long double>::quiet_NaN()), 0.0);
}

// Sweep.

SweepConfig small_sweep(Family f, std::uint64_t n, std::uint64_t q) {
  SweepConfig c;
  c.family = f;
  c.n = n;
  c.q = q;
  c.grid = default_grid(f, n, q);
  return c;
}

TEST(Sweep, EmptyGridAndFamilyMismatchThrow) {
  SweepConfig c;
  EXPECT_THROW(parameter_sweep(c), std::invalid_argument);
  c.grid = {PlanCandidate::cuckoo(4, 10, 8)};
  EXPECT_THROW(parameter_sweep(c), std::invalid_argument);
}

TEST(Sweep, SortedAndAdversarialAboveHonest) {
  for (auto f : {Family::bloom, Family::cuckoo}) {
    auto r = parameter_sweep(small_sweep(f, 128, 1 << 12));
    ASSERT_FALSE(r.points.empty());
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      const auto& p = r.points[i];
      if (i) {
        EXPECT_LE(r.points[i - 1].storage_bits, p.storage_bits);
      }
      EXPECT_GE(p.log2_eps_prime, p.log2_honest_fp);
      EXPECT_LE(p.log2_eps_prime, 0.0);
      EXPECT_EQ(p.storage_bits, p.pp.storage());
    }
  }
}

TEST(Sweep, ZeroQueryBudgetShiftsHonestByEps) {
  auto c = small_sweep(Family::bloom, 1000, 0);
  c.eps_prf_log2 = -30;
  for (const auto& p : parameter_sweep(c).points) {
    Dec want = std::min(Dec(0), Dec(log(pow(Dec(2), -30) + pow(Dec(2), Dec(p.log2_honest_fp))) / log(Dec(2))));
    EXPECT_NEAR(p.log2_eps_prime, want.convert_to<double>(), 1e-9);
    EXPECT_EQ(p.worst_t, 0u);
  }
}

TEST(Sweep, WorstCaseMatchesBruteForce) {
  const std::uint64_t n = 50, q = 400;
  const Dec eps = pow(Dec(2), -40);
  std::vector<PlanCandidate> grid;
  for (std::uint64_t m : {256, 1000, 5000, 40000})
    for (unsigned k : {1u, 3u, 7u, 20u}) grid.push_back(PlanCandidate::bloom(m, k));
  SweepConfig c{Family::bloom, n, q, -40, grid};
  for (const auto& p : parameter_sweep(c).points) {
    auto w = orc::brute_worst([&](std::uint64_t x) { return orc::bloom_bound(p.pp.m, p.pp.k, x); }, n, q, eps);
    Dec want = log(w.value) / log(Dec(2));
    EXPECT_NEAR(p.log2_eps_prime, want.convert_to<double>(), 1e-9 * std::max(1.0, std::abs(p.log2_eps_prime)));
    EXPECT_EQ(p.worst_t, w.t) << p.pp.m << ' ' << p.pp.k;
  }
}

TEST(Sweep, CuckooInfeasibleCandidatesDropped) {
  SweepConfig c{Family::cuckoo, 100, 1000, -256,
                {PlanCandidate::cuckoo(4, 4, 8), PlanCandidate::cuckoo(4, 9, 8), PlanCandidate::cuckoo(4, 12, 8)}};
  auto r = parameter_sweep(c);
  EXPECT_EQ(r.dropped_infeasible, 1u);
  EXPECT_EQ(r.points.size(), 2u);
  // Constant P: the worst split spends every query on Qry.
  for (const auto& p : r.points) EXPECT_EQ(p.worst_t, 1000u);
}

TEST(Sweep, DefaultGridShapes) {
  auto b = default_grid(Family::bloom, 128, 1 << 10);
  EXPECT_EQ(b.size() % 32, 0u);
  EXPECT_EQ(b.front().m, 1024u);
  auto c = default_grid(Family::cuckoo, 128, 1 << 10);
  EXPECT_EQ(c.size(), 2u * 3u * 64u);
  for (const auto& p : c) EXPECT_TRUE(cuckoo_feasible(p, 128 + 1024));
}

TEST(MatchedStorage, PicksCheapestMeetingTarget) {
  std::vector<CurvePoint> pts(3);
  pts[0].storage_bits = 10, pts[0].log2_eps_prime = -5, pts[0].log2_honest_fp = -11;
  pts[1].storage_bits = 20, pts[1].log2_eps_prime = -10, pts[1].log2_honest_fp = -20;
  pts[2].storage_bits = 30, pts[2].log2_eps_prime = -15, pts[2].log2_honest_fp = -30;
  auto m = matched_storage(pts, -10);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->adversarial.storage_bits, 20u);
  EXPECT_EQ(m->honest.storage_bits, 10u);
  EXPECT_DOUBLE_EQ(m->ratio, 2.0);
  EXPECT_FALSE(matched_storage(pts, -100));
}

}  // namespace
