#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "ruelle/error.hpp"

using namespace ruelle;

namespace {

// [phi]_k by explicit pairs of points truncated at length L: every pair of
// nonempty L-cylinders agreeing on exactly the first n symbols.
double brute_seminorm(const Potential& phi, std::size_t k, std::size_t L) {
  const auto& ts = *phi.domain();
  std::vector<Word> pts;
  for (Word& w : admissible_words(ts, L))
    if (ts.live()[w.back()]) pts.push_back(std::move(w));
  double best = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      std::size_t n = 0;
      while (n < L && pts[a][n] == pts[b][n]) ++n;
      if (n < k) continue;
      const double diff = std::abs(phi(pts[a]) - phi(pts[b]));
      best = std::max(best, diff / std::pow(phi.theta(), static_cast<double>(n)));
    }
  return best;
}

Potential random_table(const StructurePtr& ts, std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::map<Word, double> w;
  for (const Word& x : admissible_words(*ts, d)) w[x] = u(rng);
  return Potential::table(ts, d, w);
}

}  // namespace

TEST(Metric, Distances) {
  Metric m(0.5);
  EXPECT_EQ(d_theta(m, 0), 1.0);
  EXPECT_EQ(d_theta(m, 3), 0.125);
  EXPECT_EQ(d_theta(m, std::nullopt), 0.0);
  EXPECT_THROW(Metric(1.0), Error);
}

TEST(Seminorm, ZeroPotential) {
  auto b = seminorm_bound(fx::zero(fx::f1()), 1, 4);
  EXPECT_EQ(b.lo, 0.0);
  EXPECT_EQ(b.hi, 0.0);
}

TEST(Seminorm, DepthTwoOnGolden) {
  auto f2 = fx::f2();
  auto phi = Potential::table(f2, 2, {{{0, 1}, 1.0}, {{1, 0}, 0.0}, {{1, 1}, 0.0}});
  const double oracle = brute_seminorm(phi, 1, 6);
  auto b = seminorm_bound(phi, 1, 6);
  EXPECT_EQ(oracle, 0.0);
  EXPECT_EQ(b.lo, oracle);
  EXPECT_EQ(b.hi, oracle);
  // On the full shift the prefix 0 splits into 00 and 01.
  auto f1 = fx::f1();
  auto psi = Potential::table(f1, 2, {{{0, 0}, 0.0}, {{0, 1}, 1.0}, {{1, 0}, 0.0}, {{1, 1}, 0.0}});
  EXPECT_DOUBLE_EQ(brute_seminorm(psi, 1, 6), 2.0);
  auto c = seminorm_bound(psi, 1, 6);
  EXPECT_DOUBLE_EQ(c.lo, 2.0);
  EXPECT_DOUBLE_EQ(c.hi, 2.0);
}

TEST(Seminorm, VanishesAtDepth) {
  std::mt19937_64 rng(1);
  auto phi = random_table(fx::f1(), 3, rng);
  auto b = seminorm_bound(phi, 3, 5);
  EXPECT_EQ(b.lo, 0.0);
  EXPECT_EQ(b.hi, 0.0);
}

TEST(Seminorm, MatchesBruteForceAndMonotone) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    auto ts = t % 2 ? fx::f2() : fx::random5().ts;
    auto phi = random_table(ts, 1 + t % 3, rng);
    double prev = kInf;
    for (std::size_t k = 1; k <= 4; ++k) {
      auto b = seminorm_bound(phi, k, 6);
      EXPECT_NEAR(b.lo, brute_seminorm(phi, k, 6), 1e-12);
      EXPECT_EQ(b.lo, b.hi);
      EXPECT_LE(b.hi, prev);
      prev = b.hi;
    }
  }
}

TEST(Seminorm, UndeclaredRuleIsUnbounded) {
  auto phi = Potential::from_rule(fx::f1(), 2, [](WordView w) { return 0.1 * w[1]; }, false);
  EXPECT_TRUE(std::isinf(seminorm_bound(phi, 1, 4).hi));
  auto declared = Potential::from_rule(fx::f1(), 2, [](WordView w) { return 0.1 * w[1]; }, false,
                                       {1.0, 0.5, 0.1, 0.05});
  auto b = seminorm_bound(declared, 1, 4);
  EXPECT_DOUBLE_EQ(b.lo, 0.2);
  EXPECT_DOUBLE_EQ(b.hi, 1.0);
}

TEST(Summability, FullShift) {
  auto c = summability(fx::zero(fx::f1()));
  EXPECT_DOUBLE_EQ(c.partial_sum, 2.0);
  EXPECT_EQ(c.tail_bound, 0.0);
  EXPECT_DOUBLE_EQ(c.total_upper, 2.0);
}

TEST(Summability, RenewalGeometric) {
  auto ts = renewal_shift(10);
  TailModel tail{[](std::size_t s) { return std::pow(4.0, -static_cast<double>(s)); },
                 [](std::size_t n) { return std::pow(4.0, -static_cast<double>(n)) / 3.0; },
                 "geometric"};
  auto phi = fx::renewal_phi(ts).with_tail(tail);
  auto c = summability(phi, 10);
  double oracle = 0.0;
  for (int n = 1; n <= 10; ++n) oracle += std::pow(4.0, -n);
  EXPECT_NEAR(c.partial_sum, oracle, 1e-15);
  EXPECT_NEAR(c.partial_sum, 1.0 / 3.0, 1e-6);
  EXPECT_DOUBLE_EQ(c.tail_bound, std::pow(4.0, -10) / 3.0);
  EXPECT_DOUBLE_EQ(c.total_upper, c.partial_sum + c.tail_bound);
}

TEST(Summability, HarmonicTailRejected) {
  auto ts = renewal_shift(10);
  TailModel tail{[](std::size_t s) { return 1.0 / static_cast<double>(s); },
                 [](std::size_t) { return kInf; }, "harmonic"};
  auto phi = fx::renewal_phi(ts).with_tail(tail);
  try {
    summability(phi, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_summable);
  }
}

TEST(Birkhoff, Examples) {
  EXPECT_EQ(birkhoff_sum(fx::zero(fx::f1()), Word{0, 1, 1}, 3), 0.0);
  auto ts = renewal_shift(5);
  auto phi = fx::renewal_phi(ts);
  EXPECT_DOUBLE_EQ(birkhoff_sum(phi, Word{0, 1, 0}), std::log(0.25) + std::log(1.0 / 16.0));
  auto c = Potential::constant(fx::f1(), 0.7);
  EXPECT_DOUBLE_EQ(birkhoff_sum(c, Word{0, 1, 1, 0, 1}, 5), 3.5);
  EXPECT_THROW(birkhoff_sum(fx::zero(fx::f2()), Word{0, 0, 1}), Error);
}

TEST(Birkhoff, Additivity) {
  std::mt19937_64 rng(9);
  auto r = fx::random5();
  auto words = admissible_words(*r.ts, 9);
  for (int t = 0; t < 50; ++t) {
    const Word& w = words[rng() % words.size()];
    for (std::size_t n = 1; n < 7; ++n) {
      const std::size_t m = 8 - n;
      const double lhs = birkhoff_sum(r.phi, w, n + m);
      const double rhs = birkhoff_sum(r.phi, w, n) + birkhoff_sum(r.phi, WordView(w).subspan(n), m);
      EXPECT_NEAR(lhs, rhs, 1e-12);
    }
  }
}

TEST(Extension, FirstBranchAndIdentity) {
  auto f1 = fx::f1();
  auto f2 = fx::f2_in(f1);
  auto phi = Potential::table(f2, 2, {{{0, 1}, 0.3}, {{1, 0}, -0.4}, {{1, 1}, 1.1}});
  auto ext = extend_potential(phi, f1);
  // 00 leaves the subsystem after one symbol; the representative from 0 is 0101...
  EXPECT_DOUBLE_EQ(ext(Word{0, 0}), phi(Word{0, 1}));
  for (const Word& w : admissible_words(*f2, 6)) EXPECT_EQ(ext(w), phi(w));
  EXPECT_EQ(ext.sup_norm(), phi.sup_norm());
  for (std::size_t n = 1; n <= 8; ++n) {
    auto a = seminorm_bound(ext, n, 8);
    auto b = seminorm_bound(phi, n, 8);
    EXPECT_EQ(a.lo, b.lo);
    EXPECT_EQ(a.hi, b.hi);
  }
  EXPECT_NEAR(brute_seminorm(ext, 1, 8), brute_seminorm(phi, 1, 8), 1e-12);
}

TEST(Extension, RandomDepthThree) {
  std::mt19937_64 rng(4);
  auto f1 = fx::f1();
  auto f2 = fx::f2_in(f1);
  for (int t = 0; t < 5; ++t) {
    auto phi = random_table(f2, 3, rng);
    auto ext = extend_potential(phi, f1);
    EXPECT_LE(summability(ext).total_upper, summability(phi).total_upper + 1e-12);
    for (std::size_t n = 1; n <= 6; ++n)
      EXPECT_NEAR(brute_seminorm(ext, n, 8), brute_seminorm(phi, n, 8), 1e-12);
  }
}

TEST(Extension, MissingCylinderRejected) {
  auto f1 = fx::f1();
  auto open = with_hole(f1, {{0, 0}, {0, 1}});
  auto phi = fx::zero(open);
  EXPECT_THROW(extend_potential(phi, f1), Error);
}

TEST(Perturbed, HoleBranch) {
  auto f1 = fx::f1();
  auto f2 = fx::f2_in(f1);
  auto pe = perturbed_potential(fx::zero(f1), *f2, 1.0);
  EXPECT_EQ(pe.depth(), 2u);
  EXPECT_DOUBLE_EQ(pe(Word{0, 0}), -1.0);
  EXPECT_DOUBLE_EQ(pe(Word{0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(pe(Word{1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(pe(Word{1, 1}), 0.0);
  EXPECT_THROW(perturbed_potential(fx::zero(f1), *f2, 0.0), Error);
}

TEST(Perturbed, ClampAndMonotone) {
  std::mt19937_64 rng(12);
  auto f1 = fx::f1();
  auto f2 = fx::f2_in(f1);
  auto phi = random_table(f1, 2, rng);
  const auto words = admissible_words(*f1, 2);
  std::vector<double> prev;
  for (double eps : {0.05, 0.1, 0.25, 0.5, 1.0, 4.0}) {
    auto pe = perturbed_potential(phi, *f2, eps);
    std::vector<double> cur;
    for (const Word& w : words) {
      const double v = pe(w);
      cur.push_back(v);
      if (f2->allowed(w[0], w[1])) {
        EXPECT_GE(v, phi(w) - 1e-15);
        // psi = e^phi on allowed points; the deviation is bounded by the clamp.
        EXPECT_LE(std::abs(std::exp(v) - std::exp(phi(w))),
                  2.0 * std::exp(phi.sup_on_symbol(w[0])) * std::exp(-1.0 / eps) + 1e-15);
      } else {
        EXPECT_LE(std::exp(v), 2.0 * std::exp(phi.sup_on_symbol(w[0])) * std::exp(-1.0 / eps) + 1e-15);
      }
    }
    if (!prev.empty()) {
      for (std::size_t i = 0; i < words.size(); ++i)
        if (f2->allowed(words[i][0], words[i][1])) EXPECT_GE(cur[i], prev[i] - 1e-15);
    }
    prev = cur;
    // [phi_eps]_2 = 0 <= [phi]_2 for depth 2.
    EXPECT_EQ(seminorm_bound(pe, 2, 4).hi, 0.0);
  }
}
