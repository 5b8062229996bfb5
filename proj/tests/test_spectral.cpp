#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "ruelle/error.hpp"
#include "ruelle/spectral.hpp"

using namespace ruelle;

namespace {

SpectralDecomposition decompose(const StructurePtr& ts, const Potential& phi, std::size_t m = 1) {
  TransferMatrix tm(ts, phi, m);
  return spectral_decomposition(tm, period_classes(*ts), rpf_triplet(tm));
}

// Dense right/left Perron vectors of a nonnegative matrix, for support checks.
std::pair<Eigen::VectorXd, Eigen::VectorXd> dense_perron(const DenseMatrix& L, double lambda) {
  auto pick = [&](const DenseMatrix& A) {
    Eigen::EigenSolver<DenseMatrix> es(A);
    Eigen::Index best = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()[i] - lambda) < std::abs(es.eigenvalues()[best] - lambda)) best = i;
    Eigen::VectorXd v = es.eigenvectors().col(best).real();
    if (v.sum() < 0) v = -v;
    return v;
  };
  return {pick(L), pick(L.transpose())};
}

// Two full 2-shifts joined by one edge; weight 0.75 on the second block.
struct TwoBlock {
  StructurePtr ts;
  Potential phi;
};

TwoBlock two_block(bool forward, double second_weight = 0.75) {
  std::vector<std::vector<int>> m(4, std::vector<int>(4, 0));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      m[i][j] = 1;
      m[i + 2][j + 2] = 1;
    }
  if (forward)
    m[1][2] = 1;
  else
    m[2][1] = 1;
  auto ts = from_matrix(m);
  const double lw = std::log(second_weight);
  auto phi = Potential::table(ts, 1, {{{0}, 0.0}, {{1}, 0.0}, {{2}, lw}, {{3}, lw}});
  return {ts, phi};
}

}  // namespace

TEST(Spectral, PeriodTwoPermutation) {
  auto sd = decompose(fx::f3(), fx::zero(fx::f3()));
  ASSERT_EQ(sd.period, 2u);
  ASSERT_EQ(sd.peripherals.size(), 2u);
  EXPECT_NEAR(std::abs(sd.peripherals[0].lambda - Complex(1, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(sd.peripherals[1].lambda - Complex(-1, 0)), 0.0, 1e-12);
  const auto& h1 = sd.peripherals[1].h;
  EXPECT_NEAR(std::abs(h1[0] + h1[1]), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(sd.peripherals[0].h[0] - sd.peripherals[0].h[1]), 0.0, 1e-12);
  EXPECT_LT(sd.remainder_radius, 1e-8);
  EXPECT_LT(sd.projection_error, 1e-10);
  EXPECT_LT(sd.reconstruction_error, 1e-10);
  ASSERT_TRUE(sd.oracle.available);
  EXPECT_EQ(sd.oracle.peripheral_count, 2u);
  EXPECT_TRUE(sd.oracle.all_simple);
}

TEST(Spectral, GoldenRemainder) {
  auto sd = decompose(fx::f2(), fx::zero(fx::f2()));
  ASSERT_EQ(sd.peripherals.size(), 1u);
  EXPECT_NEAR(sd.lambda, fx::golden, 1e-12);
  EXPECT_NEAR(sd.remainder_radius, fx::golden - 1.0, 1e-8);
  EXPECT_NEAR(sd.oracle.remainder_radius, fx::golden - 1.0, 1e-12);
  EXPECT_LT(sd.reconstruction_error, 1e-10);
  EXPECT_LT(sd.commutation_error, 1e-10);
}

TEST(Spectral, CubeRoots) {
  auto sd = decompose(fx::f3p(), fx::zero(fx::f3p()));
  ASSERT_EQ(sd.peripherals.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / 3.0;
    EXPECT_NEAR(std::abs(sd.peripherals[i].lambda - Complex(std::cos(a), std::sin(a))), 0.0, 1e-12);
  }
  EXPECT_EQ(sd.oracle.peripheral_count, 3u);
  EXPECT_LT(sd.oracle.location_error, 1e-10);
  EXPECT_TRUE(sd.oracle.all_simple);
}

TEST(Spectral, TwistReconstructsAndDiagonalizes) {
  for (auto ts : {fx::f3(), fx::f3p(), fx::random5().ts}) {
    auto phi = Potential::constant(ts, 0.2);
    TransferMatrix tm(ts, phi, 2);
    const RpfTriplet t = rpf_triplet(tm);
    auto sd = spectral_decomposition(tm, period_classes(*ts), t);
    const Vector h = t.h();
    // (1/p) sum_i kappa^{ji} h_i = h on class j and 0 elsewhere.
    const auto classes = period_classes(*ts);
    for (std::size_t j = 0; j < sd.period; ++j) {
      ComplexVector sum = ComplexVector::Zero(h.size());
      for (std::size_t i = 0; i < sd.period; ++i) sum += std::pow(sd.kappa, static_cast<double>(j * i)) * sd.peripherals[i].h;
      sum /= static_cast<double>(sd.period);
      for (Eigen::Index w = 0; w < h.size(); ++w) {
        const bool in = classes.class_of[tm.index().first_symbol(static_cast<std::size_t>(w))] == j;
        EXPECT_NEAR(std::abs(sum[w] - (in ? h[w] : 0.0)), 0.0, 1e-12);
      }
    }
    for (std::size_t i = 0; i < sd.peripherals.size(); ++i)
      for (std::size_t j = 0; j < sd.peripherals.size(); ++j) {
        const Complex g = (sd.peripherals[i].nu.transpose() * sd.peripherals[j].h)(0);
        EXPECT_NEAR(std::abs(g - (i == j ? 1.0 : 0.0)), 0.0, 1e-10);
      }
    EXPECT_LT(sd.reconstruction_error, 1e-10);
    EXPECT_LT(sd.remainder_radius, sd.lambda * (1 - 1e-3));
  }
}

TEST(Spectral, PeripheralSetMatchesFullEigendecomposition) {
  auto r = fx::random5();
  TransferMatrix tm(r.ts, r.phi, 1);
  auto sd = spectral_decomposition(tm, period_classes(*r.ts), rpf_triplet(tm));
  ASSERT_TRUE(sd.oracle.available);
  EXPECT_EQ(sd.oracle.peripheral_count, 1u);
  EXPECT_TRUE(sd.oracle.all_simple);
  EXPECT_NEAR(std::abs(sd.oracle.eigenvalues[0]), sd.lambda, 1e-10);
  EXPECT_NEAR(sd.remainder_radius, sd.oracle.remainder_radius, 1e-6);
}

TEST(Corollary, DominantUpstream) {
  auto tb = two_block(true);
  TransferMatrix tm(tb.ts, tb.phi, 1);
  auto sd = corollary_decomposition(tm);
  ASSERT_EQ(sd.component_radii.size(), 2u);
  std::vector<double> radii = sd.component_radii;
  std::sort(radii.begin(), radii.end());
  EXPECT_NEAR(radii[0], 1.5, 1e-12);
  EXPECT_NEAR(radii[1], 2.0, 1e-12);
  EXPECT_NEAR(sd.lambda, 2.0, 1e-12);
  EXPECT_TRUE(sd.supports_match);
  auto [hr, vl] = dense_perron(tm.dense(), 2.0);
  const auto& h = sd.peripherals[0].h;
  const auto& nu = sd.peripherals[0].nu;
  for (Eigen::Index i = 0; i < hr.size(); ++i) {
    EXPECT_EQ(std::abs(h[i]) > 1e-12, std::abs(hr[i]) > 1e-12) << i;
    EXPECT_EQ(std::abs(nu[i]) > 1e-12, std::abs(vl[i]) > 1e-12) << i;
  }
  // h spreads downstream, nu stays upstream.
  EXPECT_GT(std::abs(h[2]), 0.0);
  EXPECT_EQ(std::abs(nu[2]), 0.0);
  EXPECT_LT(sd.reconstruction_error, 1e-10);
  EXPECT_LT(sd.projection_error, 1e-10);
  EXPECT_EQ(sd.oracle.peripheral_count, 1u);
}

TEST(Corollary, DominantDownstream) {
  auto tb = two_block(false);
  TransferMatrix tm(tb.ts, tb.phi, 2);
  auto sd = corollary_decomposition(tm);
  EXPECT_NEAR(sd.lambda, 2.0, 1e-12);
  EXPECT_TRUE(sd.supports_match);
  auto [hr, vl] = dense_perron(tm.dense(), 2.0);
  const Vector hn = sd.triplet.g;
  for (Eigen::Index i = 0; i < hr.size(); ++i) {
    EXPECT_EQ(sd.triplet.g[i] > 1e-12, std::abs(hr[i]) > 1e-12) << i;
    EXPECT_EQ(sd.triplet.nu[i] > 1e-12, std::abs(vl[i]) > 1e-12) << i;
  }
  // The extended vectors are genuine eigenvectors of the whole operator.
  EXPECT_LT(sd.triplet.residual_right, 1e-10);
  EXPECT_LT(sd.triplet.residual_left, 1e-10);
  const double scale = hr.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < hr.size(); ++i) EXPECT_NEAR(hn[i], std::abs(hr[i]) / scale, 1e-10);
}

TEST(Corollary, TieIsAnError) {
  auto tb = two_block(true, 1.0);
  TransferMatrix tm(tb.ts, tb.phi, 1);
  try {
    corollary_decomposition(tm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_unique_dominant);
    EXPECT_NE(std::string(e.what()).find("{0,1}"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("{2,3}"), std::string::npos);
  }
}

TEST(Corollary, SingleComponentMatches) {
  auto r = fx::random5();
  TransferMatrix tm(r.ts, r.phi, 1);
  auto a = corollary_decomposition(tm);
  auto b = spectral_decomposition(tm, period_classes(*r.ts), rpf_triplet(tm));
  EXPECT_NEAR(a.lambda, b.lambda, 1e-12);
  EXPECT_NEAR(a.remainder_radius, b.remainder_radius, 1e-6);
  for (Eigen::Index i = 0; i < a.triplet.g.size(); ++i) EXPECT_NEAR(a.triplet.g[i], b.triplet.g[i], 1e-10);
}

TEST(Corollary, ReducibleInputRoutes) {
  auto tb = two_block(true);
  TransferMatrix tm(tb.ts, tb.phi, 1);
  PeriodClasses dummy;
  dummy.period = 1;
  auto sd = spectral_decomposition(tm, dummy, RpfTriplet{});
  EXPECT_TRUE(sd.dominant_component.has_value());
  EXPECT_NEAR(sd.lambda, 2.0, 1e-12);
}

TEST(Supports, IrreducibleInsideEnclosing) {
  auto f1 = fx::f1();
  auto f2 = fx::f2_in(f1);
  TransferMatrix tm(f2, fx::zero(f1), 3, f1);
  auto t = rpf_triplet(tm);
  for (std::size_t i = 0; i < tm.size(); ++i) {
    const WordView w = tm.word(i);
    EXPECT_GT(t.g[static_cast<Eigen::Index>(i)], 0.0);
    EXPECT_EQ(t.nu[static_cast<Eigen::Index>(i)] > 0.0, is_admissible(*f2, w));
  }
}

TEST(Cone, Examples) {
  auto f2 = fx::f2();
  TransferMatrix tm(f2, fx::zero(f2), 3);
  auto t = rpf_triplet(tm);
  EXPECT_TRUE(cone_membership(tm.index(), t.g, 0.0, 1, 0.5).member);
  EXPECT_TRUE(cone_membership(tm.index(), tm.indicator(Word{1}), 0.0, 1, 0.5).member);
  EXPECT_TRUE(cone_membership(tm.index(), tm.indicator(Word{1, 0}), 0.0, 2, 0.5).member);
  Vector neg = tm.ones();
  neg[2] = -0.1;
  auto r = cone_membership(tm.index(), neg, 10.0, 1, 0.5);
  EXPECT_FALSE(r.member);
  EXPECT_EQ(r.reason, "negative entry");
  // Ratio e between the 2-cylinders [10] and [11] needs c >= 1/theta = 2.
  Vector f = tm.ones();
  const auto i = *tm.index().find(Word{1, 1, 0});
  const auto j = *tm.index().find(Word{1, 1, 1});
  f[static_cast<Eigen::Index>(i)] = f[static_cast<Eigen::Index>(j)] = std::exp(1.0);
  auto bad = cone_membership(tm.index(), f, 1.9, 1, 0.5);
  EXPECT_FALSE(bad.member);
  ASSERT_TRUE(bad.worst_pair.has_value());
  EXPECT_TRUE(bad.worst_pair->first == i || bad.worst_pair->first == j);
  EXPECT_TRUE(cone_membership(tm.index(), f, 2.0 + 1e-9, 1, 0.5).member);
}

TEST(Cone, OperatorPreservesCone) {
  std::mt19937_64 rng(5);
  auto r = fx::random5();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::map<Word, double> w;
  for (const Word& x : admissible_words(*r.ts, 3)) w[x] = u(rng);
  auto phi = Potential::table(r.ts, 3, w);
  const std::size_t k = 1;
  const double theta = phi.theta();
  const double c1 = seminorm_bound(phi, k + 1, 6).hi * theta / (1 - theta);
  TransferMatrix tm(r.ts, phi, 5);
  Vector f = tm.ones();
  for (int j = 0; j < 12; ++j) {
    f = tm.apply(f);
    f /= f.maxCoeff();
    for (double c : {c1, 2 * c1}) EXPECT_TRUE(cone_membership(tm.index(), f, c, k, theta).member) << j;
  }
}

TEST(Gibbs, FullShiftRatiosAreOne) {
  auto f1 = fx::f1();
  auto phi = fx::zero(f1);
  TransferMatrix tm(f1, phi, 1);
  auto t = rpf_triplet(tm);
  auto rep = gibbs_check(*f1, [&](WordView w) { return cylinder_mu(tm, phi, t, w); }, phi,
                         std::log(2.0), 1, 8);
  EXPECT_NEAR(rep.c, 1.0, 1e-12);
  EXPECT_TRUE(rep.stable);
}

TEST(Gibbs, GoldenStableProductGrows) {
  auto f2 = fx::f2();
  auto phi = fx::zero(f2);
  TransferMatrix tm(f2, phi, 1);
  auto t = rpf_triplet(tm);
  const double P = std::log(fx::golden);
  auto rep = gibbs_check(*f2, [&](WordView w) { return cylinder_mu(tm, phi, t, w); }, phi, P, 1, 12);
  // Closed form: mu[w] = h(w_0) nu(w_{n-1}) lambda^{1-n}, so the ratio only
  // sees the end symbols.
  EXPECT_TRUE(rep.stable);
  EXPECT_LT(rep.c, 10.0);
  for (std::size_t i = 3; i < rep.depths.size(); ++i) {
    EXPECT_NEAR(rep.depths[i].c_max, rep.depths[2].c_max, 1e-9);
    EXPECT_NEAR(rep.depths[i].c_min, rep.depths[2].c_min, 1e-9);
  }
  auto product = gibbs_check(*f2, [](WordView w) { return std::pow(0.5, static_cast<double>(w.size())); },
                             phi, P, 1, 12);
  EXPECT_FALSE(product.stable);
  EXPECT_GT(product.growth, 2.0);
}

TEST(LasotaYorke, GoldenInsideFullShift) {
  auto f1 = fx::f1();
  auto f2 = fx::f2_in(f1);
  auto phi = fx::zero(f1);
  const std::size_t D = 10;
  TransferMatrix tm(f2, phi, D, f1);
  TransferMatrix tm0(f1, phi, 1);
  auto t0 = rpf_triplet(tm0);
  std::mt19937_64 rng(11);
  // f(w) = sum_j theta^j xi_j(w_j) with random xi.
  auto source = [&](std::size_t) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::array<double, 2>> xi(D);
    for (auto& x : xi) x = {u(rng), u(rng)};
    Vector f(static_cast<Eigen::Index>(tm.size()));
    for (std::size_t i = 0; i < tm.size(); ++i) {
      const WordView w = tm.word(i);
      double v = 0.0;
      for (std::size_t j = 0; j < D; ++j) v += std::pow(0.5, static_cast<double>(j)) * xi[j][w[j]];
      f[static_cast<Eigen::Index>(i)] = v;
    }
    return f;
  };
  auto rep = lasota_yorke_check(tm, phi, tm0, phi, t0, 3, source, 1, 1, 8, 5);
  EXPECT_TRUE(rep.dominated);
  EXPECT_TRUE(rep.holds);
  EXPECT_LE(rep.max_slope, std::log(0.5) + 0.05);
  // Seminorm ratio per step matches (theta * golden / 2) up to slack.
  EXPECT_LT(rep.max_slope, std::log(0.5 * fx::golden / 2.0) + 0.05);
}

TEST(LasotaYorke, DominationViolated) {
  auto f1 = fx::f1();
  auto f2 = fx::f2_in(f1);
  TransferMatrix tm(f2, Potential::constant(f1, 0.1), 2, f1);
  TransferMatrix tm0(f1, fx::zero(f1), 1);
  auto t0 = rpf_triplet(tm0);
  EXPECT_THROW(lasota_yorke_check(tm, Potential::constant(f1, 0.1), tm0, fx::zero(f1), t0, 1,
                                  [&](std::size_t) { return tm.ones(); }, 1, 1, 4, 2),
               Error);
}

TEST(SmallEigenfunction, GoldenCaseOne) {
  auto f2 = fx::f2();
  auto phi = fx::zero(f2);
  TransferMatrix tm(f2, phi, 1);
  auto t = rpf_triplet(tm);
  std::mt19937_64 rng(3);
  const auto words = admissible_words(*f2, 8);
  const std::vector<Word> cycles{{1}, {0, 1}, {1, 0}, {1, 1, 0}, {0, 1, 1, 1}};
  std::vector<PeriodicPoint> pts;
  while (pts.size() < 50) {
    const Word& w = words[rng() % words.size()];
    Word pre(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(rng() % 9));
    PeriodicPoint pt{pre, cycles[rng() % cycles.size()]};
    if (cylinder_nonempty(*f2, pt.prefix(pre.size() + 2 * pt.cycle.size() + 1))) pts.push_back(pt);
  }
  auto ef = small_eigenfunction(tm, phi, t, Complex(0.3, 0.0), 2, pts);
  EXPECT_EQ(ef.construction, "case I");
  EXPECT_EQ(ef.residuals.size(), 50u);
  EXPECT_LT(ef.max_residual, 1e-8);
  EXPECT_LE(ef.max_residual, ef.tail_bound + 1e-14);
  EXPECT_GT(std::abs(ef.base_value), 0.1);
  EXPECT_GT(ef.max_value, 0.1);
  // Complex p inside the disc works the same way.
  auto ec = small_eigenfunction(tm, phi, t, Complex(0.2, 0.5), 3, pts);
  EXPECT_LT(ec.max_residual, 1e-8);
}

TEST(SmallEigenfunction, Preconditions) {
  auto f2 = fx::f2();
  auto phi = fx::zero(f2);
  TransferMatrix tm(f2, phi, 1);
  auto t = rpf_triplet(tm);
  EXPECT_THROW(small_eigenfunction(tm, phi, t, Complex(0.0, 0.0), 2, {}), Error);
  EXPECT_THROW(small_eigenfunction(tm, phi, t, Complex(0.81, 0.0), 2, {}), Error);
  EXPECT_NO_THROW(small_eigenfunction(tm, phi, t, Complex(0.8, 0.0), 2, {}));
}

TEST(SmallEigenfunction, PeriodTwoCaseTwo) {
  auto f1 = fx::f1();
  auto f3 = with_hole(f1, {{0, 0}, {1, 1}});
  auto phi = fx::zero(f1);
  TransferMatrix tm(f3, phi, 1, f1);
  auto t = rpf_triplet(tm);
  ASSERT_NEAR(t.lambda, 1.0, 1e-12);
  std::vector<PeriodicPoint> pts{{{}, {0, 1}}, {{0, 0}, {1}}, {{0}, {0, 1, 1}}, {{1, 0, 0}, {1, 0}},
                                 {{0, 0, 1, 0, 1}, {0}}};
  auto ef = small_eigenfunction(tm, phi, t, Complex(0.25, 0.1), 2, pts);
  EXPECT_EQ(ef.construction, "case II");
  EXPECT_LT(ef.max_residual, 1e-12);
  EXPECT_GT(std::abs(ef.base_value), 0.5);
}
