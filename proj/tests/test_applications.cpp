#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "fixtures.hpp"
#include "ruelle/applications.hpp"
#include "ruelle/error.hpp"

using namespace ruelle;

namespace {

RenewalSpec quarter(std::size_t n) {
  RenewalSpec s;
  s.a = [](std::size_t i) { return std::pow(4.0, -static_cast<double>(i)); };
  s.b = s.a;
  s.tail_sum = [](std::size_t i) { return std::pow(4.0, -static_cast<double>(i)) / 3.0; };
  s.truncation = n;
  return s;
}

GifsSpec ratios(std::vector<double> r) {
  GifsSpec g;
  for (double x : r) g.edges.push_back({0, 0, x, ""});
  return g;
}

double dense_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) best = std::max(best, std::abs(es.eigenvalues()[i]));
  return best;
}

}  // namespace

TEST(Renewal, ScalarRootMatchesMatrix) {
  const auto r = renewal_analysis(quarter(20));
  // Independent scalar evaluation of the truncated renewal sum at lambda.
  double s = 0.0;
  for (int i = 1; i <= 20; ++i) s += std::pow(4.0, -i * (i + 1) / 2.0) * std::pow(r.triplet.lambda, -i);
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_LT(r.matrix_gap, 1e-12);
  EXPECT_LT(r.truncation_bound, 1e-10);
  EXPECT_LT(r.cohomology_residual, 1e-8);
  EXPECT_LT(r.triplet.residual_right, 1e-10);
}

TEST(Renewal, PrintedKernelIsColumnStochastic) {
  const auto r = renewal_analysis(quarter(30));
  EXPECT_GT(r.row_defect, 0.5);
  EXPECT_LT(r.column_defect, 1e-12);
  EXPECT_EQ(r.row_sums.size(), 30u);
  EXPECT_GT(r.row_sums[0], 1.0);
  EXPECT_NEAR(r.row_sums[29], r.kernel(29, 0), 1e-300);
}

TEST(Renewal, Preconditions) {
  EXPECT_THROW(renewal_analysis(quarter(2)), Error);
  RenewalSpec bad = quarter(10);
  bad.tail_sum = nullptr;
  bad.a = [](std::size_t) { return 1.0; };
  try {
    renewal_analysis(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_summable);
  }
  RenewalSpec ratio = quarter(10);
  ratio.tail_sum = nullptr;
  EXPECT_NO_THROW(renewal_analysis(ratio));
}

TEST(Gifs, SelfSimilarTwoMaps) {
  const auto g = gifs_build(ratios({1.0 / 3.0, 1.0 / 3.0}));
  EXPECT_EQ(g.structure->size(), 2u);
  EXPECT_EQ(g.structure->entries().size(), 4u);
  EXPECT_DOUBLE_EQ(g.phi->values()[0], std::log(1.0 / 3.0));
  EXPECT_TRUE(g.affine);
}

TEST(Gifs, TwoVertexAdjacency) {
  GifsSpec s;
  s.vertices = 2;
  s.edges = {{0, 1, 0.5, "a"}, {1, 0, 1.0 / 3.0, "b"}, {1, 1, 0.25, "c"}};
  const auto g = gifs_build(s);
  // t(e) = i(e'): a->b, a->c, b->a, c->b, c->c.
  const std::vector<Edge> want{{0, 1}, {0, 2}, {1, 0}, {2, 1}, {2, 2}};
  EXPECT_EQ(g.structure->entries(), want);
  // Pressure equals the log radius of the r_e^s matrix.
  for (double sv : {0.3, 0.7, 1.2}) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
    const double r[3] = {0.5, 1.0 / 3.0, 0.25};
    for (const auto& [e, f] : want) m(e, f) = std::pow(r[e], sv);
    EXPECT_NEAR(gifs_pressure(g, sv), std::log(dense_radius(m)), 1e-12);
  }
}

TEST(Gifs, Rejections) {
  EXPECT_THROW(gifs_build(ratios({0.5, 1.0})), Error);
  GifsSpec s;
  s.vertices = 2;
  s.edges = {{0, 1, 0.5, ""}, {1, 1, 0.5, ""}};
  EXPECT_THROW(gifs_build(s), Error);
}

TEST(Gifs, NextRatioDepthTwo) {
  GifsSpec s = ratios({0.5, 0.4});
  s.next_ratio = std::vector<std::vector<double>>{{0.5, 0.45}, {0.4, 0.35}};
  s.holder_constant = 0.2;
  const auto g = gifs_build(s);
  EXPECT_FALSE(g.affine);
  EXPECT_EQ(g.phi->depth(), 2u);
  EXPECT_NEAR(g.approximation_error, 0.2 * 0.5, 1e-15);
  s.next_ratio = std::vector<std::vector<double>>{{0.6, 0.45}, {0.4, 0.35}};
  EXPECT_THROW(gifs_build(s), Error);
}

TEST(Bowen, CantorSet) {
  const auto d = bowen_dimension(ratios({1.0 / 3.0, 1.0 / 3.0}));
  EXPECT_NEAR(d.root, std::log(2.0) / std::log(3.0), 1e-8);
  EXPECT_GT(d.pressure_lo, 0.0);
  EXPECT_LT(d.pressure_hi, 0.0);
  EXPECT_TRUE(d.monotone);
  EXPECT_LE(d.iterations, 64u);
}

TEST(Bowen, HalfPairFillsInterval) {
  const auto d = bowen_dimension(ratios({0.5, 0.5}));
  EXPECT_NEAR(d.root, 1.0, 1e-8);
  EXPECT_TRUE(d.monotone);
}

TEST(Bowen, SingleMapIsBoundary) {
  const auto d = bowen_dimension(ratios({0.5}));
  EXPECT_TRUE(d.boundary);
  EXPECT_EQ(d.root, 0.0);
}

TEST(Bowen, MoranEquation) {
  // sum r_i^s = 1 for a one-vertex system.
  const std::vector<double> r{0.5, 0.3, 0.1};
  const auto d = bowen_dimension(ratios(r));
  double s = 0.0;
  for (double x : r) s += std::pow(x, d.root);
  EXPECT_NEAR(s, 1.0, 1e-10);
}

TEST(Bowen, NoSignChangeInRange) {
  GifsSpec s = ratios({0.5, 0.5, 0.5});
  s.s_max = 1.0;
  EXPECT_THROW(bowen_dimension(s), Error);
}

TEST(LocallyConstant, GoldenDepthTwo) {
  const auto ts = fx::f2();
  std::map<Word, double> w{{{0, 1}, 0.3}, {{1, 0}, -0.2}, {{1, 1}, 0.1}};
  const auto phi = Potential::table(ts, 2, w);
  const auto r = locally_constant_analysis(ts, phi, 1, {0.5, 0.25});
  EXPECT_LT(r.refinement_error, 1e-12);
  EXPECT_LT(r.g_seminorm, 1e-10);
  ASSERT_EQ(r.essential_radii.size(), 2u);
  EXPECT_NEAR(r.essential_radii[0], 2.0 * r.essential_radii[1], 1e-15);
  EXPECT_NEAR(r.essential_radii[0], 0.5 * r.lambda, 1e-15);
}

TEST(LocallyConstant, ZeroPotentialPerClass) {
  const auto r = locally_constant_analysis(fx::f3(), fx::zero(fx::f3()), 1, {0.5});
  ASSERT_EQ(r.class_spread.size(), 2u);
  for (double s : r.class_spread) EXPECT_LT(s, 1e-12);
}

TEST(LocallyConstant, RejectsDeepPotential) {
  const auto ts = fx::f1();
  std::map<Word, double> w;
  for (const Word& x : admissible_words(*ts, 3)) w[x] = 0.1 * x[2];
  EXPECT_THROW(locally_constant_analysis(ts, Potential::table(ts, 3, w), 1, {0.5}), Error);
}
