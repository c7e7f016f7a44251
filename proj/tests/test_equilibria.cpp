#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fastlim/equilibria.hpp"
#include "support.hpp"

using namespace fastlim;

namespace {

DimensionlessParams with_db(double d, double b) {
  DimensionlessParams p;
  p.d = d;
  p.b = b;
  return p;
}

}  // namespace

TEST(BoundaryEquilibrium, ClosedForm) {
  const auto e = boundary_equilibrium(with_db(0.2, 1.0));
  ASSERT_TRUE(e);
  EXPECT_NEAR(e->u, 0.25, 1e-15);
  EXPECT_NEAR(e->v, 0.9375, 1e-15);
  EXPECT_EQ(e->w, 0.0);
}

TEST(BoundaryEquilibrium, AbsentOnExistenceBoundary) {
  EXPECT_FALSE(boundary_equilibrium(with_db(0.5, 1.0)));
  EXPECT_FALSE(boundary_equilibrium(with_db(0.9, 1.0)));
}

TEST(BoundaryEquilibrium, ZeroResidual) {
  std::mt19937_64 rng(1);
  int found = 0;
  for (int i = 0; i < 500; ++i) {
    const auto p = oracle::random_dimensionless(rng);
    if (const auto e = boundary_equilibrium(p)) {
      ++found;
      const auto r = equilibrium_residual(p, *e);
      EXPECT_LT(residual_inf(r), 1e-12);
    }
  }
  EXPECT_GT(found, 20);
}

TEST(Residual, HandEvaluatedPoint) {
  const DimensionlessParams p;
  const auto r = equilibrium_residual(p, {1.0, 1.0, 1.0});
  EXPECT_NEAR(r[0], -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r[1], 1.0 / 3.0 - 1.0 - 0.5, 1e-15);
  EXPECT_NEAR(r[2], 0.0, 1e-15);
}

TEST(Residual, RequiresPositiveMeso) {
  EXPECT_THROW(equilibrium_residual(DimensionlessParams{}, {0.5, 0.0, 0.0}), InvalidArgument);
}

TEST(InteriorEquilibrium, CertifiedOnRandomSets) {
  std::mt19937_64 rng(2);
  int found = 0;
  for (int i = 0; i < 400; ++i) {
    const auto p = oracle::random_dimensionless(rng);
    const bool expected = p.d * (1.0 + p.b) < 1.0;
    try {
      const auto e = interior_equilibrium(p);
      EXPECT_TRUE(expected);
      ++found;
      EXPECT_LT(residual_inf(e.residual), kEquilibriumResidualTol);
      EXPECT_GT(e.point.u, 0.0);
      EXPECT_LT(e.point.u, 1.0);
      EXPECT_EQ(e.point.v, e.point.w);
      ASSERT_FALSE(e.all.empty());
      EXPECT_EQ(e.all.front().u, e.point.u);
      for (std::size_t k = 1; k < e.all.size(); ++k) EXPECT_LT(e.all[k - 1].u, e.all[k].u);
      for (const auto& x : e.all) EXPECT_LT(residual_inf(equilibrium_residual(p, x)), kEquilibriumResidualTol);
    } catch (const NoInteriorEquilibrium&) {
      EXPECT_FALSE(expected);
    }
  }
  EXPECT_GT(found, 50);
}

TEST(InteriorEquilibrium, NoSwitchingLimitMatchesBoundaryPrey) {
  for (double d : {0.1, 0.3, 0.45}) {
    for (double b : {0.2, 1.0}) {
      DimensionlessParams p = with_db(d, b);
      p.c = 1e-12;
      p.e = 1e-12;
      if (!(d * (1.0 + b) < 1.0)) continue;
      const auto e = interior_equilibrium(p);
      EXPECT_NEAR(e.point.u, d * b / (1.0 - d), 1e-6);
    }
  }
}

TEST(InteriorEquilibrium, AbsentWhenPredatorCannotPersist) {
  std::mt19937_64 rng(3);
  int checked = 0;
  while (checked < 50) {
    DimensionlessParams p = oracle::random_dimensionless(rng);
    p.e = oracle::log_uniform(rng, 1e-4, 1e-2);
    p.c = oracle::log_uniform(rng, 1e-4, 1e-2);
    if (p.d * (1.0 + p.b) < 1.0) continue;
    ++checked;
    EXPECT_THROW(interior_equilibrium(p), NoInteriorEquilibrium);
    EXPECT_TRUE(oracle::brute_force_interior_u(p, 100000).empty());
  }
}

TEST(InteriorEquilibrium, MatchesBruteForceScan) {
  std::mt19937_64 rng(4);
  int checked = 0;
  while (checked < 20) {
    const auto p = oracle::random_dimensionless(rng);
    if (!(p.d * (1.0 + p.b) < 1.0)) continue;
    ++checked;
    const auto e = interior_equilibrium(p);
    const auto roots = oracle::brute_force_interior_u(p, 1000000);
    ASSERT_EQ(roots.size(), e.all.size());
    for (std::size_t k = 0; k < roots.size(); ++k) EXPECT_NEAR(roots[k], e.all[k].u, 1e-6);
  }
}

TEST(InteriorEquilibrium, ScanFindsEachBracket) {
  DimensionlessParams p = with_db(0.3, 0.5);
  const InteriorReduction red(p);
  const auto br = scan_brackets(red, 64);
  ASSERT_EQ(br.size(), 1u);
  EXPECT_LT(red.F(br[0][0]) * red.F(br[0][1]), 0.0);
  const double u = detail::refine_root(red, br[0][0], br[0][1]);
  EXPECT_LT(std::abs(red.F(u)), 1e-13);
}

TEST(InteriorEquilibrium, AnalyticDerivativeOfReduction) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = oracle::random_dimensionless(rng);
    const InteriorReduction red(p);
    std::uniform_real_distribution<double> pick(red.lower() + 0.05 * (1.0 - red.lower()), 0.95);
    const double u = pick(rng);
    const double h = 1e-4 * (u - red.lower());
    auto central = [&](double k) { return (red.F(u + k) - red.F(u - k)) / (2.0 * k); };
    const double fd = (4.0 * central(h / 2) - central(h)) / 3.0;
    EXPECT_NEAR(red.dF(u), fd, 1e-6 * (1.0 + std::abs(fd)));
  }
}

TEST(FindEquilibria, ReportsBoth) {
  const auto r = find_equilibria(with_db(0.3, 0.5));
  EXPECT_TRUE(r.e1_exists_condition);
  ASSERT_TRUE(r.e1);
  ASSERT_TRUE(r.estar);
  EXPECT_EQ(r.bracket_count, static_cast<int>(r.estar_all.size()));
  const auto none = find_equilibria(with_db(0.9, 0.5));
  EXPECT_FALSE(none.e1);
  EXPECT_FALSE(none.estar);
}
