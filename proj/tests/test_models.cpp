#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fastlim/equilibria.hpp"
#include "fastlim/models.hpp"
#include "fastlim/params.hpp"
#include "fastlim/run.hpp"
#include "support.hpp"

using namespace fastlim;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

SystemState random_state(SystemKind k, const Grid& g, std::mt19937_64& rng, double lo = 0.2, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Field> f;
  for (std::size_t s = 0; s < species_count(k); ++s) {
    Field x(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) x[i] = u(rng);
    f.push_back(std::move(x));
  }
  return {k, std::move(f)};
}

}  // namespace

TEST(Params, NondimensionalGroups) {
  DimensionalParams p;
  p.gamma = 2.0;
  p.alpha = 1.0;
  p.K = 4.0;
  EXPECT_DOUBLE_EQ(nondimensionalize(p, 1.0).b, 0.5);

  DimensionalParams p2;
  p2.r = 3.0;
  p2.Gamma = 3.0;
  p2.d1 = 3.0 * 2.0 * 2.0;
  const auto q = nondimensionalize(p2, 2.0);
  EXPECT_DOUBLE_EQ(q.q, 1.0);
  EXPECT_DOUBLE_EQ(q.D1, 1.0);
}

TEST(Params, RejectsNonPositive) {
  DimensionalParams p;
  p.d2_handle = -0.1;
  try {
    validate(p);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("d2_2"), std::string::npos);
  }
  DimensionlessParams q;
  q.e = 0.0;
  EXPECT_THROW(validate(q), InvalidArgument);
}

TEST(Models, SpeciesLayout) {
  EXPECT_EQ(species_count(SystemKind::Micro5), 5u);
  EXPECT_EQ(species_count(SystemKind::Meso4), 4u);
  EXPECT_EQ(species_count(SystemKind::Macro3), 3u);
  EXPECT_EQ(species_names(SystemKind::Micro5)[3], "Ts");
  const Grid g = build_grid(1, {4}, {1.0});
  EXPECT_THROW(SystemState(SystemKind::Meso4, {Field(4), Field(4), Field(4)}), InvalidArgument);
  EXPECT_THROW(SystemState::constant(SystemKind::Macro3, g, {1.0, 2.0}), InvalidArgument);
}

TEST(Micro5, PreyLossAtCarryingCapacity) {
  DimensionalParams p;
  p.K = 3.0;
  p.alpha = 0.7;
  const Grid g = build_grid(1, {5}, {1.0});
  const auto st = SystemState::constant(SystemKind::Micro5, g, {p.K, 1.0, 1.0, 0.0, 0.0});
  const auto r = rhs_micro5(st, p, g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(r[0][i], -p.alpha * p.K, 1e-14);
}

TEST(Micro5, SwitchingBracketsCancelInSums) {
  std::mt19937_64 rng(21);
  const Grid g = build_grid(1, {16}, {1.0});
  for (int trial = 0; trial < 20; ++trial) {
    DimensionalParams p = oracle::random_dimensional(rng);
    const auto st = random_state(SystemKind::Micro5, g, rng);
    p.delta = 1.0;
    p.epsilon = 1.0;
    const auto r1 = reaction_micro5(st, p);
    p.delta = 1e-6;
    p.epsilon = 1e-7;
    const auto r2 = reaction_micro5(st, p);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto loc = micro5_local(p, st[0][i], st[1][i], st[2][i], st[3][i], st[4][i]);
      // the sums of the slow parts are independent of the switching rates
      EXPECT_EQ(r1[0][i], r2[0][i]);
      EXPECT_NEAR(r2[1][i] + r2[2][i], loc.slow[1] + loc.slow[2], 1e-8 * std::abs(loc.meso_switch / p.delta) + 1e-12);
      EXPECT_NEAR(r1[1][i] + r1[2][i], loc.slow[1] + loc.slow[2], 1e-13 * (1.0 + std::abs(loc.meso_switch)));
      EXPECT_NEAR(r1[3][i] + r1[4][i], loc.slow[3] + loc.slow[4], 1e-13 * (1.0 + std::abs(loc.top_switch)));
    }
  }
}

TEST(Micro5, TopConstraintManifoldHasNoFastTerm) {
  DimensionalParams p;
  p.beta = 0.8;
  p.eta = 1.3;
  const double Ms = 0.7, Mh = 0.4, Ts = 0.9;
  const double Th = p.beta * (Ms + Mh) * Ts / p.eta;
  EXPECT_NEAR(micro5_local(p, 1.0, Ms, Mh, Ts, Th).top_switch, 0.0, 1e-15);
}

TEST(Micro5, DiffusionOnlyInRhsWhenInhomogeneous) {
  std::mt19937_64 rng(4);
  const DimensionalParams p = oracle::random_dimensional(rng);
  const Grid g = build_grid(2, {6, 5}, {1.0, 1.0});
  const auto st = random_state(SystemKind::Micro5, g, rng);
  auto r = reaction_micro5(st, p);
  r += diffusion_micro5(st, p, g);
  EXPECT_EQ(r, rhs_micro5(st, p, g));
  const auto homog = SystemState::constant(SystemKind::Micro5, g, {1.0, 0.5, 0.5, 0.2, 0.3});
  EXPECT_EQ(rhs_micro5(homog, p, g), reaction_micro5(homog, p));
}

TEST(Meso4, EqualTopDiffusivitiesGiveLinearDiffusion) {
  std::mt19937_64 rng(8);
  DimensionalParams p = oracle::random_dimensional(rng);
  p.d3_handle = p.d3_search;
  const Grid g = build_grid(1, {24}, {1.0});
  const auto st = random_state(SystemKind::Meso4, g, rng);
  const auto d = diffusion_meso4(st, p, g);
  const Field expect = p.d3_search * laplacian(st[3], g);
  EXPECT_LT((d[3] - expect).max_abs(), 1e-12 * (1.0 + expect.max_abs()));
}

TEST(Meso4, NoTopPredatorStaysAbsent) {
  std::mt19937_64 rng(12);
  const DimensionalParams p = oracle::random_dimensional(rng);
  const Grid g = build_grid(1, {10}, {1.0});
  auto st = random_state(SystemKind::Meso4, g, rng);
  st[3] = Field(g.size(), 0.0);
  for (auto uptake : {PreyUptake::SearchingOnly, PreyUptake::PrintedSaturating}) {
    EXPECT_EQ(rhs_meso4(st, p, g, {uptake})[3].max_abs(), 0.0);
  }
}

TEST(Meso4, UptakeFormsAgreeOnFastManifold) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const DimensionalParams p = oracle::random_dimensional(rng);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    const auto x = split_along_constraints(p, {u(rng), u(rng), u(rng)}, SystemKind::Meso4);
    const auto a = meso4_local(p, x[0], x[1], x[2], x[3], {PreyUptake::SearchingOnly});
    const auto b = meso4_local(p, x[0], x[1], x[2], x[3], {PreyUptake::PrintedSaturating});
    EXPECT_NEAR(a.meso_switch, 0.0, 1e-13);
    EXPECT_LT(rel_err(a.slow[0], b.slow[0]), 1e-13);
  }
}

TEST(Meso4, AggregatesToMacro3OnFastManifold) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const DimensionalParams p = oracle::random_dimensional(rng);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    const std::array<double, 3> pmt{u(rng), u(rng), u(rng)};
    const auto x = split_along_constraints(p, pmt, SystemKind::Meso4);
    const auto meso = meso4_local(p, x[0], x[1], x[2], x[3]);
    const auto macro = macro3_local(p, pmt[0], pmt[1], pmt[2]);
    EXPECT_LT(rel_err(meso.slow[0], macro[0]), 1e-13);
    EXPECT_LT(rel_err(meso.slow[1] + meso.slow[2], macro[1]), 1e-13);
    EXPECT_LT(rel_err(meso.slow[3], macro[2]), 1e-13);
  }
}

TEST(Macro3, EqualDiffusivitiesGiveLinearDiffusion) {
  std::mt19937_64 rng(16);
  DimensionalParams p = oracle::random_dimensional(rng);
  p.d2_handle = p.d2_search;
  p.d3_handle = p.d3_search;
  const Grid g = build_grid(2, {8, 8}, {1.0, 1.0});
  const auto st = random_state(SystemKind::Macro3, g, rng);
  const auto d = diffusion_macro3(st, p, g);
  EXPECT_LT((d[1] - p.d2_search * laplacian(st[1], g)).max_abs(), 1e-11);
  EXPECT_LT((d[2] - p.d3_search * laplacian(st[2], g)).max_abs(), 1e-11);
}

TEST(Macro3, InteriorEquilibriumIsSteady) {
  DimensionalParams p;
  p.mu = 0.2;
  p.K = 2.0;
  const Grid g = build_grid(1, {8}, {1.0});
  const auto e = dimensional_interior_equilibrium(p, 1.0);
  const auto st = SystemState::constant(SystemKind::Macro3, g, {e[0], e[1], e[2]});
  EXPECT_LT(rhs_macro3(st, p, g).max_abs(), 1e-10);
}

TEST(Macro3, TopPredatorAbsentStaysAbsent) {
  const DimensionalParams p;
  const Grid g = build_grid(1, {8}, {1.0});
  const auto st = SystemState::constant(SystemKind::Macro3, g, {0.4, 0.9, 0.0});
  EXPECT_EQ(rhs_macro3(st, p, g)[2].max_abs(), 0.0);
}

TEST(Macro3, VanishingMesoDensityIsReported) {
  const DimensionalParams p;
  const Grid g = build_grid(1, {8}, {1.0});
  const auto st = SystemState::constant(SystemKind::Macro3, g, {0.4, 0.0, 0.3});
  EXPECT_THROW(reaction_macro3(st, p), DivisionByVanishingDenominator);
}

TEST(Dimensionless, PreyRowAtFullPrey) {
  DimensionlessParams p;
  p.b = 0.3;
  const auto r = macro3_dimless_local(p, 1.0, 0.7, 0.0);
  EXPECT_NEAR(r[0], -0.7 / 1.3, 1e-15);
}

TEST(Dimensionless, InteriorEquilibriumIsSteady) {
  DimensionlessParams p;
  p.d = 0.3;
  p.b = 0.5;
  const auto e = interior_equilibrium(p).point;
  const Grid g = build_grid(1, {6}, {1.0});
  const auto st = SystemState::constant(SystemKind::Macro3Dimless, g, {e.u, e.v, e.w});
  EXPECT_LT(rhs_macro3_dimless(st, p, g).max_abs(), 1e-10);
}

TEST(Dimensionless, ScalingMatchesDimensionalReaction) {
  std::mt19937_64 rng(99);
  const Grid g = build_grid(1, {1 + 99 + 1}, {1.0});
  for (int trial = 0; trial < 10; ++trial) {
    const DimensionalParams p = oracle::random_dimensional(rng, 0.2, 5.0);
    const auto q = nondimensionalize(p, 1.0);
    const auto sc = density_scales(p);
    const auto st = random_state(SystemKind::Macro3, g, rng, 0.05, 4.0);
    const auto back = to_dimensional(to_dimensionless(st, p), p);
    const auto rd = reaction_macro3(st, p);
    const auto rn = reaction_macro3_dimless(to_dimensionless(st, p), q);
    const double scale[] = {sc.prey, sc.meso, sc.top};
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_LT(rel_err(back[s][i], st[s][i]), 1e-14);
        // time is scaled by r: d(x / scale)/d(r t)
        EXPECT_LT(rel_err(rd[s][i] / (scale[s] * p.r), rn[s][i]), 1e-9) << "species " << s;
      }
    }
  }
}

TEST(Dimensionless, ScalingMatchesDimensionalDiffusion) {
  std::mt19937_64 rng(98);
  const double L = 2.5;
  const Grid gd = build_grid(1, {40}, {L});
  const Grid gn = build_grid(1, {40}, {1.0});
  for (int trial = 0; trial < 5; ++trial) {
    const DimensionalParams p = oracle::random_dimensional(rng, 0.2, 5.0);
    const auto q = nondimensionalize(p, L);
    const auto sc = density_scales(p);
    const auto st = random_state(SystemKind::Macro3, gd, rng, 0.05, 4.0);
    const auto dd = diffusion_macro3(st, p, gd);
    auto dimless = to_dimensionless(st, p);
    const auto dn = diffusion_macro3_dimless(dimless, q, gn);
    const double scale[] = {sc.prey, sc.meso, sc.top};
    for (std::size_t s = 0; s < 3; ++s) {
      const double ref = dn[s].max_abs();
      for (std::size_t i = 0; i < gd.size(); ++i) {
        EXPECT_NEAR(dd[s][i] / (scale[s] * p.r), dn[s][i], 1e-9 * (1.0 + ref));
      }
    }
  }
}

TEST(Aggregation, SumsFastPairs) {
  std::mt19937_64 rng(30);
  const Grid g = build_grid(1, {7}, {1.0});
  const auto micro = random_state(SystemKind::Micro5, g, rng);
  const auto meso = aggregate_top(micro);
  EXPECT_EQ(meso.kind, SystemKind::Meso4);
  EXPECT_EQ(meso[3], micro[3] + micro[4]);
  const auto macro = aggregate_meso(meso);
  EXPECT_EQ(macro[1], micro[1] + micro[2]);
  EXPECT_EQ(macro[0], micro[0]);
  EXPECT_THROW(aggregate_meso(micro), InvalidArgument);
}
