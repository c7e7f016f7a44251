#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fastlim/limits.hpp"

using namespace fastlim;

namespace {

const Grid kUnit = build_grid(1, {10}, {1.0});

SystemState cosine_micro(const Grid& g) {
  const double pi = std::numbers::pi;
  auto st = SystemState::constant(SystemKind::Micro5, g, {1.0, 1.0, 1.0, 0.5, 0.5});
  st[0] = sample(g, [&](double x, double) { return 1.0 + 0.5 * std::cos(pi * x); });
  st[3] = sample(g, [&](double x, double) { return 0.5 + 0.25 * std::cos(2 * pi * x); });
  return st;
}

DimensionalParams generic() {
  DimensionalParams p;
  p.K = 2.0;
  return p;
}

}  // namespace

TEST(ConstraintResidual, EpsExamples) {
  DimensionalParams p;
  p.beta = 0.6;
  p.eta = 1.7;
  auto st = SystemState::constant(SystemKind::Micro5, kUnit, {1.0, 0.3, 0.9, 0.8, 0.0});
  st[4] = Field(kUnit.size(), p.beta * 1.2 * 0.8 / p.eta);
  EXPECT_NEAR(constraint_residual_eps(st, p, kUnit), 0.0, 1e-15);

  const auto no_top = SystemState::constant(SystemKind::Micro5, kUnit, {1.0, 0.3, 0.9, 0.0, 0.0});
  EXPECT_EQ(constraint_residual_eps(no_top, p, kUnit), 0.0);

  const DimensionalParams unit;
  const auto hand = SystemState::constant(SystemKind::Micro5, kUnit, {1.0, 1.0, 1.0, 1.0, 0.0});
  EXPECT_NEAR(constraint_residual_eps(hand, unit, kUnit), 2.0, 1e-14);
}

TEST(ConstraintResidual, DeltaExamples) {
  DimensionalParams p;
  p.alpha = 1.4;
  p.gamma = 0.6;
  p.c = 0.3;
  const double P = 0.7, Ms = 0.5, T = 0.4;
  const double Mh = p.alpha * P * Ms / (p.gamma * (1.0 + p.c * T));
  const auto on = SystemState::constant(SystemKind::Meso4, kUnit, {P, Ms, Mh, T});
  EXPECT_NEAR(constraint_residual_delta(on, p, kUnit), 0.0, 1e-15);

  const auto empty = SystemState::constant(SystemKind::Meso4, kUnit, {0.0, 0.5, 0.0, 0.4});
  EXPECT_EQ(constraint_residual_delta(empty, p, kUnit), 0.0);

  const DimensionalParams unit;
  const auto hand = SystemState::constant(SystemKind::Meso4, kUnit, {1.0, 1.0, 0.0, 0.0});
  EXPECT_NEAR(constraint_residual_delta(hand, unit, kUnit), 1.0, 1e-14);
}

TEST(FitOrder, PowerLaws) {
  const std::vector<double> xs{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  std::vector<double> lin, root;
  for (double x : xs) {
    lin.push_back(x);
    root.push_back(std::sqrt(x));
  }
  EXPECT_NEAR(fit_order(xs, lin).order, 1.0, 1e-12);
  EXPECT_NEAR(fit_order(xs, root).order, 0.5, 1e-12);
}

TEST(FitOrder, NoisyPowerLaw) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> xs, ys;
  for (int i = 0; i <= 10; ++i) {
    const double x = std::pow(10.0, -1.0 - 0.1 * i);
    xs.push_back(x);
    ys.push_back(3.0 * std::pow(x, 0.7) * (1.0 + noise(rng)));
  }
  EXPECT_NEAR(fit_order(xs, ys).order, 0.7, 0.05);
}

TEST(FitOrder, DropsZerosAndValidates) {
  const std::vector<double> xs{1.0, 0.5, 0.25};
  const std::vector<double> ys{1.0, 0.0, 0.25};
  const auto f = fit_order(xs, ys);
  EXPECT_EQ(f.used, 2);
  EXPECT_EQ(f.dropped, 1);
  EXPECT_NEAR(f.order, 1.0, 1e-12);

  const std::vector<double> one{1.0};
  EXPECT_THROW(fit_order(one, one), InvalidArgument);
  const std::vector<double> up{0.1, 0.2};
  EXPECT_THROW(fit_order(up, up), InvalidArgument);
  const std::vector<double> zeros{0.0, 0.0};
  const std::vector<double> two{1.0, 0.5};
  EXPECT_THROW(fit_order(two, zeros), InvalidArgument);
}

TEST(EpsilonSweep, RejectsRepeatedValues) {
  const Grid g = build_grid(1, {16}, {1.0});
  const std::vector<double> eps{1e-2, 1e-2};
  StepPolicy pol;
  pol.t_end = 0.01;
  EXPECT_THROW(run_epsilon_sweep(generic(), eps, cosine_micro(g), g, pol), InvalidArgument);
}

TEST(EpsilonSweep, RequiresPositiveMesoData) {
  const Grid g = build_grid(1, {16}, {1.0});
  auto ic = cosine_micro(g);
  ic[1] = Field(g.size(), 0.0);
  const std::vector<double> eps{1e-1, 1e-2};
  EXPECT_THROW(run_epsilon_sweep(generic(), eps, ic, g, StepPolicy{}), InvalidArgument);
}

TEST(EpsilonSweep, SmallSweepConverges) {
  const Grid g = build_grid(1, {24}, {1.0});
  StepPolicy pol;
  pol.t_end = 0.1;
  pol.snapshots = 20;
  const std::vector<double> eps{1e-1, 1e-2, 1e-3};
  for (bool parallel : {true, false}) {
    const auto r = run_epsilon_sweep(generic(), eps, cosine_micro(g), g, pol, {parallel});
    ASSERT_EQ(r.table.values.size(), 3u);
    for (std::size_t i = 1; i < 3; ++i) {
      EXPECT_LT(r.table.constraint_l1[i], r.table.constraint_l1[i - 1]);
      EXPECT_LT(r.table.state_gap[i], r.table.state_gap[i - 1]);
    }
    ASSERT_TRUE(r.table.fitted_order_constraint);
    ASSERT_TRUE(r.table.fitted_order_gap);
    EXPECT_GT(*r.table.fitted_order_constraint, 0.45);
    for (const auto& d : r.runs) {
      EXPECT_GT(d.min_meso, 1e-4);
      EXPECT_LE(d.prey_growth_ratio, 1.0 + 1e-6);
      EXPECT_GT(d.top_handle_l2, 0.0);
    }
  }
}

TEST(EpsilonSweep, SerialAndParallelAgree) {
  const Grid g = build_grid(1, {16}, {1.0});
  StepPolicy pol;
  pol.t_end = 0.05;
  const std::vector<double> eps{1e-1, 1e-2};
  const auto a = run_epsilon_sweep(generic(), eps, cosine_micro(g), g, pol, {true});
  const auto b = run_epsilon_sweep(generic(), eps, cosine_micro(g), g, pol, {false});
  EXPECT_EQ(a.table.constraint_l1, b.table.constraint_l1);
  EXPECT_EQ(a.table.state_gap, b.table.state_gap);
}

TEST(DeltaSweep, SingleValueHasNoFit) {
  const Grid g = build_grid(1, {16}, {1.0});
  StepPolicy pol;
  pol.t_end = 0.05;
  const auto ic = aggregate_top(cosine_micro(g));
  const std::vector<double> delta{1e-2};
  const auto r = run_delta_sweep(generic(), delta, ic, g, pol);
  EXPECT_EQ(r.table.values.size(), 1u);
  EXPECT_FALSE(r.table.fitted_order_constraint);
  EXPECT_FALSE(r.table.fitted_order_gap);
}

TEST(DeltaSweep, SmallSweepConverges) {
  const Grid g = build_grid(1, {24}, {1.0});
  StepPolicy pol;
  pol.t_end = 0.1;
  const auto ic = aggregate_top(cosine_micro(g));
  const std::vector<double> delta{1e-1, 1e-2, 1e-3};
  const auto r = run_delta_sweep(generic(), delta, ic, g, pol);
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_LT(r.table.constraint_l1[i], r.table.constraint_l1[i - 1]);
    EXPECT_LT(r.table.state_gap[i], r.table.state_gap[i - 1]);
  }
  EXPECT_GT(r.reference.min_meso, 0.0);
}
