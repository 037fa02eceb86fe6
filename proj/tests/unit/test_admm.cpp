#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "smre/admm.hpp"
#include "smre/error.hpp"

using namespace smre;

namespace {

SignalArray random_signal(const Grid& g, std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  SignalArray s(g, 0.0);
  for (double& x : s.values()) x = n(rng);
  return s;
}

ConstraintSystem interval_system(const Grid& g, int smax, double q) {
  const WindowSystem ws = enumerate(g, 1, smax);
  return ConstraintSystem::windowed(ws, Transform::Identity, q, normalized_coefficients(ws));
}

}  // namespace

TEST(Residual, Examples) {
  const Grid g(1, 4);
  const LinearOperator id = LinearOperator::identity(g);
  const SignalArray y(g, std::vector<double>{1, 2, 3, 4});
  const SignalArray u(g, std::vector<double>{1, 1, 1, 1});
  const SignalArray v = y - u;
  EXPECT_EQ(residual(u, v, u, id, y), 0.0);
  // from zeros with u still zero: r = ||v - Y||
  const SignalArray v1(g, std::vector<double>{0.5, 1, 1, 1});
  EXPECT_NEAR(residual(SignalArray(g), v1, SignalArray(g), id, y), distance(v1, y), 1e-15);
}

TEST(AdmmSolve, ConstantDataGivesFeasibleConstant) {
  const Grid g(1, 40);
  const SignalArray y(g, 2.0);
  const ConstraintSystem sys = interval_system(g, 10, 1.0);
  AdmmConfig cfg;
  cfg.tau = 1e-6;
  const AdmmReport rep = admm_solve(LinearOperator::identity(g), y, Regularizer::tv2(), sys, cfg);
  EXPECT_EQ(rep.status, ExitStatus::Converged);
  EXPECT_LE(value(Regularizer::tv2(), rep.u), 1e-10);
  EXPECT_LE(mr_statistic(sys, y - rep.u), 1.0 + 1e-4);
}

TEST(AdmmSolve, FeasibleEveryIterationAndResidualContract) {
  std::mt19937 rng(1);
  const Grid g(1, 64);
  SignalArray y = random_signal(g, rng, 0.3);
  for (std::size_t i = 20; i < 40; ++i) y[i] += 2.0;
  const ConstraintSystem sys = interval_system(g, 16, 2.5);
  AdmmConfig cfg;
  cfg.tau = 1e-4;
  cfg.max_outer = 2000;
  double best = INFINITY;
  const AdmmReport rep = admm_solve(
      LinearOperator::identity(g), y, Regularizer::tv2(), sys, cfg, [&](const AdmmState& st) {
        EXPECT_LE(mr_statistic(sys, st.v), 2.5 * (1.0 + 1e-6));
        best = std::min(best, st.r);
      });
  EXPECT_EQ(rep.status, ExitStatus::Converged);
  EXPECT_LE(rep.residuals.back(), cfg.tau);
  EXPECT_EQ(rep.residuals.size(), static_cast<std::size_t>(rep.iterations));
  EXPECT_EQ(rep.objective.size(), static_cast<std::size_t>(rep.iterations));
  EXPECT_LE(rep.data_statistic, 2.5 * (1.0 + 1e-3));
  EXPECT_EQ(rep.unconverged_projections, 0);
}

TEST(AdmmSolve, MaxIterReported) {
  std::mt19937 rng(2);
  const Grid g(1, 32);
  const SignalArray y = random_signal(g, rng);
  AdmmConfig cfg;
  cfg.tau = 0.0;
  cfg.max_outer = 3;
  const AdmmReport rep = admm_solve(LinearOperator::identity(g), y, Regularizer::tv2(),
                                    interval_system(g, 4, 0.5), cfg);
  EXPECT_EQ(rep.status, ExitStatus::MaxIter);
  EXPECT_EQ(rep.iterations, 3);
}

TEST(AdmmSolve, ColdAndWarmProjectionAgree) {
  std::mt19937 rng(3);
  const Grid g(1, 48);
  const SignalArray y = random_signal(g, rng);
  const ConstraintSystem sys = interval_system(g, 8, 1.2);
  AdmmConfig cfg;
  cfg.tau = 1e-6;
  const AdmmReport warm = admm_solve(LinearOperator::identity(g), y, Regularizer::tv2(), sys, cfg);
  cfg.warm_start_projection = false;
  const AdmmReport cold = admm_solve(LinearOperator::identity(g), y, Regularizer::tv2(), sys, cfg);
  EXPECT_LE(sup_distance(warm.u, cold.u), 1e-4);
}

TEST(AdmmSolve, DantzigMatchesLinearProgram) {
  std::mt19937 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 3; ++t) {
    Eigen::MatrixXd km(8, 4);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 4; ++j) km(i, j) = n(rng);
    }
    Eigen::VectorXd y(8);
    for (int i = 0; i < 8; ++i) y(i) = n(rng);
    const double q = 0.5;
    const LinearOperator k = LinearOperator::dense(km);
    std::vector<SignalArray> weights;
    for (int j = 0; j < 4; ++j) {
      const Eigen::VectorXd col = km.col(j);
      weights.emplace_back(Grid(1, 8), std::vector<double>(col.data(), col.data() + 8));
    }
    const ConstraintSystem sys =
        ConstraintSystem::dense(Grid(1, 8), weights, Transform::Identity, q);
    const SignalArray ys(Grid(1, 8), std::vector<double>(y.data(), y.data() + 8));
    AdmmConfig cfg;
    cfg.tau = 1e-9;
    cfg.max_outer = 20000;
    const AdmmReport rep = admm_solve(k, ys, Regularizer::l1(), sys, cfg);
    EXPECT_EQ(rep.status, ExitStatus::Converged);
    EXPECT_NEAR(value(Regularizer::l1(), rep.u), oracle::dantzig_lp_optimum(km, y, q), 1e-4);
  }
}

TEST(Standardization, NoOpAtUnitIntensityAndFloor) {
  const Grid g(1, 3);
  const SignalArray one(g, 1.0);
  EXPECT_EQ(standardization(one, 1e-3), one);
  const SignalArray s = standardization(SignalArray(g, std::vector<double>{0.0, 1e-6, 4.0}), 1e-2);
  EXPECT_DOUBLE_EQ(s[0], 10.0);
  EXPECT_DOUBLE_EQ(s[1], 10.0);
  EXPECT_DOUBLE_EQ(s[2], 0.5);
}

TEST(AdmmSolvePoisson, RejectsNegativeDataAndFlagsVariant) {
  const Grid g(2, 8);
  const WindowSystem ws = enumerate(g, 1, 3);
  const ConstraintSystem sys =
      ConstraintSystem::windowed(ws, Transform::Identity, 3.0, indicator_coefficients(ws));
  const LinearOperator k = LinearOperator::convolution(g, gaussian_kernel(1.0, 3, 2));
  SignalArray y(g, 5.0);
  AdmmConfig cfg;
  cfg.max_outer = 5;
  cfg.lambda = 0.05;
  const AdmmReport rep = admm_solve_poisson(k, y, Regularizer::tv2(), sys, cfg);
  EXPECT_TRUE(rep.lagged_standardization);
  EXPECT_NEAR(rep.epsilon_safe, 5e-3, 1e-15);
  y[3] = -1.0;
  EXPECT_THROW(admm_solve_poisson(k, y, Regularizer::tv2(), sys, cfg), InvalidArgument);
}
