#include "aras/model.hpp"

#include <gtest/gtest.h>

#include "aras/errors.hpp"
#include "oracles.hpp"

namespace aras {
namespace {

GTEST_TEST(TransitionMatrix, IdentityDynamics) {
  const auto sys = LtvSystem::TimeInvariant(Eigen::MatrixXd::Identity(3, 3),
                                            Eigen::MatrixXd::Zero(3, 1),
                                            Eigen::MatrixXd::Zero(3, 1), 4);
  EXPECT_TRUE(TransitionMatrix(sys, 3, 0).isIdentity());
}

GTEST_TEST(TransitionMatrix, EqualTimesGiveIdentity) {
  Rng rng(3);
  const auto sys = oracle::RandomPlant(rng, 3, 1, 1, 5).System();
  for (int t = 0; t <= 5; ++t) EXPECT_TRUE(TransitionMatrix(sys, t, t).isIdentity());
}

GTEST_TEST(TransitionMatrix, ScalarProduct) {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(1, 1);
  const LtvSystem sys({Eigen::MatrixXd::Constant(1, 1, 2.0),
                       Eigen::MatrixXd::Constant(1, 1, 3.0)},
                      {z, z}, {z, z});
  EXPECT_DOUBLE_EQ(TransitionMatrix(sys, 2, 0)(0, 0), 6.0);
}

GTEST_TEST(TransitionMatrix, RejectsBadTimes) {
  const auto sys = LtvSystem::TimeInvariant(Eigen::MatrixXd::Identity(2, 2),
                                            Eigen::MatrixXd::Zero(2, 1),
                                            Eigen::MatrixXd::Zero(2, 1), 3);
  EXPECT_THROW(TransitionMatrix(sys, 1, 2), Error);
  EXPECT_THROW(TransitionMatrix(sys, 4, 0), Error);
}

GTEST_TEST(LtvSystem, RejectsShapeMismatch) {
  EXPECT_THROW(LtvSystem({Eigen::MatrixXd::Identity(2, 2)}, {Eigen::MatrixXd::Zero(3, 1)},
                         {Eigen::MatrixXd::Zero(2, 1)}),
               Error);
  EXPECT_THROW(LtvSystem({Eigen::MatrixXd::Identity(2, 2)}, {}, {}), Error);
}

GTEST_TEST(Simulate, PureIntegrator) {
  const int T = 5;
  const auto sys = LtvSystem::TimeInvariant(Eigen::MatrixXd::Identity(2, 2),
                                            Eigen::MatrixXd::Identity(2, 2),
                                            Eigen::MatrixXd::Zero(2, 1), T);
  Eigen::VectorXd u(2 * T);
  for (int t = 0; t < T; ++t) u.segment(2 * t, 2) << 1.0, 0.0;
  Rng rng(1);
  const Trajectory traj = Simulate(sys, Eigen::VectorXd::Zero(2), ControlSequence(2, T, u),
                                   AdversarySequence(1, T, rng.NormalVector(T)));
  for (int t = 0; t <= T; ++t) {
    EXPECT_TRUE(traj.states[t].isApprox(Eigen::Vector2d(t, 0.0)) ||
                (t == 0 && traj.states[t].isZero()));
  }
}

GTEST_TEST(Simulate, HomogeneousSolution) {
  Rng rng(5);
  const auto plant = oracle::RandomPlant(rng, 3, 2, 2, 6);
  const auto sys = plant.System();
  const Eigen::VectorXd x0 = rng.NormalVector(3);
  const Trajectory traj =
      Simulate(sys, x0, ControlSequence::Zero(sys), AdversarySequence::Zero(sys));
  for (int t = 0; t <= 6; ++t) {
    EXPECT_TRUE(traj.states[t].isApprox(TransitionMatrix(sys, t, 0) * x0, 1e-12));
  }
}

GTEST_TEST(Simulate, MatchesClosedFormSum) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto plant = oracle::RandomPlant(rng, 3, 2, 2, 5);
    const auto sys = plant.System();
    const Eigen::VectorXd x0 = rng.NormalVector(3);
    const Eigen::VectorXd u = rng.NormalVector(10), a = rng.NormalVector(10);
    const Trajectory traj =
        Simulate(sys, x0, ControlSequence(2, 5, u), AdversarySequence(2, 5, a));
    for (int t = 0; t <= 5; ++t) {
      // x_t = alpha(t,0) x0 + sum_s alpha(t,s+1) (B_s u_s + C_s a_s).
      Eigen::VectorXd expected = TransitionMatrix(sys, t, 0) * x0;
      for (int s = 0; s < t; ++s) {
        expected += TransitionMatrix(sys, t, s + 1) *
                    (plant.B[s] * u.segment(2 * s, 2) + plant.C[s] * a.segment(2 * s, 2));
      }
      EXPECT_LT((traj.states[t] - expected).norm(), 1e-10 * (1 + expected.norm()));
      EXPECT_LT((traj.states[t] - oracle::Run(plant, x0, u, a)[t]).norm(), 1e-12);
    }
  }
}

GTEST_TEST(StateMap, InitialTime) {
  Rng rng(2);
  const auto sys = oracle::RandomPlant(rng, 3, 2, 1, 4).System();
  const StateMap map = ControlToStateMap(sys, 0);
  EXPECT_TRUE(map.input_gain.isZero());
  EXPECT_TRUE(map.initial_gain.isIdentity());
}

GTEST_TEST(StateMap, IntegratorBlocks) {
  const auto sys = LtvSystem::TimeInvariant(Eigen::MatrixXd::Identity(2, 2),
                                            Eigen::MatrixXd::Identity(2, 2),
                                            Eigen::MatrixXd::Zero(2, 1), 4);
  const StateMap map = ControlToStateMap(sys, 2);
  EXPECT_TRUE(map.input_gain.block(0, 0, 2, 2).isIdentity());
  EXPECT_TRUE(map.input_gain.block(0, 2, 2, 2).isIdentity());
  EXPECT_TRUE(map.input_gain.block(0, 4, 2, 4).isZero());
}

GTEST_TEST(StateMap, AgreesWithSimulation) {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto plant = oracle::RandomPlant(rng, 3, 2, 2, 6);
    const auto sys = plant.System();
    const Eigen::VectorXd x0 = rng.NormalVector(3), u = rng.NormalVector(12);
    const Trajectory traj =
        Simulate(sys, x0, ControlSequence(2, 6, u), AdversarySequence::Zero(sys));
    const auto maps = ControlToStateMaps(sys);
    for (int t = 0; t <= 6; ++t) {
      const StateMap single = ControlToStateMap(sys, t);
      EXPECT_LT((single.input_gain * u + single.initial_gain * x0 - traj.states[t]).norm(),
                1e-10);
      EXPECT_LT((maps[t].input_gain - single.input_gain).norm(), 1e-12);
      EXPECT_LT((AdversaryToStateMap(sys, t).input_gain -
                 oracle::ImpulseResponse(plant, t, false))
                    .norm(),
                1e-10);
    }
  }
}

GTEST_TEST(AdversarySequence, CachesEnergy) {
  const AdversarySequence a(2, 2, Eigen::Vector4d(1, 2, 3, 4));
  EXPECT_DOUBLE_EQ(a.squared_norm(), 30.0);
  EXPECT_TRUE(a.step(1).isApprox(Eigen::Vector2d(3, 4)));
  EXPECT_THROW(a.step(2), Error);
}

}  // namespace
}  // namespace aras
