#include <algorithm>
#include <cmath>
#include <numbers>

#include "aras/errors.hpp"
#include "aras/problem_file.hpp"
#include "aras/random.hpp"

namespace aras {
namespace {

// Box over the listed coordinates of an n-dimensional state, as A x <= b.
Halfspaces CoordinateBox(int n, const std::vector<int>& coords,
                         const Eigen::VectorXd& center, double half) {
  const int k = static_cast<int>(coords.size());
  Halfspaces h{Eigen::MatrixXd::Zero(2 * k, n), Eigen::VectorXd(2 * k)};
  for (int i = 0; i < k; ++i) {
    h.A(2 * i, coords[i]) = 1.0;
    h.b[2 * i] = center[i] + half;
    h.A(2 * i + 1, coords[i]) = -1.0;
    h.b[2 * i + 1] = -(center[i] - half);
  }
  return h;
}

void AddFaces(PolytopicSet& set, const Halfspaces& h) {
  for (Eigen::Index r = 0; r < h.A.rows(); ++r) {
    set.AddAtom({h.A.row(r).transpose(), h.b[r]});
  }
}

void RequireHorizon(int T) {
  if (T < 1) throw Error(ErrorCode::kInvalidProblem, "horizon must be >= 1");
}

}  // namespace

ProblemSpecFile GenVehicle(int T, int n_obstacles, std::uint64_t seed) {
  RequireHorizon(T);
  if (n_obstacles < 0) {
    throw Error(ErrorCode::kInvalidProblem, "obstacle count must be >= 0");
  }
  ProblemSpecFile s;
  s.n = 4;
  s.m = 2;
  s.l = 2;
  s.T = T;
  s.time_invariant = true;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(4, 4);
  A(0, 2) = 1.0;
  A(1, 3) = 1.0;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 2);
  B(2, 0) = 1.0;
  B(3, 1) = 1.0;
  s.A = {A};
  s.B = {B};
  s.C = {B};
  s.theta = Eigen::VectorXd::Zero(4);
  s.delta = 0.01;
  s.adv_budget = 1e-5;
  s.ctr = StepBox{-Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2)};

  // Farthest position reachable from rest with |u| <= 1 is T(T-1)/2.
  const double reach = 0.5 * T * (T - 1);
  const double gx = std::min(20.0, 0.3 * reach);
  const Eigen::Vector2d goal(gx, 0.5 * gx);
  const double goal_half = std::clamp(0.1 * reach, 0.5, 3.0);
  const double bound = std::clamp(2.0 * (gx + goal_half), 10.0, 50.0);
  const std::vector<int> pos{0, 1};
  s.safe = PolytopicSet(4);
  s.goal = PolytopicSet(4);
  AddFaces(s.safe, CoordinateBox(4, pos, Eigen::Vector2d::Zero(), bound));
  AddFaces(s.goal, CoordinateBox(4, pos, goal, goal_half));

  const double scale = std::clamp(gx / 20.0, 0.2, 1.0);
  Rng rng(seed);
  for (int k = 0; k < n_obstacles; ++k) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const double half = scale * rng.Uniform(0.5, 1.5);
      Eigen::Vector2d c;
      c.x() = rng.Uniform(-0.2 * bound, 0.6 * bound);
      c.y() = rng.Uniform(-0.2 * bound, 0.6 * bound);
      if (c.cwiseAbs().maxCoeff() < half + 2.0 * scale) continue;
      if ((c - goal).cwiseAbs().maxCoeff() < half + goal_half + scale) continue;
      s.obstacles.push_back(CoordinateBox(4, pos, c, half));
      break;
    }
  }
  return s;
}

ProblemSpecFile GenHelicopterLike(int T, std::uint64_t seed) {
  RequireHorizon(T);
  constexpr int n = 16;
  constexpr int m = 4;
  Rng rng(seed);

  // A = Q D Q' with D block-diagonal scaled rotations, so |lambda| <= 0.98.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(rng.NormalMatrix(n, n));
  const Eigen::MatrixXd Q = qr.householderQ();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n / 2; ++k) {
    const double r = rng.Uniform(0.9, 0.98);
    const double phi = rng.Uniform(0.0, std::numbers::pi / 4.0);
    D(2 * k, 2 * k) = r * std::cos(phi);
    D(2 * k, 2 * k + 1) = -r * std::sin(phi);
    D(2 * k + 1, 2 * k) = r * std::sin(phi);
    D(2 * k + 1, 2 * k + 1) = r * std::cos(phi);
  }
  const Eigen::MatrixXd A = Q * D * Q.transpose();
  const Eigen::MatrixXd B = 0.3 * rng.NormalMatrix(n, m);

  ProblemSpecFile s;
  s.n = n;
  s.m = m;
  s.l = m;
  s.T = T;
  s.time_invariant = true;
  s.A = {A};
  s.B = {B};
  s.C = {B};
  s.theta = 0.5 * rng.NormalVector(n);
  s.delta = 0.01;
  s.adv_budget = 1e-4;
  Eigen::VectorXd lo(m), hi(m);
  lo << -1, -1, -1, 0;
  hi << 1, 1, 1, 1;
  s.ctr = StepBox{lo, hi};
  s.safe = PolytopicSet(n);

  // Reference run at the centre of the control box; goal and obstacles are
  // placed relative to it over the first three states.
  const Eigen::VectorXd u_mid = 0.5 * (lo + hi);
  std::vector<Eigen::Vector3d> ref;
  Eigen::VectorXd x = s.theta;
  ref.push_back(x.head<3>());
  for (int t = 0; t < T; ++t) {
    x = A * x + B * u_mid;
    ref.push_back(x.head<3>());
  }
  const std::vector<int> coords{0, 1, 2};
  s.goal = PolytopicSet(n);
  AddFaces(s.goal, CoordinateBox(n, coords, ref.back(), 1.0));

  for (int k = 0; k < 6; ++k) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const int t = 1 + static_cast<int>(rng.Index(T));
      const double half = rng.Uniform(0.2, 0.4);
      const double dist = rng.Uniform(0.3, 0.8);
      const Eigen::Vector3d c = ref[t] + rng.OnSphere(3, dist).head<3>();
      bool clear = true;
      for (const auto& p : ref) {
        if ((p - c).cwiseAbs().maxCoeff() < half + 0.1) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      s.obstacles.push_back(CoordinateBox(n, coords, c, half));
      break;
    }
  }
  return s;
}

}  // namespace aras
