#pragma once

// Reference computations for the tests. Everything here is written from
// first principles (plain loops, dense solves) and shares no code path with
// the library beyond its value types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "aras/geometry.hpp"
#include "aras/model.hpp"
#include "aras/random.hpp"
#include "aras/synthesis.hpp"

namespace aras::oracle {

struct Plant {
  std::vector<Eigen::MatrixXd> A, B, C;
  int n() const { return static_cast<int>(A.front().rows()); }
  int m() const { return static_cast<int>(B.front().cols()); }
  int l() const { return static_cast<int>(C.front().cols()); }
  int T() const { return static_cast<int>(A.size()); }
  LtvSystem System() const { return LtvSystem(A, B, C); }
};

inline Plant RandomPlant(Rng& rng, int n, int m, int l, int T, double scale = 0.6) {
  Plant p;
  for (int t = 0; t < T; ++t) {
    p.A.push_back(scale * rng.NormalMatrix(n, n) / std::sqrt(double(n)) +
                  Eigen::MatrixXd::Identity(n, n) * 0.5);
    p.B.push_back(rng.NormalMatrix(n, m));
    p.C.push_back(rng.NormalMatrix(n, l));
  }
  return p;
}

// x_{t+1} = A_t x_t + B_t u_t + C_t a_t written out step by step.
inline std::vector<Eigen::VectorXd> Run(const Plant& p, const Eigen::VectorXd& x0,
                                        const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& a) {
  std::vector<Eigen::VectorXd> xs{x0};
  for (int t = 0; t < p.T(); ++t) {
    Eigen::VectorXd next = p.A[t] * xs.back();
    for (int i = 0; i < p.m(); ++i) next += p.B[t].col(i) * u[t * p.m() + i];
    for (int i = 0; i < p.l(); ++i) next += p.C[t].col(i) * a[t * p.l() + i];
    xs.push_back(next);
  }
  return xs;
}

// Column k of the returned matrix is the state at time t after a unit
// impulse on input coordinate k (control if `control`, else adversary).
inline Eigen::MatrixXd ImpulseResponse(const Plant& p, int t, bool control) {
  const int dim = (control ? p.m() : p.l()) * p.T();
  Eigen::MatrixXd H(p.n(), dim);
  for (int k = 0; k < dim; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e[k] = 1.0;
    const Eigen::VectorXd zu = Eigen::VectorXd::Zero(p.m() * p.T());
    const Eigen::VectorXd za = Eigen::VectorXd::Zero(p.l() * p.T());
    H.col(k) = Run(p, Eigen::VectorXd::Zero(p.n()), control ? e : zu,
                   control ? za : e)[t];
  }
  return H;
}

// State at time t from x0 alone: columns are responses to unit x0.
inline Eigen::MatrixXd FreeResponse(const Plant& p, int t) {
  Eigen::MatrixXd M(p.n(), p.n());
  for (int k = 0; k < p.n(); ++k) {
    M.col(k) = Run(p, Eigen::VectorXd::Unit(p.n(), k),
                   Eigen::VectorXd::Zero(p.m() * p.T()),
                   Eigen::VectorXd::Zero(p.l() * p.T()))[t];
  }
  return M;
}

// Largest amount cᵀx over {Hz : |z| <= r}.
inline double ImageSupport(const Eigen::MatrixXd& H, const Eigen::VectorXd& c,
                           double r) {
  return r * (H.transpose() * c).norm();
}

// xᵀ W⁺ x for x in range(W), via least squares on W y = x.
inline double QuadForm(const Eigen::MatrixXd& W, const Eigen::VectorXd& x) {
  const Eigen::VectorXd y = W.completeOrthogonalDecomposition().solve(x);
  return x.dot(y);
}

// Maximum over x in [-M, M]^d of min_i (rhs_i - c_iᵀx) / |c_i| (capped at
// 1), by enumerating every vertex of the (x, s) polytope.
inline double MaxNormalizedSlack(const std::vector<LinAtom>& atoms, int d,
                                 double M = 1e4) {
  // Rows over (x, s): g x + h s <= k.
  std::vector<Eigen::VectorXd> G;
  std::vector<double> K;
  for (const auto& a : atoms) {
    const double nrm = a.c.norm();
    if (nrm == 0.0) {
      if (a.rhs < 0.0) return -std::numeric_limits<double>::infinity();
      continue;
    }
    Eigen::VectorXd g(d + 1);
    g << a.c / nrm, 1.0;
    G.push_back(g);
    K.push_back(a.rhs / nrm);
  }
  for (int j = 0; j < d; ++j) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1);
      g[j] = sign;
      G.push_back(g);
      K.push_back(M);
    }
  }
  {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1);
    g[d] = 1.0;
    G.push_back(g);
    K.push_back(1.0);
  }
  const int rows = static_cast<int>(G.size());
  const int k = d + 1;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> pick(k);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      Eigen::MatrixXd S(k, k);
      Eigen::VectorXd r(k);
      for (int i = 0; i < k; ++i) {
        S.row(i) = G[pick[i]].transpose();
        r[i] = K[pick[i]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
      if (lu.rank() < k) return;
      const Eigen::VectorXd v = lu.solve(r);
      for (int i = 0; i < rows; ++i) {
        if (G[i].dot(v) > K[i] + 1e-9 * (1.0 + std::abs(K[i]))) return;
      }
      best = std::max(best, v[d]);
      return;
    }
    for (int i = start; i < rows; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

// Best normalised slack over all ways of picking one atom per clause.
inline double CnfMaxSlack(const std::vector<std::vector<LinAtom>>& clauses, int d) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<LinAtom> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == clauses.size()) {
      best = std::max(best, MaxNormalizedSlack(chosen, d));
      return;
    }
    for (const auto& a : clauses[i]) {
      chosen.push_back(a);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);
  return best;
}

inline PolytopicSet Box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  PolytopicSet s(static_cast<int>(lo.size()));
  for (int i = 0; i < lo.size(); ++i) {
    s.AddAtom({Eigen::VectorXd::Unit(lo.size(), i), hi[i]});
    s.AddAtom({-Eigen::VectorXd::Unit(lo.size(), i), -lo[i]});
  }
  return s;
}

// Feasible-by-construction instance: a random admissible control u*, Safe
// and Goal boxes that contain the nominal run of u* enlarged by the exact
// leverage and initialisation supports plus `margin`, and optionally one
// obstacle kept clear of that tube.
struct Instance {
  Plant plant;
  ArasProblem problem;
  Eigen::VectorXd u_star;
};

inline Instance FeasibleInstance(Rng& rng, double margin = 0.05,
                                 bool obstacle = true) {
  const int n = 1 + static_cast<int>(rng.Index(3));
  const int m = 1 + static_cast<int>(rng.Index(2));
  const int l = 1 + static_cast<int>(rng.Index(2));
  const int T = 1 + static_cast<int>(rng.Index(5));
  Plant plant = RandomPlant(rng, n, m, l, T);
  const Eigen::VectorXd theta = rng.NormalVector(n);
  const double delta = rng.Uniform(0.0, 0.1);
  const double budget = rng.Uniform(0.0, 0.05);
  Eigen::VectorXd u_star(m * T);
  for (int i = 0; i < u_star.size(); ++i) u_star[i] = rng.Uniform(-0.9, 0.9);
  const auto nominal = Run(plant, theta, u_star, Eigen::VectorXd::Zero(l * T));

  // Per-time, per-axis half width of the uncertainty tube.
  std::vector<Eigen::VectorXd> width;
  for (int t = 0; t <= T; ++t) {
    const Eigen::MatrixXd Hadv = ImpulseResponse(plant, t, false);
    const Eigen::MatrixXd F = FreeResponse(plant, t);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, i);
      w[i] = ImageSupport(Hadv, e, std::sqrt(budget)) + ImageSupport(F, e, delta);
    }
    width.push_back(w);
  }
  Eigen::VectorXd lo = nominal[0] - width[0], hi = nominal[0] + width[0];
  for (int t = 1; t <= T; ++t) {
    lo = lo.cwiseMin(nominal[t] - width[t]);
    hi = hi.cwiseMax(nominal[t] + width[t]);
  }
  lo.array() -= margin + rng.Uniform(0.0, 1.0);
  hi.array() += margin + rng.Uniform(0.0, 1.0);
  PolytopicSet safe = Box(lo, hi);

  if (obstacle) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      Eigen::VectorXd c(n);
      for (int i = 0; i < n; ++i) c[i] = rng.Uniform(lo[i], hi[i]);
      const double half = rng.Uniform(0.05, 0.5);
      bool clear = true;
      for (int t = 0; t <= T && clear; ++t) {
        // Gap between the obstacle box and the tube box at time t.
        const Eigen::VectorXd gap =
            (nominal[t] - c).cwiseAbs() - width[t] - Eigen::VectorXd::Constant(n, half);
        clear = gap.maxCoeff() > margin;
      }
      if (!clear) continue;
      Eigen::MatrixXd Aob(2 * n, n);
      Eigen::VectorXd bob(2 * n);
      Aob << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
      bob << c.array() + half, -(c.array() - half);
      safe.AddClause(NegatePolytope(Aob, bob));
      break;
    }
  }
  const Eigen::VectorXd gw = width[T].array() + margin;
  PolytopicSet goal = Box(nominal[T] - gw, nominal[T] + gw);
  PolytopicSet ctr(m * T);
  for (int i = 0; i < m * T; ++i) {
    ctr.AddAtom({Eigen::VectorXd::Unit(m * T, i), 1.0});
    ctr.AddAtom({-Eigen::VectorXd::Unit(m * T, i), 1.0});
  }
  ArasProblem problem{plant.System(), Ball{theta, delta}, safe, goal, ctr, budget};
  return {std::move(plant), std::move(problem), u_star};
}

// Goal half-space placed one unit beyond everything reachable without an
// adversary (|u_i| <= 1 per coordinate, start anywhere in Init).
inline Instance UnreachableInstance(Rng& rng) {
  const int n = 1 + static_cast<int>(rng.Index(3));
  const int m = 1 + static_cast<int>(rng.Index(2));
  const int l = 1 + static_cast<int>(rng.Index(2));
  const int T = 1 + static_cast<int>(rng.Index(5));
  Plant plant = RandomPlant(rng, n, m, l, T);
  const Eigen::VectorXd theta = rng.NormalVector(n);
  const double delta = rng.Uniform(0.0, 0.1);
  const Eigen::VectorXd c = rng.OnSphere(n, 1.0);
  const Eigen::MatrixXd H = ImpulseResponse(plant, T, true);
  const Eigen::MatrixXd F = FreeResponse(plant, T);
  const double reach = c.dot(F * theta) + (H.transpose() * c).cwiseAbs().sum() +
                       ImageSupport(F, c, delta);
  PolytopicSet safe = Box(Eigen::VectorXd::Constant(n, -1e6),
                          Eigen::VectorXd::Constant(n, 1e6));
  PolytopicSet goal(n);
  goal.AddAtom({-c, -(reach + 1.0)});
  PolytopicSet ctr(m * T);
  for (int i = 0; i < m * T; ++i) {
    ctr.AddAtom({Eigen::VectorXd::Unit(m * T, i), 1.0});
    ctr.AddAtom({-Eigen::VectorXd::Unit(m * T, i), 1.0});
  }
  ArasProblem problem{plant.System(), Ball{theta, delta}, safe, goal, ctr,
                      rng.Uniform(0.0, 0.05)};
  return {std::move(plant), std::move(problem), Eigen::VectorXd()};
}

}  // namespace aras::oracle
