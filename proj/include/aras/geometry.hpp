#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "aras/model.hpp"

namespace aras {

/// Relative cutoff below which eigen/singular values count as zero when a
/// pseudo-inverse is taken.
inline constexpr double kPinvCutoff = 1e-10;

/// Default tolerance for half-space membership tests.
inline constexpr double kMembershipSlack = 1e-9;

inline constexpr std::size_t kDefaultCellCap = 100000;

/// Centre-free ellipsoid {x : x' shape^+ x <= level, x in range(shape)}.
///
/// The shape is symmetrised and eigendecomposed once at construction.
/// Slightly negative eigenvalues (rounding noise) are clamped to zero;
/// eigenvalues below kPinvCutoff * lambda_max are treated as zero, which
/// confines the set to the numerical range of the shape.
class Ellipsoid {
 public:
  Ellipsoid(const Eigen::MatrixXd& shape, double level);

  /// The singleton {0} in dimension n.
  static Ellipsoid Point(int n);

  /// Image of the ball of radius sqrt(level) under `factor`, i.e. shape =
  /// factor * factor'. The pseudo-inverse comes from the SVD of the factor
  /// (singular values below kPinvCutoff * sigma_max dropped), so quadratic
  /// forms keep the factor's conditioning rather than its square.
  static Ellipsoid FromFactor(const Eigen::MatrixXd& factor, double level);

  int dim() const { return static_cast<int>(shape_.rows()); }
  const Eigen::MatrixXd& shape() const { return shape_; }
  double level() const { return level_; }
  int rank() const { return rank_; }

  /// x' shape^+ x.
  double QuadraticForm(const Eigen::VectorXd& x) const;

  /// Norm of the component of x outside the range of the shape.
  double RangeResidual(const Eigen::VectorXd& x) const;

  bool Contains(const Eigen::VectorXd& x, double rel_tol = 1e-9) const;

  /// max_{x in E} c'x = sqrt(level * c' shape c).
  double Support(const Eigen::VectorXd& c) const;

  /// A point of the boundary attaining Support(c); zero if c is orthogonal
  /// to the range.
  Eigen::VectorXd Maximizer(const Eigen::VectorXd& c) const;

 private:
  Ellipsoid() = default;

  Eigen::MatrixXd shape_;
  double level_ = 0.0;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  int rank_ = 0;
};

double Support(const Ellipsoid& e, const Eigen::VectorXd& c);

/// Half-space c'x <= rhs. A zero c encodes a constant truth value.
struct LinAtom {
  Eigen::VectorXd c;
  double rhs = 0.0;

  double Slack(const Eigen::VectorXd& x) const { return rhs - c.dot(x); }
  bool Holds(const Eigen::VectorXd& x, double slack = kMembershipSlack) const {
    return c.dot(x) <= rhs + slack;
  }
};

/// Disjunction of atoms.
using Clause = std::vector<LinAtom>;

/// Conjunction of clauses; no clauses means the whole space.
struct PolytopicSet {
  int dim = 0;
  std::vector<Clause> clauses;

  PolytopicSet() = default;
  explicit PolytopicSet(int d) : dim(d) {}
  PolytopicSet(int d, std::vector<Clause> cl) : dim(d), clauses(std::move(cl)) {}

  /// Number of atoms over all clauses.
  std::size_t size() const;

  void AddClause(Clause clause);
  void AddAtom(LinAtom atom) { AddClause(Clause{std::move(atom)}); }
  /// Appends all clauses of other (same dimension).
  void Conjoin(const PolytopicSet& other);
};

/// Axis-aligned box as a conjunction of 2n unit clauses.
PolytopicSet BoxSet(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

/// Box constraints repeated for every step of a stacked input of length
/// dim*horizon.
PolytopicSet StackedBoxSet(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                           int horizon);

struct Ball {
  Eigen::VectorXd center;
  double radius = 0.0;

  bool Contains(const Eigen::VectorXd& x, double tol = 1e-12) const {
    return (x - center).norm() <= radius + tol;
  }
};

/// Moore-Penrose pseudo-inverse with the kPinvCutoff singular value cutoff.
Eigen::MatrixXd PseudoInverse(const Eigen::MatrixXd& M);

/// Displacement set reachable at time t by adversaries with
/// sum_s |a_s|^2 <= budget: shape W_t = sum_{s<t} alpha(t,s+1) C_s C_s'
/// alpha(t,s+1)', level budget.
Ellipsoid AdvLeverage(const LtvSystem& sys, double budget, int t);

/// Same set for every t = 0..T.
std::vector<Ellipsoid> AdvLeverages(const LtvSystem& sys, double budget);

/// Controller counterpart of AdvLeverage (B in place of C); the controller
/// is the bounded party during attack synthesis.
std::vector<Ellipsoid> ControlLeverages(const LtvSystem& sys, double budget);

/// Image of the delta-ball under alpha(t, 0): shape alpha alpha', level
/// delta^2.
Ellipsoid InitFactor(const LtvSystem& sys, double delta, int t);
std::vector<Ellipsoid> InitFactors(const LtvSystem& sys, double delta);

/// Erodes every atom by the Minkowski sum of the parts:
///   c'x <= rhs  becomes  c'x <= rhs - sum_i h_{E_i}(c).
PolytopicSet Strengthen(const PolytopicSet& set,
                        std::span<const Ellipsoid> parts);

/// CNF membership; each clause needs one atom within slack.
bool PolytopicContains(const PolytopicSet& set, const Eigen::VectorXd& x,
                       double slack = kMembershipSlack);

/// Complement of the open polytope {x : Ax < b} as one clause
/// OR_i (-A_i x <= -b_i).
Clause NegatePolytope(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Finite set of centres inside the ball whose eps-balls cover it. Centres
/// come from a lattice of pitch min(eps, 2 eps / sqrt(n)); lattice points
/// whose cell meets the ball but that lie outside it are projected onto it.
std::vector<Eigen::VectorXd> EpsilonCover(const Ball& ball, double eps,
                                          std::size_t cell_cap = kDefaultCellCap);

/// eps-cover of outer ∩ inner with centres in outer.
std::vector<Eigen::VectorXd> EpsilonCoverIntersection(
    const Ball& outer, const Ball& inner, double eps,
    std::size_t cell_cap = kDefaultCellCap);

/// eps-cover of the box [lo, hi] with centres inside the box.
std::vector<Eigen::VectorXd> EpsilonCoverBox(
    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, double eps,
    std::size_t cell_cap = kDefaultCellCap);

/// Lattice pitch used by the covers above.
double CoverPitch(double eps, int n);

}  // namespace aras
