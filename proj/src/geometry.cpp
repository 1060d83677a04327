#include "aras/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "aras/errors.hpp"

namespace aras {
namespace {

void CheckCoverArgs(double eps, std::size_t n) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorCode::kInvalidProblem, "cover eps must be positive");
  }
  if (n == 0) throw Error(ErrorCode::kInvalidProblem, "cover of a 0-D set");
}

// Iterates all integer vectors in [0, upper_0) x ... x [0, upper_{n-1})
// in lexicographic order.
class Odometer {
 public:
  explicit Odometer(std::vector<long> upper) : upper_(std::move(upper)),
                                               index_(upper_.size(), 0) {}
  const std::vector<long>& index() const { return index_; }
  bool Next() {
    for (std::size_t i = index_.size(); i-- > 0;) {
      if (++index_[i] < upper_[i]) return true;
      index_[i] = 0;
    }
    return false;
  }

 private:
  std::vector<long> upper_;
  std::vector<long> index_;
};

double CountCells(const std::vector<long>& per_axis) {
  double total = 1.0;
  for (long c : per_axis) total *= static_cast<double>(c);
  return total;
}

void CheckCap(double cells, std::size_t cap) {
  if (cells > static_cast<double>(cap)) {
    throw Error(ErrorCode::kCoverTooLarge,
                "grid of " + std::to_string(static_cast<long double>(cells)) +
                    " cells exceeds cap " + std::to_string(cap));
  }
}

// Distance from p to the axis-aligned cube of half-width `half` centred
// at q.
double CubeDistance(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                    double half) {
  return ((p - q).cwiseAbs().array() - half).max(0.0).matrix().norm();
}

Eigen::VectorXd ProjectOntoBall(const Ball& ball, const Eigen::VectorXd& x) {
  const Eigen::VectorXd d = x - ball.center;
  const double norm = d.norm();
  if (norm <= ball.radius) return x;
  return ball.center + d * (ball.radius / norm);
}

void PushUnique(std::vector<Eigen::VectorXd>& out, Eigen::VectorXd x) {
  for (const auto& y : out) {
    if ((y - x).lpNorm<Eigen::Infinity>() == 0.0) return;
  }
  out.push_back(std::move(x));
}

// Lattice around `anchor` with pitch h covering a ball of radius r.
template <typename Keep>
std::vector<Eigen::VectorXd> LatticeCover(const Eigen::VectorXd& anchor,
                                          double r, double h,
                                          std::size_t cap, Keep keep) {
  const auto n = anchor.size();
  const long K = static_cast<long>(std::ceil(r / h + 0.5));
  std::vector<long> upper(n, 2 * K + 1);
  CheckCap(CountCells(upper), cap);
  std::vector<Eigen::VectorXd> out;
  Odometer odo(upper);
  do {
    Eigen::VectorXd q = anchor;
    for (Eigen::Index i = 0; i < n; ++i) {
      q[i] += h * static_cast<double>(odo.index()[i] - K);
    }
    if (auto kept = keep(q)) PushUnique(out, std::move(*kept));
  } while (odo.Next());
  return out;
}

}  // namespace

Ellipsoid::Ellipsoid(const Eigen::MatrixXd& shape, double level)
    : level_(level) {
  if (shape.rows() != shape.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "ellipsoid shape not square");
  }
  if (!(level >= 0.0) || !std::isfinite(level)) {
    throw Error(ErrorCode::kInvalidProblem, "ellipsoid level must be >= 0");
  }
  const double scale = std::max(1.0, shape.cwiseAbs().maxCoeff());
  if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::kInvalidProblem, "ellipsoid shape not symmetric");
  }
  shape_ = 0.5 * (shape + shape.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(shape_);
  eigenvalues_ = eig.eigenvalues();
  eigenvectors_ = eig.eigenvectors();
  const double lambda_max =
      eigenvalues_.size() > 0 ? std::max(0.0, eigenvalues_.maxCoeff()) : 0.0;
  if (eigenvalues_.size() > 0 &&
      eigenvalues_.minCoeff() < -1e-10 * std::max(1.0, lambda_max)) {
    throw Error(ErrorCode::kInvalidProblem, "ellipsoid shape not PSD");
  }
  const double cut = kPinvCutoff * lambda_max;
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
    if (eigenvalues_[i] <= cut) {
      eigenvalues_[i] = 0.0;
    } else {
      ++rank_;
    }
  }
}

Ellipsoid Ellipsoid::Point(int n) {
  return Ellipsoid(Eigen::MatrixXd::Zero(n, n), 0.0);
}

Ellipsoid Ellipsoid::FromFactor(const Eigen::MatrixXd& factor, double level) {
  if (!(level >= 0.0) || !std::isfinite(level)) {
    throw Error(ErrorCode::kInvalidProblem, "ellipsoid level must be >= 0");
  }
  Ellipsoid e;
  e.level_ = level;
  e.shape_ = factor * factor.transpose();
  e.shape_ = 0.5 * (e.shape_ + e.shape_.transpose());
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(factor, Eigen::ComputeFullU);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const Eigen::Index n = factor.rows();
  e.eigenvectors_ = svd.matrixU();
  e.eigenvalues_ = Eigen::VectorXd::Zero(n);
  const double cut = sigma.size() > 0 ? kPinvCutoff * sigma[0] : 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > cut) {
      e.eigenvalues_[i] = sigma[i] * sigma[i];
      ++e.rank_;
    }
  }
  return e;
}

double Ellipsoid::QuadraticForm(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd coords = eigenvectors_.transpose() * x;
  double q = 0.0;
  for (Eigen::Index i = 0; i < coords.size(); ++i) {
    if (eigenvalues_[i] > 0.0) q += coords[i] * coords[i] / eigenvalues_[i];
  }
  return q;
}

double Ellipsoid::RangeResidual(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd coords = eigenvectors_.transpose() * x;
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < coords.size(); ++i) {
    if (eigenvalues_[i] == 0.0) r2 += coords[i] * coords[i];
  }
  return std::sqrt(r2);
}

bool Ellipsoid::Contains(const Eigen::VectorXd& x, double rel_tol) const {
  if (x.size() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "ellipsoid membership");
  }
  if (RangeResidual(x) > 1e-8 * x.norm()) return false;
  return QuadraticForm(x) <= level_ * (1.0 + rel_tol);
}

double Ellipsoid::Support(const Eigen::VectorXd& c) const {
  if (c.size() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "support direction");
  }
  return std::sqrt(level_ * std::max(0.0, c.dot(shape_ * c)));
}

Eigen::VectorXd Ellipsoid::Maximizer(const Eigen::VectorXd& c) const {
  const Eigen::VectorXd wc = shape_ * c;
  const double q = c.dot(wc);
  if (q <= 0.0) return Eigen::VectorXd::Zero(dim());
  return wc * std::sqrt(level_ / q);
}

double Support(const Ellipsoid& e, const Eigen::VectorXd& c) {
  return e.Support(c);
}

std::size_t PolytopicSet::size() const {
  std::size_t count = 0;
  for (const auto& clause : clauses) count += clause.size();
  return count;
}

void PolytopicSet::AddClause(Clause clause) {
  if (clause.empty()) {
    throw Error(ErrorCode::kInvalidProblem, "empty clause");
  }
  for (const auto& atom : clause) {
    if (atom.c.size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "atom of dimension " + std::to_string(atom.c.size()) +
                      " in set of dimension " + std::to_string(dim));
    }
  }
  clauses.push_back(std::move(clause));
}

void PolytopicSet::Conjoin(const PolytopicSet& other) {
  if (other.dim != dim) {
    throw Error(ErrorCode::kDimensionMismatch, "conjoining polytopic sets");
  }
  clauses.insert(clauses.end(), other.clauses.begin(), other.clauses.end());
}

PolytopicSet BoxSet(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return StackedBoxSet(lo, hi, 1);
}

PolytopicSet StackedBoxSet(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                           int horizon) {
  if (lo.size() != hi.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "box bounds");
  }
  const auto k = static_cast<int>(lo.size());
  PolytopicSet set(k * horizon);
  for (int t = 0; t < horizon; ++t) {
    for (int i = 0; i < k; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(k * horizon);
      e[k * t + i] = 1.0;
      set.AddAtom({e, hi[i]});
      set.AddAtom({-e, -lo[i]});
    }
  }
  return set;
}

Eigen::MatrixXd PseudoInverse(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cut = s.size() > 0 ? kPinvCutoff * s[0] : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cut) inv[i] = 1.0 / s[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

std::vector<Ellipsoid> AdvLeverages(const LtvSystem& sys, double budget) {
  const int n = sys.num_states();
  std::vector<Ellipsoid> out;
  out.reserve(sys.horizon() + 1);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  out.emplace_back(W, budget);
  for (int t = 0; t < sys.horizon(); ++t) {
    W = sys.A(t) * W * sys.A(t).transpose() +
        sys.C(t) * sys.C(t).transpose();
    W = 0.5 * (W + W.transpose());
    out.emplace_back(W, budget);
  }
  return out;
}

Ellipsoid AdvLeverage(const LtvSystem& sys, double budget, int t) {
  if (t < 0 || t > sys.horizon()) {
    throw Error(ErrorCode::kIndexOutOfRange, "leverage time");
  }
  const int n = sys.num_states();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < t; ++s) {
    const Eigen::MatrixXd g = TransitionMatrix(sys, t, s + 1) * sys.C(s);
    W += g * g.transpose();
  }
  return Ellipsoid(0.5 * (W + W.transpose()), budget);
}

std::vector<Ellipsoid> ControlLeverages(const LtvSystem& sys, double budget) {
  const int n = sys.num_states();
  std::vector<Ellipsoid> out;
  out.reserve(sys.horizon() + 1);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  out.emplace_back(W, budget);
  for (int t = 0; t < sys.horizon(); ++t) {
    W = sys.A(t) * W * sys.A(t).transpose() +
        sys.B(t) * sys.B(t).transpose();
    W = 0.5 * (W + W.transpose());
    out.emplace_back(W, budget);
  }
  return out;
}

Ellipsoid InitFactor(const LtvSystem& sys, double delta, int t) {
  if (!(delta >= 0.0)) {
    throw Error(ErrorCode::kInvalidProblem, "init radius must be >= 0");
  }
  return Ellipsoid::FromFactor(TransitionMatrix(sys, t, 0), delta * delta);
}

std::vector<Ellipsoid> InitFactors(const LtvSystem& sys, double delta) {
  if (!(delta >= 0.0)) {
    throw Error(ErrorCode::kInvalidProblem, "init radius must be >= 0");
  }
  const int n = sys.num_states();
  std::vector<Ellipsoid> out;
  out.reserve(sys.horizon() + 1);
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Identity(n, n);
  out.push_back(Ellipsoid::FromFactor(alpha, delta * delta));
  for (int t = 0; t < sys.horizon(); ++t) {
    alpha = sys.A(t) * alpha;
    out.push_back(Ellipsoid::FromFactor(alpha, delta * delta));
  }
  return out;
}

PolytopicSet Strengthen(const PolytopicSet& set,
                        std::span<const Ellipsoid> parts) {
  for (const auto& e : parts) {
    if (e.dim() != set.dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "strengthening part of dimension " + std::to_string(e.dim()));
    }
  }
  PolytopicSet out = set;
  for (auto& clause : out.clauses) {
    for (auto& atom : clause) {
      for (const auto& e : parts) atom.rhs -= e.Support(atom.c);
    }
  }
  return out;
}

bool PolytopicContains(const PolytopicSet& set, const Eigen::VectorXd& x,
                       double slack) {
  if (x.size() != set.dim) {
    throw Error(ErrorCode::kDimensionMismatch, "polytopic membership");
  }
  return std::all_of(set.clauses.begin(), set.clauses.end(),
                     [&](const Clause& clause) {
                       return std::any_of(
                           clause.begin(), clause.end(),
                           [&](const LinAtom& a) { return a.Holds(x, slack); });
                     });
}

Clause NegatePolytope(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() < 1 || A.rows() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "obstacle rows");
  }
  Clause clause;
  clause.reserve(A.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    clause.push_back({-A.row(i).transpose(), -b[i]});
  }
  return clause;
}

double CoverPitch(double eps, int n) {
  return std::min(eps, 2.0 * eps / std::sqrt(static_cast<double>(n)));
}

std::vector<Eigen::VectorXd> EpsilonCover(const Ball& ball, double eps,
                                          std::size_t cell_cap) {
  CheckCoverArgs(eps, ball.center.size());
  if (ball.radius <= eps) return {ball.center};
  const double h = CoverPitch(eps, static_cast<int>(ball.center.size()));
  return LatticeCover(ball.center, ball.radius, h, cell_cap,
                      [&](const Eigen::VectorXd& q) -> std::optional<Eigen::VectorXd> {
                        if (CubeDistance(ball.center, q, 0.5 * h) > ball.radius) {
                          return std::nullopt;
                        }
                        return ProjectOntoBall(ball, q);
                      });
}

std::vector<Eigen::VectorXd> EpsilonCoverIntersection(const Ball& outer,
                                                      const Ball& inner,
                                                      double eps,
                                                      std::size_t cell_cap) {
  CheckCoverArgs(eps, inner.center.size());
  if (outer.center.size() != inner.center.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cover of ball intersection");
  }
  if (inner.radius <= eps && outer.Contains(inner.center)) {
    return {inner.center};
  }
  const double h = CoverPitch(eps, static_cast<int>(inner.center.size()));
  return LatticeCover(
      inner.center, inner.radius, h, cell_cap,
      [&](const Eigen::VectorXd& q) -> std::optional<Eigen::VectorXd> {
        if (CubeDistance(inner.center, q, 0.5 * h) > inner.radius ||
            CubeDistance(outer.center, q, 0.5 * h) > outer.radius) {
          return std::nullopt;
        }
        return ProjectOntoBall(outer, q);
      });
}

std::vector<Eigen::VectorXd> EpsilonCoverBox(const Eigen::VectorXd& lo,
                                             const Eigen::VectorXd& hi,
                                             double eps, std::size_t cell_cap) {
  CheckCoverArgs(eps, lo.size());
  if (lo.size() != hi.size() || ((hi - lo).array() < 0.0).any()) {
    throw Error(ErrorCode::kInvalidProblem, "box bounds");
  }
  const auto n = lo.size();
  const double h = CoverPitch(eps, static_cast<int>(n));
  std::vector<long> counts(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    counts[i] = std::max(1L, static_cast<long>(std::ceil((hi[i] - lo[i]) / h)));
  }
  CheckCap(CountCells(counts), cell_cap);
  std::vector<Eigen::VectorXd> out;
  Odometer odo(counts);
  do {
    Eigen::VectorXd q(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      q[i] = std::min(hi[i], lo[i] + h * (static_cast<double>(odo.index()[i]) + 0.5));
    }
    out.push_back(std::move(q));
  } while (odo.Next());
  return out;
}

}  // namespace aras
