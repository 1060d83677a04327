#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "aras/errors.hpp"
#include "aras/lra_solver.hpp"

namespace aras {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kPriceTol = 1e-10;
constexpr double kZeroRow = 1e-13;
constexpr int kDegenerateRunBeforeBland = 50;

// Dense phase-one tableau for
//   min sum(artificials)  s.t.  a_i'(x+ - x-) + s_i = b_i,  x+, x-, s >= 0,
// with rows whose b_i < 0 negated and given an artificial variable.
class PhaseOneTableau {
 public:
  PhaseOneTableau(const std::vector<Eigen::VectorXd>& rows,
                  const std::vector<double>& rhs, int dim)
      : m_(static_cast<int>(rows.size())), dim_(dim) {
    std::vector<int> art_rows;
    for (int i = 0; i < m_; ++i) {
      if (rhs[i] < 0.0) art_rows.push_back(i);
    }
    const int num_art = static_cast<int>(art_rows.size());
    first_slack_ = 2 * dim_;
    first_art_ = first_slack_ + m_;
    cols_ = first_art_ + num_art;
    width_ = cols_ + 1;  // last column holds the right-hand side
    data_.assign(static_cast<std::size_t>(m_ + 1) * width_, 0.0);
    basis_.assign(m_, -1);

    int art = 0;
    for (int i = 0; i < m_; ++i) {
      const double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
      double* row = Row(i);
      for (int j = 0; j < dim_; ++j) {
        row[j] = sign * rows[i][j];
        row[dim_ + j] = -sign * rows[i][j];
      }
      row[first_slack_ + i] = sign;
      row[cols_] = sign * rhs[i];
      if (sign < 0.0) {
        row[first_art_ + art] = 1.0;
        basis_[i] = first_art_ + art;
        ++art;
      } else {
        basis_[i] = first_slack_ + i;
      }
    }
    // Reduced costs: cost 1 on artificials, priced out against the basis.
    double* cost = Row(m_);
    for (int i : art_rows) {
      const double* row = Row(i);
      for (int j = 0; j < first_art_; ++j) cost[j] -= row[j];
      cost[cols_] -= row[cols_];
    }
  }

  // Returns the final phase-one objective.
  double Run(long iteration_cap) {
    bool bland = false;
    int degenerate_run = 0;
    for (long iter = 0;; ++iter) {
      if (iter >= iteration_cap) {
        throw Error(ErrorCode::kSolverStuck,
                    "simplex iteration cap " + std::to_string(iteration_cap) +
                        " reached");
      }
      const int enter = ChooseEntering(bland);
      if (enter < 0) break;
      const auto [leave, ratio] = ChooseLeaving(enter, bland);
      if (leave < 0) break;  // unbounded direction; cannot lower phase one
      Pivot(leave, enter);
      if (ratio <= 1e-12) {
        if (++degenerate_run > kDegenerateRunBeforeBland) bland = true;
      } else {
        degenerate_run = 0;
      }
    }
    return -Row(m_)[cols_];
  }

  Eigen::VectorXd Point() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim_);
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[i];
      const double v = Row(i)[cols_];
      if (b < dim_) {
        x[b] += v;
      } else if (b < 2 * dim_) {
        x[b - dim_] -= v;
      }
    }
    return x;
  }

 private:
  double* Row(int i) { return data_.data() + static_cast<std::size_t>(i) * width_; }
  const double* Row(int i) const {
    return data_.data() + static_cast<std::size_t>(i) * width_;
  }

  int ChooseEntering(bool bland) const {
    const double* cost = Row(m_);
    int best = -1;
    double best_value = -kPriceTol;
    for (int j = 0; j < first_art_; ++j) {
      if (cost[j] < best_value) {
        best = j;
        if (bland) break;
        best_value = cost[j];
      }
    }
    return best;
  }

  std::pair<int, double> ChooseLeaving(int enter, bool bland) const {
    int best = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    double best_pivot = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double* row = Row(i);
      const double a = row[enter];
      if (a <= kPivotTol) continue;
      const double ratio = std::max(0.0, row[cols_]) / a;
      bool take = false;
      if (ratio < best_ratio - 1e-12) {
        take = true;
      } else if (ratio <= best_ratio + 1e-12 && best >= 0) {
        take = bland ? basis_[i] < basis_[best] : a > best_pivot;
      }
      if (take) {
        best = i;
        best_ratio = std::min(ratio, best_ratio);
        best_pivot = a;
      }
    }
    return {best, best_ratio};
  }

  void Pivot(int r, int s) {
    double* pivot_row = Row(r);
    const double inv = 1.0 / pivot_row[s];
    for (int j = 0; j < width_; ++j) pivot_row[j] *= inv;
    pivot_row[s] = 1.0;
    // Columns that are zero in the pivot row are left untouched by the
    // elimination; collect the others once.
    nonzero_.clear();
    for (int j = 0; j < width_; ++j) {
      if (pivot_row[j] != 0.0) nonzero_.push_back(j);
    }
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* row = Row(i);
      const double f = row[s];
      if (f == 0.0) continue;
      for (int j : nonzero_) row[j] -= f * pivot_row[j];
      row[s] = 0.0;
    }
    basis_[r] = s;
  }

  int m_;
  int dim_;
  int first_slack_ = 0;
  int first_art_ = 0;
  int cols_ = 0;
  int width_ = 0;
  std::vector<double> data_;
  std::vector<int> basis_;
  std::vector<int> nonzero_;
};

}  // namespace

std::optional<Eigen::VectorXd> LpFeasible(std::span<const LinAtom> atoms,
                                          int dim, const LpOptions& options) {
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  rows.reserve(atoms.size());
  rhs.reserve(atoms.size());
  for (const auto& atom : atoms) {
    if (atom.c.size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "LP atom of dimension " + std::to_string(atom.c.size()) +
                      ", expected " + std::to_string(dim));
    }
    const double norm = atom.c.norm();
    if (norm <= kZeroRow) {
      // Constant atom 0 <= rhs.
      if (atom.rhs < -kLpFeasibilityTol) return std::nullopt;
      continue;
    }
    rows.push_back(atom.c / norm);
    rhs.push_back(atom.rhs / norm - options.tightening);
  }
  if (rows.empty()) return Eigen::VectorXd::Zero(dim);

  PhaseOneTableau tableau(rows, rhs, dim);
  const double infeasibility = tableau.Run(options.iteration_cap);
  if (infeasibility > kLpFeasibilityTol) return std::nullopt;

  Eigen::VectorXd x = tableau.Point();
  for (const auto& atom : atoms) {
    const double scale = std::max(1.0, atom.c.norm());
    if (atom.c.dot(x) > atom.rhs + 1e-7 * scale) {
      throw Error(ErrorCode::kSolverStuck,
                  "simplex returned a point violating an atom by " +
                      std::to_string(atom.c.dot(x) - atom.rhs));
    }
  }
  return x;
}

}  // namespace aras
