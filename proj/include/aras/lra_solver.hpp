#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aras/geometry.hpp"

namespace aras {

// Tolerance band of the theory check, in units of distance to the atom's
// hyperplane (rows are normalised before pivoting). Sat means the phase-one
// optimum (total normalised violation) is at most kLpFeasibilityTol, so
// sets without interior such as {x : x <= 0, -x <= 0} are feasible. A
// positive tightening shifts every hyperplane inwards by that distance.
inline constexpr double kLpTightening = 0.0;
inline constexpr double kLpFeasibilityTol = 1e-10;
inline constexpr long kLpIterationCap = 1000000;

struct LpOptions {
  double tightening = kLpTightening;
  long iteration_cap = kLpIterationCap;
};

/// Finds a point satisfying every atom c'x <= rhs over free variables x in
/// R^dim with a two-phase simplex (phase one only: the objective is the
/// total infeasibility). Dantzig pricing falls back to Bland's rule after a
/// run of degenerate pivots.
std::optional<Eigen::VectorXd> LpFeasible(std::span<const LinAtom> atoms,
                                          int dim,
                                          const LpOptions& options = {});

/// Negation-free boolean combination of linear atoms.
struct LinFormula {
  enum class Kind { kAtom, kAnd, kOr };

  Kind kind = Kind::kAnd;
  LinAtom atom;
  std::vector<LinFormula> children;

  static LinFormula Atom(LinAtom a);
  static LinFormula And(std::vector<LinFormula> children);
  static LinFormula Or(std::vector<LinFormula> children);
  static LinFormula True() { return And({}); }
  static LinFormula False() { return Or({}); }

  /// AND of clauses; single-atom clauses become bare atoms.
  static LinFormula FromCnf(const PolytopicSet& set);

  std::size_t CountAtoms() const;
  /// Dimension of the first atom found, or 0 for an atom-free formula.
  int Dim() const;
};

bool Evaluate(const LinFormula& f, const Eigen::VectorXd& x,
              double slack = kMembershipSlack);

struct SolveResult {
  bool sat = false;
  Eigen::VectorXd model;
};

struct SolveStats {
  std::size_t atom_count = 0;
  std::size_t clause_count = 0;
  std::size_t lp_calls = 0;
  std::size_t branches = 0;
  std::size_t max_depth = 0;
};

/// Exhaustive depth-first search over OR-nodes with a simplex theory check
/// at every node.
///
/// Each node solves the LP of the atoms committed so far; an infeasible LP
/// prunes the subtree. Otherwise the first pending disjunction (smaller
/// disjunctions first, then formula order) that the LP point falsifies is
/// branched on, one child at a time in formula order. When the LP point
/// satisfies every pending disjunction it is returned as the model. Any
/// satisfying point lies in some child of every disjunction, so exhausting
/// the search proves unsatisfiability up to the LP tolerance band.
///
/// A solver owns mutable state; use one instance per thread.
class LraSolver {
 public:
  explicit LraSolver(LpOptions options = {}) : options_(options) {}

  SolveResult Solve(const LinFormula& f);
  const SolveStats& stats() const { return stats_; }

 private:
  struct Frame;
  bool Search(Frame& frame, std::size_t depth, Eigen::VectorXd& model);

  LpOptions options_;
  SolveStats stats_;
  int dim_ = 0;
};

/// Convenience wrapper around a fresh LraSolver.
std::pair<SolveResult, SolveStats> Solve(const LinFormula& f);

/// QF_LRA script declaring x0 ... x{d-1} as reals and asserting f.
std::string ToSmtLib(const LinFormula& f, const std::string& var_prefix = "x");

}  // namespace aras
