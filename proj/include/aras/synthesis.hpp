#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "aras/geometry.hpp"
#include "aras/lra_solver.hpp"
#include "aras/model.hpp"

namespace aras {

/// Adversarial reach-avoid instance: Init is the ball B_delta(theta), the
/// adversary is any sequence with sum_t |a_t|^2 <= adv_budget, and ctr
/// constrains the stacked control (dimension m*T).
struct ArasProblem {
  LtvSystem sys;
  Ball init;
  PolytopicSet safe;
  PolytopicSet goal;
  PolytopicSet ctr;
  double adv_budget = 0.0;

  /// Throws kDimensionMismatch / kInvalidProblem.
  void Validate() const;
};

enum class Verdict { kSuccess, kFailed, kInconclusive };

const char* ToString(Verdict v);

/// Atom counts of the synthesis formula. total = T*safe + goal + ctr: the
/// safe constraint at t = 0 does not involve the control and is decided
/// before the formula is built.
struct FormulaSize {
  std::size_t safe = 0;
  std::size_t goal = 0;
  std::size_t ctr = 0;
  std::size_t total = 0;
};

struct SynthesisOutcome {
  Verdict verdict = Verdict::kFailed;
  std::optional<ControlSequence> control;
  SolveStats stats;
  FormulaSize formula;
};

/// Formula over the stacked control whose models are exactly the solutions
/// of the instance (Safe and Goal strengthened by leverage and
/// initialisation ellipsoids, trajectory substituted as an affine map of
/// the control). Sets *init_safe to whether theta lies in the strengthened
/// safe set at t = 0.
LinFormula BuildSynthesisFormula(const ArasProblem& p, FormulaSize* size,
                                 bool* init_safe);

/// Sound and complete open-loop synthesis: kSuccess with a control, or
/// kFailed when none exists (up to the LP tolerance band).
SynthesisOutcome Synthesize(const ArasProblem& p, const LpOptions& lp = {});

struct ValidationReport {
  std::size_t samples = 0;
  std::size_t safe_violations = 0;
  std::size_t goal_violations = 0;
  std::size_t ctr_violations = 0;
  std::string first_violation;

  std::size_t violations() const {
    return safe_violations + goal_violations + ctr_violations;
  }
};

/// Monte Carlo check of a control: `samples` random initial states in Init
/// paired with adversaries on the budget sphere, plus, for every Safe/Goal
/// atom and time, the initial state and adversary that push hardest
/// against that atom.
ValidationReport ValidateControl(const ArasProblem& p, const ControlSequence& u,
                                 std::size_t samples, std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Generalised sets

struct BoxRegion {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

/// Compact convex region used for Init and the adversary in generalised
/// synthesis.
using ConvexRegion = std::variant<Ball, BoxRegion>;

/// Controller constraint for generalised synthesis.
using ControlRegion = std::variant<PolytopicSet, BoxRegion, Ball>;

int RegionDim(const ConvexRegion& r);
bool RegionContains(const ConvexRegion& r, const Eigen::VectorXd& x,
                    double tol = 1e-12);
std::vector<Eigen::VectorXd> RegionCover(const ConvexRegion& r, double eps,
                                         std::size_t cell_cap);

/// Polytopic inner approximation of the controller region. Polytopic sets
/// and boxes are returned exactly; a ball yields its inscribed cube.
PolytopicSet InnerPolytope(const ControlRegion& r, int dim);

struct GeneralizedProblem {
  LtvSystem sys;
  ConvexRegion init;
  ConvexRegion adv;  // over the stacked adversary, dimension l*T
  ControlRegion ctr;
  PolytopicSet safe;
  PolytopicSet goal;
};

/// Cover-based synthesis: kSuccess is sound for every eps; otherwise the
/// verdict is kInconclusive, never kFailed.
SynthesisOutcome SynthesizeGeneralized(const GeneralizedProblem& p, double eps,
                                       std::size_t cell_cap = kDefaultCellCap,
                                       const LpOptions& lp = {});

// ---------------------------------------------------------------------------
// State-dependent look-up tables

struct TableEntry {
  Ball cell;
  ControlSequence u;
};

struct LookupTable {
  std::vector<TableEntry> entries;
};

struct TableOptions {
  /// Refinement floor; <= 0 selects Dia(Init) / 2^10.
  double eps_min = 0.0;
  std::size_t cell_cap = kDefaultCellCap;
  /// Called at the start of every iteration with the table and the cells
  /// still to examine.
  std::function<void(const LookupTable&, std::span<const Ball>)> observer;
};

struct TableOutcome {
  Verdict verdict = Verdict::kFailed;
  LookupTable table;
  /// Initial state from which no control exists (kFailed).
  std::optional<Eigen::VectorXd> witness;
  /// Cell that hit the refinement floor (kInconclusive).
  std::optional<Ball> stuck_cell;
  std::size_t synth_calls = 0;
};

/// Work-list refinement: a cell that fails as a ball but succeeds from its
/// centre is re-covered at half the radius; a failing centre ends the run
/// with that centre as witness.
TableOutcome TableSynthesize(const ArasProblem& p, const TableOptions& opts = {});

// ---------------------------------------------------------------------------
// Vulnerability

inline constexpr double kBudgetSearchCap = 1152921504606846976.0;  // 2^60

/// Largest adversary budget for which synthesis still succeeds, to within
/// tol. Doubling from 1 brackets the critical budget, bisection narrows it;
/// the returned value b satisfies: feasible at max(0, b - tol), infeasible
/// at b + tol. Returns 0 when infeasible even without an adversary.
double MaxFeasibleBudget(const ArasProblem& p, double tol,
                         const LpOptions& lp = {});

/// MaxFeasibleBudget from each point initial state (Init radius kept),
/// computed on `threads` workers; output order follows `centers`.
std::vector<double> VulnerabilityGrid(const ArasProblem& p,
                                      std::span<const Eigen::VectorXd> centers,
                                      double tol, int threads = 1);

// ---------------------------------------------------------------------------
// Attack synthesis

struct AttackOutcome {
  bool found = false;
  std::optional<AdversarySequence> attack;
  /// Step at which every admissible control is forced into Unsafe.
  int step = -1;
  /// Index of the unsafe polytope that is entered.
  int unsafe_index = -1;
  SolveStats stats;
};

/// Looks for a in adv such that, for some step t in 1..T and one of the
/// unsafe polytopes, xi(x, u, a, t) is unsafe for every u with
/// sum_t |u_t|^2 <= ctr_budget and every start within cell_radius of x.
AttackOutcome SynthesizeAttack(const LtvSystem& sys, const Eigen::VectorXd& x,
                               std::span<const PolytopicSet> unsafe,
                               const PolytopicSet& adv, double ctr_budget,
                               double cell_radius = 0.0,
                               const LpOptions& lp = {});

struct AttackEntry {
  Ball cell;
  AdversarySequence a;
  int step = -1;
  int unsafe_index = -1;
};

struct AttackTable {
  std::vector<AttackEntry> entries;
  std::size_t cells_examined = 0;
};

/// Uniform cover of the state box, one attack search per cell, no
/// refinement. Cells are processed on `threads` workers; entries keep the
/// cover order.
AttackTable SynthesizeAttackTable(const LtvSystem& sys, const BoxRegion& states,
                                  double cover_eps,
                                  std::span<const PolytopicSet> unsafe,
                                  const PolytopicSet& adv, double ctr_budget,
                                  int threads = 1,
                                  std::size_t cell_cap = kDefaultCellCap);

/// Counts sampled controls (budget sphere and interior, and starts in the
/// cell) for which the attacked trajectory is not in the unsafe polytope at
/// the certified step.
std::size_t CountAttackEscapes(const LtvSystem& sys, const Ball& cell,
                               const PolytopicSet& unsafe,
                               const AdversarySequence& a, int step,
                               double ctr_budget, std::size_t samples,
                               std::uint64_t seed = 1);

}  // namespace aras
