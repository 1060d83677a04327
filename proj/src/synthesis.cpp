#include "aras/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "aras/errors.hpp"
#include "aras/parallel.hpp"
#include "aras/random.hpp"

namespace aras {
namespace {

void Require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

// Rewrites a state-space CNF constraint on x_t = offset + gain * v as
// conjuncts over the decision vector v, appending them to `out`.
void AppendSubstituted(const PolytopicSet& set, const Eigen::MatrixXd& gain,
                       const Eigen::VectorXd& offset,
                       std::vector<LinFormula>& out) {
  for (const auto& clause : set.clauses) {
    std::vector<LinFormula> disjuncts;
    disjuncts.reserve(clause.size());
    for (const auto& atom : clause) {
      disjuncts.push_back(LinFormula::Atom(
          {gain.transpose() * atom.c, atom.rhs - atom.c.dot(offset)}));
    }
    if (disjuncts.size() == 1) {
      out.push_back(std::move(disjuncts.front()));
    } else {
      out.push_back(LinFormula::Or(std::move(disjuncts)));
    }
  }
}

void AppendCnf(const PolytopicSet& set, std::vector<LinFormula>& out) {
  LinFormula f = LinFormula::FromCnf(set);
  for (auto& c : f.children) out.push_back(std::move(c));
}

SynthesisOutcome SolveFormula(const LinFormula& f, const FormulaSize& size,
                              const LtvSystem& sys, const LpOptions& lp) {
  SynthesisOutcome out;
  out.formula = size;
  LraSolver solver(lp);
  SolveResult r = solver.Solve(f);
  out.stats = solver.stats();
  if (r.sat) {
    out.verdict = Verdict::kSuccess;
    out.control = ControlSequence(sys.num_controls(), sys.horizon(),
                                  std::move(r.model));
  }
  return out;
}

ArasProblem WithInit(const ArasProblem& p, Ball init) {
  ArasProblem q = p;
  q.init = std::move(init);
  return q;
}

ArasProblem WithBudget(const ArasProblem& p, double budget) {
  ArasProblem q = p;
  q.adv_budget = budget;
  return q;
}

}  // namespace

const char* ToString(Verdict v) {
  switch (v) {
    case Verdict::kSuccess: return "success";
    case Verdict::kFailed: return "failed";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

void ArasProblem::Validate() const {
  const int n = sys.num_states();
  const int mt = sys.num_controls() * sys.horizon();
  Require(init.center.size() == n, ErrorCode::kDimensionMismatch,
          "init centre has dimension " + std::to_string(init.center.size()) +
              ", state dimension is " + std::to_string(n));
  Require(init.radius >= 0.0 && std::isfinite(init.radius),
          ErrorCode::kInvalidProblem, "init radius must be finite and >= 0");
  Require(adv_budget >= 0.0 && std::isfinite(adv_budget),
          ErrorCode::kInvalidProblem, "adversary budget must be finite and >= 0");
  Require(safe.dim == n, ErrorCode::kDimensionMismatch, "safe set dimension");
  Require(goal.dim == n, ErrorCode::kDimensionMismatch, "goal set dimension");
  Require(ctr.dim == mt, ErrorCode::kDimensionMismatch,
          "controller set must be over the stacked control (m*T = " +
              std::to_string(mt) + ")");
}

LinFormula BuildSynthesisFormula(const ArasProblem& p, FormulaSize* size,
                                 bool* init_safe) {
  p.Validate();
  const int T = p.sys.horizon();
  const auto maps = ControlToStateMaps(p.sys);
  const auto leverage = AdvLeverages(p.sys, p.adv_budget);
  const auto init_factor = InitFactors(p.sys, p.init.radius);

  std::vector<LinFormula> conjuncts;
  AppendCnf(p.ctr, conjuncts);
  bool safe_at_start = true;
  for (int t = 0; t <= T; ++t) {
    const Ellipsoid parts[] = {leverage[t], init_factor[t]};
    const PolytopicSet safe_t = Strengthen(p.safe, parts);
    if (t == 0) {
      safe_at_start = PolytopicContains(safe_t, p.init.center);
      continue;
    }
    AppendSubstituted(safe_t, maps[t].input_gain,
                      maps[t].initial_gain * p.init.center, conjuncts);
  }
  const Ellipsoid goal_parts[] = {leverage[T], init_factor[T]};
  AppendSubstituted(Strengthen(p.goal, goal_parts), maps[T].input_gain,
                    maps[T].initial_gain * p.init.center, conjuncts);

  if (size != nullptr) {
    size->safe = p.safe.size();
    size->goal = p.goal.size();
    size->ctr = p.ctr.size();
    size->total = static_cast<std::size_t>(T) * size->safe + size->goal + size->ctr;
  }
  if (init_safe != nullptr) *init_safe = safe_at_start;
  return LinFormula::And(std::move(conjuncts));
}

SynthesisOutcome Synthesize(const ArasProblem& p, const LpOptions& lp) {
  FormulaSize size;
  bool init_safe = true;
  const LinFormula f = BuildSynthesisFormula(p, &size, &init_safe);
  if (!init_safe) {
    SynthesisOutcome out;
    out.formula = size;
    out.stats.atom_count = f.CountAtoms();
    return out;
  }
  return SolveFormula(f, size, p.sys, lp);
}

ValidationReport ValidateControl(const ArasProblem& p, const ControlSequence& u,
                                 std::size_t samples, std::uint64_t seed) {
  p.Validate();
  const int n = p.sys.num_states();
  const int T = p.sys.horizon();
  const int lt = p.sys.num_adversary() * T;
  ValidationReport report;
  if (!PolytopicContains(p.ctr, u.stacked())) {
    ++report.ctr_violations;
    report.first_violation = "control outside Ctr";
  }

  auto check = [&](const Eigen::VectorXd& x0, const Eigen::VectorXd& a) {
    ++report.samples;
    const Trajectory traj =
        Simulate(p.sys, x0, u, AdversarySequence(p.sys.num_adversary(), T, a));
    bool bad = false;
    for (int t = 0; t <= T; ++t) {
      if (!PolytopicContains(p.safe, traj.states[t])) {
        ++report.safe_violations;
        if (report.first_violation.empty()) {
          std::ostringstream os;
          os << "unsafe at t=" << t << " state=" << traj.states[t].transpose();
          report.first_violation = os.str();
        }
        bad = true;
        break;
      }
    }
    if (!bad && !PolytopicContains(p.goal, traj.states[T])) {
      ++report.goal_violations;
      if (report.first_violation.empty()) {
        std::ostringstream os;
        os << "goal missed, x_T=" << traj.states[T].transpose();
        report.first_violation = os.str();
      }
    }
  };

  Rng rng(seed);
  const double sqrt_b = std::sqrt(p.adv_budget);
  for (std::size_t k = 0; k < samples; ++k) {
    const Eigen::VectorXd x0 = p.init.center + rng.InBall(n, p.init.radius);
    check(x0, rng.OnSphere(lt, sqrt_b));
  }

  // Worst cases: each atom pushed by both the initial offset and the
  // adversary along its normal.
  const auto adv_maps = AdversaryToStateMaps(p.sys);
  auto push = [&](const Eigen::VectorXd& c, int t) {
    Eigen::VectorXd x0 = p.init.center;
    const Eigen::VectorXd ci = adv_maps[t].initial_gain.transpose() * c;
    if (ci.norm() > 0.0) x0 += p.init.radius * ci / ci.norm();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(lt);
    const Eigen::VectorXd ca = adv_maps[t].input_gain.transpose() * c;
    if (ca.norm() > 0.0) a = sqrt_b * ca / ca.norm();
    check(x0, a);
  };
  for (int t = 0; t <= T; ++t) {
    for (const auto& clause : p.safe.clauses) {
      for (const auto& atom : clause) push(atom.c, t);
    }
  }
  for (const auto& clause : p.goal.clauses) {
    for (const auto& atom : clause) push(atom.c, T);
  }
  return report;
}

// ---------------------------------------------------------------------------

int RegionDim(const ConvexRegion& r) {
  return std::visit(
      [](const auto& region) -> int {
        using R = std::decay_t<decltype(region)>;
        if constexpr (std::is_same_v<R, Ball>) {
          return static_cast<int>(region.center.size());
        } else {
          return static_cast<int>(region.lo.size());
        }
      },
      r);
}

bool RegionContains(const ConvexRegion& r, const Eigen::VectorXd& x, double tol) {
  return std::visit(
      [&](const auto& region) -> bool {
        using R = std::decay_t<decltype(region)>;
        if constexpr (std::is_same_v<R, Ball>) {
          return region.Contains(x, tol);
        } else {
          return ((x - region.lo).array() >= -tol).all() &&
                 ((region.hi - x).array() >= -tol).all();
        }
      },
      r);
}

std::vector<Eigen::VectorXd> RegionCover(const ConvexRegion& r, double eps,
                                         std::size_t cell_cap) {
  return std::visit(
      [&](const auto& region) -> std::vector<Eigen::VectorXd> {
        using R = std::decay_t<decltype(region)>;
        if constexpr (std::is_same_v<R, Ball>) {
          return EpsilonCover(region, eps, cell_cap);
        } else {
          return EpsilonCoverBox(region.lo, region.hi, eps, cell_cap);
        }
      },
      r);
}

PolytopicSet InnerPolytope(const ControlRegion& r, int dim) {
  PolytopicSet out = std::visit(
      [&](const auto& region) -> PolytopicSet {
        using R = std::decay_t<decltype(region)>;
        if constexpr (std::is_same_v<R, PolytopicSet>) {
          return region;
        } else if constexpr (std::is_same_v<R, BoxRegion>) {
          return BoxSet(region.lo, region.hi);
        } else {
          const double half =
              region.radius / std::sqrt(static_cast<double>(region.center.size()));
          return BoxSet(region.center.array() - half,
                        region.center.array() + half);
        }
      },
      r);
  Require(out.dim == dim, ErrorCode::kDimensionMismatch,
          "controller region must be over the stacked control");
  return out;
}

SynthesisOutcome SynthesizeGeneralized(const GeneralizedProblem& p, double eps,
                                       std::size_t cell_cap, const LpOptions& lp) {
  Require(eps > 0.0, ErrorCode::kInvalidProblem, "eps must be positive");
  const LtvSystem& sys = p.sys;
  const int n = sys.num_states();
  const int T = sys.horizon();
  Require(RegionDim(p.init) == n, ErrorCode::kDimensionMismatch, "init region");
  Require(RegionDim(p.adv) == sys.num_adversary() * T,
          ErrorCode::kDimensionMismatch,
          "adversary region must be over the stacked adversary");
  Require(p.safe.dim == n && p.goal.dim == n, ErrorCode::kDimensionMismatch,
          "safe/goal dimension");

  const auto thetas = RegionCover(p.init, eps, cell_cap);
  const auto advs = RegionCover(p.adv, eps, cell_cap);
  Require(static_cast<double>(thetas.size()) * static_cast<double>(advs.size()) <=
              static_cast<double>(cell_cap),
          ErrorCode::kCoverTooLarge, "init x adversary cover pairs exceed cap");

  const PolytopicSet ctr = InnerPolytope(p.ctr, sys.num_controls() * T);
  const auto maps = ControlToStateMaps(sys);
  const auto adv_maps = AdversaryToStateMaps(sys);
  const auto leverage = AdvLeverages(sys, eps * eps);
  const auto init_factor = InitFactors(sys, eps);

  std::vector<PolytopicSet> safe_t;
  safe_t.reserve(T + 1);
  for (int t = 0; t <= T; ++t) {
    const Ellipsoid parts[] = {leverage[t], init_factor[t]};
    safe_t.push_back(Strengthen(p.safe, parts));
  }
  const Ellipsoid goal_parts[] = {leverage[T], init_factor[T]};
  const PolytopicSet goal_t = Strengthen(p.goal, goal_parts);

  SynthesisOutcome inconclusive;
  inconclusive.verdict = Verdict::kInconclusive;
  std::vector<LinFormula> conjuncts;
  AppendCnf(ctr, conjuncts);
  for (const auto& theta : thetas) {
    if (!PolytopicContains(safe_t[0], theta)) return inconclusive;
    for (const auto& a : advs) {
      for (int t = 1; t <= T; ++t) {
        const Eigen::VectorXd offset =
            maps[t].initial_gain * theta + adv_maps[t].input_gain * a;
        AppendSubstituted(safe_t[t], maps[t].input_gain, offset, conjuncts);
      }
      const Eigen::VectorXd offset =
          maps[T].initial_gain * theta + adv_maps[T].input_gain * a;
      AppendSubstituted(goal_t, maps[T].input_gain, offset, conjuncts);
    }
  }
  FormulaSize size;
  size.safe = p.safe.size();
  size.goal = p.goal.size();
  size.ctr = ctr.size();
  size.total = thetas.size() * advs.size() *
                   (static_cast<std::size_t>(T) * size.safe + size.goal) +
               size.ctr;
  SynthesisOutcome out =
      SolveFormula(LinFormula::And(std::move(conjuncts)), size, sys, lp);
  if (out.verdict != Verdict::kSuccess) out.verdict = Verdict::kInconclusive;
  return out;
}

// ---------------------------------------------------------------------------

TableOutcome TableSynthesize(const ArasProblem& p, const TableOptions& opts) {
  p.Validate();
  TableOutcome out;
  const double dia = 2.0 * p.init.radius;
  if (dia == 0.0) {
    ++out.synth_calls;
    SynthesisOutcome r = Synthesize(p);
    if (r.verdict == Verdict::kSuccess) {
      out.verdict = Verdict::kSuccess;
      out.table.entries.push_back({p.init, *r.control});
    } else {
      out.verdict = Verdict::kFailed;
      out.witness = p.init.center;
    }
    return out;
  }
  const double eps_min = opts.eps_min > 0.0 ? opts.eps_min : dia / 1024.0;

  std::deque<Ball> work;
  for (auto& c : EpsilonCover(p.init, dia, opts.cell_cap)) {
    work.push_back({std::move(c), dia});
  }
  std::vector<Ball> snapshot;
  while (!work.empty()) {
    if (opts.observer) {
      snapshot.assign(work.begin(), work.end());
      opts.observer(out.table, snapshot);
    }
    Ball cell = std::move(work.front());
    work.pop_front();

    ++out.synth_calls;
    SynthesisOutcome whole = Synthesize(WithInit(p, cell));
    if (whole.verdict == Verdict::kSuccess) {
      out.table.entries.push_back({cell, *whole.control});
      continue;
    }
    ++out.synth_calls;
    SynthesisOutcome centre = Synthesize(WithInit(p, Ball{cell.center, 0.0}));
    if (centre.verdict != Verdict::kSuccess) {
      out.verdict = Verdict::kFailed;
      out.witness = cell.center;
      return out;
    }
    const double half = 0.5 * cell.radius;
    if (half < eps_min) {
      out.verdict = Verdict::kInconclusive;
      out.stuck_cell = cell;
      return out;
    }
    for (auto& c : EpsilonCoverIntersection(p.init, cell, half, opts.cell_cap)) {
      work.push_back({std::move(c), half});
    }
  }
  if (opts.observer) opts.observer(out.table, {});
  out.verdict = Verdict::kSuccess;
  return out;
}

// ---------------------------------------------------------------------------

double MaxFeasibleBudget(const ArasProblem& p, double tol, const LpOptions& lp) {
  Require(tol > 0.0, ErrorCode::kInvalidProblem, "tol must be positive");
  auto feasible = [&](double b) {
    return Synthesize(WithBudget(p, b), lp).verdict == Verdict::kSuccess;
  };
  if (!feasible(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > kBudgetSearchCap) {
      throw Error(ErrorCode::kCapExceeded,
                  "still feasible at adversary budget 2^60");
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> VulnerabilityGrid(const ArasProblem& p,
                                      std::span<const Eigen::VectorXd> centers,
                                      double tol, int threads) {
  std::vector<double> out(centers.size(), 0.0);
  ParallelFor(centers.size(), threads, [&](std::size_t i) {
    out[i] = MaxFeasibleBudget(WithInit(p, Ball{centers[i], p.init.radius}), tol);
  });
  return out;
}

}  // namespace aras
