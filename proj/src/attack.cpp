#include <cmath>

#include "aras/errors.hpp"
#include "aras/parallel.hpp"
#include "aras/random.hpp"
#include "aras/synthesis.hpp"

namespace aras {
namespace {

// Conjunction of a CNF state constraint evaluated at offset + gain * a.
LinFormula Substituted(const PolytopicSet& set, const Eigen::MatrixXd& gain,
                       const Eigen::VectorXd& offset) {
  std::vector<LinFormula> conjuncts;
  for (const auto& clause : set.clauses) {
    std::vector<LinFormula> disjuncts;
    for (const auto& atom : clause) {
      disjuncts.push_back(LinFormula::Atom(
          {gain.transpose() * atom.c, atom.rhs - atom.c.dot(offset)}));
    }
    if (disjuncts.size() == 1) {
      conjuncts.push_back(std::move(disjuncts.front()));
    } else {
      conjuncts.push_back(LinFormula::Or(std::move(disjuncts)));
    }
  }
  return LinFormula::And(std::move(conjuncts));
}

}  // namespace

AttackOutcome SynthesizeAttack(const LtvSystem& sys, const Eigen::VectorXd& x,
                               std::span<const PolytopicSet> unsafe,
                               const PolytopicSet& adv, double ctr_budget,
                               double cell_radius, const LpOptions& lp) {
  const int n = sys.num_states();
  const int T = sys.horizon();
  const int lt = sys.num_adversary() * T;
  if (x.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "attack start state dimension");
  }
  if (adv.dim != lt) {
    throw Error(ErrorCode::kDimensionMismatch,
                "adversary set must be over the stacked adversary (l*T = " +
                    std::to_string(lt) + ")");
  }
  for (const auto& u : unsafe) {
    if (u.dim != n) {
      throw Error(ErrorCode::kDimensionMismatch, "unsafe set dimension");
    }
  }
  if (!(ctr_budget >= 0.0) || !(cell_radius >= 0.0)) {
    throw Error(ErrorCode::kInvalidProblem,
                "controller budget and cell radius must be >= 0");
  }

  const auto maps = AdversaryToStateMaps(sys);
  const auto leverage = ControlLeverages(sys, ctr_budget);
  const auto init_factor = InitFactors(sys, cell_radius);

  struct Target {
    int step;
    int index;
    PolytopicSet set;
  };
  std::vector<Target> targets;
  std::vector<LinFormula> options;
  for (int t = 1; t <= T; ++t) {
    const Ellipsoid parts[] = {leverage[t], init_factor[t]};
    const Eigen::VectorXd offset = maps[t].initial_gain * x;
    for (std::size_t k = 0; k < unsafe.size(); ++k) {
      PolytopicSet eroded = Strengthen(unsafe[k], parts);
      options.push_back(Substituted(eroded, maps[t].input_gain, offset));
      targets.push_back({t, static_cast<int>(k), std::move(eroded)});
    }
  }

  std::vector<LinFormula> conjuncts;
  LinFormula adv_f = LinFormula::FromCnf(adv);
  for (auto& c : adv_f.children) conjuncts.push_back(std::move(c));
  conjuncts.push_back(LinFormula::Or(std::move(options)));

  LraSolver solver(lp);
  SolveResult r = solver.Solve(LinFormula::And(std::move(conjuncts)));
  AttackOutcome out;
  out.stats = solver.stats();
  if (!r.sat) return out;

  // Report the first (step, polytope) the model actually certifies.
  for (const auto& target : targets) {
    const Eigen::VectorXd state = maps[target.step].initial_gain * x +
                                  maps[target.step].input_gain * r.model;
    if (PolytopicContains(target.set, state)) {
      out.step = target.step;
      out.unsafe_index = target.index;
      break;
    }
  }
  out.found = true;
  out.attack = AdversarySequence(sys.num_adversary(), T, std::move(r.model));
  return out;
}

AttackTable SynthesizeAttackTable(const LtvSystem& sys, const BoxRegion& states,
                                  double cover_eps,
                                  std::span<const PolytopicSet> unsafe,
                                  const PolytopicSet& adv, double ctr_budget,
                                  int threads, std::size_t cell_cap) {
  if (!(cover_eps > 0.0)) {
    throw Error(ErrorCode::kInvalidProblem, "cover eps must be positive");
  }
  const auto centers = EpsilonCoverBox(states.lo, states.hi, cover_eps, cell_cap);
  std::vector<AttackOutcome> results(centers.size());
  ParallelFor(centers.size(), threads, [&](std::size_t i) {
    results[i] =
        SynthesizeAttack(sys, centers[i], unsafe, adv, ctr_budget, cover_eps);
  });
  AttackTable table;
  table.cells_examined = centers.size();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (!results[i].found) continue;
    table.entries.push_back({Ball{centers[i], cover_eps}, *results[i].attack,
                             results[i].step, results[i].unsafe_index});
  }
  return table;
}

std::size_t CountAttackEscapes(const LtvSystem& sys, const Ball& cell,
                               const PolytopicSet& unsafe,
                               const AdversarySequence& a, int step,
                               double ctr_budget, std::size_t samples,
                               std::uint64_t seed) {
  if (step < 1 || step > sys.horizon()) {
    throw Error(ErrorCode::kIndexOutOfRange, "attack step out of range");
  }
  const int n = sys.num_states();
  const int mt = sys.num_controls() * sys.horizon();
  const double radius = std::sqrt(ctr_budget);
  Rng rng(seed);
  std::size_t escapes = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const Eigen::VectorXd x0 = cell.center + rng.InBall(n, cell.radius);
    const Eigen::VectorXd u = (k % 2 == 0) ? rng.OnSphere(mt, radius)
                                           : rng.InBall(mt, radius);
    const Trajectory traj =
        Simulate(sys, x0, ControlSequence(sys.num_controls(), sys.horizon(), u), a);
    if (!PolytopicContains(unsafe, traj.states[step])) ++escapes;
  }
  return escapes;
}

}  // namespace aras
