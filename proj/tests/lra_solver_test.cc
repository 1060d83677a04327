#include "aras/lra_solver.hpp"

#include <gtest/gtest.h>

#include "aras/errors.hpp"
#include "oracles.hpp"

namespace aras {
namespace {

LinAtom A1(double c, double rhs) { return {Eigen::VectorXd::Constant(1, c), rhs}; }

GTEST_TEST(LpFeasible, UnitInterval) {
  const std::vector<LinAtom> atoms{A1(1, 1), A1(-1, 0)};
  const auto x = LpFeasible(atoms, 1);
  ASSERT_TRUE(x.has_value());
  EXPECT_GE((*x)[0], -1e-9);
  EXPECT_LE((*x)[0], 1 + 1e-9);
}

GTEST_TEST(LpFeasible, EmptyInterval) {
  const std::vector<LinAtom> atoms{A1(1, -1), A1(-1, 0)};
  EXPECT_FALSE(LpFeasible(atoms, 1).has_value());
}

GTEST_TEST(LpFeasible, ConstantAtoms) {
  const std::vector<LinAtom> ok{{Eigen::Vector2d::Zero(), 1.0}};
  EXPECT_TRUE(LpFeasible(ok, 2).has_value());
  const std::vector<LinAtom> bad{{Eigen::Vector2d::Zero(), -1.0}};
  EXPECT_FALSE(LpFeasible(bad, 2).has_value());
}

GTEST_TEST(LpFeasible, AgreesWithVertexOracle) {
  Rng rng(31);
  int band = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 1 + static_cast<int>(rng.Index(3));
    const int k = 1 + static_cast<int>(rng.Index(12));
    std::vector<LinAtom> atoms;
    for (int i = 0; i < k; ++i) atoms.push_back({rng.NormalVector(d), rng.Normal()});
    const double slack = oracle::MaxNormalizedSlack(atoms, d);
    const auto x = LpFeasible(atoms, d);
    if (x) {
      for (const auto& a : atoms) EXPECT_TRUE(a.Holds(*x, 1e-7 * (1 + a.c.norm())));
    }
    if (slack > 1e-7) {
      EXPECT_TRUE(x.has_value()) << "trial " << trial;
    } else if (slack < -1e-7) {
      EXPECT_FALSE(x.has_value()) << "trial " << trial;
    } else {
      ++band;
    }
  }
  EXPECT_LE(band, 3);
}

GTEST_TEST(LpFeasible, DegenerateStaircase) {
  // Many copies of the same constraints through one vertex.
  std::vector<LinAtom> atoms;
  for (int k = 0; k < 30; ++k) {
    atoms.push_back({Eigen::Vector2d(1, 1), 0.0});
    atoms.push_back({Eigen::Vector2d(-1, 0), 0.0});
    atoms.push_back({Eigen::Vector2d(0, -1), 0.0});
  }
  const auto x = LpFeasible(atoms, 2);
  ASSERT_TRUE(x.has_value());
  EXPECT_LT(x->norm(), 1e-6);
}

GTEST_TEST(LpFeasible, IterationCapRaises) {
  Rng rng(2);
  std::vector<LinAtom> atoms;
  for (int i = 0; i < 40; ++i) atoms.push_back({rng.NormalVector(5), rng.Normal()});
  LpOptions opts;
  opts.iteration_cap = 1;
  try {
    LpFeasible(atoms, 5, opts);
    SUCCEED();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSolverStuck);
  }
}

GTEST_TEST(LraSolver, ConjunctionNeedsNoBranching) {
  LraSolver solver;
  const auto r = solver.Solve(LinFormula::And({LinFormula::Atom(A1(1, 2)),
                                               LinFormula::Atom(A1(-1, -1))}));
  ASSERT_TRUE(r.sat);
  EXPECT_EQ(solver.stats().branches, 0u);
  EXPECT_EQ(solver.stats().lp_calls, 1u);
}

GTEST_TEST(LraSolver, PicksSurvivingBranch) {
  // (x <= 0 or x >= 1) and x >= 0.5
  const LinFormula f = LinFormula::And(
      {LinFormula::Or({LinFormula::Atom(A1(1, 0)), LinFormula::Atom(A1(-1, -1))}),
       LinFormula::Atom(A1(-1, -0.5))});
  const auto [r, stats] = Solve(f);
  ASSERT_TRUE(r.sat);
  EXPECT_GE(r.model[0], 1 - 1e-9);
  EXPECT_TRUE(Evaluate(f, r.model));
  EXPECT_EQ(stats.atom_count, 3u);
  EXPECT_EQ(stats.clause_count, 2u);
}

GTEST_TEST(LraSolver, TrivialFormulas) {
  EXPECT_FALSE(Solve(LinFormula::And({LinFormula::Atom(A1(1, 0)), LinFormula::False()}))
                   .first.sat);
  EXPECT_TRUE(Solve(LinFormula::And({LinFormula::Atom(A1(1, 0)), LinFormula::True()}))
                  .first.sat);
}

GTEST_TEST(Evaluate, Examples) {
  EXPECT_TRUE(Evaluate(LinFormula::Atom(A1(1, 1)), Eigen::VectorXd::Zero(1)));
  EXPECT_TRUE(Evaluate(LinFormula::Or({LinFormula::Atom(A1(1, -1)), LinFormula::Atom(A1(1, 5))}),
                       Eigen::VectorXd::Zero(1)));
  EXPECT_FALSE(Evaluate(LinFormula::False(), Eigen::VectorXd::Zero(1)));
  EXPECT_THROW(Evaluate(LinFormula::Atom(A1(1, 1)), Eigen::VectorXd::Zero(2)), Error);
}

GTEST_TEST(LraSolver, AgreesWithDisjunctEnumeration) {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.Index(3));
    const int nclauses = 1 + static_cast<int>(rng.Index(3));
    std::vector<std::vector<LinAtom>> clauses;
    std::vector<LinFormula> conj;
    for (int i = 0; i < nclauses; ++i) {
      const int width = 1 + static_cast<int>(rng.Index(3));
      std::vector<LinAtom> clause;
      std::vector<LinFormula> disj;
      for (int j = 0; j < width; ++j) {
        clause.push_back({rng.NormalVector(d), rng.Normal()});
        disj.push_back(LinFormula::Atom(clause.back()));
      }
      clauses.push_back(clause);
      conj.push_back(LinFormula::Or(std::move(disj)));
    }
    const LinFormula f = LinFormula::And(std::move(conj));
    const auto [r, stats] = Solve(f);
    const double slack = oracle::CnfMaxSlack(clauses, d);
    if (r.sat) EXPECT_TRUE(Evaluate(f, r.model, 1e-7));
    if (std::abs(slack) > 1e-7) EXPECT_EQ(r.sat, slack > 0) << "trial " << trial;
  }
}

GTEST_TEST(ToSmtLib, Shape) {
  const LinFormula f = LinFormula::And(
      {LinFormula::Or({LinFormula::Atom({Eigen::Vector2d(1, -2), 0.5}),
                       LinFormula::Atom({Eigen::Vector2d(0, 1), -1})})});
  const std::string s = ToSmtLib(f, "u");
  EXPECT_NE(s.find("(set-logic QF_LRA)"), std::string::npos);
  EXPECT_NE(s.find("(declare-const u0 Real)"), std::string::npos);
  EXPECT_NE(s.find("(declare-const u1 Real)"), std::string::npos);
  EXPECT_NE(s.find("(* (- 2.0) u1)"), std::string::npos);
  EXPECT_NE(s.find("(check-sat)"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), '('), std::count(s.begin(), s.end(), ')'));
}

}  // namespace
}  // namespace aras
