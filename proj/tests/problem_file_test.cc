#include "aras/problem_file.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "aras/errors.hpp"

namespace aras {
namespace {

const char* kIntegrator = R"({
  "system": {"n": 1, "m": 1, "l": 1, "T": 2, "time_invariant": true,
             "A": [[1]], "B": [[1]], "C": [[1]]},
  "init": {"theta": [0], "delta": 0},
  "safe": {"clauses": [[{"c": [1], "rhs": 10}], [{"c": [-1], "rhs": 10}]]},
  "goal": {"clauses": [[{"c": [1], "rhs": 1.1}], [{"c": [-1], "rhs": -0.9}]]},
  "ctr": {"step_box": {"lo": [-1], "hi": [1]}},
  "adversary": {"budget": 0}
})";

std::string BoxObstacle(double x, double y) {
  std::ostringstream os;
  os << R"({"A": [[1,0],[-1,0],[0,1],[0,-1]], "b": [)" << x + 1 << "," << 1 - x << ","
     << y + 1 << "," << 1 - y << "]}";
  return os.str();
}

ErrorCode CodeOf(const std::string& text, std::string* message = nullptr) {
  try {
    ParseProblem(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kInvalidProblem;
}

GTEST_TEST(ParseProblem, MinimalIntegrator) {
  const ArasProblem p = ParseProblem(kIntegrator).ToProblem();
  EXPECT_EQ(p.sys.num_states(), 1);
  EXPECT_EQ(p.sys.horizon(), 2);
  EXPECT_EQ(p.safe.size(), 2u);
  EXPECT_EQ(p.ctr.size(), 4u);
  EXPECT_EQ(p.ctr.dim, 2);
}

GTEST_TEST(ParseProblem, ObstaclesBecomeClauses) {
  const std::string text = std::string(R"({
    "system": {"n": 2, "m": 2, "l": 2, "T": 1,
               "A": [[1,0],[0,1]], "B": [[1,0],[0,1]], "C": [[1,0],[0,1]]},
    "init": {"theta": [5, 5], "delta": 0.1},
    "safe": {"clauses": [[{"c": [1,0], "rhs": 20}], [{"c": [-1,0], "rhs": 20}],
                         [{"c": [0,1], "rhs": 20}], [{"c": [0,-1], "rhs": 20}]]},
    "obstacles": [)") + BoxObstacle(0, 0) + "," + BoxObstacle(3, 0) + "," +
                           BoxObstacle(0, 3) + R"(],
    "goal": {"clauses": []},
    "ctr": {"clauses": []},
    "adversary": {"budget": 0.5}
  })";
  const ArasProblem p = ParseProblem(text).ToProblem();
  ASSERT_EQ(p.safe.clauses.size(), 7u);
  for (int k = 4; k < 7; ++k) EXPECT_EQ(p.safe.clauses[k].size(), 4u);
  EXPECT_EQ(p.safe.size(), 16u);
  EXPECT_FALSE(PolytopicContains(p.safe, Eigen::Vector2d(0.5, 0.5)));
  EXPECT_FALSE(PolytopicContains(p.safe, Eigen::Vector2d(3.2, -0.5)));
  EXPECT_TRUE(PolytopicContains(p.safe, Eigen::Vector2d(2, 2)));
}

GTEST_TEST(ParseProblem, WrongShapeNamesField) {
  std::string text = kIntegrator;
  text.replace(text.find(R"("A": [[1]])"), 10, R"("A": [[1, 2]])");
  std::string message;
  EXPECT_EQ(CodeOf(text, &message), ErrorCode::kSchemaViolation);
  EXPECT_NE(message.find("system.A"), std::string::npos) << message;
}

GTEST_TEST(ParseProblem, MissingFieldNamed) {
  std::string text = kIntegrator;
  text.replace(text.find(R"("delta": 0)"), 10, R"("radius": 0)");
  std::string message;
  EXPECT_EQ(CodeOf(text, &message), ErrorCode::kSchemaViolation);
  EXPECT_NE(message.find("init.delta"), std::string::npos) << message;
}

GTEST_TEST(ParseProblem, SyntaxErrorGivesLine) {
  std::string text = kIntegrator;
  text.replace(text.find(R"("init")"), 6, R"("init" oops)");
  std::string message;
  EXPECT_EQ(CodeOf(text, &message), ErrorCode::kParseError);
  EXPECT_NE(message.find("line 4"), std::string::npos) << message;
}

GTEST_TEST(ParseProblem, RejectsNonFiniteAndNegative) {
  std::string text = kIntegrator;
  text.replace(text.find(R"("budget": 0)"), 11, R"("budget": -1)");
  EXPECT_EQ(CodeOf(text), ErrorCode::kSchemaViolation);
  text = kIntegrator;
  text.replace(text.find(R"("rhs": 10)"), 9, R"("rhs": "x")");
  EXPECT_EQ(CodeOf(text), ErrorCode::kSchemaViolation);
}

GTEST_TEST(ParseProblem, TimeVaryingSystem) {
  const char* text = R"({
    "system": {"n": 1, "m": 1, "l": 1, "T": 2, "time_invariant": false,
               "A": [[[2]], [[3]]], "B": [[[1]], [[1]]], "C": [[[0]], [[1]]]},
    "init": {"theta": [1], "delta": 0},
    "safe": {"clauses": []}, "goal": {"clauses": []},
    "ctr": {"step_box": {"lo": [-1], "hi": [1]}}, "adversary": {"budget": 0}
  })";
  const auto spec = ParseProblem(text);
  EXPECT_FALSE(spec.time_invariant);
  EXPECT_DOUBLE_EQ(TransitionMatrix(spec.System(), 2, 0)(0, 0), 6.0);
}

GTEST_TEST(SerializeProblem, RoundTripKeepsFormula) {
  for (const ProblemSpecFile& spec :
       {ParseProblem(kIntegrator), GenVehicle(6, 3, 7), GenHelicopterLike(3, 2)}) {
    const std::string once = SerializeProblem(spec);
    const ProblemSpecFile back = ParseProblem(once);
    EXPECT_EQ(SerializeProblem(back), once);
    const auto f1 = BuildSynthesisFormula(spec.ToProblem(), nullptr, nullptr);
    const auto f2 = BuildSynthesisFormula(back.ToProblem(), nullptr, nullptr);
    EXPECT_EQ(ToSmtLib(f1), ToSmtLib(f2));
  }
}

GTEST_TEST(GenVehicle, ActuatorAttackShape) {
  const auto spec = GenVehicle(2, 0, 1);
  EXPECT_EQ(spec.n, 4);
  EXPECT_EQ(spec.m, 2);
  EXPECT_EQ(spec.B.front(), spec.C.front());
  EXPECT_TRUE(spec.obstacles.empty());
  const auto p = spec.ToProblem();
  // pos += vel, vel += u.
  const Trajectory traj = Simulate(p.sys, Eigen::Vector4d(0, 0, 1, 2),
                                   ControlSequence(2, 2, Eigen::Vector4d(1, 0, 0, 0)),
                                   AdversarySequence::Zero(p.sys));
  EXPECT_TRUE(traj.states[1].isApprox(Eigen::Vector4d(1, 2, 2, 2)));
}

GTEST_TEST(GenVehicle, DeterministicPerSeed) {
  EXPECT_EQ(SerializeProblem(GenVehicle(10, 4, 3)), SerializeProblem(GenVehicle(10, 4, 3)));
  EXPECT_NE(SerializeProblem(GenVehicle(10, 4, 3)), SerializeProblem(GenVehicle(10, 4, 4)));
  EXPECT_EQ(SerializeProblem(GenHelicopterLike(9, 3)),
            SerializeProblem(GenHelicopterLike(9, 3)));
}

GTEST_TEST(GenVehicle, ObstacleCountAndFormulaSize) {
  const auto spec = GenVehicle(80, 4, 1);
  EXPECT_EQ(spec.obstacles.size(), 4u);
  FormulaSize size;
  BuildSynthesisFormula(spec.ToProblem(), &size, nullptr);
  // T * |Safe| + |Goal| + |Ctr| with |Safe| = 4 + 4 * 4, |Goal| = 4, |Ctr| = 4 T.
  EXPECT_EQ(size.total, 1924u);
  FormulaSize size40;
  BuildSynthesisFormula(GenVehicle(40, 4, 1).ToProblem(), &size40, nullptr);
  EXPECT_EQ(size40.total, 964u);
}

GTEST_TEST(GenHelicopterLike, StableAndSized) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto spec = GenHelicopterLike(9, seed);
    EXPECT_EQ(spec.n, 16);
    EXPECT_EQ(spec.m, 4);
    const double radius = spec.A.front().eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_LE(radius, 1.0);
    EXPECT_EQ(spec.obstacles.size(), 6u);
    FormulaSize size;
    BuildSynthesisFormula(spec.ToProblem(), &size, nullptr);
    EXPECT_EQ(size.total, 402u);
  }
}

}  // namespace
}  // namespace aras
