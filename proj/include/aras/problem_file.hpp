#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "aras/geometry.hpp"
#include "aras/model.hpp"
#include "aras/synthesis.hpp"

namespace aras {

/// Convex polytope {x : A x <= b}.
struct Halfspaces {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

/// The same box at every step of a stacked vector.
struct StepBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

using StackedConstraint = std::variant<PolytopicSet, StepBox>;

PolytopicSet ExpandStacked(const StackedConstraint& c, int horizon);

struct AttackSpec {
  double ctr_budget = 0.0;
  StackedConstraint adv;
  std::vector<Halfspaces> unsafe;
  BoxRegion states;
  double cover_eps = 1.0;

  std::vector<PolytopicSet> UnsafeSets() const;
};

/// In-memory form of a problem file. Keeps obstacles and per-step boxes
/// as written so that a file survives a load/write round trip.
struct ProblemSpecFile {
  int n = 0;
  int m = 0;
  int l = 0;
  int T = 0;
  bool time_invariant = true;
  // One matrix when time-invariant, T otherwise.
  std::vector<Eigen::MatrixXd> A;
  std::vector<Eigen::MatrixXd> B;
  std::vector<Eigen::MatrixXd> C;
  Eigen::VectorXd theta;
  double delta = 0.0;
  PolytopicSet safe;
  std::vector<Halfspaces> obstacles;
  PolytopicSet goal;
  StackedConstraint ctr;
  double adv_budget = 0.0;
  std::optional<AttackSpec> attack;

  LtvSystem System() const;
  /// Safe set with every obstacle complement appended as one clause.
  PolytopicSet SafeWithObstacles() const;
  ArasProblem ToProblem() const;
};

/// Throws Error(kParseError) with line and column for malformed JSON and
/// Error(kSchemaViolation) naming the offending field.
ProblemSpecFile ParseProblem(const std::string& text);
ProblemSpecFile ReadProblemFile(const std::string& path);
ArasProblem LoadProblem(const std::string& path);

std::string SerializeProblem(const ProblemSpecFile& spec);
void WriteProblemFile(const std::string& path, const ProblemSpecFile& spec);

// Benchmark instances. Same arguments give byte-identical files.

/// Planar double integrator (position and velocity per axis, unit step)
/// with the adversary entering through the actuators (C = B), |u_i| <= 1,
/// a bounding box on the position and `n_obstacles` box obstacles.
ProblemSpecFile GenVehicle(int T, int n_obstacles, std::uint64_t seed);

/// Random stable 16-state, 4-input time-invariant system (spectral radius
/// at most 0.98), control box [-1,1]^3 x [0,1], six box obstacles over the
/// first three states and a goal box over the same coordinates.
ProblemSpecFile GenHelicopterLike(int T, std::uint64_t seed);

}  // namespace aras
