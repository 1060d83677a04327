#include "aras/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "aras/errors.hpp"

namespace aras {
namespace {

void Require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

std::string Shape(const Eigen::MatrixXd& M) {
  std::ostringstream os;
  os << M.rows() << "x" << M.cols();
  return os.str();
}

// Forward sweep of G_{t+1} = A_t G_t + [0 .. E_t .. 0], where E_t is B_t or C_t.
std::vector<StateMap> InputMaps(const LtvSystem& sys, bool adversary) {
  const int n = sys.num_states();
  const int T = sys.horizon();
  const int k = adversary ? sys.num_adversary() : sys.num_controls();
  std::vector<StateMap> maps;
  maps.reserve(T + 1);
  StateMap current{Eigen::MatrixXd::Zero(n, k * T),
                   Eigen::MatrixXd::Identity(n, n)};
  maps.push_back(current);
  for (int t = 0; t < T; ++t) {
    StateMap next;
    next.input_gain = sys.A(t) * current.input_gain;
    next.input_gain.middleCols(k * t, k) += adversary ? sys.C(t) : sys.B(t);
    next.initial_gain = sys.A(t) * current.initial_gain;
    maps.push_back(next);
    current = std::move(next);
  }
  return maps;
}

StateMap InputMapAt(const LtvSystem& sys, int t, bool adversary) {
  Require(t >= 0 && t <= sys.horizon(), ErrorCode::kIndexOutOfRange,
          "time " + std::to_string(t) + " outside [0, " +
              std::to_string(sys.horizon()) + "]");
  const int n = sys.num_states();
  const int k = adversary ? sys.num_adversary() : sys.num_controls();
  StateMap map{Eigen::MatrixXd::Zero(n, k * sys.horizon()),
               TransitionMatrix(sys, t, 0)};
  // Column block s is alpha(t, s+1) E_s; build alpha(t, s+1) backwards.
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Identity(n, n);
  for (int s = t - 1; s >= 0; --s) {
    map.input_gain.middleCols(k * s, k) =
        alpha * (adversary ? sys.C(s) : sys.B(s));
    alpha = alpha * sys.A(s);
  }
  return map;
}

}  // namespace

LtvSystem::LtvSystem(std::vector<Eigen::MatrixXd> A,
                     std::vector<Eigen::MatrixXd> B,
                     std::vector<Eigen::MatrixXd> C)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)) {
  Require(!A_.empty(), ErrorCode::kInvalidProblem, "horizon must be >= 1");
  Require(A_.size() == B_.size() && A_.size() == C_.size(),
          ErrorCode::kDimensionMismatch,
          "A, B and C sequences must have the same length");
  n_ = static_cast<int>(A_[0].rows());
  m_ = static_cast<int>(B_[0].cols());
  l_ = static_cast<int>(C_[0].cols());
  Require(n_ >= 1, ErrorCode::kInvalidProblem, "state dimension must be >= 1");
  for (std::size_t t = 0; t < A_.size(); ++t) {
    const std::string at = " at t=" + std::to_string(t);
    Require(A_[t].rows() == n_ && A_[t].cols() == n_,
            ErrorCode::kDimensionMismatch, "A is " + Shape(A_[t]) + at);
    Require(B_[t].rows() == n_ && B_[t].cols() == m_,
            ErrorCode::kDimensionMismatch, "B is " + Shape(B_[t]) + at);
    Require(C_[t].rows() == n_ && C_[t].cols() == l_,
            ErrorCode::kDimensionMismatch, "C is " + Shape(C_[t]) + at);
  }
}

LtvSystem LtvSystem::TimeInvariant(const Eigen::MatrixXd& A,
                                   const Eigen::MatrixXd& B,
                                   const Eigen::MatrixXd& C, int horizon) {
  Require(horizon >= 1, ErrorCode::kInvalidProblem, "horizon must be >= 1");
  return LtvSystem(std::vector<Eigen::MatrixXd>(horizon, A),
                   std::vector<Eigen::MatrixXd>(horizon, B),
                   std::vector<Eigen::MatrixXd>(horizon, C));
}

const Eigen::MatrixXd& LtvSystem::A(int t) const {
  Require(t >= 0 && t < horizon(), ErrorCode::kIndexOutOfRange, "A(t)");
  return A_[t];
}

const Eigen::MatrixXd& LtvSystem::B(int t) const {
  Require(t >= 0 && t < horizon(), ErrorCode::kIndexOutOfRange, "B(t)");
  return B_[t];
}

const Eigen::MatrixXd& LtvSystem::C(int t) const {
  Require(t >= 0 && t < horizon(), ErrorCode::kIndexOutOfRange, "C(t)");
  return C_[t];
}

bool LtvSystem::is_time_invariant() const {
  for (std::size_t t = 1; t < A_.size(); ++t) {
    if (A_[t] != A_[0] || B_[t] != B_[0] || C_[t] != C_[0]) return false;
  }
  return true;
}

ControlSequence::ControlSequence(int dim, int horizon)
    : ControlSequence(dim, horizon, Eigen::VectorXd::Zero(dim * horizon)) {}

ControlSequence::ControlSequence(int dim, int horizon, Eigen::VectorXd stacked)
    : dim_(dim), horizon_(horizon), stacked_(std::move(stacked)) {
  Require(stacked_.size() == dim_ * horizon_, ErrorCode::kDimensionMismatch,
          "control sequence must have m*T entries");
}

ControlSequence ControlSequence::Zero(const LtvSystem& sys) {
  return ControlSequence(sys.num_controls(), sys.horizon());
}

Eigen::VectorXd ControlSequence::step(int t) const {
  Require(t >= 0 && t < horizon_, ErrorCode::kIndexOutOfRange, "u_t");
  return stacked_.segment(dim_ * t, dim_);
}

AdversarySequence::AdversarySequence(int dim, int horizon)
    : AdversarySequence(dim, horizon, Eigen::VectorXd::Zero(dim * horizon)) {}

AdversarySequence::AdversarySequence(int dim, int horizon,
                                     Eigen::VectorXd stacked)
    : dim_(dim),
      horizon_(horizon),
      stacked_(std::move(stacked)),
      squared_norm_(stacked_.squaredNorm()) {
  Require(stacked_.size() == dim_ * horizon_, ErrorCode::kDimensionMismatch,
          "adversary sequence must have l*T entries");
}

AdversarySequence AdversarySequence::Zero(const LtvSystem& sys) {
  return AdversarySequence(sys.num_adversary(), sys.horizon());
}

Eigen::VectorXd AdversarySequence::step(int t) const {
  Require(t >= 0 && t < horizon_, ErrorCode::kIndexOutOfRange, "a_t");
  return stacked_.segment(dim_ * t, dim_);
}

Eigen::MatrixXd TransitionMatrix(const LtvSystem& sys, int t1, int t0) {
  Require(t0 >= 0 && t0 <= t1 && t1 <= sys.horizon(),
          ErrorCode::kIndexOutOfRange,
          "transition matrix needs 0 <= t0 <= t1 <= T, got t1=" +
              std::to_string(t1) + " t0=" + std::to_string(t0));
  Eigen::MatrixXd alpha =
      Eigen::MatrixXd::Identity(sys.num_states(), sys.num_states());
  for (int t = t0; t < t1; ++t) alpha = sys.A(t) * alpha;
  return alpha;
}

Trajectory Simulate(const LtvSystem& sys, const Eigen::VectorXd& x0,
                    const ControlSequence& u, const AdversarySequence& a) {
  Require(x0.size() == sys.num_states(), ErrorCode::kDimensionMismatch,
          "initial state dimension");
  Require(u.dim() == sys.num_controls() && u.horizon() == sys.horizon(),
          ErrorCode::kDimensionMismatch, "control sequence shape");
  Require(a.dim() == sys.num_adversary() && a.horizon() == sys.horizon(),
          ErrorCode::kDimensionMismatch, "adversary sequence shape");
  Trajectory traj;
  traj.states.reserve(sys.horizon() + 1);
  traj.states.push_back(x0);
  const int m = sys.num_controls();
  const int l = sys.num_adversary();
  for (int t = 0; t < sys.horizon(); ++t) {
    const Eigen::VectorXd& x = traj.states.back();
    traj.states.push_back(sys.A(t) * x +
                          sys.B(t) * u.stacked().segment(m * t, m) +
                          sys.C(t) * a.stacked().segment(l * t, l));
  }
  return traj;
}

StateMap ControlToStateMap(const LtvSystem& sys, int t) {
  return InputMapAt(sys, t, false);
}

StateMap AdversaryToStateMap(const LtvSystem& sys, int t) {
  return InputMapAt(sys, t, true);
}

std::vector<StateMap> ControlToStateMaps(const LtvSystem& sys) {
  return InputMaps(sys, false);
}

std::vector<StateMap> AdversaryToStateMaps(const LtvSystem& sys) {
  return InputMaps(sys, true);
}

}  // namespace aras
