#pragma once

#include <vector>

#include <Eigen/Dense>

namespace aras {

/// Discrete-time linear time-varying plant
///
///   x_{t+1} = A_t x_t + B_t u_t + C_t a_t,   t = 0, ..., T-1
///
/// with controller input u_t (dimension m) and adversary input a_t
/// (dimension l). Immutable after construction.
class LtvSystem {
 public:
  LtvSystem(std::vector<Eigen::MatrixXd> A, std::vector<Eigen::MatrixXd> B,
            std::vector<Eigen::MatrixXd> C);

  /// Repeats the same (A, B, C) for every step of the horizon.
  static LtvSystem TimeInvariant(const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& B,
                                 const Eigen::MatrixXd& C, int horizon);

  int num_states() const { return n_; }
  int num_controls() const { return m_; }
  int num_adversary() const { return l_; }
  int horizon() const { return static_cast<int>(A_.size()); }

  const Eigen::MatrixXd& A(int t) const;
  const Eigen::MatrixXd& B(int t) const;
  const Eigen::MatrixXd& C(int t) const;

  bool is_time_invariant() const;

 private:
  int n_ = 0;
  int m_ = 0;
  int l_ = 0;
  std::vector<Eigen::MatrixXd> A_;
  std::vector<Eigen::MatrixXd> B_;
  std::vector<Eigen::MatrixXd> C_;
};

/// Controller inputs u_0 ... u_{T-1}, stored stacked as one vector of
/// length m*T (u_0 first).
class ControlSequence {
 public:
  ControlSequence(int dim, int horizon);
  ControlSequence(int dim, int horizon, Eigen::VectorXd stacked);
  static ControlSequence Zero(const LtvSystem& sys);

  int dim() const { return dim_; }
  int horizon() const { return horizon_; }
  const Eigen::VectorXd& stacked() const { return stacked_; }
  Eigen::VectorXd step(int t) const;

 private:
  int dim_;
  int horizon_;
  Eigen::VectorXd stacked_;
};

/// Adversary inputs a_0 ... a_{T-1}, stacked like ControlSequence, with the
/// total energy sum_t |a_t|^2 cached.
class AdversarySequence {
 public:
  AdversarySequence(int dim, int horizon);
  AdversarySequence(int dim, int horizon, Eigen::VectorXd stacked);
  static AdversarySequence Zero(const LtvSystem& sys);

  int dim() const { return dim_; }
  int horizon() const { return horizon_; }
  const Eigen::VectorXd& stacked() const { return stacked_; }
  Eigen::VectorXd step(int t) const;
  double squared_norm() const { return squared_norm_; }

 private:
  int dim_;
  int horizon_;
  Eigen::VectorXd stacked_;
  double squared_norm_ = 0.0;
};

/// States x_0 ... x_T.
struct Trajectory {
  std::vector<Eigen::VectorXd> states;
};

/// alpha(t1, t0) = A_{t1-1} ... A_{t0}; identity when t1 == t0.
Eigen::MatrixXd TransitionMatrix(const LtvSystem& sys, int t1, int t0);

/// Steps the recursion forward from x0.
Trajectory Simulate(const LtvSystem& sys, const Eigen::VectorXd& x0,
                    const ControlSequence& u, const AdversarySequence& a);

/// Affine dependence of the state at time t on (x0, stacked input):
///   x_t = initial_gain * x0 + input_gain * stacked_input.
/// Columns of input_gain for steps s >= t are zero.
struct StateMap {
  Eigen::MatrixXd input_gain;
  Eigen::MatrixXd initial_gain;
};

StateMap ControlToStateMap(const LtvSystem& sys, int t);
StateMap AdversaryToStateMap(const LtvSystem& sys, int t);

/// All maps for t = 0 ... T in a single forward sweep.
std::vector<StateMap> ControlToStateMaps(const LtvSystem& sys);
std::vector<StateMap> AdversaryToStateMaps(const LtvSystem& sys);

}  // namespace aras
