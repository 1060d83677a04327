#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace aras {

/// Seeded generator with platform-independent real conversions (the
/// standard distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t Index(std::uint64_t n) {
    return static_cast<std::uint64_t>(Uniform() * static_cast<double>(n)) % n;
  }

  double Normal() {
    // Box-Muller; 1 - U keeps the logarithm finite.
    const double u1 = 1.0 - Uniform();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::VectorXd NormalVector(int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = Normal();
    return v;
  }

  /// Uniform on the sphere of the given radius.
  Eigen::VectorXd OnSphere(int d, double radius) {
    if (d == 0) return Eigen::VectorXd(0);
    Eigen::VectorXd v = NormalVector(d);
    double norm = v.norm();
    while (norm == 0.0) {
      v = NormalVector(d);
      norm = v.norm();
    }
    return v * (radius / norm);
  }

  /// Uniform in the closed ball of the given radius.
  Eigen::VectorXd InBall(int d, double radius) {
    if (d == 0) return Eigen::VectorXd(0);
    return OnSphere(d, radius * std::pow(Uniform(), 1.0 / d));
  }

  Eigen::MatrixXd NormalMatrix(int rows, int cols) {
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) M(i, j) = Normal();
    }
    return M;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aras
