#pragma once

// Nystrom discretization of det(1 - chi_s K chi_s) on L^2({u_1..u_m} x R).
// Each time u_i gets its own rule on (s_i, infinity); block (i,j) of the
// assembled matrix is w_i^{1/2} K(u_i, x_i; u_j, x_j) w_j^{1/2}.

#include <Eigen/Core>

#include <functional>
#include <variant>
#include <vector>

#include "airycov/kernels.hpp"

namespace airycov {

/// Nystrom nodes on (s, infinity) with square-rooted weights.
struct NodeSet {
  double s = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd sqrt_w;
};

NodeSet threshold_nodes(double s, int n, double scale = 10.0);

/// Kernel block evaluator K(u, x_p; u', y_q) for arbitrary node vectors.
using KernelBlockFn = std::function<Eigen::MatrixXd(double u, const Eigen::VectorXd& x,
                                                    double u_prime, const Eigen::VectorXd& y)>;

inline constexpr int kMaxJointTimes = 2;
inline constexpr int kMaxAssembledSize = 4096;

struct JointProblem {
  std::variant<Process, KernelBlockFn> kernel = Process::Airy2;
  std::vector<double> times;       // strictly increasing
  std::vector<double> thresholds;  // one per time
  int n = 40;                      // nodes per time
  double transform_scale = 10.0;
  Airy2Options airy2{};

  /// Throws ArgumentError unless 1 <= m <= 2, times increase, thresholds are
  /// finite and m*n <= 4096.
  void validate() const;
  int m() const { return static_cast<int>(times.size()); }
};

struct BlockMatrix {
  int m = 0;
  int n = 0;
  Eigen::MatrixXd assembled;  // mn x mn, block (i,j) = A_ij
  std::vector<NodeSet> nodes;

  auto block(int i, int j) const { return assembled.block(i * n, j * n, n, n); }
};

/// Builds the block from kernel values and square-rooted weights:
/// diag(sqrt_w_row) K diag(sqrt_w_col).
Eigen::MatrixXd weighted_block(const Eigen::MatrixXd& k, const NodeSet& row, const NodeSet& col);

BlockMatrix assemble(const JointProblem& problem);

/// det(I - A) by LU with partial pivoting; log|det| and the sign are
/// accumulated separately. Throws NumericalError on non-finite input.
double det_i_minus(const Eigen::MatrixXd& a);
double det_i_minus(const BlockMatrix& block);

/// log|det(I - A)| and its sign, for callers that need the raw factors.
struct LogDeterminant {
  double log_abs = 0;
  int sign = 1;
  double value() const;
};
LogDeterminant log_det_i_minus(const Eigen::MatrixXd& a);

struct ControlledValue {
  double value = 0;     // value at n_used
  int n_used = 0;
  double previous = 0;  // value at n_used / 2
};

inline constexpr int kErrorControlStart = 20;
inline constexpr int kErrorControlCap = 640;

/// Doubles n from 20 until two successive determinants differ by at most
/// tol. Throws ConvergenceError carrying both values if n would pass 640.
ControlledValue evaluate_with_error_control(JointProblem problem, double tol);

}  // namespace airycov
