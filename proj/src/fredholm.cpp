#include "airycov/fredholm.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "airycov/errors.hpp"

namespace airycov {

NodeSet threshold_nodes(double s, int n, double scale) {
  const auto rule = semi_infinite_rule<double>(s, n, scale);
  return {s, rule.nodes, rule.weights.cwiseSqrt()};
}

void JointProblem::validate() const {
  const int count = m();
  if (count < 1 || count > kMaxJointTimes)
    throw ArgumentError("JointProblem: need 1 or 2 time points");
  if (thresholds.size() != times.size())
    throw ArgumentError("JointProblem: one threshold per time point");
  for (int i = 0; i < count; ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(thresholds[i]))
      throw ArgumentError("JointProblem: times and thresholds must be finite");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw ArgumentError("JointProblem: times must be strictly increasing");
  }
  if (n < 1) throw ArgumentError("JointProblem: need n >= 1");
  if (count * n > kMaxAssembledSize) throw ArgumentError("JointProblem: m*n exceeds 4096");
  if (!(transform_scale > 0)) throw ArgumentError("JointProblem: transform scale must be positive");
  if (const auto* fn = std::get_if<KernelBlockFn>(&kernel); fn && !*fn)
    throw ArgumentError("JointProblem: empty kernel function");
}

Eigen::MatrixXd weighted_block(const Eigen::MatrixXd& k, const NodeSet& row, const NodeSet& col) {
  return row.sqrt_w.asDiagonal() * k * col.sqrt_w.asDiagonal();
}

BlockMatrix assemble(const JointProblem& problem) {
  problem.validate();
  const int m = problem.m();
  const int n = problem.n;

  BlockMatrix out;
  out.m = m;
  out.n = n;
  out.assembled.resize(m * n, m * n);
  out.nodes.reserve(m);
  for (int i = 0; i < m; ++i)
    out.nodes.push_back(threshold_nodes(problem.thresholds[i], n, problem.transform_scale));

  const KernelBlockFn block_fn = std::visit(
      [&](const auto& k) -> KernelBlockFn {
        if constexpr (std::is_same_v<std::decay_t<decltype(k)>, Process>) {
          const Process p = k;
          const Airy2Options opts = problem.airy2;
          return [p, opts](double u, const Eigen::VectorXd& x, double up, const Eigen::VectorXd& y) {
            return kernel_matrix(p, u, x, up, y, opts);
          };
        } else {
          return k;
        }
      },
      problem.kernel);

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Eigen::MatrixXd k =
          block_fn(problem.times[i], out.nodes[i].x, problem.times[j], out.nodes[j].x);
      if (k.rows() != n || k.cols() != n)
        throw ArgumentError("assemble: kernel block has the wrong shape");
      out.assembled.block(i * n, j * n, n, n) = weighted_block(k, out.nodes[i], out.nodes[j]);
    }
  }
  return out;
}

double LogDeterminant::value() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_abs);
}

LogDeterminant log_det_i_minus(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ArgumentError("det_i_minus: matrix must be square");
  if (!a.allFinite()) {
    std::ostringstream msg;
    msg << "det_i_minus: non-finite entries in " << a.rows() << "x" << a.cols()
        << " matrix (max finite |a| = "
        << a.unaryExpr([](double v) { return std::isfinite(v) ? std::abs(v) : 0.0; }).maxCoeff()
        << ")";
    throw NumericalError(msg.str());
  }
  LogDeterminant out;
  if (a.rows() == 0) return out;

  const Eigen::MatrixXd i_minus_a = Eigen::MatrixXd::Identity(a.rows(), a.cols()) - a;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(i_minus_a);
  const auto& factors = lu.matrixLU();
  out.sign = static_cast<int>(lu.permutationP().determinant());
  for (Eigen::Index k = 0; k < factors.rows(); ++k) {
    const double pivot = factors(k, k);
    if (pivot == 0.0) {
      out.sign = 0;
      out.log_abs = -std::numeric_limits<double>::infinity();
      return out;
    }
    if (pivot < 0) out.sign = -out.sign;
    out.log_abs += std::log(std::abs(pivot));
  }
  if (!std::isfinite(out.log_abs)) {
    std::ostringstream msg;
    msg << "det_i_minus: overflow during elimination (log|det| = " << out.log_abs << ")";
    throw NumericalError(msg.str());
  }
  return out;
}

double det_i_minus(const Eigen::MatrixXd& a) { return log_det_i_minus(a).value(); }

double det_i_minus(const BlockMatrix& block) { return det_i_minus(block.assembled); }

ControlledValue evaluate_with_error_control(JointProblem problem, double tol) {
  if (!(tol >= 1e-14)) throw ArgumentError("evaluate_with_error_control: need tol >= 1e-14");
  problem.n = kErrorControlStart;
  double previous = det_i_minus(assemble(problem));
  for (;;) {
    problem.n *= 2;
    const double value = det_i_minus(assemble(problem));
    if (std::abs(value - previous) <= tol) return {value, problem.n, previous};
    if (2 * problem.n > kErrorControlCap) {
      std::ostringstream msg;
      msg << "evaluate_with_error_control: no agreement to " << tol << " by n = " << problem.n;
      throw ConvergenceError(msg.str(), previous, value);
    }
    previous = value;
  }
}

}  // namespace airycov
