#include "airycov/processes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "airycov/errors.hpp"

namespace airycov {

void TwoPointQuery::validate() const {
  if (!std::isfinite(u) || u < 0) throw ArgumentError("TwoPointQuery: need finite u >= 0");
  if (!std::isfinite(s1) || !std::isfinite(s2))
    throw ArgumentError("TwoPointQuery: thresholds must be finite");
  if (!(tol >= 1e-14 && tol <= 1e-4)) throw ArgumentError("TwoPointQuery: tol must lie in [1e-14, 1e-4]");
}

double one_point_cdf(Process process, double s, double tol) {
  if (!std::isfinite(s)) throw ArgumentError("one_point_cdf: s must be finite");
  JointProblem problem;
  problem.kernel = process;
  problem.times = {0.0};
  problem.thresholds = {s};
  return evaluate_with_error_control(problem, tol).value;
}

double two_point_cdf(const TwoPointQuery& q) {
  q.validate();
  if (q.u == 0) return one_point_cdf(q.process, std::min(q.s1, q.s2), q.tol);
  JointProblem problem;
  problem.kernel = q.process;
  problem.times = {0.0, q.u};
  problem.thresholds = {q.s1, q.s2};
  return evaluate_with_error_control(problem, q.tol).value;
}

JointCdfEvaluator::JointCdfEvaluator(Process process, double u, int n, double lowest_threshold,
                                     const Airy2Options& airy2, double transform_scale)
    : process_(process),
      u_(u),
      n_(n),
      lowest_threshold_(lowest_threshold),
      airy2_(airy2),
      transform_scale_(transform_scale) {
  if (!std::isfinite(u) || u < 0) throw ArgumentError("JointCdfEvaluator: need finite u >= 0");
  if (n < 1 || 2 * n > kMaxAssembledSize) throw ArgumentError("JointCdfEvaluator: bad n");
  if (!std::isfinite(lowest_threshold))
    throw ArgumentError("JointCdfEvaluator: lowest threshold must be finite");
  if (process_ == Process::Airy2 && u_ > 0) {
    lambda_rule_ = airy2_lambda_rule(airy2_);
    if (airy2_branch(0.0, u_, lowest_threshold_, lowest_threshold_, airy2_) == Airy2Branch::Direct)
      mu_rule_ = airy2_mu_rule(u_, lowest_threshold_, airy2_);
  }
}

void JointCdfEvaluator::prepare(double s) {
  if (cache_.contains(s)) return;
  if (!std::isfinite(s)) throw ArgumentError("JointCdfEvaluator: threshold must be finite");
  if (s < lowest_threshold_)
    throw ArgumentError("JointCdfEvaluator: threshold below the configured lowest threshold");

  Threshold t;
  t.nodes = threshold_nodes(s, n_, transform_scale_);
  const auto& x = t.nodes.x;
  t.equal_time = weighted_block(kernel_matrix(process_, 0.0, x, 0.0, x, airy2_), t.nodes, t.nodes);
  t.one_point = det_i_minus(t.equal_time);
  if (process_ == Process::Airy2 && u_ > 0) {
    const auto sw = t.nodes.sqrt_w.asDiagonal();
    t.decaying = sw * airy_half_line_factor(x, lambda_rule_, -u_ / 2);
    t.subtraction = sw * airy_half_line_factor(x, lambda_rule_, u_ / 2);
    if (mu_rule_) t.direct = sw * airy_negative_half_line_factor(x, *mu_rule_, u_);
  }
  cache_.emplace(s, std::move(t));
}

const JointCdfEvaluator::Threshold& JointCdfEvaluator::lookup(double s) const {
  const auto it = cache_.find(s);
  if (it == cache_.end())
    throw ArgumentError("JointCdfEvaluator: threshold " + std::to_string(s) + " not prepared");
  return it->second;
}

double JointCdfEvaluator::one_point(double s) const { return lookup(s).one_point; }

Eigen::MatrixXd JointCdfEvaluator::forward_block(const Threshold& a, const Threshold& b) const {
  if (process_ == Process::Airy1)
    return weighted_block(airy1_kernel_matrix(0.0, a.nodes.x, u_, b.nodes.x), a.nodes, b.nodes);

  switch (airy2_branch(0.0, u_, a.nodes.x[0], b.nodes.x[0], airy2_)) {
    case Airy2Branch::Subtraction:
      return a.subtraction * b.subtraction.transpose() -
             weighted_block(airy2_full_line_matrix(u_, a.nodes.x, b.nodes.x), a.nodes, b.nodes);
    case Airy2Branch::Direct:
      if (a.direct.size() == 0 || b.direct.size() == 0)
        throw NumericalError("JointCdfEvaluator: direct-route factors missing");
      return -(a.direct * b.direct.transpose());
    default:
      throw NumericalError("JointCdfEvaluator: unexpected kernel branch");
  }
}

Eigen::MatrixXd JointCdfEvaluator::backward_block(const Threshold& b, const Threshold& a) const {
  if (process_ == Process::Airy1)
    return weighted_block(airy1_kernel_matrix(u_, b.nodes.x, 0.0, a.nodes.x), b.nodes, a.nodes);
  return b.decaying * a.decaying.transpose();
}

Eigen::MatrixXd JointCdfEvaluator::assembled(double s1, double s2) const {
  const Threshold& a = lookup(s1);
  const Threshold& b = lookup(s2);
  if (u_ == 0) throw ArgumentError("JointCdfEvaluator::assembled: needs u > 0");
  Eigen::MatrixXd m(2 * n_, 2 * n_);
  m.topLeftCorner(n_, n_) = a.equal_time;
  m.bottomRightCorner(n_, n_) = b.equal_time;
  m.topRightCorner(n_, n_) = forward_block(a, b);
  m.bottomLeftCorner(n_, n_) = backward_block(b, a);
  return m;
}

double JointCdfEvaluator::two_point(double s1, double s2) const {
  if (u_ == 0) return one_point(std::min(s1, s2));
  return det_i_minus(assembled(s1, s2));
}

}  // namespace airycov
