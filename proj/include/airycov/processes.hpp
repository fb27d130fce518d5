#pragma once

// One- and two-point distribution functions of the Airy1 and Airy2
// processes. Both processes are stationary, so a two-point query is always
// posed at times {0, u}.

#include <Eigen/Core>

#include <map>
#include <optional>

#include "airycov/fredholm.hpp"
#include "airycov/kernels.hpp"

namespace airycov {

/// Threshold used in place of +infinity; the kernels are below 1e-300 there.
inline constexpr double kInfiniteThreshold = 40.0;

struct TwoPointQuery {
  Process process = Process::Airy2;
  double u = 0;  // time separation, >= 0
  double s1 = 0;
  double s2 = 0;
  double tol = 1e-12;

  void validate() const;
};

/// P(A(0) <= s), error-controlled to tol (see evaluate_with_error_control).
double one_point_cdf(Process process, double s, double tol = 1e-14);

/// P(A(0) <= s1, A(u) <= s2). For u = 0 this is one_point_cdf(min(s1, s2)).
double two_point_cdf(const TwoPointQuery& q);

/// Evaluates many two-point determinants at one separation u with a fixed
/// Nystrom size, caching per-threshold nodes, equal-time blocks and Airy
/// factor tables. Threshold data is created by prepare(); once every
/// threshold in use has been prepared, one_point/two_point only read the
/// cache and may be called concurrently.
class JointCdfEvaluator {
 public:
  JointCdfEvaluator(Process process, double u, int n, double lowest_threshold = -14.0,
                    const Airy2Options& airy2 = {}, double transform_scale = 10.0);

  Process process() const { return process_; }
  double u() const { return u_; }
  int n() const { return n_; }

  void prepare(double s);

  /// det(I - A) for the one-time problem at s.
  double one_point(double s) const;
  /// det(I - A) for the two-time problem {0, u} x {s1, s2}; u = 0 falls back
  /// to one_point(min(s1, s2)).
  double two_point(double s1, double s2) const;

  /// The assembled 2n x 2n matrix A for (s1, s2); exposed for tests.
  Eigen::MatrixXd assembled(double s1, double s2) const;

 private:
  struct Threshold {
    NodeSet nodes;
    Eigen::MatrixXd equal_time;  // weighted K(0,.;0,.) block
    double one_point = 0;
    // Airy2 only: sqrt(w) folded into the factor tables.
    Eigen::MatrixXd decaying;     // row factor for K(u,.;0,.)
    Eigen::MatrixXd subtraction;  // factor for the subtraction route of K(0,.;u,.)
    Eigen::MatrixXd direct;       // factor for the direct route of K(0,.;u,.)
  };

  const Threshold& lookup(double s) const;
  Eigen::MatrixXd forward_block(const Threshold& a, const Threshold& b) const;   // K(0,x_a; u,x_b)
  Eigen::MatrixXd backward_block(const Threshold& b, const Threshold& a) const;  // K(u,x_b; 0,x_a)

  Process process_;
  double u_;
  int n_;
  double lowest_threshold_;
  Airy2Options airy2_;
  double transform_scale_;
  QuadratureRule<double> lambda_rule_;
  std::optional<QuadratureRule<double>> mu_rule_;
  std::map<double, Threshold> cache_;
};

}  // namespace airycov
