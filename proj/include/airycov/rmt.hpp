#pragma once

// Stationary Ornstein-Uhlenbeck diffusion on GOE/GUE matrices and the
// edge-rescaled time series of the largest eigenvalue.

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string_view>
#include <variant>
#include <vector>

namespace airycov {

enum class Ensemble { GOE, GUE };

std::string_view to_string(Ensemble e);
Ensemble parse_ensemble(std::string_view name);

/// xoshiro256++ with the 2^128-step jump, seeded through splitmix64.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Advances the state by 2^128 draws.
  void jump();

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Generator for realization `index`: the seeded engine jumped `index`
/// times, so streams never overlap for fewer than 2^128 draws each.
Xoshiro256pp stream(std::uint64_t seed, std::uint64_t index);

struct EnsembleConfig {
  Ensemble ensemble = Ensemble::GUE;
  int N = 64;
  double gamma = 0.5;
  std::optional<double> dt;  // unset: 0.5 * N^(-1/3)
  long K = 100000;
  std::uint64_t seed = 1;
  int realizations = 10;

  /// The OU time step, dt or its default.
  double step() const;
  /// Spacing of the rescaled time grid.
  double du() const;
  void validate() const;
};

using EnsembleMatrix = std::variant<Eigen::MatrixXd, Eigen::MatrixXcd>;

/// Draw from the stationary law, density proportional to exp(-gamma Tr M^2):
/// Var(M_ii) = 1/(2 gamma); off the diagonal Var(M_ij) = 1/(4 gamma) (GOE)
/// and Var(Re M_ij) = Var(Im M_ij) = 1/(4 gamma) (GUE).
EnsembleMatrix sample_stationary(const EnsembleConfig& cfg, Xoshiro256pp& rng);

/// In-place exact OU transition over cfg.step():
/// M <- e^(-gamma dt) M + sqrt(1 - e^(-2 gamma dt)) C with C fresh stationary.
void ou_step(EnsembleMatrix& m, const EnsembleConfig& cfg, Xoshiro256pp& rng);

/// Largest eigenvalue of a real tridiagonal matrix by Sturm-count bisection.
double largest_eigenvalue_tridiagonal(const Eigen::VectorXd& diagonal,
                                      const Eigen::VectorXd& sub_diagonal);

/// Householder tridiagonalization followed by Sturm bisection. Throws
/// ArgumentError if the input is not symmetric/Hermitian to 1e-12 relative.
double largest_eigenvalue(const Eigen::MatrixXd& m);
double largest_eigenvalue(const Eigen::MatrixXcd& m);
double largest_eigenvalue(const EnsembleMatrix& m);

/// The real symmetric 2N x 2N matrix [[A, -B], [B, A]] for M = A + iB; its
/// spectrum is that of M with every multiplicity doubled.
Eigen::MatrixXd hermitian_embedding(const Eigen::MatrixXcd& m);

/// Affine edge rescaling of a raw largest eigenvalue.
double rescale_edge(Ensemble e, int N, double gamma, double lambda);

struct EigenSeries {
  Ensemble ensemble = Ensemble::GUE;
  double du = 0;
  std::vector<double> values;  // K + 1 rescaled largest eigenvalues
  std::uint64_t seed = 0;
  int realization = 0;

  double u(std::size_t k) const { return static_cast<double>(k) * du; }
};

/// One chain of K steps from a stationary start, driven by stream(seed, realization).
EigenSeries run_chain(const EnsembleConfig& cfg, int realization = 0);

/// cfg.realizations chains, run concurrently, ordered by realization index.
std::vector<EigenSeries> run_chains(const EnsembleConfig& cfg);

struct AutoCovEstimate {
  std::vector<double> lags;
  std::vector<double> cov;
  /// Across-realization standard errors; absent when fewer than 2 series.
  std::optional<std::vector<double>> stderrs;
};

/// Biased (1/L) empirical autocovariance of one series at lags 0..max_lag.
std::vector<double> autocovariance(const std::vector<double>& series, int max_lag);

/// Mean over series of the per-series autocovariance; stderr = SD / sqrt(R).
AutoCovEstimate autocovariance(const std::vector<std::vector<double>>& series, double spacing,
                               int max_lag);
AutoCovEstimate autocovariance(const std::vector<EigenSeries>& series, int max_lag);

}  // namespace airycov
