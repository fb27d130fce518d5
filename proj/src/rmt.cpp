#include "airycov/rmt.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "airycov/errors.hpp"
#include "airycov/parallel.hpp"

namespace airycov {

std::string_view to_string(Ensemble e) { return e == Ensemble::GOE ? "goe" : "gue"; }

Ensemble parse_ensemble(std::string_view name) {
  if (name == "goe" || name == "GOE") return Ensemble::GOE;
  if (name == "gue" || name == "GUE") return Ensemble::GUE;
  throw ArgumentError("unknown ensemble '" + std::string(name) + "' (expected goe or gue)");
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
  for (auto& word : s_) word = splitmix64(seed);
}

Xoshiro256pp::result_type Xoshiro256pp::operator()() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

void Xoshiro256pp::jump() {
  static constexpr std::array<std::uint64_t, 4> kJump{0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL,
                                                      0xa9582618e03fc9aaULL, 0x39abdc4529b1661cULL};
  std::array<std::uint64_t, 4> acc{};
  for (std::uint64_t word : kJump) {
    for (int b = 0; b < 64; ++b) {
      if (word & (std::uint64_t{1} << b))
        for (int i = 0; i < 4; ++i) acc[i] ^= s_[i];
      (*this)();
    }
  }
  s_ = acc;
}

Xoshiro256pp stream(std::uint64_t seed, std::uint64_t index) {
  Xoshiro256pp g(seed);
  for (std::uint64_t i = 0; i < index; ++i) g.jump();
  return g;
}

double EnsembleConfig::step() const {
  return dt ? *dt : 0.5 * std::pow(static_cast<double>(N), -1.0 / 3.0);
}

double EnsembleConfig::du() const {
  const double base = gamma * std::cbrt(static_cast<double>(N)) * step();
  return ensemble == Ensemble::GUE ? base : base / 2;
}

void EnsembleConfig::validate() const {
  if (N < 2 || N > 1024) throw ArgumentError("EnsembleConfig: need 2 <= N <= 1024");
  if (!(gamma > 0) || !std::isfinite(gamma)) throw ArgumentError("EnsembleConfig: need gamma > 0");
  if (dt && !(*dt > 0 && std::isfinite(*dt))) throw ArgumentError("EnsembleConfig: need dt > 0");
  if (!(step() * gamma < 5)) throw ArgumentError("EnsembleConfig: need dt * gamma < 5");
  if (K < 100) throw ArgumentError("EnsembleConfig: need K >= 100");
  if (realizations < 1) throw ArgumentError("EnsembleConfig: need at least one realization");
}

namespace {

struct Scales {
  double diagonal;
  double off_diagonal;  // per real component
};

Scales entry_scales(double gamma) { return {std::sqrt(1 / (2 * gamma)), std::sqrt(1 / (4 * gamma))}; }

void check_step_parameters(const EnsembleConfig& cfg) {
  if (cfg.N < 1) throw ArgumentError("ou_step: bad dimension");
  if (!(cfg.gamma > 0) || !std::isfinite(cfg.gamma)) throw ArgumentError("ou_step: need gamma > 0");
  if (!(cfg.step() >= 0) || !std::isfinite(cfg.step())) throw ArgumentError("ou_step: need finite dt >= 0");
}

// M <- a M + b C, drawing C column by column over the upper triangle.
void blend(Eigen::MatrixXd& m, double a, double b, const Scales& sc, Xoshiro256pp& rng) {
  std::normal_distribution<double> normal;
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      m(i, j) = a * m(i, j) + b * sc.off_diagonal * normal(rng);
      m(j, i) = m(i, j);
    }
    m(j, j) = a * m(j, j) + b * sc.diagonal * normal(rng);
  }
}

void blend(Eigen::MatrixXcd& m, double a, double b, const Scales& sc, Xoshiro256pp& rng) {
  std::normal_distribution<double> normal;
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = a * m(i, j) + b * sc.off_diagonal * std::complex<double>(re, im);
      m(j, i) = std::conj(m(i, j));
    }
    m(j, j) = a * m(j, j).real() + b * sc.diagonal * normal(rng);
  }
}

template <typename Matrix>
void check_hermitian(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ArgumentError("largest_eigenvalue: need a non-empty square matrix");
  if (!m.allFinite()) throw ArgumentError("largest_eigenvalue: non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ArgumentError("largest_eigenvalue: matrix is not symmetric/Hermitian");
}

}  // namespace

EnsembleMatrix sample_stationary(const EnsembleConfig& cfg, Xoshiro256pp& rng) {
  if (cfg.N < 1) throw ArgumentError("sample_stationary: bad dimension");
  if (!(cfg.gamma > 0)) throw ArgumentError("sample_stationary: need gamma > 0");
  const Scales sc = entry_scales(cfg.gamma);
  if (cfg.ensemble == Ensemble::GOE) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(cfg.N, cfg.N);
    blend(m, 0.0, 1.0, sc, rng);
    return m;
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cfg.N, cfg.N);
  blend(m, 0.0, 1.0, sc, rng);
  return m;
}

void ou_step(EnsembleMatrix& m, const EnsembleConfig& cfg, Xoshiro256pp& rng) {
  check_step_parameters(cfg);
  const double h = cfg.step();
  if (h == 0) return;
  const double a = std::exp(-cfg.gamma * h);
  const double b = std::sqrt(-std::expm1(-2 * cfg.gamma * h));
  const Scales sc = entry_scales(cfg.gamma);
  std::visit([&](auto& mat) { blend(mat, a, b, sc, rng); }, m);
}

double largest_eigenvalue_tridiagonal(const Eigen::VectorXd& d, const Eigen::VectorXd& e) {
  const Eigen::Index n = d.size();
  if (n == 0 || e.size() != n - 1) throw ArgumentError("largest_eigenvalue_tridiagonal: bad sizes");

  // Gershgorin interval.
  double lo = d[0], hi = d[0];
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, e.size() ? e.cwiseAbs2().maxCoeff() : 0.0);

  // Number of eigenvalues strictly below x.
  const auto count_below = [&](double x) {
    Eigen::Index count = 0;
    double q = d[0] - x;
    for (Eigen::Index i = 0;; ++i) {
      if (std::abs(q) < pivmin) q = -pivmin;
      if (q < 0) ++count;
      if (i + 1 == n) break;
      q = d[i + 1] - x - e[i] * e[i] / q;
    }
    return count;
  };

  // Invariant: count_below(lo) <= n - 1 and count_below(hi) == n.
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) == n)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double largest_eigenvalue(const Eigen::MatrixXd& m) {
  check_hermitian(m);
  if (m.rows() == 1) return m(0, 0);
  const Eigen::Tridiagonalization<Eigen::MatrixXd> tri(m);
  return largest_eigenvalue_tridiagonal(tri.diagonal(), tri.subDiagonal());
}

double largest_eigenvalue(const Eigen::MatrixXcd& m) {
  check_hermitian(m);
  if (m.rows() == 1) return m(0, 0).real();
  const Eigen::Tridiagonalization<Eigen::MatrixXcd> tri(m);
  return largest_eigenvalue_tridiagonal(tri.diagonal(), tri.subDiagonal());
}

double largest_eigenvalue(const EnsembleMatrix& m) {
  return std::visit([](const auto& mat) { return largest_eigenvalue(mat); }, m);
}

Eigen::MatrixXd hermitian_embedding(const Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd out(2 * n, 2 * n);
  out << m.real(), -m.imag(), m.imag(), m.real();
  return out;
}

double rescale_edge(Ensemble e, int N, double gamma, double lambda) {
  const double n = static_cast<double>(N);
  if (e == Ensemble::GUE)
    return std::sqrt(2 * gamma) * std::pow(n, 1.0 / 6.0) * (lambda - std::sqrt(2 * n / gamma));
  return std::sqrt(gamma) * std::pow(n, 1.0 / 6.0) * (lambda - std::sqrt(n / gamma));
}

EigenSeries run_chain(const EnsembleConfig& cfg, int realization) {
  cfg.validate();
  if (realization < 0) throw ArgumentError("run_chain: negative realization index");
  Xoshiro256pp rng = stream(cfg.seed, static_cast<std::uint64_t>(realization));

  EigenSeries out;
  out.ensemble = cfg.ensemble;
  out.du = cfg.du();
  out.seed = cfg.seed;
  out.realization = realization;
  out.values.reserve(static_cast<std::size_t>(cfg.K) + 1);

  EnsembleMatrix m = sample_stationary(cfg, rng);
  for (long k = 0; k <= cfg.K; ++k) {
    if (k > 0) ou_step(m, cfg, rng);
    out.values.push_back(rescale_edge(cfg.ensemble, cfg.N, cfg.gamma, largest_eigenvalue(m)));
  }
  return out;
}

std::vector<EigenSeries> run_chains(const EnsembleConfig& cfg) {
  cfg.validate();
  std::vector<EigenSeries> out(static_cast<std::size_t>(cfg.realizations));
  parallel_for(out.size(), [&](std::size_t r) { out[r] = run_chain(cfg, static_cast<int>(r)); });
  return out;
}

std::vector<double> autocovariance(const std::vector<double>& x, int max_lag) {
  if (max_lag < 0) throw ArgumentError("autocovariance: negative max lag");
  const std::size_t L = x.size();
  if (L == 0 || static_cast<std::size_t>(max_lag) >= L)
    throw ArgumentError("autocovariance: series shorter than max lag + 1");
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(L);
  std::vector<double> centered(L);
  for (std::size_t t = 0; t < L; ++t) centered[t] = x[t] - mean;

  std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
  for (int k = 0; k <= max_lag; ++k) {
    double acc = 0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(k) < L; ++t) acc += centered[t] * centered[t + k];
    out[static_cast<std::size_t>(k)] = acc / static_cast<double>(L);
  }
  return out;
}

AutoCovEstimate autocovariance(const std::vector<std::vector<double>>& series, double spacing,
                               int max_lag) {
  if (series.empty()) throw ArgumentError("autocovariance: no series");
  if (!(spacing > 0)) throw ArgumentError("autocovariance: spacing must be positive");
  for (const auto& s : series)
    if (s.size() != series.front().size()) throw ArgumentError("autocovariance: series lengths differ");

  const std::size_t R = series.size();
  const auto lags = static_cast<std::size_t>(max_lag) + 1;
  std::vector<std::vector<double>> per(R);
  for (std::size_t r = 0; r < R; ++r) per[r] = autocovariance(series[r], max_lag);

  AutoCovEstimate out;
  out.lags.resize(lags);
  out.cov.assign(lags, 0.0);
  for (std::size_t k = 0; k < lags; ++k) {
    out.lags[k] = static_cast<double>(k) * spacing;
    for (std::size_t r = 0; r < R; ++r) out.cov[k] += per[r][k];
    out.cov[k] /= static_cast<double>(R);
  }
  if (R >= 2) {
    std::vector<double> se(lags);
    for (std::size_t k = 0; k < lags; ++k) {
      double ss = 0;
      for (std::size_t r = 0; r < R; ++r) ss += (per[r][k] - out.cov[k]) * (per[r][k] - out.cov[k]);
      se[k] = std::sqrt(ss / static_cast<double>(R - 1)) / std::sqrt(static_cast<double>(R));
    }
    out.stderrs = std::move(se);
  }
  return out;
}

AutoCovEstimate autocovariance(const std::vector<EigenSeries>& series, int max_lag) {
  if (series.empty()) throw ArgumentError("autocovariance: no series");
  for (const auto& s : series) {
    if (s.ensemble != series.front().ensemble || s.du != series.front().du)
      throw ArgumentError("autocovariance: series from different ensembles or grids");
  }
  std::vector<std::vector<double>> raw;
  raw.reserve(series.size());
  for (const auto& s : series) raw.push_back(s.values);
  return autocovariance(raw, series.front().du, max_lag);
}

}  // namespace airycov
