#include "airycov/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "airycov/airy.hpp"
#include "airycov/covariance.hpp"
#include "airycov/errors.hpp"
#include "airycov/fredholm.hpp"
#include "airycov/kernels.hpp"
#include "airycov/oracles.hpp"
#include "airycov/processes.hpp"
#include "airycov/quadrature.hpp"
#include "airycov/rmt.hpp"
#include "airycov/svg.hpp"

#ifndef AIRYCOV_VERSION
#define AIRYCOV_VERSION "unknown"
#endif

namespace airycov::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

using json = nlohmann::ordered_json;

// --- output -----------------------------------------------------------------

struct OutputFile {
  std::string path;  // "-" is stdout
  std::string content;
};

// Writes every file to a temporary sibling and renames into place; on any
// failure all temporaries and already-renamed files of this call are removed.
void write_outputs(const std::vector<OutputFile>& files, std::ostream& out) {
  namespace fs = std::filesystem;
  std::vector<fs::path> done;
  try {
    for (const auto& f : files) {
      if (f.path == "-") {
        out << f.content;
        continue;
      }
      const fs::path target(f.path);
      if (target.has_parent_path() && !fs::exists(target.parent_path()))
        throw ArgumentError("output directory does not exist: " + target.parent_path().string());
      const fs::path tmp = target.string() + ".partial";
      {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ArgumentError("cannot open output file " + tmp.string());
        os << f.content;
        if (!os.flush()) throw NumericalError("failed writing " + tmp.string());
      }
      fs::rename(tmp, target);
      done.push_back(target);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& f : files) fs::remove(fs::path(f.path + ".partial"), ec);
    for (const auto& p : done) fs::remove(p, ec);
    throw;
  }
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string s;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    s += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return s;
}

// --- configuration file -----------------------------------------------------

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Removes --config PATH from args and splices its key=value lines in as
// "--key value" right after the subcommand, ahead of the explicit flags, so
// the flags win (every option keeps its last occurrence).
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ArgumentError("--config needs a file argument");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;

  std::ifstream is(*path);
  if (!is) throw ArgumentError("cannot read config file " + *path);
  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ArgumentError(*path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ArgumentError(*path + ":" + std::to_string(lineno) + ": empty key");
    if (key.rfind("--", 0) != 0) key = "--" + key;
    injected.push_back(key);
    injected.push_back(value);
  }
  const auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.empty() || a[0] != '-'; });
  const auto at = sub == args.end() ? args.end() : sub + 1;
  args.insert(at, injected.begin(), injected.end());
  return args;
}

// --- manifest ---------------------------------------------------------------

json collect_parameters(const CLI::App* sub) {
  json params = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    if (opt->count() > 0)
      params[name] = opt->as<std::string>();
    else
      params[name] = opt->get_default_str();
  }
  return params;
}

void emit_manifest(const CLI::App* sub, const std::vector<OutputFile>& files, double seconds,
                   const std::string& manifest_path, std::ostream& err) {
  json m;
  m["subcommand"] = sub->get_name();
  m["parameters"] = collect_parameters(sub);
  m["version"] = AIRYCOV_VERSION;
  m["wall_clock_seconds"] = seconds;
  json outputs = json::array();
  for (const auto& f : files) outputs.push_back(f.path == "-" ? "<stdout>" : f.path);
  m["outputs"] = outputs;
  const std::string line = m.dump();
  err << "manifest: " << line << '\n';
  if (!manifest_path.empty()) {
    std::ofstream os(manifest_path, std::ios::binary | std::ios::app);
    if (!os) throw ArgumentError("cannot open manifest file " + manifest_path);
    os << line << '\n';
  }
}

// --- figures ----------------------------------------------------------------

struct FigureData {
  std::vector<ChartSeries> series;
  std::vector<std::vector<std::string>> rows;  // series,u,value,stderr
};

const std::vector<std::string> kPalette{"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};

void add_rows(FigureData& fig, const std::string& name, const std::vector<double>& x,
              const std::vector<double>& y, const std::optional<std::vector<double>>& e) {
  for (std::size_t i = 0; i < x.size(); ++i)
    fig.rows.push_back({name, format_number(x[i]), format_number(y[i]), e ? format_number((*e)[i]) : ""});
}

void add_curve(FigureData& fig, const std::string& name, const CovCurve& curve) {
  ChartSeries s;
  s.label = name;
  s.color = "#000000";
  s.x = curve.grid;
  s.y = curve.values;
  fig.series.push_back(s);
  add_rows(fig, name, s.x, s.y, std::nullopt);
}

AutoCovEstimate simulate(Ensemble e, int N, long K, int R, std::uint64_t seed, double umax) {
  EnsembleConfig cfg;
  cfg.ensemble = e;
  cfg.N = N;
  cfg.K = K;
  cfg.realizations = R;
  cfg.seed = seed;
  cfg.validate();
  const int lags = static_cast<int>(std::floor(umax / cfg.du() + 1e-9));
  return autocovariance(run_chains(cfg), lags);
}

// --- self-test --------------------------------------------------------------

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

}  // namespace

std::vector<SelfTestResult> run_selftest() {
  std::vector<SelfTestResult> results;
  const auto check = [&](const std::string& name, auto&& body) {
    try {
      auto [ok, detail] = body();
      results.push_back({name, ok, detail});
    } catch (const std::exception& e) {
      results.push_back({name, false, std::string("exception: ") + e.what()});
    }
  };

  check("quadrature: 2-point Gauss-Legendre nodes", [] {
    const auto r = gauss_legendre<double>(2, 0.0, 1.0);
    const double err = std::max(std::abs(r.nodes[0] - (1 - 1 / std::sqrt(3.0)) / 2),
                                std::abs(r.nodes[1] - (1 + 1 / std::sqrt(3.0)) / 2));
    return std::pair{err < 1e-15, "max error " + sci(err)};
  });
  check("quadrature: Gauss-Legendre exactness (degree 15, n = 8)", [] {
    const auto r = gauss_legendre<double>(8, -1.0, 2.0);
    const double q = r.integrate([](double x) { return std::pow(x, 15) - 3 * std::pow(x, 6) + 1; });
    const double exact = (std::pow(2.0, 16) - 1) / 16 - 3 * (std::pow(2.0, 7) + 1) / 7 + 3;
    const double err = std::abs(q - exact) / std::abs(exact);
    return std::pair{err < 1e-13, "relative error " + sci(err)};
  });
  check("quadrature: Clenshaw-Curtis n = 100 on e^x", [] {
    const auto r = clenshaw_curtis<double>(100, -1.0, 1.0);
    const double err = std::abs(r.integrate([](double x) { return std::exp(x); }) - (std::exp(1.0) - std::exp(-1.0)));
    return std::pair{err < 1e-12, "error " + sci(err)};
  });
  check("quadrature: semi-infinite rule on e^-x and e^-x^2", [] {
    const double e1 = std::abs(semi_infinite_rule<double>(0.0, 40).integrate([](double x) { return std::exp(-x); }) - 1);
    const double e2 = std::abs(semi_infinite_rule<double>(2.0, 60).integrate([](double x) { return std::exp(-x * x); }) -
                               std::sqrt(std::numbers::pi) / 2 * std::erfc(2.0));
    return std::pair{e1 < 1e-10 && e2 < 1e-10, "errors " + sci(e1) + ", " + sci(e2)};
  });
  check("airy: closed-form values Ai(0), Ai'(0), Ai(1)", [] {
    const double e0 = std::abs(airy_ai(0).ai / 0.35502805388781724 - 1);
    const double e1 = std::abs(airy_ai(0).ai_prime / -0.25881940379280680 - 1);
    const double e2 = std::abs(airy_ai(1).ai / 0.13529241631288141 - 1);
    const double worst = std::max({e0, e1, e2});
    return std::pair{worst < 1e-13, "max relative error " + sci(worst)};
  });
  check("airy: contour-integral oracle on [-10, 10]", [] {
    double worst = 0;
    for (int i = 0; i <= 20; ++i) {
      const double x = -10 + i;
      worst = std::max(worst, std::abs(airy_ai(x).ai - oracle::airy_contour_integral(x)));
    }
    return std::pair{worst < 1e-10, "max abs difference " + sci(worst)};
  });
  check("airy: ODE residual Ai'' = x Ai (second difference, h = 1e-4)", [] {
    // Allowed: 1e-10 plus the stencil's rounding (8 eps |Ai| / h^2) and
    // truncation (h^2/12 |Ai|, with Ai = 2 Ai' + x^2 Ai) errors.
    double worst = 0;
    bool ok = true;
    const double h = 1e-4;
    for (double x : {-8.0, -3.3, -0.7, 0.0, 1.5, 4.2}) {
      const AiryValue a = airy_ai(x);
      const double d2 = (airy_ai(x + h).ai - 2 * a.ai + airy_ai(x - h).ai) / (h * h);
      const double residual = std::abs(d2 - x * a.ai);
      const double allowed = 1e-10 + 8 * std::numeric_limits<double>::epsilon() * std::abs(a.ai) / (h * h) +
                             h * h / 12 * (2 * std::abs(a.ai_prime) + x * x * std::abs(a.ai) + 1e-3);
      ok = ok && residual <= allowed;
      worst = std::max(worst, residual);
    }
    return std::pair{ok, "max residual " + sci(worst)};
  });
  check("kernels: full-line identity vs brute force (3 points)", [] {
    double worst = 0;
    for (auto [t, s, sp] : {std::array{0.5, 0.5, 0.1}, std::array{1.0, -1.0, 0.3}, std::array{2.0, 1.0, -2.0}})
      worst = std::max(worst, std::abs(airy2_full_line(t, s, sp) - oracle::airy2_full_line(t, s, sp)));
    return std::pair{worst < 1e-8, "max difference " + sci(worst)};
  });
  check("kernels: subtraction route vs brute force at (0, 0.5; 0.5, 0.1)", [] {
    const double d = std::abs(airy2_kernel(0, 0.5, 0.5, 0.1) - oracle::airy2_negative_half_line(0.5, 0.5, 0.1));
    return std::pair{d < 1e-8, "difference " + sci(d)};
  });
  check("kernels: equal-time quadrature vs Airy kernel at (0.3, -0.2)", [] {
    const double d = std::abs(airy2_kernel(0, 0.3, 0, -0.2) - airy_kernel(0.3, -0.2));
    return std::pair{d < 1e-12, "difference " + sci(d)};
  });
  check("fredholm: zero kernel gives 1", [] {
    JointProblem p;
    p.kernel = KernelBlockFn([](double, const Eigen::VectorXd& x, double, const Eigen::VectorXd& y) {
      return Eigen::MatrixXd::Zero(x.size(), y.size()).eval();
    });
    p.times = {0.0};
    p.thresholds = {0.0};
    const double v = det_i_minus(assemble(p));
    return std::pair{v == 1.0, "det = " + format_number(v)};
  });
  check("fredholm: rank-one kernel e^-(x+y) on (0, inf) gives 1/2", [] {
    JointProblem p;
    p.kernel = KernelBlockFn([](double, const Eigen::VectorXd& x, double, const Eigen::VectorXd& y) {
      return ((-x.array()).exp().matrix() * (-y.array()).exp().matrix().transpose()).eval();
    });
    p.times = {0.0};
    p.thresholds = {0.0};
    p.n = 40;
    const double e = std::abs(det_i_minus(assemble(p)) - 0.5);
    return std::pair{e < 1e-12, "error " + sci(e)};
  });
  check("fredholm: Airy2 one-point at s = 0 converges by n = 120", [] {
    JointProblem p;
    p.kernel = Process::Airy2;
    p.times = {0.0};
    p.thresholds = {0.0};
    const auto r = evaluate_with_error_control(p, 1e-14);
    return std::pair{r.n_used <= 120, "n_used = " + std::to_string(r.n_used) + ", F = " + format_number(r.value)};
  });
  check("eigen: 2x2 and diagonal closed forms", [] {
    Eigen::Matrix2d m;
    m << 1, 2, 2, -1;
    const double e1 = std::abs(largest_eigenvalue(Eigen::MatrixXd(m)) - std::sqrt(5.0));
    const double e2 = std::abs(largest_eigenvalue(Eigen::MatrixXd(Eigen::Vector3d(1, 2, 3).asDiagonal())) - 3);
    return std::pair{std::max(e1, e2) < 1e-14, "errors " + sci(e1) + ", " + sci(e2)};
  });
  return results;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Airy process covariances and GOE/GUE edge diffusion"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", AIRYCOV_VERSION);
  std::string manifest_path;
  app.add_option("--manifest", manifest_path, "Append the run manifest line to this file");

  // cov
  auto* cov = app.add_subcommand("cov", "Covariance curve of an Airy process");
  std::string cov_process;
  double cov_umax = 2, cov_du = 0.1, cov_tol = 1e-12;
  std::string cov_out = "-";
  CovarianceOptions cov_opts;
  cov->add_option("--process", cov_process, "airy1 or airy2")->required();
  cov->add_option("--umax", cov_umax, "Largest time separation (<= 10)")->capture_default_str();
  cov->add_option("--du", cov_du, "Grid spacing")->capture_default_str();
  cov->add_option("--tol", cov_tol, "Tolerance for choosing the Nystrom size")->capture_default_str();
  cov->add_option("--truncation", cov_opts.truncation, "Integration box [-T, T]")->capture_default_str();
  cov->add_option("--cc-points", cov_opts.cc_points, "Clenshaw-Curtis points per dimension")->capture_default_str();
  cov->add_option("--nystrom-n", cov_opts.nystrom_n, "Fixed Nystrom size (0: automatic)")->capture_default_str();
  cov->add_option("--out", cov_out, "Output CSV (- for stdout)")->capture_default_str();

  // joint
  auto* joint = app.add_subcommand("joint", "Two-point distribution P(A(0) <= s1, A(u) <= s2)");
  TwoPointQuery jq;
  std::string joint_process, joint_out = "-";
  joint->add_option("--process", joint_process, "airy1 or airy2")->required();
  joint->add_option("--u", jq.u, "Time separation")->required();
  joint->add_option("--s1", jq.s1, "Threshold at time 0")->required();
  joint->add_option("--s2", jq.s2, "Threshold at time u")->required();
  joint->add_option("--tol", jq.tol, "Determinant tolerance")->capture_default_str();
  joint->add_option("--out", joint_out, "Output CSV (- for stdout)")->capture_default_str();

  // dyson
  auto* dyson = app.add_subcommand("dyson", "Monte Carlo largest-eigenvalue autocovariance");
  EnsembleConfig dcfg;
  std::string dyson_ensemble, dyson_out = "-";
  double dyson_dt = 0, dyson_maxlag = 4;
  dyson->add_option("--ensemble", dyson_ensemble, "goe or gue")->required();
  dyson->add_option("--N", dcfg.N, "Matrix dimension")->capture_default_str();
  dyson->add_option("--K", dcfg.K, "Number of OU steps")->capture_default_str();
  dyson->add_option("--R", dcfg.realizations, "Independent realizations")->capture_default_str();
  dyson->add_option("--seed", dcfg.seed, "Random seed")->capture_default_str();
  auto* dt_opt = dyson->add_option("--dt", dyson_dt, "OU time step (default 0.5 N^(-1/3))");
  dyson->add_option("--gamma", dcfg.gamma, "OU rate")->capture_default_str();
  dyson->add_option("--maxlag", dyson_maxlag, "Largest rescaled lag u")->capture_default_str();
  dyson->add_option("--out", dyson_out, "Output CSV (- for stdout)")->capture_default_str();

  // figure
  auto* figure = app.add_subcommand("figure", "Reproduce figure 1, 2 or 3 as SVG plus CSV");
  int which = 0;
  std::string scale = "desk", fig_out;
  std::vector<int> fig_N;
  long fig_K = 0;
  int fig_R = 0;
  std::uint64_t fig_seed = 1;
  double fig_du = 0.1, fig_umax = 0;
  figure->add_option("--which", which, "1, 2 or 3")->required()->check(CLI::IsMember({1, 2, 3}));
  figure->add_option("--scale", scale, "desk or paper")->capture_default_str()->check(CLI::IsMember({"desk", "paper"}));
  figure->add_option("--out", fig_out, "Output prefix; writes PREFIX.svg and PREFIX.csv")->required();
  figure->add_option("--N", fig_N, "Override matrix sizes")->delimiter(',');
  figure->add_option("--K", fig_K, "Override number of OU steps");
  figure->add_option("--R", fig_R, "Override number of realizations");
  figure->add_option("--seed", fig_seed, "Random seed")->capture_default_str();
  figure->add_option("--du", fig_du, "Spacing of the Airy covariance curve")->capture_default_str();
  figure->add_option("--umax", fig_umax, "Override the largest u");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle checks");
  double perturb = 0;
  selftest->add_option("--perturb-airy", perturb, "Negative control: scale series Airy values by (1 + REL)");

  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  std::vector<OutputFile> files;
  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == cov) {
      const Process p = parse_process(cov_process);
      cov_opts.pilot_tol = cov_tol;
      const CovCurve curve = covariance_curve(p, cov_umax, cov_du, cov_opts);
      bool failed = false;
      std::vector<std::vector<std::string>> rows;
      for (std::size_t k = 0; k < curve.grid.size(); ++k) {
        if (curve.failed[k]) {
          err << "error: u = " << curve.grid[k] << ": " << curve.errors[k] << '\n';
          failed = true;
        } else if (curve.details[k].truncation_warning) {
          err << "warning: u = " << curve.grid[k] << ": boundary integrand "
              << curve.details[k].boundary_max << " exceeds " << cov_opts.boundary_warning << '\n';
        }
        rows.push_back({format_number(curve.grid[k]), format_number(curve.values[k])});
      }
      if (failed) return kExitFailure;
      files.push_back({cov_out, csv({"u", "cov"}, rows)});
    } else if (active == joint) {
      jq.process = parse_process(joint_process);
      const double v = two_point_cdf(jq);
      files.push_back({joint_out, csv({"u", "s1", "s2", "cdf"},
                                      {{format_number(jq.u), format_number(jq.s1), format_number(jq.s2),
                                        format_number(v)}})});
    } else if (active == dyson) {
      dcfg.ensemble = parse_ensemble(dyson_ensemble);
      if (dt_opt->count() > 0) dcfg.dt = dyson_dt;
      dcfg.validate();
      if (!(dyson_maxlag >= 0)) throw ArgumentError("--maxlag must be >= 0");
      const int lags = static_cast<int>(std::floor(dyson_maxlag / dcfg.du() + 1e-9));
      if (lags > dcfg.K) throw ArgumentError("--maxlag exceeds the simulated time span");
      const AutoCovEstimate est = autocovariance(run_chains(dcfg), lags);
      if (!est.stderrs) err << "note: stderr unavailable with a single realization\n";
      std::vector<std::vector<std::string>> rows;
      for (std::size_t k = 0; k < est.lags.size(); ++k)
        rows.push_back({format_number(est.lags[k]), format_number(est.cov[k]),
                        est.stderrs ? format_number((*est.stderrs)[k]) : ""});
      files.push_back({dyson_out, csv({"u", "cov", "stderr"}, rows)});
    } else if (active == figure) {
      const bool paper = scale == "paper";
      const std::vector<int> Ns = !fig_N.empty() ? fig_N : paper ? std::vector<int>{64, 256} : std::vector<int>{64};
      const long K = fig_K > 0 ? fig_K : paper ? 1000000 : 100000;
      const int R = fig_R > 0 ? fig_R : paper ? 20 : 10;
      if (!(fig_du > 0)) throw ArgumentError("--du must be positive");

      FigureData fig;
      ChartSpec spec;
      if (which == 1 || which == 2) {
        const bool first = which == 1;
        const double umax = fig_umax > 0 ? fig_umax : first ? 2.5 : 4.0;
        const Process p = first ? Process::Airy1 : Process::Airy2;
        const Ensemble e = first ? Ensemble::GOE : Ensemble::GUE;
        const CovCurve curve = covariance_curve(p, umax, fig_du);
        for (std::size_t k = 0; k < curve.grid.size(); ++k)
          if (curve.failed[k]) throw NumericalError("covariance curve failed at u = " + format_number(curve.grid[k]) + ": " + curve.errors[k]);
        add_curve(fig, first ? "g1" : "g2", curve);
        for (std::size_t i = 0; i < Ns.size(); ++i) {
          const AutoCovEstimate est = simulate(e, Ns[i], K, R, fig_seed, umax);
          ChartSeries s;
          s.label = std::string(first ? "f_N^GOE" : "f_N^GUE") + ", N = " + std::to_string(Ns[i]);
          s.style = ChartSeries::Style::Points;
          s.color = kPalette[i % kPalette.size()];
          s.x = est.lags;
          s.y = est.cov;
          s.error = est.stderrs;
          add_rows(fig, std::string(first ? "goe_N" : "gue_N") + std::to_string(Ns[i]), s.x, s.y, s.error);
          fig.series.push_back(std::move(s));
        }
        spec.title = first ? "Airy1 covariance g1 vs GOE largest-eigenvalue covariance"
                           : "Airy2 covariance g2 vs GUE largest-eigenvalue covariance";
        spec.x_label = "u";
        spec.y_label = "covariance";
      } else {
        const double umax = fig_umax > 0 ? fig_umax : 8.0;
        std::size_t color = 0;
        for (int N : Ns) {
          const AutoCovEstimate goe = simulate(Ensemble::GOE, N, K, R, fig_seed, umax);
          const AutoCovEstimate gue = simulate(Ensemble::GUE, N, K, R, fig_seed, 2 * umax);
          ChartSeries a;
          a.label = "f_N^GOE(u), N = " + std::to_string(N);
          a.style = ChartSeries::Style::Points;
          a.color = kPalette[color++ % kPalette.size()];
          a.x = goe.lags;
          a.y = goe.cov;
          a.error = goe.stderrs;
          add_rows(fig, "goe_N" + std::to_string(N), a.x, a.y, a.error);
          fig.series.push_back(std::move(a));

          // The GUE grid spacing is twice the GOE one, so u = lag / 2.
          ChartSeries b;
          b.label = "f_N^GUE(2u)/2, N = " + std::to_string(N);
          b.style = ChartSeries::Style::Points;
          b.color = kPalette[color++ % kPalette.size()];
          std::vector<double> be;
          for (std::size_t k = 0; k < gue.lags.size(); ++k) {
            b.x.push_back(gue.lags[k] / 2);
            b.y.push_back(gue.cov[k] / 2);
            if (gue.stderrs) be.push_back((*gue.stderrs)[k] / 2);
          }
          if (gue.stderrs) b.error = be;
          add_rows(fig, "gue_half_N" + std::to_string(N), b.x, b.y, b.error);
          fig.series.push_back(std::move(b));
        }
        ChartSeries guide;
        guide.label = "u^-2";
        guide.color = "#000000";
        for (int k = 0; k <= 60; ++k) {
          const double u = 0.5 * std::pow(umax / 0.5, k / 60.0);
          guide.x.push_back(u);
          guide.y.push_back(1 / (u * u));
        }
        add_rows(fig, "u^-2", guide.x, guide.y, std::nullopt);
        fig.series.push_back(std::move(guide));
        spec.title = "Largest-eigenvalue covariances, log-log";
        spec.x_label = "u";
        spec.y_label = "covariance";
        spec.log_log = true;
      }
      files.push_back({fig_out + ".csv", csv({"series", "u", "value", "stderr"}, fig.rows)});
      files.push_back({fig_out + ".svg", render_svg(spec, fig.series)});
    } else if (active == selftest) {
      detail::inject_series_perturbation(perturb);
      const auto results = run_selftest();
      detail::inject_series_perturbation(0);
      bool all = true;
      std::size_t width = 0;
      for (const auto& r : results) width = std::max(width, r.name.size());
      for (const auto& r : results) {
        out << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width)) << r.name
            << "  " << r.detail << '\n';
        all = all && r.passed;
      }
      out << (all ? "selftest: all checks passed\n" : "selftest: FAILED\n");
      if (!all) return kExitFailure;
    }
    write_outputs(files, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  try {
    emit_manifest(active, files, seconds, manifest_path, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace airycov::cli
