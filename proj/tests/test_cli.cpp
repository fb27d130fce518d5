#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "airycov/cli.hpp"

namespace fs = std::filesystem;
using airycov::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("airycov_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) v.push_back(l);
  return v;
}

// Every numeric field is in canonical %.17g form: reformatting its parsed
// value reproduces it character for character.
void check_csv(const std::string& text, const std::string& header, std::size_t numeric_from = 0) {
  REQUIRE_FALSE(text.empty());
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.back() == '\n');
  const auto ls = lines(text);
  REQUIRE(ls.size() >= 2);
  CHECK(ls[0] == header);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::istringstream row(ls[i]);
    std::size_t col = 0;
    for (std::string field; std::getline(row, field, ','); ++col) {
      if (col < numeric_from || field.empty()) continue;
      CHECK(airycov::cli::format_number(std::stod(field)) == field);
    }
  }
}

}  // namespace

TEST_CASE("format_number") {
  CHECK(airycov::cli::format_number(0.1) == "0.10000000000000001");
  CHECK(airycov::cli::format_number(2.0) == "2");
  CHECK(airycov::cli::format_number(std::nan("")) == "nan");
}

TEST_CASE("cov writes a well-formed CSV and reruns identically") {
  const auto a = call({"cov", "--process", "airy1", "--umax", "0.1", "--du", "0.1"});
  REQUIRE(a.code == 0);
  check_csv(a.out, "u,cov");
  CHECK(lines(a.out).size() == 3);
  CHECK(a.err.find("manifest: {") != std::string::npos);
  const auto b = call({"cov", "--process", "airy1", "--umax", "0.1", "--du", "0.1"});
  CHECK(a.out == b.out);

  const fs::path f = scratch("cov.csv");
  REQUIRE(call({"cov", "--process", "airy1", "--umax", "0", "--du", "1", "--out", f.string()}).code == 0);
  CHECK(slurp(f) == "u,cov\n0,0.40194525864549746\n");
  CHECK_FALSE(fs::exists(f.string() + ".partial"));
}

TEST_CASE("joint") {
  const auto a = call({"joint", "--process", "airy2", "--u", "1", "--s1", "0", "--s2", "0"});
  REQUIRE(a.code == 0);
  check_csv(a.out, "u,s1,s2,cdf");
  const double v = std::stod(lines(a.out)[1].substr(lines(a.out)[1].rfind(',') + 1));
  CHECK(v > 0.9);
  CHECK(v < 0.97);
}

TEST_CASE("dyson") {
  const std::vector<std::string> args{"dyson", "--ensemble", "goe", "--N", "8", "--K", "400", "--R", "2", "--seed", "5"};
  const auto a = call(args), b = call(args);
  REQUIRE(a.code == 0);
  check_csv(a.out, "u,cov,stderr");
  CHECK(a.out == b.out);
  auto other = args;
  other.back() = "6";
  CHECK(call(other).out != a.out);

  const auto single = call({"dyson", "--ensemble", "gue", "--N", "8", "--K", "400", "--R", "1", "--maxlag", "1"});
  REQUIRE(single.code == 0);
  for (std::size_t i = 1; i < lines(single.out).size(); ++i) CHECK(lines(single.out)[i].back() == ',');
  CHECK(single.err.find("stderr unavailable") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(call({}).code == 2);
  CHECK(call({"bogus"}).code == 2);
  CHECK(call({"cov"}).code == 2);
  CHECK(call({"cov", "--process", "airy3"}).code == 2);
  CHECK(call({"cov", "--process", "airy2", "--umax", "20"}).code == 2);
  CHECK(call({"cov", "--process", "airy2", "--umax", "abc"}).code == 2);
  CHECK(call({"joint", "--process", "airy2", "--u", "-1", "--s1", "0", "--s2", "0"}).code == 2);
  CHECK(call({"dyson", "--ensemble", "gse"}).code == 2);
  CHECK(call({"dyson", "--ensemble", "goe", "--N", "1"}).code == 2);
  CHECK(call({"figure", "--which", "4", "--out", "x"}).code == 2);
  CHECK(call({"cov", "--help"}).code == 0);
  CHECK(call({"--version"}).code == 0);
}

TEST_CASE("selftest and its negative control") {
  const auto ok = call({"selftest"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("all checks passed") != std::string::npos);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  CHECK(call({"selftest"}).out == ok.out);
  const auto bad = call({"selftest", "--perturb-airy", "1e-6"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL") != std::string::npos);
  // the perturbation must not leak into later runs
  CHECK(call({"selftest"}).code == 0);
}

TEST_CASE("config file, explicit flags win, manifest file") {
  const fs::path cfg = scratch("run.cfg");
  {
    std::ofstream os(cfg);
    os << "# test\nprocess = airy1\numax=0.1\ndu = 0.1\n";
  }
  const auto from_file = call({"cov", "--config", cfg.string()});
  REQUIRE(from_file.code == 0);
  CHECK(lines(from_file.out).size() == 3);
  const auto overridden = call({"cov", "--config", cfg.string(), "--umax", "0"});
  REQUIRE(overridden.code == 0);
  CHECK(lines(overridden.out).size() == 2);

  CHECK(call({"cov", "--config", scratch("missing.cfg").string()}).code == 2);
  {
    std::ofstream os(scratch("broken.cfg"));
    os << "process airy1\n";
  }
  CHECK(call({"cov", "--config", scratch("broken.cfg").string()}).code == 2);

  const fs::path manifest = scratch("manifest.jsonl");
  fs::remove(manifest);
  REQUIRE(call({"--manifest", manifest.string(), "cov", "--process", "airy1", "--umax", "0", "--du", "1"}).code == 0);
  REQUIRE(call({"--manifest", manifest.string(), "joint", "--process", "airy1", "--u", "0", "--s1", "0", "--s2", "1"}).code == 0);
  const auto ml = lines(slurp(manifest));
  REQUIRE(ml.size() == 2);
  CHECK(ml[0].find("\"subcommand\":\"cov\"") != std::string::npos);
  CHECK(ml[0].find("\"version\"") != std::string::npos);
  CHECK(ml[1].find("\"subcommand\":\"joint\"") != std::string::npos);
}

TEST_CASE("figures are deterministic and well formed") {
  for (const std::string which : {"1", "3"}) {
    const fs::path a = scratch("fig" + which + "a"), b = scratch("fig" + which + "b");
    std::vector<std::string> args{"figure", "--which", which, "--N", "8", "--K", "400", "--R", "2",
                                  "--umax", "0.5", "--du", "0.25", "--out", a.string()};
    REQUIRE(call(args).code == 0);
    args.back() = b.string();
    REQUIRE(call(args).code == 0);
    const std::string csv = slurp(a.string() + ".csv"), svg = slurp(a.string() + ".svg");
    CHECK(csv == slurp(b.string() + ".csv"));
    CHECK(svg == slurp(b.string() + ".svg"));
    check_csv(csv, "series,u,value,stderr", 1);

    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("viewBox=\"0 0 800 600\"") != std::string::npos);
    CHECK(svg.find("</svg>\n") == svg.size() - 7);
    std::size_t open = 0, close = 0, self = 0;
    for (std::size_t p = svg.find('<'); p != std::string::npos; p = svg.find('<', p + 1)) {
      if (svg.compare(p, 2, "<?") == 0) continue;
      if (svg[p + 1] == '/') {
        ++close;
        continue;
      }
      const std::size_t end = svg.find('>', p);
      if (svg[end - 1] == '/') ++self;
      else ++open;
    }
    CHECK(open == close);
    CHECK(self > 0);
    CHECK(svg.find(">u<") != std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++polylines;
    CHECK(polylines == 1);  // the g1 curve, or the u^-2 guide
  }
}

TEST_CASE("failed runs leave no partial outputs") {
  const fs::path prefix = scratch("blocked");
  fs::create_directories(prefix.string() + ".svg");  // the SVG cannot be written
  const auto r = call({"figure", "--which", "1", "--N", "8", "--K", "400", "--R", "2", "--umax", "0.25",
                       "--du", "0.25", "--out", prefix.string()});
  CHECK(r.code != 0);
  CHECK_FALSE(fs::exists(prefix.string() + ".csv"));
  CHECK_FALSE(fs::exists(prefix.string() + ".csv.partial"));
  CHECK_FALSE(fs::exists(prefix.string() + ".svg.partial"));

  const auto nodir = call({"cov", "--process", "airy1", "--umax", "0", "--du", "1", "--out",
                           (scratch("no") / "such" / "dir.csv").string()});
  CHECK(nodir.code != 0);
}
