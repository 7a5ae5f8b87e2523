#include <doctest.h>

#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "sagopt/cli.hpp"
#include "support.hpp"

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"sagopt"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  Result r;
  r.code = sagopt::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::string write_config(const std::string& name, const std::string& text) {
  const auto p = testing::temp_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

const char* const kTinyMc[] = {"--rows", "12", "--cols", "10", "--rank", "2", "--fraction", "0.6", "--iters", "8"};

Result run_mc(std::initializer_list<const char*> extra) {
  std::vector<const char*> argv{"sagopt", "matcomp"};
  argv.insert(argv.end(), std::begin(kTinyMc), std::end(kTinyMc));
  argv.insert(argv.end(), extra.begin(), extra.end());
  std::ostringstream out, err;
  Result r;
  r.code = sagopt::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("no arguments is a usage error") {
    const Result r = run({});
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
  }

  TEST_CASE("unknown subcommands and bad values are usage errors") {
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"stability", "--scheme", "rk4"}).code == 2);
    CHECK(run({"verify", "--n-max", "3"}).code == 2);
    CHECK(run({"order", "--config", "/nonexistent/file.cfg"}).code == 2);
  }

  TEST_CASE("help exits 0") {
    const Result r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("matcomp") != std::string::npos);
    CHECK(r.out.find("SAG_OPTIM_THREADS") != std::string::npos);
    CHECK(run({"matcomp", "--help"}).out.find("--s-grid") != std::string::npos);
  }

  TEST_CASE("--s with --s-grid is rejected naming both flags") {
    const Result r = run_mc({"--s", "0.5", "--s-grid", "0.5,1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--s") != std::string::npos);
    CHECK(r.err.find("--s-grid") != std::string::npos);
  }

  TEST_CASE("stability scan ends with the scanned SAG region") {
    const Result r = run({"stability", "--scheme", "sag", "--z-max", "6", "--grid", "0.001", "-q"});
    REQUIRE(r.code == 0);
    CHECK(r.err.empty());
    const auto ls = lines(r.out);
    REQUIRE(ls.size() > 6000);
    CHECK(ls[0].rfind("# config_hash=", 0) == 0);
    CHECK(std::find(ls.begin(), ls.end(), "scheme,z,max_root_modulus,stable_flag,kind,z_lo,z_hi") != ls.end());
    const std::string last = ls.back();
    CHECK(last.rfind("sag,,,1,scanned,0,", 0) == 0);
    const double z_hi = std::stod(last.substr(last.rfind(',') + 1));
    CHECK(std::abs(z_hi - 4.0) <= 0.001 + 1e-12);
    CHECK(ls[ls.size() - 2].rfind("sag,,,1,analytic,0,4", 0) == 0);
  }

  TEST_CASE("verify exits 0 and logs to stderr") {
    const Result r = run({"verify", "--n-max", "50"});
    CHECK(r.code == 0);
    CHECK(r.out.find("# operation=verify") != std::string::npos);
    CHECK(r.err.find("sagopt verify:") != std::string::npos);
  }

  TEST_CASE("order subcommand") {
    const Result r = run({"order", "--scheme", "nag", "--ladder-len", "5", "-q"});
    CHECK(r.code == 0);
    const auto ls = lines(r.out);
    std::size_t data = 0;
    for (const auto& l : ls) data += l.rfind("nag,", 0) == 0;
    CHECK(data == 5);
    CHECK(run({"order", "--ladder-len", "3", "-q"}).out.find("error:") != std::string::npos);
  }

  TEST_CASE("probe subcommand exits 1 only when every run diverged") {
    const Result mixed = run({"probe", "--scheme", "nag", "--s-grid", "0.5,1.5", "--iters", "2000", "--burn-in",
                              "200", "-q"});
    CHECK(mixed.code == 0);
    const Result all = run({"probe", "--scheme", "nag", "--s-grid", "1.5,1.9", "--iters", "2000", "--burn-in", "200"});
    CHECK(all.code == 1);
    CHECK(all.out.find("# outcome=diverged") != std::string::npos);
    CHECK(all.err.find("all runs diverged") != std::string::npos);
  }

  TEST_CASE("matcomp modes") {
    const Result fixed = run_mc({"--s", "0.5", "-q"});
    CHECK(fixed.code == 0);
    CHECK(fixed.out.find("# operation=matcomp_fixed") != std::string::npos);
    const Result scan = run_mc({"--method", "sfista", "--s-grid", "0.5,1,2", "-q"});
    CHECK(scan.code == 0);
    CHECK(scan.out.find("sfista,boundary,") != std::string::npos);
    const Result bt = run_mc({"--backtrack-beta", "0.8", "--s-init", "6", "-q"});
    CHECK(bt.code == 0);
    CHECK(bt.out.find(",total,") != std::string::npos);
    const Result div = run_mc({"--method", "apg", "--s", "60", "-q"});
    CHECK(div.code == 1);
  }

  TEST_CASE("seed fixes the output bytes") {
    const Result a = run_mc({"--s", "0.5", "--seed", "7", "-q"});
    const Result b = run_mc({"--s", "0.5", "--seed", "7", "-q"});
    const Result c = run_mc({"--s", "0.5", "--seed", "8", "-q"});
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(a.out.find("# seed=7") != std::string::npos);
  }

  TEST_CASE("flags override the config file") {
    const std::string cfg = write_config("override.cfg", "scheme=nag\nz_max=3\ngrid=0.003\n");
    const Result from_file = run({"stability", "--config", cfg.c_str(), "-q"});
    REQUIRE(from_file.code == 0);
    CHECK(from_file.out.find("\nsag,") == std::string::npos);
    const Result overridden = run({"stability", "--config", cfg.c_str(), "--scheme", "sag", "--z-max", "6", "-q"});
    REQUIRE(overridden.code == 0);
    CHECK(overridden.out.find("\nnag,") == std::string::npos);
    CHECK(overridden.out.find("\nsag,") != std::string::npos);
    CHECK(overridden.out != from_file.out);
    const std::string bad = write_config("bad.cfg", "this line has no equals\n");
    CHECK(run({"verify", "--config", bad.c_str()}).code == 2);
  }

  TEST_CASE("--out writes the file and --format json") {
    const auto path = (testing::temp_dir() / "verify.json").string();
    const Result r = run({"verify", "--n-max", "10", "--out", path.c_str(), "--format", "json", "-q"});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    const auto j = nlohmann::json::parse(testing::read_file(path));
    CHECK(j["metadata"]["operation"] == "verify");
    CHECK(j["columns"][0] == "check");
  }
}
