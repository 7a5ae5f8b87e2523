#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <set>
#include <stdexcept>

#include "sagopt/bench/config.hpp"
#include "sagopt/bench/data.hpp"
#include "sagopt/bench/experiments.hpp"
#include "sagopt/bench/matrix_io.hpp"
#include "sagopt/bench/parallel.hpp"
#include "sagopt/bench/result_table.hpp"
#include "sagopt/bench/rng.hpp"
#include "sagopt/errors.hpp"
#include "support.hpp"

using namespace sagopt;
using namespace sagopt::bench;

namespace {

// Rows of `t` whose column `col` equals `value`.
std::vector<std::vector<Cell>> rows_where(const ResultTable& t, const std::string& col, const std::string& value) {
  const std::size_t c = t.column_index(col);
  std::vector<std::vector<Cell>> out;
  for (const auto& r : t.rows())
    if (std::holds_alternative<std::string>(r[c]) && std::get<std::string>(r[c]) == value) out.push_back(r);
  return out;
}

double num(const Cell& c) {
  if (std::holds_alternative<double>(c)) return std::get<double>(c);
  if (std::holds_alternative<std::int64_t>(c)) return static_cast<double>(std::get<std::int64_t>(c));
  throw std::runtime_error("cell is not numeric");
}

Config tiny_mc() {
  return Config::parse("rows=20\ncols=18\nrank=2\nfraction=0.5\nlambda=0.5\niters=15\n");
}

}  // namespace

TEST_SUITE("bench") {
  TEST_CASE("SplitMix64 reference stream") {
    SplitMix64 r(0);
    CHECK(r.next() == 0xE220A8397B1DCDAFULL);
    CHECK(r.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(r.next() == 0x06C45D188009454FULL);
  }

  TEST_CASE("uniform, below and gaussian draws") {
    SplitMix64 r(42);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double g = r.gaussian();
      sum += g;
      sq += g * g;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
      const double u = r.uniform();
      CHECK((u >= 0.0 && u < 1.0));
      ++counts[r.below(7)];
    }
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
    SplitMix64 a(9), b(9);
    for (int i = 0; i < 10; ++i) CHECK(a.gaussian() == b.gaussian());
  }

  TEST_CASE("FNV-1a 64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
  }

  TEST_CASE("config parsing, typed access and canonical hash") {
    const Config c = Config::parse("# comment\n\n b = 2.5 \na=x\nlist=1,2, 3\nb=3\n");
    CHECK(c.get("a", "") == "x");
    CHECK(c.get_double("b", 0.0) == 3.0);
    CHECK(c.get_int("missing", 7) == 7);
    CHECK(c.get_doubles("list", {}) == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(c.canonical() == "a=x\nb=3\nlist=1,2, 3\n");
    const Config same = Config::parse("list=1,2, 3\nb=3\na=x\n");
    CHECK(c.hash() == same.hash());
    CHECK(c.hash() == fnv1a64(c.canonical()));
    CHECK(c.hash_hex().size() == 16);
    CHECK_THROWS_AS(Config::parse("no equals sign\n"), PreconditionError);
    CHECK_THROWS_AS(c.get_double("a", 0.0), PreconditionError);
    Config m;
    m.set("a", "y");
    m.set("z", "1");
    Config merged = c;
    merged.merge(m);
    CHECK(merged.get("a", "") == "y");
    CHECK(merged.get("z", "") == "1");
  }

  TEST_CASE("result table CSV and JSON") {
    ResultTable t({"name", "x", "n"});
    t.set_meta("seed", "1");
    t.set_meta("operation", "demo");
    t.set_meta("seed", "2");
    t.add_row({std::string("a"), 0.1, std::int64_t{3}});
    t.add_row({std::string("b"), std::nan(""), std::int64_t{-1}});
    CHECK_THROWS_AS(t.add_row({std::string("c")}), PreconditionError);
    CHECK(t.has_non_finite());
    CHECK(t.meta("seed") == "2");
    CHECK(t.column_index("n") == 2);
    const std::string csv = t.to_csv();
    CHECK(csv.rfind("# seed=2\n# operation=demo\nname,x,n\n", 0) == 0);
    CHECK(csv.find("a,0.10000000000000001,3\n") != std::string::npos);
    CHECK(std::strtod(format_double(0.1).c_str(), nullptr) == 0.1);
    const auto j = nlohmann::json::parse(t.to_json());
    CHECK(j["metadata"]["seed"] == "2");
    CHECK(j["columns"].size() == 3);
    CHECK(j["rows"].size() == 2);
  }

  TEST_CASE("atomic writes replace the target") {
    const auto path = testing::temp_dir() / "atomic.txt";
    write_atomic(path, "first");
    write_atomic(path, "second");
    CHECK(testing::read_file(path) == "second");
    for (const auto& e : std::filesystem::directory_iterator(testing::temp_dir()))
      CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
  }

  TEST_CASE("matrix and mask files round-trip") {
    SplitMix64 rng(1);
    const Matrix m = testing::random_matrix(rng, 5, 3);
    const auto dir = testing::temp_dir();
    write_matrix_binary(dir / "m.bin", m);
    CHECK(read_matrix_binary(dir / "m.bin") == m);
    CHECK(std::filesystem::file_size(dir / "m.bin") == 8 + 15 * 8);
    write_matrix_csv(dir / "m.csv", m);
    CHECK(read_matrix_csv(dir / "m.csv") == m);
    const std::vector<mc::Entry> mask{{0, 1}, {4, 2}};
    write_mask_csv(dir / "mask.csv", mask, {1.5, -2.0});
    const auto [mk, vals] = read_mask_csv(dir / "mask.csv");
    CHECK(mk == mask);
    CHECK(vals == Vec{1.5, -2.0});
    CHECK_THROWS_AS(read_matrix_binary(dir / "missing.bin"), PreconditionError);
  }

  TEST_CASE("low-rank generator") {
    const Matrix a = generate_low_rank(30, 20, 3, 5);
    const Matrix b = generate_low_rank(30, 20, 3, 5);
    CHECK(a == b);
    CHECK_FALSE(a == generate_low_rank(30, 20, 3, 6));
    const auto f = mc::svd(a);
    CHECK(f.sigma[2] > 1e-6);
    CHECK(f.sigma[3] <= 1e-10 * f.sigma[0]);
    // Independent draw: A then B, row-major, scaled by 1/sqrt(rank).
    SplitMix64 rng(5);
    const Matrix fa = testing::random_matrix(rng, 30, 3);
    const Matrix fb = testing::random_matrix(rng, 20, 3);
    const Matrix ref = (1.0 / std::sqrt(3.0)) * matmul(fa, fb.transposed());
    CHECK(max_abs_diff(a, ref) <= 1e-12);
    CHECK_THROWS_AS(generate_low_rank(5, 5, 6, 1), PreconditionError);
  }

  TEST_CASE("mask sampling") {
    const auto m = sample_mask(200, 200, 0.3, 77);
    CHECK(m.size() == 12000);
    CHECK(std::is_sorted(m.begin(), m.end()));
    CHECK(std::adjacent_find(m.begin(), m.end()) == m.end());
    for (const auto& [i, j] : m) CHECK((i < 200 && j < 200));
    CHECK(sample_mask(200, 200, 0.3, 77) == m);
    CHECK(sample_mask(4, 5, 1.0, 1).size() == 20);
    CHECK_THROWS_AS(sample_mask(4, 5, 0.0, 1), PreconditionError);
    CHECK_THROWS_AS(sample_mask(4, 5, 1.5, 1), PreconditionError);
  }

  TEST_CASE("desk problem") {
    const auto p = make_problem(DeskSpec{});
    CHECK(p.rows() == 200);
    CHECK(p.mask().size() == 12000);
    CHECK(p.lambda_reg() == 1.0);
    REQUIRE(p.m_true().has_value());
    CHECK(*p.m_true() == generate_low_rank(200, 200, 4, 20240607));
    SplitMix64 salt(20240607ULL ^ kMaskSalt);
    CHECK(p.mask() == sample_mask(200, 200, 0.3, salt.next()));
  }

  TEST_CASE("parallel_for covers every index and rethrows") {
    for (std::size_t threads : {1u, 3u}) {
      std::vector<std::atomic<int>> hits(50);
      parallel_for(50, threads, [&](std::size_t i) { hits[i].fetch_add(1); });
      for (auto& h : hits) CHECK(h.load() == 1);
      CHECK_THROWS_AS(parallel_for(10, threads,
                                   [](std::size_t i) {
                                     if (i == 4) throw std::runtime_error("boom");
                                   }),
                      std::runtime_error);
    }
  }

  TEST_CASE("thread count honours SAG_OPTIM_THREADS") {
    ::setenv("SAG_OPTIM_THREADS", "3", 1);
    CHECK(thread_count() == 3);
    ::setenv("SAG_OPTIM_THREADS", "0", 1);
    CHECK(thread_count() >= 1);
    ::unsetenv("SAG_OPTIM_THREADS");
    CHECK(thread_count() >= 1);
  }

  TEST_CASE("linear grid") {
    const auto g = linear_grid(0.1, 6.0, 0.1);
    CHECK(g.size() == 60);
    CHECK(g.front() == 0.1);
    CHECK(g[2] == 0.3);
    CHECK(g.back() == 6.0);
  }

  TEST_CASE("order experiment") {
    const auto t = order_experiment(Config::parse("scheme=both\n"));
    CHECK(t.rows().size() == 12);
    CHECK(t.meta("operation") == "order");
    CHECK(t.meta("seed") == "0");
    CHECK(t.meta("config_hash") == Config::parse("scheme=both\n").hash_hex());
    const auto nag = rows_where(t, "scheme", "nag");
    const auto sag = rows_where(t, "scheme", "sag");
    REQUIRE(nag.size() == 6);
    const double ns = num(nag[0][t.column_index("slope")]);
    const double ss = num(sag[0][t.column_index("slope")]);
    CHECK((ns >= 2.7 && ns <= 3.3));
    CHECK((ss >= 3.6 && ss <= 4.4));
    CHECK(rows_where(t, "status", "ok").size() == 12);
    CHECK_THROWS_AS(order_experiment(Config::parse("objective=cubic\n")), PreconditionError);
  }

  TEST_CASE("stability experiment puts summary rows last") {
    const auto t = stability_experiment(Config::parse("scheme=sag\nz_max=6\ngrid=0.001\nparams=0,0,0;0,-17,0\n"));
    const auto& rows = t.rows();
    const std::size_t kind = t.column_index("kind");
    CHECK(std::get<std::string>(rows[rows.size() - 2][kind]) == "analytic");
    CHECK(std::get<std::string>(rows.back()[kind]) == "scanned");
    CHECK(num(rows.back()[t.column_index("z_lo")]) == 0.0);
    CHECK(std::abs(num(rows.back()[t.column_index("z_hi")]) - 4.0) <= 1e-3);
    CHECK(rows_where(t, "kind", "scan").size() == 6001);
    CHECK(rows_where(t, "kind", "invariance").size() == 1);
    bool error_row = false;
    for (const auto& r : rows)
      if (std::get<std::string>(r[kind]).rfind("error:", 0) == 0) error_row = true;
    CHECK(error_row);
  }

  TEST_CASE("probe experiment outcome metadata") {
    const auto mixed = probe_experiment(Config::parse("s_grid=0.5,1.5\nscheme=nag\niters=2000\nburn_in=200\n"));
    CHECK(mixed.meta("outcome") == "ok");
    CHECK(rows_where(mixed, "outcome", "diverged").size() == 1);
    CHECK(rows_where(mixed, "outcome", "bounded").size() == 1);
    const auto bad = probe_experiment(Config::parse("s_grid=1.5,1.9\nscheme=nag\niters=2000\nburn_in=200\n"));
    CHECK(bad.meta("outcome") == "diverged");
    CHECK(divergence_only(bad));
  }

  TEST_CASE("matrix-completion experiments on a tiny problem") {
    Config cfg = tiny_mc();
    const auto fixed = matcomp_fixed_experiment(cfg);
    CHECK(fixed.meta("seed") == "20240607");
    CHECK(fixed.meta("outcome") == "ok");
    CHECK(rows_where(fixed, "kind", "iterate").size() == 3 * 16);

    cfg.set("s_grid", "0.5,1,1.5,2,3,5,8,13");
    const auto scan = feasible_experiment(cfg);
    CHECK(rows_where(scan, "kind", "boundary").size() == 3);
    CHECK(scan.meta("operation") == "matcomp_scan");

    Config bt = tiny_mc();
    bt.set("s_init", "6");
    const auto back = backtrack_experiment(bt);
    const auto totals = rows_where(back, "kind", "total");
    REQUIRE(totals.size() == 3);
    for (const auto& r : totals) CHECK(std::get<std::string>(r[back.column_index("status")]) == "ok");

    Config other = tiny_mc();
    other.set("seed", "5");
    const auto fixed5 = matcomp_fixed_experiment(other);
    CHECK(fixed5.meta("seed") == "5");
    CHECK(fixed5.to_csv() != fixed.to_csv());
    CHECK(matcomp_fixed_experiment(tiny_mc()).to_csv() == fixed.to_csv());
  }

  TEST_CASE("fixed-step table records divergence as a status row") {
    Config cfg = tiny_mc();
    cfg.set("s", "50");
    cfg.set("method", "fista");
    const auto t = matcomp_fixed_experiment(cfg);
    CHECK(t.meta("outcome") == "diverged");
    const auto& last = t.rows().back();
    CHECK(std::get<std::string>(last[t.column_index("status")]).rfind("diverged:", 0) == 0);
  }

  TEST_CASE("feasible step scan stops at the first diverged point") {
    const auto p = make_problem(desk_spec(tiny_mc()));
    const std::vector<double> grid{0.5, 1.0, 1.5, 40.0, 50.0, 60.0};
    const auto r = feasible_step_scan(mc::Algorithm::fista, p, grid, 30, 1);
    REQUIRE_FALSE(r.points.empty());
    CHECK_FALSE(r.points.back().feasible);
    CHECK(r.points.size() <= 4);
    for (std::size_t i = 0; i + 1 < r.points.size(); ++i) CHECK(r.points[i].feasible);
    CHECK(r.max_feasible == (r.points.size() >= 2 ? r.points[r.points.size() - 2].s : 0.0));
    const auto r3 = feasible_step_scan(mc::Algorithm::fista, p, grid, 30, 3);
    CHECK(r3.max_feasible == r.max_feasible);
    CHECK(r3.points.size() == r.points.size());
    const std::vector<double> unsorted{1.0, 0.5};
    CHECK_THROWS_AS(feasible_step_scan(mc::Algorithm::fista, p, unsorted, 10, 1), PreconditionError);
  }

  TEST_CASE("verify experiment passes") {
    const auto t = verify_experiment(Config::parse("n_max=20\n"));
    CHECK(t.meta("outcome") == "ok");
    CHECK(rows_where(t, "status", "fail").empty());
    CHECK_THROWS_AS(verify_experiment(Config::parse("n_max=3\n")), PreconditionError);
  }
}
