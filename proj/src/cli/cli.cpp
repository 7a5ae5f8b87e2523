#include "sagopt/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <chrono>
#include <deque>
#include <functional>
#include <ostream>
#include <string>

#include "sagopt/bench/config.hpp"
#include "sagopt/bench/experiments.hpp"
#include "sagopt/bench/result_table.hpp"
#include "sagopt/errors.hpp"

namespace sagopt::cli {

namespace {

// A flag whose value, when given, is copied into the experiment config.
struct Bound {
  CLI::Option* opt = nullptr;
  std::string key;
  std::string value;
};

struct Common {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  bool quiet = false;
};

class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& help) : sub_(app.add_subcommand(name, help)) {
    sub_->add_option("--config", common_.config_path, "key=value config file; flags override its values")
        ->check(CLI::ExistingFile);
    sub_->add_option("--out", common_.out_path, "output file (written atomically); stdout when omitted");
    sub_->add_option("--format", common_.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sub_->add_flag("-q,--quiet", common_.quiet, "suppress the log line on stderr");
    bind("--seed", "seed", "random seed");
  }

  CLI::Option* bind(const std::string& flag, const std::string& key, const std::string& help) {
    Bound& b = bound_.emplace_back();
    b.key = key;
    b.opt = sub_->add_option(flag, b.value, help);
    return b.opt;
  }

  CLI::App* app() const { return sub_; }
  const Common& common() const { return common_; }

  bench::Config config() const {
    bench::Config cfg;
    if (!common_.config_path.empty()) cfg = bench::Config::load(common_.config_path);
    for (const Bound& b : bound_)
      if (b.opt->count() > 0) cfg.set(b.key, b.value);
    return cfg;
  }

 private:
  CLI::App* sub_;
  Common common_;
  std::deque<Bound> bound_;
};

int emit(const Command& cmd, const std::string& name, const std::function<bench::ResultTable()>& job,
         std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const bench::ResultTable table = job();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string text = cmd.common().format == "json" ? table.to_json() : table.to_csv();
  if (cmd.common().out_path.empty()) {
    out << text;
  } else {
    bench::write_atomic(cmd.common().out_path, text);
  }
  const bool failed = table.meta("outcome") == "failed";
  const bool diverged = bench::divergence_only(table);
  if (!cmd.common().quiet) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", secs);
    err << "sagopt " << name << ": " << table.rows().size() << " rows, config " << table.meta("config_hash") << ", "
        << buf << " s" << (diverged ? ", all runs diverged" : "") << (failed ? ", checks failed" : "") << '\n';
  }
  return diverged || failed ? 1 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discretization schemes for the accelerated-gradient ODE: order, stability and matrix-completion "
               "experiments.",
               "sagopt"};
  app.require_subcommand(1);
  app.footer("Flags override values read with --config. Exit codes: 0 success, 1 all runs diverged or a check "
             "failed (output still written), 2 usage error. SAG_OPTIM_THREADS caps worker threads (0 = auto).");

  Command order(app, "order", "truncation-error ladders and fitted orders");
  order.bind("--scheme", "scheme", "nag, sag or both")->check(CLI::IsMember({"nag", "sag", "both"}));
  order.bind("--objective", "objective", "quadratic or logistic")->check(CLI::IsMember({"quadratic", "logistic"}));
  order.bind("--t", "t", "evaluation time");
  order.bind("--h-max", "h_max", "largest step of the dyadic ladder");
  order.bind("--ladder-len", "ladder_len", "number of ladder rungs (>= 5)");

  Command stab(app, "stability", "absolute-stability scans of the characteristic polynomials");
  stab.bind("--scheme", "scheme", "nag, sag or both")->check(CLI::IsMember({"nag", "sag", "both"}));
  stab.bind("--z-max", "z_max", "upper end of the z scan");
  stab.bind("--grid", "grid", "scan step");
  stab.bind("--params", "params", "extra parameter triples \"k,m1,m2;...\" for the invariance check");

  Command probe(app, "probe", "run the schemes on mu x^2/2 and classify growth");
  probe.bind("--scheme", "scheme", "nag, sag or both")->check(CLI::IsMember({"nag", "sag", "both"}));
  probe.bind("--mu", "mu", "curvature");
  probe.bind("--s-grid", "s_grid", "comma-separated step sizes");
  probe.bind("--iters", "iters", "iterations per run");
  probe.bind("--burn-in", "burn_in", "iterations before growth is measured");

  Command mc(app, "matcomp", "nuclear-norm matrix completion: fixed steps, feasible-step scans, backtracking");
  mc.bind("--method", "method", "fista, apg, sfista or all")
      ->check(CLI::IsMember({"fista", "apg", "sfista", "all"}));
  mc.bind("--rows", "rows", "matrix rows");
  mc.bind("--cols", "cols", "matrix columns");
  mc.bind("--rank", "rank", "true rank");
  mc.bind("--fraction", "fraction", "observed fraction in (0, 1]");
  mc.bind("--lambda", "lambda", "nuclear-norm weight");
  CLI::Option* s = mc.bind("--s", "s", "fixed step size");
  CLI::Option* grid = mc.bind("--s-grid", "s_grid", "ascending step sizes for a feasible-step scan");
  CLI::Option* beta = mc.bind("--backtrack-beta", "beta", "run backtracking with this reduction factor");
  mc.bind("--s-init", "s_init", "initial step for backtracking");
  mc.bind("--iters", "iters", "iterations per run");
  s->excludes(grid)->excludes(beta);
  grid->excludes(beta);

  Command verify(app, "verify", "matrix-product bounds, Gronwall checks and exact coefficient identities");
  verify.bind("--n-max", "n_max", "largest n checked (>= 4)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const CLI::App* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    const CLI::App* target = &app;
    for (const CLI::App* sub : app.get_subcommands()) target = sub;
    err << "sagopt: " << e.what() << '\n' << target->help();
    return 2;
  }

  const Command* chosen = nullptr;
  for (const Command* c : {&order, &stab, &probe, &mc, &verify})
    if (c->app()->parsed()) chosen = c;
  const std::string name = chosen->app()->get_name();

  try {
    const bench::Config cfg = chosen->config();
    if (chosen == &order) return emit(order, name, [&] { return bench::order_experiment(cfg); }, out, err);
    if (chosen == &stab) return emit(stab, name, [&] { return bench::stability_experiment(cfg); }, out, err);
    if (chosen == &probe) return emit(probe, name, [&] { return bench::probe_experiment(cfg); }, out, err);
    if (chosen == &verify) return emit(verify, name, [&] { return bench::verify_experiment(cfg); }, out, err);

    std::string mode = cfg.get("mode", "");
    if (s->count()) mode = "fixed";
    if (grid->count()) mode = "scan";
    if (beta->count()) mode = "backtrack";
    if (mode.empty()) mode = cfg.has("s_grid") ? "scan" : (cfg.has("beta") ? "backtrack" : "fixed");
    if (mode == "fixed") return emit(mc, name, [&] { return bench::matcomp_fixed_experiment(cfg); }, out, err);
    if (mode == "scan") return emit(mc, name, [&] { return bench::feasible_experiment(cfg); }, out, err);
    if (mode == "backtrack") return emit(mc, name, [&] { return bench::backtrack_experiment(cfg); }, out, err);
    throw PreconditionError("mode must be fixed, scan or backtrack, got '" + mode + "'");
  } catch (const PreconditionError& e) {
    err << "sagopt " << name << ": " << e.what() << '\n' << chosen->app()->help();
    return 2;
  } catch (const std::exception& e) {
    err << "sagopt " << name << ": " << e.what() << '\n';
    return 2;
  }
}

}  // namespace sagopt::cli
