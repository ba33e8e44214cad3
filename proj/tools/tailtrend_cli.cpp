// tailtrend command line: simulate, estimate, test, experiment.
// Exit codes: 0 success (test: no rejection), 2 error, 3 rejection.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tailtrend/core.hpp"
#include "tailtrend/dgp.hpp"
#include "tailtrend/estimator.hpp"
#include "tailtrend/experiments.hpp"
#include "tailtrend/limit.hpp"
#include "tailtrend/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tailtrend;

namespace {

constexpr int kSchemaVersion = 1;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

struct SimulateArgs {
  std::int64_t n = 0;
  double theta = 0.5;
  double lambda = 1.0;
  std::string scedasis = "m1";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  if (!a.seed_given)
    std::cerr << "warning: --seed not given, using default seed 0\n";
  const dgp::LogisticModel model{a.theta};
  const dgp::MixtureSpec mixture{a.lambda, false};
  const dgp::ScedasisSpec sced = dgp::ScedasisSpec::by_name(a.scedasis);
  const BivariateSample sample = dgp::generate_dataset(a.n, model, sced, mixture, a.seed);

  fs::create_directories(a.out);
  save_sample(sample, fs::path(a.out) / "sample.csv");
  json meta;
  meta["schema_version"] = kSchemaVersion;
  meta["n"] = a.n;
  meta["theta"] = a.theta;
  meta["lambda"] = a.lambda;
  meta["scedasis"] = a.scedasis;
  meta["seed"] = a.seed;
  write_json(fs::path(a.out) / "params.json", meta);
  return 0;
}

struct EstimateArgs {
  std::string input;
  std::int64_t k = 0;
  std::string h;
  double T = 1.0;
  std::string grid_step = "1/10";
  std::string out;
};

json grid_json(const EvalGrid& grid) {
  json g;
  g["u"] = grid.u;
  g["v"] = grid.v;
  g["s"] = grid.s;
  return g;
}

json tuning_metadata(const TuningParams& params, const ValidationReport& rep,
                     const EvalGrid& grid) {
  json meta;
  meta["schema_version"] = kSchemaVersion;
  meta["k"] = params.k;
  meta["h"] = params.h.str();
  meta["T"] = params.T;
  meta["grid"] = grid_json(grid);
  meta["tie_policy"] = "stable: among equal values the later observation ranks higher";
  meta["riemann_rule"] = RiemannRule::name();
  meta["warnings"] = rep.warnings;
  meta["kh3_over_log3n"] = rep.kh3_over_log3n;
  meta["kh4"] = rep.kh4;
  return meta;
}

int cmd_estimate(const EstimateArgs& a) {
  const BivariateSample sample = load_sample(a.input);
  TuningParams params{a.k, Rational::parse(a.h), a.T};
  const ValidationReport rep = params.validate(static_cast<std::int64_t>(sample.n()));
  if (!rep.ok()) throw std::invalid_argument("tuning: " + rep.joined_errors());
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";

  const EvalGrid grid = EvalGrid::with_uv_step(params, Rational::parse(a.grid_step));
  est::BlockTable blocks(sample, params);
  const IntegratedCurve curve = est::integrated_estimator(blocks, grid);
  const TailSurface surface = est::average_tail_copula(blocks, grid.u, grid.v);
  const auto surf_fn = [&blocks](double uu, double vv) { return blocks.average_at(uu, vv); };
  const std::vector<double> r1 = est::derivative_matrix(surf_fn, params.k, 1, grid.u, grid.v);
  const std::vector<double> r2 = est::derivative_matrix(surf_fn, params.k, 2, grid.u, grid.v);

  fs::create_directories(a.out);
  {
    std::ostringstream csv;
    csv << "u,v,s,value\n";
    for (std::size_t is = 0; is < grid.s.size(); ++is)
      for (std::size_t iu = 0; iu < grid.u.size(); ++iu)
        for (std::size_t iv = 0; iv < grid.v.size(); ++iv)
          csv << format_double(grid.u[iu]) << ',' << format_double(grid.v[iv]) << ','
              << format_double(grid.s[is]) << ',' << format_double(curve.at(is, iu, iv))
              << '\n';
    write_text(fs::path(a.out) / "curve.csv", csv.str());
  }
  {
    std::ostringstream csv;
    csv << "u,v,value\n";
    for (std::size_t iu = 0; iu < grid.u.size(); ++iu)
      for (std::size_t iv = 0; iv < grid.v.size(); ++iv)
        csv << format_double(grid.u[iu]) << ',' << format_double(grid.v[iv]) << ','
            << format_double(surface.at(iu, iv)) << '\n';
    for (std::size_t iu = 0; iu < grid.u.size(); ++iu)
      csv << format_double(grid.u[iu]) << ",inf," << format_double(surface.u_border(iu))
          << '\n';
    for (std::size_t iv = 0; iv < grid.v.size(); ++iv)
      csv << "inf," << format_double(grid.v[iv]) << ',' << format_double(surface.v_border(iv))
          << '\n';
    write_text(fs::path(a.out) / "surface.csv", csv.str());
  }
  {
    std::ostringstream csv;
    csv << "u,v,r1,r2\n";
    for (std::size_t iu = 0; iu < grid.u.size(); ++iu)
      for (std::size_t iv = 0; iv < grid.v.size(); ++iv)
        csv << format_double(grid.u[iu]) << ',' << format_double(grid.v[iv]) << ','
            << format_double(r1[iu * grid.v.size() + iv]) << ','
            << format_double(r2[iu * grid.v.size() + iv]) << '\n';
    write_text(fs::path(a.out) / "derivatives.csv", csv.str());
  }
  write_json(fs::path(a.out) / "metadata.json", tuning_metadata(params, rep, grid));
  return 0;
}

struct TestArgs {
  std::string input;
  std::int64_t k = 0;
  std::string h;
  double T = 1.0;
  std::string grid_step = "1/10";
  double alpha = 0.05;
  std::int64_t b_draws = 1000;
  std::uint64_t seed = 0;
  std::string statistic = "both";
  int threads = 1;
  std::string out;
};

int cmd_test(const TestArgs& a) {
  const BivariateSample sample = load_sample(a.input);
  TuningParams params{a.k, Rational::parse(a.h), a.T};
  const ValidationReport rep = params.validate(static_cast<std::int64_t>(sample.n()));
  if (!rep.ok()) throw std::invalid_argument("tuning: " + rep.joined_errors());
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";

  const EvalGrid grid = EvalGrid::with_uv_step(params, Rational::parse(a.grid_step));
  const mc::TrendTestResult res =
      mc::run_trend_test(sample, params, grid, a.b_draws, a.alpha, a.seed, a.threads);

  json j;
  j["schema_version"] = kSchemaVersion;
  j["T_sup"] = res.t_sup;
  j["T_cvm"] = res.t_cvm;
  j["c_sup"] = res.c_sup;
  j["c_cvm"] = res.c_cvm;
  j["reject_sup"] = res.reject_sup;
  j["reject_cvm"] = res.reject_cvm;
  j["alpha"] = a.alpha;
  j["B"] = a.b_draws;
  j["seed"] = a.seed;
  j["k"] = a.k;
  j["h"] = params.h.str();
  j["grid"] = grid_json(grid);
  j["riemann_rule"] = RiemannRule::name();
  j["statistic"] = a.statistic;
  std::cout << j.dump(2) << "\n";
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_json(fs::path(a.out) / "test.json", j);
  }
  const bool rejected = (a.statistic != "cvm" && res.reject_sup) ||
                        (a.statistic != "sup" && res.reject_cvm);
  return rejected ? 3 : 0;
}

struct ExperimentArgs {
  std::string config;
  int threads = 0;
  std::string out;
  bool svg = false;
};

void write_quicklooks(const mc::ExperimentReport& report, const fs::path& dir, double alpha) {
  if (report.kind == mc::ExperimentKind::endpoint_normality) {
    for (const auto& rec : report.normality)
      svg::write_histogram(dir / ("hist_" + rec.config_id + ".svg"), rec.normalized,
                           "normalized endpoint estimates, " + rec.config_id);
    return;
  }
  if (report.kind == mc::ExperimentKind::curve_band) {
    for (const auto& rec : report.bands) {
      std::vector<svg::Series> series;
      series.push_back({"mean", "", rec.s, rec.mean});
      series.push_back({"2.5%", "2,3", rec.s, rec.lo});
      series.push_back({"97.5%", "2,3", rec.s, rec.hi});
      series.push_back({"truth", "6,4", rec.s, rec.truth});
      svg::write_line_chart(dir / ("band_" + rec.config_id + ".svg"), series,
                            "integrated curve, " + rec.config_id, "s");
    }
    return;
  }
  // size / power: line charts per statistic
  const bool is_size = report.kind == mc::ExperimentKind::size;
  auto dash_for_h = [](const Rational& h) -> std::string {
    if (h.num == 1 && h.den == 10) return "";
    if (h.num == 1 && h.den == 15) return "6,4";
    return "2,3";
  };
  auto dash_for_sced = [](const std::string& s) -> std::string {
    if (s == "m1") return "";
    if (s == "m2") return "6,4";
    return "2,3";
  };
  for (const std::string stat : {"sup", "cvm"}) {
    auto value_of = [&](const mc::RateRecord& r) {
      return stat == std::string("sup") ? r.rate_sup : r.rate_cvm;
    };
    if (is_size) {
      // one chart per (theta, scedasis); series per h, x = k
      std::map<std::string, std::vector<const mc::RateRecord*>> groups;
      for (const auto& r : report.rates)
        groups["th" + format_double(r.theta) + "_" + r.scedasis].push_back(&r);
      for (const auto& [gname, recs] : groups) {
        std::map<std::string, svg::Series> by_h;
        for (const auto* r : recs) {
          auto& s = by_h[r->h.str()];
          s.label = "h=" + r->h.str();
          s.dash = dash_for_h(r->h);
          s.x.push_back(static_cast<double>(r->k));
          s.y.push_back(value_of(*r));
        }
        std::vector<svg::Series> series;
        for (auto& [_, s] : by_h) series.push_back(std::move(s));
        svg::write_line_chart(dir / ("size_" + std::string(stat) + "_" + gname + ".svg"),
                              series, "size, " + std::string(stat) + ", " + gname, "k", alpha);
      }
    } else {
      std::map<std::string, svg::Series> by_sced;
      for (const auto& r : report.rates) {
        auto& s = by_sced[r.scedasis];
        s.label = r.scedasis;
        s.dash = dash_for_sced(r.scedasis);
        s.x.push_back(r.lambda);
        s.y.push_back(value_of(r));
      }
      std::vector<svg::Series> series;
      for (auto& [_, s] : by_sced) series.push_back(std::move(s));
      svg::write_line_chart(dir / ("power_" + std::string(stat) + ".svg"), series,
                            "power, " + std::string(stat), "lambda", alpha);
    }
  }
}

int cmd_experiment(const ExperimentArgs& a) {
  mc::ExperimentConfig config = mc::ExperimentConfig::load(a.config);
  if (a.threads > 0) config.threads = a.threads;

  const mc::ExperimentReport report = mc::run_experiment(config);

  fs::create_directories(a.out);
  write_json(fs::path(a.out) / "report.json", report.to_json());
  write_text(fs::path(a.out) / "report.csv", report.to_csv());
  json timing;
  timing["wall_seconds"] = report.wall_seconds;
  timing["threads"] = config.threads;
  write_json(fs::path(a.out) / "timing.json", timing);
  std::cerr << "experiment finished in " << report.wall_seconds << " s\n";
  if (a.svg) write_quicklooks(report, a.out, config.alpha);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-varying bivariate tail dependence: estimation and trend tests"};
  app.set_help_flag("--help", "print help");  // --h is the bandwidth option
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic sample");
  simulate->set_help_flag("--help", "print help");
  simulate->add_option("--n", sim.n, "sample size")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--theta", sim.theta, "logistic dependence parameter in (0,1]")
      ->required()
      ->check(CLI::Range(1e-12, 1.0));
  simulate->add_option("--lambda", sim.lambda, "mixture onset in [0,1] (1 = no trend)")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--scedasis", sim.scedasis, "marginal scale spec")
      ->check(CLI::IsMember({"m1", "m2", "m3"}));
  auto* seed_opt = simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--out", sim.out, "output directory")->required();

  EstimateArgs est_args;
  auto* estimate = app.add_subcommand("estimate", "estimate the integrated tail copula");
  estimate->set_help_flag("--help", "print help");
  estimate->add_option("--input", est_args.input, "sample csv")->required();
  estimate->add_option("--k", est_args.k, "intermediate sequence")->required();
  estimate->add_option("--h", est_args.h, "bandwidth, e.g. 0.1 or 1/15")->required();
  estimate->add_option("--T", est_args.T, "evaluation box edge");
  estimate->add_option("--grid-step", est_args.grid_step, "u/v grid step");
  estimate->add_option("--out", est_args.out, "output directory")->required();

  TestArgs test_args;
  auto* test = app.add_subcommand("test", "test for a constant tail copula");
  test->set_help_flag("--help", "print help");
  test->add_option("--input", test_args.input, "sample csv")->required();
  test->add_option("--k", test_args.k, "intermediate sequence")->required();
  test->add_option("--h", test_args.h, "bandwidth")->required();
  test->add_option("--T", test_args.T, "evaluation box edge");
  test->add_option("--grid-step", test_args.grid_step, "u/v grid step");
  test->add_option("--alpha", test_args.alpha, "nominal level")
      ->check(CLI::Range(1e-12, 1.0 - 1e-12));
  test->add_option("--B", test_args.b_draws, "critical-value draws")->check(CLI::PositiveNumber);
  test->add_option("--seed", test_args.seed, "master seed")->required();
  test->add_option("--statistic", test_args.statistic, "which statistic decides rejection")
      ->check(CLI::IsMember({"sup", "cvm", "both"}));
  test->add_option("--threads", test_args.threads, "worker threads");
  test->add_option("--out", test_args.out, "optional output directory");

  ExperimentArgs exp_args;
  auto* experiment = app.add_subcommand("experiment", "run a Monte Carlo experiment");
  experiment->set_help_flag("--help", "print help");
  experiment->add_option("--config", exp_args.config, "experiment config json")->required();
  experiment->add_option("--threads", exp_args.threads, "worker threads (overrides config)");
  experiment->add_option("--out", exp_args.out, "output directory")->required();
  experiment->add_flag("--svg", exp_args.svg, "write quick-look svg plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  sim.seed_given = seed_opt->count() > 0;

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (estimate->parsed()) return cmd_estimate(est_args);
    if (test->parsed()) return cmd_test(test_args);
    if (experiment->parsed()) return cmd_experiment(exp_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
