#include "tailtrend/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tailtrend/estimator.hpp"
#include "tailtrend/parallel.hpp"

namespace tailtrend::mc {

using nlohmann::json;

TrendTestResult run_trend_test(const BivariateSample& sample, const TuningParams& params,
                               const EvalGrid& grid, std::int64_t b_draws, double alpha,
                               std::uint64_t seed, int threads, double deriv_exponent) {
  est::BlockTable blocks(sample, params);
  const IntegratedCurve curve = est::integrated_estimator(blocks, grid);
  const est::TrendStats stats = est::trend_statistics(curve, params, grid);

  const TailSurface surface = est::average_tail_copula(blocks, grid.u, grid.v);
  const auto surf_fn = [&blocks](double uu, double vv) { return blocks.average_at(uu, vv); };
  limit::PluginDerivatives derivs;
  derivs.nu = grid.u.size();
  derivs.nv = grid.v.size();
  derivs.r1 = est::derivative_matrix(surf_fn, params.k, 1, grid.u, grid.v, deriv_exponent);
  derivs.r2 = est::derivative_matrix(surf_fn, params.k, 2, grid.u, grid.v, deriv_exponent);

  const limit::GaussianFieldSpec spec = limit::build_field_spec(surface, grid);
  const RiemannRule rule = RiemannRule::from_grid(grid);
  const limit::CriticalValues cv =
      limit::critical_values(spec, derivs, rule, b_draws, alpha, seed, threads);

  TrendTestResult out;
  out.t_sup = stats.t_sup;
  out.t_cvm = stats.t_cvm;
  out.c_sup = cv.c_sup;
  out.c_cvm = cv.c_cvm;
  out.reject_sup = stats.t_sup > cv.c_sup;
  out.reject_cvm = stats.t_cvm > cv.c_cvm;
  out.jitter = spec.jitter();
  out.chol_retries = spec.retries();
  return out;
}

std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::endpoint_normality: return "endpoint-normality";
    case ExperimentKind::curve_band: return "curve-band";
    case ExperimentKind::size: return "size";
    case ExperimentKind::power: return "power";
  }
  return "?";
}

namespace {

[[noreturn]] void config_error(const std::string& pointer, const std::string& what) {
  throw std::invalid_argument(pointer + ": " + what);
}

const json& require_field(const json& j, const std::string& key) {
  if (!j.contains(key)) config_error("/" + key, "missing required field");
  return j.at(key);
}

std::int64_t as_int(const json& v, const std::string& pointer) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    config_error(pointer, "expected an integer");
  return v.get<std::int64_t>();
}

double as_number(const json& v, const std::string& pointer) {
  if (!v.is_number()) config_error(pointer, "expected a number");
  return v.get<double>();
}

Rational as_rational(const json& v, const std::string& pointer) {
  try {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number()) return Rational::parse(format_double(v.get<double>()));
  } catch (const std::exception& e) {
    config_error(pointer, e.what());
  }
  config_error(pointer, "expected a rational (\"1/15\") or a decimal");
}

template <typename T, typename F>
std::vector<T> as_list(const json& v, const std::string& pointer, F&& convert) {
  std::vector<T> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(convert(v.at(i), pointer + "/" + std::to_string(i)));
  } else {
    out.push_back(convert(v, pointer));
  }
  return out;
}

std::string format_rational_id(const Rational& r) {
  std::string s = r.str();
  std::replace(s.begin(), s.end(), '/', '-');
  return s;
}

double binomial_se(double rate, int m) {
  if (m <= 0) return 0.0;
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(m));
}

json rational_json(const Rational& r) { return json(r.str()); }

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) config_error("", "config must be a JSON object");
  ExperimentConfig cfg;

  const std::string kind_str = [&] {
    const json& v = require_field(j, "kind");
    if (!v.is_string()) config_error("/kind", "expected a string");
    return v.get<std::string>();
  }();
  if (kind_str == "endpoint-normality") cfg.kind = ExperimentKind::endpoint_normality;
  else if (kind_str == "curve-band") cfg.kind = ExperimentKind::curve_band;
  else if (kind_str == "size") cfg.kind = ExperimentKind::size;
  else if (kind_str == "power") cfg.kind = ExperimentKind::power;
  else config_error("/kind", "must be one of endpoint-normality, curve-band, size, power");

  cfg.n = as_int(require_field(j, "n"), "/n");
  cfg.m_reps = static_cast<int>(as_int(require_field(j, "M"), "/M"));
  if (j.contains("B")) cfg.b_draws = as_int(j.at("B"), "/B");
  cfg.ks = as_list<std::int64_t>(require_field(j, "k"), "/k", as_int);
  cfg.hs = as_list<Rational>(require_field(j, "h"), "/h", as_rational);
  cfg.thetas = as_list<double>(require_field(j, "theta"), "/theta", as_number);
  if (j.contains("lambda"))
    cfg.lambdas = as_list<double>(j.at("lambda"), "/lambda", as_number);
  else
    cfg.lambdas = {1.0};
  if (j.contains("scedasis")) {
    cfg.scedases = as_list<std::string>(j.at("scedasis"), "/scedasis",
                                        [](const json& v, const std::string& p) {
                                          if (!v.is_string()) config_error(p, "expected a string");
                                          return v.get<std::string>();
                                        });
  } else {
    cfg.scedases = {"m1"};
  }
  if (j.contains("alpha")) cfg.alpha = as_number(j.at("alpha"), "/alpha");
  if (j.contains("seed")) cfg.master_seed = static_cast<std::uint64_t>(as_int(j.at("seed"), "/seed"));
  if (j.contains("grid_step")) cfg.grid_step = as_rational(j.at("grid_step"), "/grid_step");
  if (j.contains("threads")) cfg.threads = static_cast<int>(as_int(j.at("threads"), "/threads"));
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json j;
  j["kind"] = kind_name(kind);
  j["n"] = n;
  j["M"] = m_reps;
  j["B"] = b_draws;
  j["k"] = ks;
  json hs_json = json::array();
  for (const auto& h : hs) hs_json.push_back(rational_json(h));
  j["h"] = hs_json;
  j["theta"] = thetas;
  j["lambda"] = lambdas;
  j["scedasis"] = scedases;
  j["alpha"] = alpha;
  j["seed"] = master_seed;
  j["grid_step"] = rational_json(grid_step);
  return j;
}

void ExperimentConfig::validate() const {
  if (n < 1) config_error("/n", "must be >= 1");
  if (m_reps < 1) config_error("/M", "must be >= 1");
  if (b_draws < 1) config_error("/B", "must be >= 1");
  if (!(alpha > 0.0) || !(alpha < 1.0)) config_error("/alpha", "must lie in (0,1)");
  if (ks.empty()) config_error("/k", "must not be empty");
  if (hs.empty()) config_error("/h", "must not be empty");
  if (thetas.empty()) config_error("/theta", "must not be empty");
  if (lambdas.empty()) config_error("/lambda", "must not be empty");
  if (scedases.empty()) config_error("/scedasis", "must not be empty");
  for (std::size_t i = 0; i < thetas.size(); ++i)
    if (!(thetas[i] > 0.0) || thetas[i] > 1.0)
      config_error("/theta/" + std::to_string(i), "must lie in (0,1]");
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (!(lambdas[i] >= 0.0) || lambdas[i] > 1.0)
      config_error("/lambda/" + std::to_string(i), "must lie in [0,1]");
  for (const auto& name : scedases) dgp::ScedasisSpec::by_name(name);
  for (std::size_t ik = 0; ik < ks.size(); ++ik) {
    for (std::size_t ih = 0; ih < hs.size(); ++ih) {
      TuningParams p{ks[ik], hs[ih], 1.0};
      const ValidationReport rep = p.validate(n);
      if (!rep.ok())
        config_error("/k/" + std::to_string(ik),
                     "tuning (k=" + std::to_string(ks[ik]) + ", h=" + hs[ih].str() +
                         ", n=" + std::to_string(n) + ") invalid: " + rep.joined_errors());
    }
  }
  if (kind == ExperimentKind::endpoint_normality) {
    for (double t : thetas)
      if (t == 1.0) config_error("/theta", "theta = 1 has degenerate sigma(1) = 0");
  }
}

namespace {

struct NormalitySummary {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double variance = std::numeric_limits<double>::quiet_NaN();
  double ks = std::numeric_limits<double>::quiet_NaN();
};

NormalitySummary summarize_normalized(const std::vector<double>& values) {
  NormalitySummary s;
  const std::size_t m = values.size();
  if (m == 0) return s;
  double acc = 0.0;
  for (double v : values) acc += v;
  s.mean = acc / static_cast<double>(m);
  if (m >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(m - 1);
  }
  if (m >= 5) s.ks = ks_distance(values, [](double x) { return standard_normal_cdf(x); });
  return s;
}

}  // namespace

ExperimentReport run_endpoint_normality(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::endpoint_normality)
    throw std::invalid_argument("experiment: config kind is not endpoint-normality");
  const auto t0 = std::chrono::steady_clock::now();
  const TuningParams params{config.ks.front(), config.hs.front(), 1.0};
  const dgp::LogisticModel model{config.thetas.front()};

  ExperimentReport report;
  report.kind = config.kind;
  report.config_echo = config.to_json();

  struct Cell {
    double lambda;
    std::string sced;
  };
  std::vector<Cell> cells;
  for (double lam : config.lambdas)
    for (const auto& sc : config.scedases) cells.push_back(Cell{lam, sc});

  const std::size_t m = static_cast<std::size_t>(config.m_reps);
  std::vector<std::vector<double>> normalized(cells.size(),
                                              std::vector<double>(m, 0.0));
  parallel_for(cells.size() * m, config.threads, [&](std::size_t task) {
    const std::size_t ci = task / m;
    const std::size_t rep = task % m;
    const Cell& cell = cells[ci];
    const dgp::MixtureSpec mixture{cell.lambda, false};
    const dgp::ScedasisSpec sced = dgp::ScedasisSpec::by_name(cell.sced);
    Rng probe = Rng::derive(config.master_seed, {ci, rep});
    const BivariateSample sample =
        dgp::generate_dataset(config.n, model, sced, mixture, probe.next_u64());
    est::BlockTable blocks(sample, params, 1.0);
    const double estimate = blocks.average_at(1.0, 1.0);
    const double truth = dgp::true_integrated_curve(model, mixture, 1.0);
    const double sigma2 = limit::integrated_sigma2_tdc(
        model.theta, [&mixture](double t) { return mixture.weight(t); });
    normalized[ci][rep] = std::sqrt(static_cast<double>(params.k)) *
                          (estimate - truth) / std::sqrt(sigma2);
  });

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    NormalityRecord rec;
    rec.lambda = cells[ci].lambda;
    rec.scedasis = cells[ci].sced;
    rec.config_id = "lam" + format_double(rec.lambda) + "_" + rec.scedasis;
    const dgp::MixtureSpec mixture{rec.lambda, false};
    rec.truth = dgp::true_integrated_curve(model, mixture, 1.0);
    rec.sigma1 = std::sqrt(limit::integrated_sigma2_tdc(
        model.theta, [&mixture](double t) { return mixture.weight(t); }));
    rec.normalized = normalized[ci];
    const NormalitySummary s = summarize_normalized(rec.normalized);
    rec.mean = s.mean;
    rec.variance = s.variance;
    rec.ks_normal = s.ks;
    report.normality.push_back(std::move(rec));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

ExperimentReport run_curve_band(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::curve_band)
    throw std::invalid_argument("experiment: config kind is not curve-band");
  const auto t0 = std::chrono::steady_clock::now();
  const TuningParams params{config.ks.front(), config.hs.front(), 1.0};
  const dgp::LogisticModel model{config.thetas.front()};

  EvalGrid grid;
  grid.u = {1.0};
  grid.v = {1.0};
  grid.s = EvalGrid::s_points(params);

  ExperimentReport report;
  report.kind = config.kind;
  report.config_echo = config.to_json();

  struct Cell {
    double lambda;
    std::string sced;
  };
  std::vector<Cell> cells;
  for (double lam : config.lambdas)
    for (const auto& sc : config.scedases) cells.push_back(Cell{lam, sc});

  const std::size_t m = static_cast<std::size_t>(config.m_reps);
  const std::size_t ns = grid.s.size();
  std::vector<std::vector<double>> curves(cells.size(), std::vector<double>(m * ns, 0.0));
  parallel_for(cells.size() * m, config.threads, [&](std::size_t task) {
    const std::size_t ci = task / m;
    const std::size_t rep = task % m;
    const Cell& cell = cells[ci];
    const dgp::MixtureSpec mixture{cell.lambda, false};
    const dgp::ScedasisSpec sced = dgp::ScedasisSpec::by_name(cell.sced);
    Rng probe = Rng::derive(config.master_seed, {ci, rep});
    const BivariateSample sample =
        dgp::generate_dataset(config.n, model, sced, mixture, probe.next_u64());
    est::BlockTable blocks(sample, params, 1.0);
    const IntegratedCurve curve = est::integrated_estimator(blocks, grid);
    for (std::size_t is = 0; is < ns; ++is) curves[ci][rep * ns + is] = curve.at(is, 0, 0);
  });

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    CurveBandRecord rec;
    rec.scedasis = cells[ci].sced;
    rec.lambda = cells[ci].lambda;
    rec.config_id = "lam" + format_double(rec.lambda) + "_" + rec.scedasis;
    rec.s = grid.s;
    const dgp::MixtureSpec mixture{rec.lambda, false};
    for (std::size_t is = 0; is < ns; ++is) {
      std::vector<double> col(m);
      for (std::size_t rep = 0; rep < m; ++rep) col[rep] = curves[ci][rep * ns + is];
      std::sort(col.begin(), col.end());
      double acc = 0.0;
      for (double v : col) acc += v;
      const double mean = acc / static_cast<double>(m);
      double ss = 0.0;
      for (double v : col) ss += (v - mean) * (v - mean);
      rec.mean.push_back(mean);
      rec.se_mean.push_back(m >= 2 ? std::sqrt(ss / static_cast<double>(m - 1) /
                                               static_cast<double>(m))
                                   : 0.0);
      rec.lo.push_back(order_stat_quantile(col, 0.025));
      rec.hi.push_back(order_stat_quantile(col, 0.975));
      rec.se_lo.push_back(jackknife_se_quantile(col, 0.025));
      rec.se_hi.push_back(jackknife_se_quantile(col, 0.975));
      rec.truth.push_back(dgp::true_integrated_curve(model, mixture, grid.s[is]));
    }
    report.bands.push_back(std::move(rec));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

namespace {

struct TestCell {
  std::int64_t k;
  Rational h;
  double theta;
  double lambda;
  std::string sced;
};

ExperimentReport run_rate_experiment(const ExperimentConfig& config,
                                     const std::vector<TestCell>& cells) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.kind = config.kind;
  report.config_echo = config.to_json();

  const std::size_t m = static_cast<std::size_t>(config.m_reps);
  std::vector<std::uint8_t> rej_sup(cells.size() * m, 0), rej_cvm(cells.size() * m, 0);
  parallel_for(cells.size() * m, config.threads, [&](std::size_t task) {
    const std::size_t ci = task / m;
    const std::size_t rep = task % m;
    const TestCell& cell = cells[ci];
    const TuningParams params{cell.k, cell.h, 1.0};
    const dgp::LogisticModel model{cell.theta};
    const dgp::MixtureSpec mixture{cell.lambda, false};
    const dgp::ScedasisSpec sced = dgp::ScedasisSpec::by_name(cell.sced);
    Rng probe = Rng::derive(config.master_seed, {ci, rep});
    const std::uint64_t data_seed = probe.next_u64();
    const std::uint64_t cv_seed = probe.next_u64();
    const BivariateSample sample =
        dgp::generate_dataset(config.n, model, sced, mixture, data_seed);
    const EvalGrid grid = EvalGrid::with_uv_step(params, config.grid_step);
    const TrendTestResult res =
        run_trend_test(sample, params, grid, config.b_draws, config.alpha, cv_seed, 1);
    rej_sup[task] = res.reject_sup ? 1 : 0;
    rej_cvm[task] = res.reject_cvm ? 1 : 0;
  });

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const TestCell& cell = cells[ci];
    RateRecord rec;
    rec.k = cell.k;
    rec.h = cell.h;
    rec.theta = cell.theta;
    rec.lambda = cell.lambda;
    rec.scedasis = cell.sced;
    rec.m_reps = config.m_reps;
    rec.config_id = "k" + std::to_string(cell.k) + "_h" + format_rational_id(cell.h) +
                    "_th" + format_double(cell.theta) + "_lam" + format_double(cell.lambda) +
                    "_" + cell.sced;
    for (std::size_t rep = 0; rep < m; ++rep) {
      rec.rejects_sup += rej_sup[ci * m + rep];
      rec.rejects_cvm += rej_cvm[ci * m + rep];
    }
    rec.rate_sup = static_cast<double>(rec.rejects_sup) / static_cast<double>(m);
    rec.rate_cvm = static_cast<double>(rec.rejects_cvm) / static_cast<double>(m);
    rec.se_sup = binomial_se(rec.rate_sup, config.m_reps);
    rec.se_cvm = binomial_se(rec.rate_cvm, config.m_reps);
    report.rates.push_back(std::move(rec));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace

ExperimentReport run_size(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::size)
    throw std::invalid_argument("experiment: config kind is not size");
  std::vector<TestCell> cells;
  for (double theta : config.thetas)
    for (const auto& sc : config.scedases)
      for (std::int64_t k : config.ks)
        for (const auto& h : config.hs)
          cells.push_back(TestCell{k, h, theta, 1.0, sc});
  return run_rate_experiment(config, cells);
}

ExperimentReport run_power(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::power)
    throw std::invalid_argument("experiment: config kind is not power");
  std::vector<TestCell> cells;
  for (double lam : config.lambdas)
    for (const auto& sc : config.scedases)
      cells.push_back(TestCell{config.ks.front(), config.hs.front(),
                               config.thetas.front(), lam, sc});
  return run_rate_experiment(config, cells);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::endpoint_normality: return run_endpoint_normality(config);
    case ExperimentKind::curve_band: return run_curve_band(config);
    case ExperimentKind::size: return run_size(config);
    case ExperimentKind::power: return run_power(config);
  }
  throw std::invalid_argument("experiment: unknown kind");
}

namespace {

json finite_or_null(double v) {
  if (std::isfinite(v)) return json(v);
  return json();
}

}  // namespace

json ExperimentReport::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["kind"] = kind_name(kind);
  j["config"] = config_echo;
  j["riemann_rule"] = RiemannRule::name();
  json records = json::array();
  for (const auto& r : rates) {
    json rec;
    rec["config_id"] = r.config_id;
    rec["k"] = r.k;
    rec["h"] = r.h.str();
    rec["theta"] = r.theta;
    rec["lambda"] = r.lambda;
    rec["scedasis"] = r.scedasis;
    rec["M"] = r.m_reps;
    rec["rejects_sup"] = r.rejects_sup;
    rec["rejects_cvm"] = r.rejects_cvm;
    rec["rate_sup"] = r.rate_sup;
    rec["rate_cvm"] = r.rate_cvm;
    rec["se_sup"] = r.se_sup;
    rec["se_cvm"] = r.se_cvm;
    records.push_back(std::move(rec));
  }
  for (const auto& r : normality) {
    json rec;
    rec["config_id"] = r.config_id;
    rec["lambda"] = r.lambda;
    rec["scedasis"] = r.scedasis;
    rec["truth"] = r.truth;
    rec["sigma1"] = r.sigma1;
    rec["normalized"] = r.normalized;
    rec["mean"] = finite_or_null(r.mean);
    rec["variance"] = finite_or_null(r.variance);
    rec["ks_normal"] = finite_or_null(r.ks_normal);
    records.push_back(std::move(rec));
  }
  for (const auto& r : bands) {
    json rec;
    rec["config_id"] = r.config_id;
    rec["scedasis"] = r.scedasis;
    rec["lambda"] = r.lambda;
    rec["s"] = r.s;
    rec["mean"] = r.mean;
    rec["lo"] = r.lo;
    rec["hi"] = r.hi;
    rec["truth"] = r.truth;
    rec["se_mean"] = r.se_mean;
    rec["se_lo"] = r.se_lo;
    rec["se_hi"] = r.se_hi;
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);
  return j;
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  out << "config_id,stat,value,se\n";
  auto row = [&out](const std::string& id, const std::string& stat, double value, double se,
                    bool have_se = true) {
    out << id << ',' << stat << ',' << format_double(value) << ',';
    if (have_se) out << format_double(se);
    out << '\n';
  };
  for (const auto& r : rates) {
    row(r.config_id, "rate_sup", r.rate_sup, r.se_sup);
    row(r.config_id, "rate_cvm", r.rate_cvm, r.se_cvm);
  }
  for (const auto& r : normality) {
    if (std::isfinite(r.mean))
      row(r.config_id, "mean", r.mean,
          std::isfinite(r.variance)
              ? std::sqrt(r.variance / static_cast<double>(r.normalized.size()))
              : 0.0,
          std::isfinite(r.variance));
    if (std::isfinite(r.variance)) row(r.config_id, "variance", r.variance, 0.0, false);
    if (std::isfinite(r.ks_normal)) row(r.config_id, "ks_normal", r.ks_normal, 0.0, false);
  }
  for (const auto& r : bands) {
    for (std::size_t is = 0; is < r.s.size(); ++is) {
      const std::string at = "@s=" + format_double(r.s[is]);
      row(r.config_id, "mean" + at, r.mean[is], r.se_mean[is]);
      row(r.config_id, "lo" + at, r.lo[is], r.se_lo[is]);
      row(r.config_id, "hi" + at, r.hi[is], r.se_hi[is]);
      row(r.config_id, "truth" + at, r.truth[is], 0.0, false);
    }
  }
  return out.str();
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance(std::vector<double> values, const std::function<double(double)>& cdf) {
  if (values.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
  }
  return d;
}

double order_stat_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("quantile: p outside (0,1)");
  const auto n = static_cast<double>(sorted.size());
  auto idx = static_cast<std::size_t>(index_ceil(p * n));
  idx = std::min(std::max<std::size_t>(idx, 1), sorted.size());
  return sorted[idx - 1];
}

double jackknife_se_quantile(const std::vector<double>& sorted, double p) {
  const std::size_t m = sorted.size();
  if (m < 2) return 0.0;
  // leave-one-out quantile from the sorted array: dropping position j shifts
  // the order statistic by one when j < idx'
  const auto n1 = static_cast<double>(m - 1);
  auto idx = static_cast<std::size_t>(index_ceil(p * n1));
  idx = std::min(std::max<std::size_t>(idx, 1), m - 1);
  std::vector<double> loo(m);
  for (std::size_t j = 0; j < m; ++j)
    loo[j] = j < idx ? sorted[idx] : sorted[idx - 1];
  double mean = 0.0;
  for (double v : loo) mean += v;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  return std::sqrt(n1 / static_cast<double>(m) * ss);
}

}  // namespace tailtrend::mc
