#ifndef TAILTREND_EXPERIMENTS_HPP
#define TAILTREND_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tailtrend/core.hpp"
#include "tailtrend/dgp.hpp"
#include "tailtrend/limit.hpp"

namespace tailtrend::mc {

struct TrendTestResult {
  double t_sup = 0.0;
  double t_cvm = 0.0;
  double c_sup = 0.0;
  double c_cvm = 0.0;
  bool reject_sup = false;
  bool reject_cvm = false;
  double jitter = 0.0;
  int chol_retries = 0;
};

// Full no-trend test on one dataset: estimate, statistics, simulated critical
// values, verdict. The dataset's block table, curve, plug-in surface and
// derivative estimates are computed once and shared by both statistics; both
// reuse the same B bridge draws.
TrendTestResult run_trend_test(const BivariateSample& sample, const TuningParams& params,
                               const EvalGrid& grid, std::int64_t b_draws, double alpha,
                               std::uint64_t seed, int threads = 1,
                               double deriv_exponent = 0.2);

enum class ExperimentKind { endpoint_normality, curve_band, size, power };

std::string kind_name(ExperimentKind k);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::size;
  std::int64_t n = 5000;
  int m_reps = 200;
  std::int64_t b_draws = 1000;
  std::vector<std::int64_t> ks;
  std::vector<Rational> hs;
  std::vector<double> thetas;
  std::vector<double> lambdas;
  std::vector<std::string> scedases;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
  Rational grid_step{1, 10};
  int threads = 1;

  // Throws std::invalid_argument with a JSON-pointer diagnostic on schema
  // violations ("/kind: must be one of ...").
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;  // echo without the threads knob
  void validate() const;
};

struct RateRecord {
  std::string config_id;
  std::int64_t k = 0;
  Rational h{1, 10};
  double theta = 0.0;
  double lambda = 1.0;
  std::string scedasis;
  int m_reps = 0;
  int rejects_sup = 0;
  int rejects_cvm = 0;
  double rate_sup = 0.0;
  double rate_cvm = 0.0;
  double se_sup = 0.0;
  double se_cvm = 0.0;
};

struct NormalityRecord {
  std::string config_id;
  double lambda = 0.0;
  std::string scedasis;
  double truth = 0.0;
  double sigma1 = 0.0;
  std::vector<double> normalized;
  double mean = 0.0;
  double variance = 0.0;   // NaN when m_reps < 2
  double ks_normal = 0.0;  // NaN when m_reps < 5
};

struct CurveBandRecord {
  std::string config_id;
  std::string scedasis;
  double lambda = 0.0;
  std::vector<double> s;
  std::vector<double> mean;
  std::vector<double> lo;     // empirical 2.5% endpoint
  std::vector<double> hi;     // empirical 97.5% endpoint
  std::vector<double> truth;
  std::vector<double> se_mean;
  std::vector<double> se_lo;  // jackknife
  std::vector<double> se_hi;  // jackknife
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::size;
  nlohmann::json config_echo;
  std::vector<RateRecord> rates;
  std::vector<NormalityRecord> normality;
  std::vector<CurveBandRecord> bands;
  // wall time is reported separately (stderr / timing sidecar); keeping it
  // out of the report keeps report bytes a pure function of (config, seed)
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;
  std::string to_csv() const;  // long format: config_id,stat,value,se
};

ExperimentReport run_endpoint_normality(const ExperimentConfig& config);
ExperimentReport run_curve_band(const ExperimentConfig& config);
ExperimentReport run_size(const ExperimentConfig& config);
ExperimentReport run_power(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);

// ---- small statistics helpers shared by experiments and tests ----

double standard_normal_cdf(double x);

// Kolmogorov-Smirnov sup distance between the empirical cdf of values and cdf.
double ks_distance(std::vector<double> values, const std::function<double(double)>& cdf);

// p-th empirical quantile by the ascending order statistic at ceil(p*n).
double order_stat_quantile(const std::vector<double>& sorted, double p);

// Jackknife standard error of the order-statistic quantile.
double jackknife_se_quantile(const std::vector<double>& sorted, double p);

}  // namespace tailtrend::mc

#endif  // TAILTREND_EXPERIMENTS_HPP
