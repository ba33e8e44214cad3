#include "tailtrend/dgp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tailtrend::dgp {

namespace {
constexpr std::uint64_t kStreamFlag = 0x11;
constexpr std::uint64_t kStreamPair = 0x22;
}  // namespace

void LogisticModel::validate() const {
  if (!(theta > 0.0) || theta > 1.0)
    throw std::invalid_argument("logistic model: theta must lie in (0,1]");
}

double logistic_r(const LogisticModel& model, double u, double v) {
  model.validate();
  if (u < 0.0 || v < 0.0) throw std::invalid_argument("logistic_r: negative input");
  if (u == 0.0 || v == 0.0) return 0.0;
  const double inv = 1.0 / model.theta;
  return u + v - std::pow(std::pow(u, inv) + std::pow(v, inv), model.theta);
}

std::pair<double, double> logistic_partials(const LogisticModel& model, double u, double v) {
  model.validate();
  if (!(u > 0.0) || !(v > 0.0))
    throw std::invalid_argument("logistic_partials: inputs must be positive");
  const double inv = 1.0 / model.theta;
  const double base = std::pow(u, inv) + std::pow(v, inv);
  const double r1 = 1.0 - std::pow(base, model.theta - 1.0) * std::pow(u, inv - 1.0);
  const double r2 = 1.0 - std::pow(base, model.theta - 1.0) * std::pow(v, inv - 1.0);
  return {r1, r2};
}

double positive_stable(double alpha, Rng& rng) {
  // S = (A(pi U)/E)^((1-alpha)/alpha) with
  // A(phi) = sin(alpha phi)^(alpha/(1-alpha)) sin((1-alpha) phi) / sin(phi)^(1/(1-alpha));
  // evaluated in logs to survive phi near the endpoints.
  const double phi = std::numbers::pi * rng.uniform_open();
  const double e = rng.exponential();
  const double log_a = (alpha / (1.0 - alpha)) * std::log(std::sin(alpha * phi)) +
                       std::log(std::sin((1.0 - alpha) * phi)) -
                       (1.0 / (1.0 - alpha)) * std::log(std::sin(phi));
  return std::exp(((1.0 - alpha) / alpha) * (log_a - std::log(e)));
}

std::pair<double, double> gumbel_uniform_pair(const LogisticModel& model, Rng& rng) {
  model.validate();
  if (model.theta == 1.0) return {rng.uniform_open(), rng.uniform_open()};
  const double s = positive_stable(model.theta, rng);
  const double e1 = rng.exponential();
  const double e2 = rng.exponential();
  const double w1 = std::exp(-std::pow(e1 / s, model.theta));
  const double w2 = std::exp(-std::pow(e2 / s, model.theta));
  return {w1, w2};
}

double frechet_from_uniform(double w) {
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;  // nextafter(1,0)
  w = std::min(std::max(w, lo), hi);
  return -1.0 / std::log(w);
}

void sample_gumbel_frechet(const LogisticModel& model, std::int64_t n, Rng& rng,
                           std::vector<double>& xs, std::vector<double>& ys) {
  if (n < 1) throw std::invalid_argument("sample_gumbel_frechet: n must be >= 1");
  xs.resize(n);
  ys.resize(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto [w1, w2] = gumbel_uniform_pair(model, rng);
    xs[i] = frechet_from_uniform(w1);
    ys[i] = frechet_from_uniform(w2);
  }
}

ScedasisSpec ScedasisSpec::m1() {
  ScedasisSpec s;
  s.kind = ScedasisKind::m1;
  s.cx = [](double) { return 1.0; };
  s.cy = [](double) { return 1.0; };
  return s;
}

ScedasisSpec ScedasisSpec::m2() {
  ScedasisSpec s;
  s.kind = ScedasisKind::m2;
  s.cx = [](double t) { return 0.8 + 0.4 * t; };
  s.cy = [](double t) { return 1.5 - t; };
  return s;
}

ScedasisSpec ScedasisSpec::m3() {
  ScedasisSpec s;
  s.kind = ScedasisKind::m3;
  s.cx = [](double t) { return 1.0 + 0.6 * std::cos(2.0 * std::numbers::pi * t); };
  s.cy = [](double t) { return 1.0 + 0.4 * std::sin(2.0 * std::numbers::pi * t); };
  return s;
}

ScedasisSpec ScedasisSpec::custom(std::function<double(double)> cx,
                                  std::function<double(double)> cy) {
  ScedasisSpec s;
  s.kind = ScedasisKind::custom;
  s.cx = std::move(cx);
  s.cy = std::move(cy);
  return s;
}

ScedasisSpec ScedasisSpec::by_name(const std::string& name) {
  if (name == "m1") return m1();
  if (name == "m2") return m2();
  if (name == "m3") return m3();
  throw std::invalid_argument("scedasis: unknown specification '" + name + "'");
}

std::pair<double, double> ScedasisSpec::eval(double s) const {
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("scedasis: s outside [0,1]");
  const double a = cx(s);
  const double b = cy(s);
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("scedasis: nonpositive value");
  return {a, b};
}

std::string ScedasisSpec::name() const {
  switch (kind) {
    case ScedasisKind::m1: return "m1";
    case ScedasisKind::m2: return "m2";
    case ScedasisKind::m3: return "m3";
    default: return "custom";
  }
}

void MixtureSpec::validate() const {
  if (!(lambda >= 0.0) || lambda > 1.0)
    throw std::invalid_argument("mixture: lambda must lie in [0,1]");
}

double MixtureSpec::weight(double s) const {
  if (always_independent) return 0.0;
  if (lambda >= 1.0) return 1.0;
  if (s <= lambda) return 1.0;
  const double d = (s - lambda) / (1.0 - lambda);
  return 1.0 - d * d * d;
}

BivariateSample generate_dataset(std::int64_t n, const LogisticModel& model,
                                 const ScedasisSpec& scedasis, const MixtureSpec& mixture,
                                 std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_dataset: n must be >= 1");
  model.validate();
  mixture.validate();
  std::vector<double> xs(n), ys(n);
  for (std::int64_t i = 1; i <= n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n);
    Rng flag_rng = Rng::derive(seed, {kStreamFlag, static_cast<std::uint64_t>(i)});
    Rng pair_rng = Rng::derive(seed, {kStreamPair, static_cast<std::uint64_t>(i)});
    double w1, w2;
    if (flag_rng.bernoulli(mixture.weight(s))) {
      std::tie(w1, w2) = gumbel_uniform_pair(model, pair_rng);
    } else {
      w1 = pair_rng.uniform_open();
      w2 = pair_rng.uniform_open();
    }
    const auto [cx, cy] = scedasis.eval(s);
    xs[i - 1] = cx * frechet_from_uniform(w1);
    ys[i - 1] = cy * frechet_from_uniform(w2);
  }
  return BivariateSample(std::move(xs), std::move(ys));
}

double true_integrated_curve(const LogisticModel& model, const MixtureSpec& mixture, double s) {
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("true curve: s outside [0,1]");
  model.validate();
  mixture.validate();
  const double tdc = model.tdc();
  if (mixture.always_independent) return 0.0;
  if (mixture.lambda >= 1.0 || s <= mixture.lambda) return tdc * s;
  // integral of the cubic tail: s - (s-lambda)^4 / (4 (1-lambda)^3) past lambda
  const double lam = mixture.lambda;
  const double d = s - lam;
  const double one_m = 1.0 - lam;
  return tdc * (s - d * d * d * d / (4.0 * one_m * one_m * one_m));
}

}  // namespace tailtrend::dgp
