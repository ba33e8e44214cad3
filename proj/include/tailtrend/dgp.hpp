#ifndef TAILTREND_DGP_HPP
#define TAILTREND_DGP_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tailtrend/core.hpp"
#include "tailtrend/rng.hpp"

namespace tailtrend::dgp {

// Bivariate logistic (Gumbel) family with parameter theta in (0,1];
// theta = 1 is tail independence, theta -> 0 comonotone tails.
struct LogisticModel {
  double theta = 0.5;

  void validate() const;
  // tail-dependence coefficient R(1,1) = 2 - 2^theta
  double tdc() const { return 2.0 - std::pow(2.0, theta); }
};

// R_theta(u,v) = u + v - (u^(1/theta) + v^(1/theta))^theta
double logistic_r(const LogisticModel& model, double u, double v);

// Partial derivatives (R_1, R_2) of R_theta; both lie in [0,1].
std::pair<double, double> logistic_partials(const LogisticModel& model, double u, double v);

// Positive stable variate with Laplace transform exp(-t^alpha), alpha in (0,1).
// Kanter's representation, evaluated in log space.
double positive_stable(double alpha, Rng& rng);

// One pair with uniform marginals and the Gumbel copula of the model.
std::pair<double, double> gumbel_uniform_pair(const LogisticModel& model, Rng& rng);

// Frechet(1) transform -1/log(w), with w pulled one ulp inside (0,1).
double frechet_from_uniform(double w);

// n pairs with Frechet(1) marginals and Gumbel copula, drawn sequentially.
void sample_gumbel_frechet(const LogisticModel& model, std::int64_t n, Rng& rng,
                           std::vector<double>& xs, std::vector<double>& ys);

enum class ScedasisKind { m1, m2, m3, custom };

// Marginal scale functions (c_X, c_Y) on [0,1].
struct ScedasisSpec {
  ScedasisKind kind = ScedasisKind::m1;
  std::function<double(double)> cx;
  std::function<double(double)> cy;

  static ScedasisSpec m1();  // constant: c_X = c_Y = 1
  static ScedasisSpec m2();  // linear:   c_X = 0.8 + 0.4s, c_Y = 1.5 - s
  static ScedasisSpec m3();  // periodic: c_X = 1 + 0.6cos(2pi s), c_Y = 1 + 0.4sin(2pi s)
  static ScedasisSpec custom(std::function<double(double)> cx, std::function<double(double)> cy);
  static ScedasisSpec by_name(const std::string& name);

  std::pair<double, double> eval(double s) const;
  std::string name() const;
};

// Cubic transition weight mixing the logistic tail copula with tail
// independence: f(s) = 1 for s <= lambda, then 1 - (s-lambda)^3/(1-lambda)^3.
// lambda = 1 gives f == 1 (the no-trend null). lambda = 0 is admitted: the
// transition then spans all of [0,1].
struct MixtureSpec {
  double lambda = 1.0;
  bool always_independent = false;

  static MixtureSpec null_hypothesis() { return MixtureSpec{1.0, false}; }
  // engineered f == 0 configuration (every pair tail-independent)
  static MixtureSpec tail_independent() { return MixtureSpec{1.0, true}; }

  void validate() const;
  double weight(double s) const;
};

// For i = 1..n: Bernoulli(f(i/n)) picks the dependent pair, scedasis scaling
// is applied afterwards. The flag draw and the pair draws use separate
// substreams of (seed, i), so the path choice never shifts the pair values.
BivariateSample generate_dataset(std::int64_t n, const LogisticModel& model,
                                 const ScedasisSpec& scedasis, const MixtureSpec& mixture,
                                 std::uint64_t seed);

// I_R(1,1;s) = tdc * integral of f on [0,s], in closed form.
double true_integrated_curve(const LogisticModel& model, const MixtureSpec& mixture, double s);

}  // namespace tailtrend::dgp

#endif  // TAILTREND_DGP_HPP
