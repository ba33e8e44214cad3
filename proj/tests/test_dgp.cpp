#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tailtrend/dgp.hpp"
#include "tailtrend/estimator.hpp"
#include "tailtrend/experiments.hpp"

using namespace tailtrend;
using dgp::LogisticModel;
using dgp::MixtureSpec;
using dgp::ScedasisSpec;

TEST_SUITE("dgp") {

TEST_CASE("logistic tail copula values") {
  CHECK(dgp::logistic_r({0.5}, 1.0, 1.0) == doctest::Approx(2.0 - std::sqrt(2.0)));
  CHECK(dgp::logistic_r({0.5}, 1.0, 1.0) == doctest::Approx(0.585786).epsilon(1e-5));
  // 2 - 2^0.9, the "0.13 (weak)" configuration
  CHECK(dgp::logistic_r({0.9}, 1.0, 1.0) == doctest::Approx(2.0 - std::pow(2.0, 0.9)));
  CHECK(dgp::logistic_r({0.9}, 1.0, 1.0) == doctest::Approx(0.13).epsilon(0.05));
  CHECK(dgp::logistic_r({0.3}, 1.0, 0.0) == 0.0);
  CHECK(dgp::logistic_r({0.3}, 0.0, 2.0) == 0.0);
  // homogeneity of order 1
  CHECK(dgp::logistic_r({0.7}, 2.0, 2.0) ==
        doctest::Approx(2.0 * dgp::logistic_r({0.7}, 1.0, 1.0)));
  CHECK_THROWS_AS(dgp::logistic_r({0.5}, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dgp::logistic_r({1.5}, 1.0, 1.0), std::invalid_argument);
  // bounded by u ^ v, strictly below for theta >= 0.1
  for (double theta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double u : {0.2, 0.7, 1.3}) {
      for (double v : {0.1, 0.8, 2.0}) {
        const double r = dgp::logistic_r({theta}, u, v);
        CHECK(r >= 0.0);
        CHECK(r < std::min(u, v));
      }
    }
  }
}

TEST_CASE("logistic partial derivatives") {
  const auto [r1, r2] = dgp::logistic_partials({0.5}, 1.0, 1.0);
  CHECK(r1 == doctest::Approx(1.0 - std::pow(2.0, -0.5)));
  CHECK(r1 == doctest::Approx((2.0 - std::sqrt(2.0)) / 2.0));  // r = tdc/2 at (1,1)
  CHECK(r1 == doctest::Approx(r2));
  // central-difference oracle
  const double eps = 1e-5;
  for (double theta : {0.3, 0.5, 0.9}) {
    for (double u : {0.4, 1.0, 1.6}) {
      for (double v : {0.3, 1.0, 1.9}) {
        const auto [d1, d2] = dgp::logistic_partials({theta}, u, v);
        const double fd1 = (dgp::logistic_r({theta}, u + eps, v) -
                            dgp::logistic_r({theta}, u - eps, v)) /
                           (2.0 * eps);
        const double fd2 = (dgp::logistic_r({theta}, u, v + eps) -
                            dgp::logistic_r({theta}, u, v - eps)) /
                           (2.0 * eps);
        CHECK(std::fabs(d1 - fd1) <= 1e-6);
        CHECK(std::fabs(d2 - fd2) <= 1e-6);
        CHECK(d1 >= 0.0);
        CHECK(d1 <= 1.0);
      }
    }
  }
  CHECK_THROWS_AS(dgp::logistic_partials({0.5}, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("positive stable law has the right Laplace transform") {
  Rng rng(100);
  for (double alpha : {0.5, 0.9}) {
    const int n = 200000;
    double acc1 = 0.0, acc2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s = dgp::positive_stable(alpha, rng);
      acc1 += std::exp(-s);
      acc2 += std::exp(-2.0 * s);
    }
    CHECK(acc1 / n == doctest::Approx(std::exp(-1.0)).epsilon(0.01));
    CHECK(acc2 / n ==
          doctest::Approx(std::exp(-std::pow(2.0, alpha))).epsilon(0.02));
  }
}

TEST_CASE("gumbel pair has uniform marginals") {
  Rng rng(101);
  const int n = 50000;
  std::vector<double> w1(n);
  for (int i = 0; i < n; ++i) w1[i] = dgp::gumbel_uniform_pair({0.5}, rng).first;
  const double d = mc::ks_distance(w1, [](double x) { return x; });
  CHECK(d <= 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("theta = 1 short-circuits to independence") {
  Rng rng(102);
  const int n = 20000;
  double sx = 0.0, sy = 0.0, sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto [u, v] = dgp::gumbel_uniform_pair({1.0}, rng);
    const double a = std::log(dgp::frechet_from_uniform(u));
    const double b = std::log(dgp::frechet_from_uniform(v));
    sx += a;
    sy += b;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  const double corr = (sxy - sx * sy / n) /
                      std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
  CHECK(std::fabs(corr) <= 0.02);
}

TEST_CASE("frechet marginals pass a KS check") {
  Rng rng(103);
  const int n = 20000;
  LogisticModel model{0.5};
  std::vector<double> xs, ys;
  dgp::sample_gumbel_frechet(model, n, rng, xs, ys);
  const auto frechet_cdf = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  CHECK(mc::ks_distance(xs, frechet_cdf) <= 1.63 / std::sqrt(static_cast<double>(n)));
  CHECK(mc::ks_distance(ys, frechet_cdf) <= 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("empirical tail dependence matches 2 - sqrt(2)") {
  Rng rng(104);
  const int n = 100000, k = 1000;
  LogisticModel model{0.5};
  std::vector<double> xs, ys;
  dgp::sample_gumbel_frechet(model, n, rng, xs, ys);
  std::vector<double> sx = xs, sy = ys;
  std::nth_element(sx.begin(), sx.begin() + (n - k - 1), sx.end());
  std::nth_element(sy.begin(), sy.begin() + (n - k - 1), sy.end());
  const double tx = sx[n - k - 1], ty = sy[n - k - 1];
  int count = 0;
  for (int i = 0; i < n; ++i)
    if (xs[i] > tx && ys[i] > ty) ++count;
  CHECK(static_cast<double>(count) / k ==
        doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(0.13));
}

TEST_CASE("scedasis specifications") {
  const auto m1 = ScedasisSpec::m1().eval(0.37);
  CHECK(m1.first == 1.0);
  CHECK(m1.second == 1.0);
  const auto m2a = ScedasisSpec::m2().eval(0.0);
  CHECK(m2a.first == doctest::Approx(0.8));
  CHECK(m2a.second == doctest::Approx(1.5));
  const auto m2b = ScedasisSpec::m2().eval(1.0);
  CHECK(m2b.first == doctest::Approx(1.2));
  CHECK(m2b.second == doctest::Approx(0.5));
  const auto m3a = ScedasisSpec::m3().eval(0.0);
  CHECK(m3a.first == doctest::Approx(1.6));
  CHECK(m3a.second == doctest::Approx(1.0));
  const auto m3b = ScedasisSpec::m3().eval(0.25);
  CHECK(m3b.first == doctest::Approx(1.0));
  CHECK(m3b.second == doctest::Approx(1.4));
  CHECK_THROWS_AS(ScedasisSpec::m1().eval(1.5), std::invalid_argument);
  CHECK_THROWS_AS(ScedasisSpec::by_name("m4"), std::invalid_argument);
}

TEST_CASE("mixing weight") {
  MixtureSpec mix{0.7, false};
  CHECK(mix.weight(0.5) == 1.0);
  CHECK(mix.weight(0.7) == 1.0);
  CHECK(mix.weight(1.0) == 0.0);
  CHECK(mix.weight(0.9) == doctest::Approx(1.0 - 8.0 / 27.0));
  CHECK(MixtureSpec::null_hypothesis().weight(0.3) == 1.0);
  CHECK(MixtureSpec{1.0, false}.weight(0.99) == 1.0);
  CHECK(MixtureSpec{0.0, false}.weight(0.5) == doctest::Approx(1.0 - 0.125));
  CHECK(MixtureSpec::tail_independent().weight(0.2) == 0.0);
  CHECK_THROWS_AS((MixtureSpec{1.5, false}.validate()), std::invalid_argument);
}

TEST_CASE("generated data is deterministic in the seed") {
  const LogisticModel model{0.5};
  const auto a = dgp::generate_dataset(500, model, ScedasisSpec::m2(), MixtureSpec{0.8, false}, 9);
  const auto b = dgp::generate_dataset(500, model, ScedasisSpec::m2(), MixtureSpec{0.8, false}, 9);
  CHECK(a.x() == b.x());
  CHECK(a.y() == b.y());
  const auto c = dgp::generate_dataset(500, model, ScedasisSpec::m2(), MixtureSpec{0.8, false}, 10);
  CHECK(a.x() != c.x());
}

TEST_CASE("scedasis scaling realizes F_i(x) = F0(x / c_X(i/n))") {
  // with c_X = 0.8 + 0.4 s and Frechet(1) base, P(X_i <= x) = exp(-c/x)
  const LogisticModel model{0.5};
  const std::int64_t n = 40000;
  const auto data =
      dgp::generate_dataset(n, model, ScedasisSpec::m2(), MixtureSpec::null_hypothesis(), 11);
  // restrict to a thin time strip so c is nearly constant
  double count = 0.0, total = 0.0;
  const double x0 = 2.0;
  for (std::int64_t i = 1; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    if (s < 0.45 || s > 0.55) continue;
    total += 1.0;
    if (data.x()[i - 1] <= x0) count += 1.0;
  }
  const double c_mid = 0.8 + 0.4 * 0.5;
  CHECK(count / total == doctest::Approx(std::exp(-c_mid / x0)).epsilon(0.02));
}

TEST_CASE("tail-independent configuration has vanishing average tail copula") {
  const LogisticModel model{0.5};
  const auto data = dgp::generate_dataset(20000, model, ScedasisSpec::m1(),
                                          MixtureSpec::tail_independent(), 12);
  TuningParams p{200, Rational(1, 10), 1.0};
  const TailSurface surf = est::average_tail_copula(data, p, {1.0}, {1.0});
  CHECK(std::fabs(surf.at(0, 0)) <= 0.06);
}

TEST_CASE("true integrated curve") {
  const LogisticModel model{0.5};
  const double tdc = model.tdc();
  CHECK(dgp::true_integrated_curve(model, MixtureSpec{0.0, false}, 1.0) ==
        doctest::Approx(tdc * 0.75));
  CHECK(dgp::true_integrated_curve(model, MixtureSpec{0.0, false}, 1.0) ==
        doctest::Approx(0.439340).epsilon(1e-5));
  CHECK(dgp::true_integrated_curve(model, MixtureSpec{1.0, false}, 0.61) ==
        doctest::Approx(tdc * 0.61));
  CHECK(dgp::true_integrated_curve(model, MixtureSpec{2.0 / 3.0, false}, 1.0) ==
        doctest::Approx(0.536970).epsilon(1e-5));
  // quadrature oracle: Simpson on tdc * f
  const MixtureSpec mix{2.0 / 3.0, false};
  const int panels = 1000;
  double acc = mix.weight(0.0) + mix.weight(1.0);
  for (int i = 1; i < 2 * panels; ++i)
    acc += (i % 2 == 1 ? 4.0 : 2.0) * mix.weight(static_cast<double>(i) / (2 * panels));
  const double quad = tdc * acc / (6.0 * panels);
  CHECK(dgp::true_integrated_curve(model, mix, 1.0) == doctest::Approx(quad).epsilon(1e-8));
  // lambda = 0 curve shape
  CHECK(dgp::true_integrated_curve(model, MixtureSpec{0.0, false}, 0.5) ==
        doctest::Approx(tdc * (0.5 - std::pow(0.5, 4) / 4.0)));
  CHECK_THROWS_AS(dgp::true_integrated_curve(model, MixtureSpec{0.5, false}, 1.5),
                  std::invalid_argument);
}

}  // TEST_SUITE
