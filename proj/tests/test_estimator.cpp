#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tailtrend/core.hpp"
#include "tailtrend/estimator.hpp"
#include "tailtrend/rng.hpp"

using namespace tailtrend;

namespace {

// Literal reading of the local estimator: order-statistic thresholds and a
// double loop over the window. Independent of the rank-table implementation.
double oracle_local_rhat(const std::vector<double>& x, const std::vector<double>& y,
                         double kh, double u, double v) {
  const std::size_t nh = x.size();
  const auto qx = static_cast<std::int64_t>(std::floor(kh * u + 1e-9));
  const auto qy = static_cast<std::int64_t>(std::floor(kh * v + 1e-9));
  REQUIRE(qx <= static_cast<std::int64_t>(nh) - 1);
  REQUIRE(qy <= static_cast<std::int64_t>(nh) - 1);
  if (qx == 0 || qy == 0) return 0.0;
  std::vector<double> xs = x, ys = y;
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double tx = xs[nh - qx - 1];  // (nh - qx)-th ascending order statistic
  const double ty = ys[nh - qy - 1];
  std::int64_t count = 0;
  for (std::size_t i = 0; i < nh; ++i)
    if (x[i] > tx && y[i] > ty) ++count;
  return static_cast<double>(count) / kh;
}

std::vector<double> random_uniforms(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform_open();
  return v;
}

// One window of 10 pairs with exactly `c` of the top-5 x-positions carrying
// top-5 y-values; R(1,1) over that window is c/5 when kh = 5.
void append_block_with_count(std::vector<double>& xs, std::vector<double>& ys, int c,
                             Rng& rng) {
  std::vector<double> y(10);
  int top_used = 0, bottom_used = 0;
  for (int pos = 5; pos < 10; ++pos) {
    if (pos - 5 < c) y[pos] = 6.0 + top_used++;
    else y[pos] = 1.0 + bottom_used++;
  }
  for (int pos = 0; pos < 5; ++pos) {
    if (top_used < 5) y[pos] = 6.0 + top_used++;
    else y[pos] = 1.0 + bottom_used++;
  }
  for (int pos = 0; pos < 10; ++pos) {
    xs.push_back(pos + 1.0 + 0.001 * rng.uniform());  // jitter keeps data tie-free
    ys.push_back(y[pos] + 0.001 * rng.uniform());
  }
}

}  // namespace

TEST_SUITE("estimator") {

TEST_CASE("u = 0 gives zero for any data") {
  Rng rng(1);
  BivariateSample s(random_uniforms(rng, 40), random_uniforms(rng, 40));
  TuningParams p{10, Rational(1, 2), 1.0};  // nh = 20, kh = 5
  const TailSurface surf = est::local_tail_copula(s, p, 0.5, {0.0, 0.4, 1.0}, {0.4, 1.0});
  CHECK(surf.at(0, 0) == 0.0);
  CHECK(surf.at(0, 1) == 0.0);
  CHECK(surf.u_border(0) == 0.0);
}

TEST_CASE("comonotone window of 10 points, kh = 5, u = v = 0.4") {
  std::vector<double> x, y;
  for (int i = 1; i <= 10; ++i) {
    x.push_back(i);
    y.push_back(i);
  }
  BivariateSample s(x, y);
  TuningParams p{5, Rational(1, 1), 1.0};  // single window, nh = 10, kh = 5
  // T must satisfy kT < n; shrink the box accordingly
  p.T = 1.0;
  const TailSurface surf = est::local_tail_copula(s, p, 0.5, {0.4}, {0.4});
  CHECK(surf.at(0, 0) == 0.4);  // threshold is the 8th order statistic; 2 exceedances
  CHECK(surf.at(0, 0) == oracle_local_rhat(x, y, p.kh(), 0.4, 0.4));
}

TEST_CASE("borders carry floor(khu)/(kh) bit-exactly") {
  Rng rng(2);
  const std::size_t n = 200;
  BivariateSample s(random_uniforms(rng, n), random_uniforms(rng, n));
  TuningParams p{40, Rational(1, 10), 1.0};  // nh = 20, kh = 4
  for (std::int64_t j = 1; j <= 10; ++j) {
    const TailSurface surf = est::local_tail_copula(
        s, p, p.block_midpoint(j), {0.1, 0.25, 0.5, 0.75, 1.0}, {0.5, 1.0});
    const double kh = p.kh();
    CHECK(surf.u_border(0) == std::floor(kh * 0.1 + 1e-9) / kh);
    CHECK(surf.u_border(1) == std::floor(kh * 0.25 + 1e-9) / kh);
    CHECK(surf.u_border(4) == std::floor(kh * 1.0 + 1e-9) / kh);
    CHECK(surf.v_border(1) == std::floor(kh * 1.0 + 1e-9) / kh);
  }
}

TEST_CASE("local estimator equals the brute-force oracle on random windows") {
  Rng rng(3);
  const std::vector<double> grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nh = 20 + (rng.next_u64() % 31);  // 20..50
    const std::int64_t k = static_cast<std::int64_t>(nh / 2);
    const auto x = random_uniforms(rng, nh);
    const auto y = random_uniforms(rng, nh);
    BivariateSample s(x, y);
    TuningParams p{k, Rational(1, 1), 1.0};
    const TailSurface surf = est::local_tail_copula(s, p, 0.5, grid, grid);
    for (std::size_t iu = 0; iu < grid.size(); ++iu)
      for (std::size_t iv = 0; iv < grid.size(); ++iv) {
        const double want = oracle_local_rhat(x, y, p.kh(), grid[iu], grid[iv]);
        CHECK(surf.at(iu, iv) == want);
      }
  }
}

TEST_CASE("piecewise block selection") {
  TuningParams p{40, Rational(1, 10), 1.0};
  CHECK(est::block_of(p, 0.05) == 1);
  CHECK(est::block_of(p, 0.1) == 1);
  CHECK(est::block_of(p, 0.101) == 2);
  CHECK(est::block_of(p, 1.0) == 10);
  CHECK(p.block_midpoint(1) == 0.05);
  CHECK(p.block_midpoint(10) == 0.95);
  CHECK_THROWS_AS(est::block_of(p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(est::block_of(p, 1.1), std::invalid_argument);

  TuningParams q{10, Rational(3, 20), 1.0};  // h = 0.15, m = 6, mh = 0.9
  CHECK(q.m() == 6);
  CHECK(est::block_of(q, 0.95) == 6);  // past mh, clamped to the last block
  CHECK(q.block_midpoint(6) == doctest::Approx(0.825));
}

TEST_CASE("piecewise estimator matches the local estimator at the block midpoint") {
  Rng rng(4);
  const std::size_t n = 40;
  BivariateSample s(random_uniforms(rng, n), random_uniforms(rng, n));
  TuningParams p{10, Rational(3, 20), 1.0};  // nh = 6, m = 6
  const std::vector<double> pts = {0.5, 1.0};
  const TailSurface a = est::piecewise_r_tilde(s, p, pts, pts, 0.95);
  const TailSurface b = est::local_tail_copula(s, p, 0.825, pts, pts);
  for (std::size_t iu = 0; iu < pts.size(); ++iu)
    for (std::size_t iv = 0; iv < pts.size(); ++iv) CHECK(a.at(iu, iv) == b.at(iu, iv));
}

TEST_CASE("integrated estimator on a 3-block toy") {
  Rng rng(5);
  std::vector<double> xs, ys;
  append_block_with_count(xs, ys, 1, rng);
  append_block_with_count(xs, ys, 2, rng);
  append_block_with_count(xs, ys, 3, rng);
  BivariateSample s(xs, ys);
  TuningParams p{15, Rational(1, 3), 1.0};  // n = 30, nh = 10, kh = 5, m = 3
  est::BlockTable blocks(s, p, 1.0);
  CHECK(blocks.rhat(1, 1.0, 1.0) == doctest::Approx(0.2));
  CHECK(blocks.rhat(2, 1.0, 1.0) == doctest::Approx(0.4));
  CHECK(blocks.rhat(3, 1.0, 1.0) == doctest::Approx(0.6));

  EvalGrid g;
  g.u = {1.0};
  g.v = {1.0};
  g.s = {0.5, 1.0};
  const IntegratedCurve curve = est::integrated_estimator(blocks, g);
  CHECK(curve.at(0, 0, 0) == doctest::Approx(1.0 / 3.0 * 0.2 + (0.5 - 1.0 / 3.0) * 0.4));

  // numeric quadrature of the piecewise-constant R-tilde as an external check
  double quad = 0.0;
  const int slices = 5000;
  for (int i = 0; i < slices; ++i) {
    const double w = 0.5 * (i + 0.5) / slices;
    quad += 0.5 / slices * blocks.rhat(est::block_of(p, w), 1.0, 1.0);
  }
  CHECK(curve.at(0, 0, 0) == doctest::Approx(quad).epsilon(1e-3));
}

TEST_CASE("single block contributes h times its value") {
  Rng rng(6);
  const std::size_t n = 40;
  BivariateSample s(random_uniforms(rng, n), random_uniforms(rng, n));
  TuningParams p{8, Rational(1, 4), 1.0};  // nh = 10, kh = 2
  est::BlockTable blocks(s, p, 1.0);
  EvalGrid g;
  g.u = {1.0};
  g.v = {1.0};
  g.s = {0.25, 1.0};
  const IntegratedCurve curve = est::integrated_estimator(blocks, g);
  CHECK(curve.at(0, 0, 0) == 0.25 * blocks.rhat(1, 1.0, 1.0));
}

TEST_CASE("identical windows: average equals the single-window value exactly") {
  Rng rng(7);
  const std::size_t nh = 8;
  const auto wx = random_uniforms(rng, nh);
  const auto wy = random_uniforms(rng, nh);
  std::vector<double> xs, ys;
  for (int rep = 0; rep < 4; ++rep) {
    xs.insert(xs.end(), wx.begin(), wx.end());
    ys.insert(ys.end(), wy.begin(), wy.end());
  }
  BivariateSample s(xs, ys);
  TuningParams p{16, Rational(1, 4), 1.0};  // nh = 8, kh = 4 (dyadic values)
  est::BlockTable blocks(s, p, 1.0);
  EvalGrid g;
  g.u = {0.5, 1.0};
  g.v = {0.5, 1.0};
  g.s = EvalGrid::s_points(p);
  const IntegratedCurve curve = est::integrated_estimator(blocks, g);
  for (std::size_t iu = 0; iu < 2; ++iu)
    for (std::size_t iv = 0; iv < 2; ++iv)
      CHECK(curve.at(g.s.size() - 1, iu, iv) == blocks.rhat(1, g.u[iu], g.v[iv]));

  // and the trend statistics vanish exactly on the dyadic design
  const est::TrendStats stats = est::trend_statistics(curve, p, g);
  CHECK(stats.t_sup == 0.0);
  CHECK(stats.t_cvm == 0.0);
}

TEST_CASE("identical windows: near-zero statistics at a non-dyadic bandwidth") {
  Rng rng(8);
  const std::size_t nh = 30;
  const auto wx = random_uniforms(rng, nh);
  const auto wy = random_uniforms(rng, nh);
  std::vector<double> xs, ys;
  for (int rep = 0; rep < 10; ++rep) {
    xs.insert(xs.end(), wx.begin(), wx.end());
    ys.insert(ys.end(), wy.begin(), wy.end());
  }
  BivariateSample s(xs, ys);
  TuningParams p{50, Rational(1, 10), 1.0};  // nh = 30, kh = 5
  const EvalGrid g = EvalGrid::defaults(p);
  const IntegratedCurve curve = est::integrated_estimator(s, p, g);
  const est::TrendStats stats = est::trend_statistics(curve, p, g);
  CHECK(stats.t_sup <= 1e-10);
  CHECK(stats.t_cvm <= 1e-20);
}

TEST_CASE("average surface: borders, comonotone and independent data") {
  Rng rng(9);
  SUBCASE("comonotone: diagonal close to u") {
    std::vector<double> x = random_uniforms(rng, 2000);
    std::vector<double> y = x;
    for (auto& v : y) v = 2.0 * v + 1.0;  // strictly increasing map keeps comonotonicity
    BivariateSample s(x, y);
    TuningParams p{100, Rational(1, 10), 1.0};  // nh = 200, kh = 10
    const TailSurface surf = est::average_tail_copula(s, p, {0.3, 0.7, 1.0}, {0.3, 0.7, 1.0});
    for (std::size_t i = 0; i < 3; ++i) {
      const double u = surf.u()[i];
      CHECK(std::fabs(surf.at(i, i) - u) <= 1.0 / p.kh() + 1e-12);
    }
    CHECK(surf.u_border(0) == std::floor(p.kh() * 0.3 + 1e-9) / p.kh());
  }
  SUBCASE("independent coordinates: average near zero") {
    BivariateSample s(random_uniforms(rng, 10000), random_uniforms(rng, 10000));
    TuningParams p{100, Rational(1, 10), 1.0};
    const TailSurface surf = est::average_tail_copula(s, p, {1.0}, {1.0});
    CHECK(std::fabs(surf.at(0, 0)) <= 0.05);
  }
}

TEST_CASE("derivative estimator on closed-form surfaces") {
  const std::vector<double> grid = {0.1, 0.5, 1.0};
  SUBCASE("constant in u gives zero") {
    const auto g = [](double, double v) { return v; };
    const auto d = est::derivative_matrix(g, 200, 1, grid, grid);
    for (double v : d) CHECK(v == 0.0);
  }
  SUBCASE("linear in u gives one, interior and boundary") {
    const auto g = [](double u, double) { return u; };
    const auto d1 = est::derivative_matrix(g, 200, 1, grid, grid);
    for (double v : d1) CHECK(v == doctest::Approx(1.0));
    const auto d0 = est::derivative_matrix(g, 200, 1, {0.0}, grid);
    for (double v : d0) CHECK(v == doctest::Approx(1.0));  // one-sided branch
  }
  SUBCASE("clamped to [0,1]") {
    const auto g = [](double u, double) { return 3.0 * u; };
    const auto d = est::derivative_matrix(g, 200, 1, grid, grid);
    for (double v : d) CHECK(v == 1.0);
  }
  CHECK_THROWS_AS(est::derivative_matrix([](double, double) { return 0.0; }, 0, 1, grid, grid),
                  std::invalid_argument);
}

TEST_CASE("trend statistics: exact null identity and a single deviation") {
  TuningParams p{100, Rational(1, 4), 1.0};
  EvalGrid g;
  g.u = {0.5, 1.0};
  g.v = {0.5, 1.0};
  g.s = {0.25, 0.5, 0.75, 1.0};

  IntegratedCurve curve(g, {0.0, 0.25, 0.5, 0.75, 1.0});
  const double base[2][2] = {{0.25, 0.5}, {0.5, 0.75}};
  for (std::size_t is = 0; is < 4; ++is)
    for (std::size_t iu = 0; iu < 2; ++iu)
      for (std::size_t iv = 0; iv < 2; ++iv)
        curve.set(is, iu, iv, g.s[is] * base[iu][iv]);

  SUBCASE("exactly linear curve gives zero statistics") {
    const est::TrendStats stats = est::trend_statistics(curve, p, g);
    CHECK(stats.t_sup == 0.0);
    CHECK(stats.t_cvm == 0.0);
  }
  SUBCASE("one deviating point produces the closed-form statistics") {
    const double eps = 0.03125;
    curve.set(1, 0, 1, curve.at(1, 0, 1) + eps);  // s = 0.5, u = 0.5, v = 1.0
    const est::TrendStats stats = est::trend_statistics(curve, p, g);
    CHECK(stats.t_sup == doctest::Approx(std::sqrt(100.0) * eps));
    // cell weight: du = 0.5, dv = 0.5, ds = 0.25
    CHECK(stats.t_cvm == doctest::Approx(100.0 * eps * eps * 0.5 * 0.5 * 0.25));
  }
}

TEST_CASE("swapping u/v roles together with sample coordinates is bit-exact") {
  Rng rng(10);
  const std::size_t n = 300;
  const auto x = random_uniforms(rng, n);
  const auto y = random_uniforms(rng, n);
  TuningParams p{30, Rational(1, 10), 1.0};  // nh = 30, kh = 3
  const EvalGrid g = EvalGrid::defaults(p);

  const IntegratedCurve c1 = est::integrated_estimator(BivariateSample(x, y), p, g);
  const IntegratedCurve c2 = est::integrated_estimator(BivariateSample(y, x), p, g);
  for (std::size_t is = 0; is < g.s.size(); ++is)
    for (std::size_t iu = 0; iu < g.u.size(); ++iu)
      for (std::size_t iv = 0; iv < g.v.size(); ++iv)
        CHECK(c1.at(is, iu, iv) == c2.at(is, iv, iu));

  const est::TrendStats s1 = est::trend_statistics(c1, p, g);
  const est::TrendStats s2 = est::trend_statistics(c2, p, g);
  CHECK(s1.t_sup == s2.t_sup);
  CHECK(s1.t_cvm == s2.t_cvm);
}

TEST_CASE("rank invariance: strictly increasing marginal maps change nothing") {
  Rng rng(11);
  const std::size_t n = 200;
  const auto x = random_uniforms(rng, n);
  const auto y = random_uniforms(rng, n);
  std::vector<double> xe = x, yc = y;
  for (auto& v : xe) v = std::exp(v);
  for (auto& v : yc) v = v * v * v + v;

  TuningParams p{20, Rational(1, 10), 1.0};  // nh = 20, kh = 2
  const EvalGrid g = EvalGrid::defaults(p);
  const IntegratedCurve c1 = est::integrated_estimator(BivariateSample(x, y), p, g);
  const IntegratedCurve c2 = est::integrated_estimator(BivariateSample(xe, yc), p, g);
  for (std::size_t is = 0; is < g.s.size(); ++is)
    for (std::size_t iu = 0; iu < g.u.size(); ++iu)
      for (std::size_t iv = 0; iv < g.v.size(); ++iv)
        CHECK(c1.at(is, iu, iv) == c2.at(is, iu, iv));

  const est::TrendStats s1 = est::trend_statistics(c1, p, g);
  const est::TrendStats s2 = est::trend_statistics(c2, p, g);
  CHECK(s1.t_sup == s2.t_sup);
  CHECK(s1.t_cvm == s2.t_cvm);
}

TEST_CASE("surfaces from any data satisfy the shared invariants") {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 100;
    BivariateSample s(random_uniforms(rng, n), random_uniforms(rng, n));
    TuningParams p{20, Rational(1, 5), 1.0};  // nh = 20, kh = 4
    const EvalGrid g = EvalGrid::defaults(p);
    const TailSurface local = est::local_tail_copula(s, p, 0.5, g.u, g.v);
    CHECK_NOTHROW(local.check(0.0));  // counts are exact, no tolerance needed
    const TailSurface avg = est::average_tail_copula(s, p, g.u, g.v);
    CHECK_NOTHROW(avg.check());
    // bound: R <= min(floor(khu), floor(khv))/(kh)
    for (std::size_t iu = 0; iu < g.u.size(); ++iu)
      for (std::size_t iv = 0; iv < g.v.size(); ++iv)
        CHECK(local.at(iu, iv) <=
              std::min(local.u_border(iu), local.v_border(iv)) + 1e-15);
  }
}

TEST_CASE("window preconditions") {
  Rng rng(13);
  BivariateSample s(random_uniforms(rng, 100), random_uniforms(rng, 100));
  TuningParams p{20, Rational(1, 10), 1.0};  // nh = 10
  CHECK_THROWS_AS(est::local_tail_copula(s, p, 0.01, {0.5}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(est::local_tail_copula(s, p, 0.99, {0.5}, {0.5}), std::invalid_argument);
  // floor(kh u) = nh would need the 0-th order statistic
  CHECK_THROWS_AS(est::local_tail_copula(s, p, 0.5, {5.0}, {0.5}), std::out_of_range);
}

}  // TEST_SUITE
