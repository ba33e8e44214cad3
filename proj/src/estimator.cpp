#include "tailtrend/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tailtrend::est {

namespace {

// Descending ranks (0 = largest) of a window, ties broken by original index:
// among equal values the later observation ranks higher.
std::vector<std::int32_t> descending_ranks(const double* vals, std::int64_t n) {
  std::vector<std::int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [vals](std::int32_t a, std::int32_t b) { return vals[a] < vals[b]; });
  std::vector<std::int32_t> rank(n);
  for (std::int64_t p = 0; p < n; ++p) rank[order[p]] = static_cast<std::int32_t>(n - 1 - p);
  return rank;
}

// Inclusive dominance prefix over the joint descending ranks:
// P[a*(cap+1)+b] = #{i : dx_i < a and dy_i < b}, for a, b <= cap.
std::vector<std::int32_t> dominance_prefix(const double* x, const double* y,
                                           std::int64_t n, std::int64_t cap) {
  const std::vector<std::int32_t> dx = descending_ranks(x, n);
  const std::vector<std::int32_t> dy = descending_ranks(y, n);
  const std::int64_t w = cap + 1;
  std::vector<std::int32_t> table(w * w, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    if (dx[i] < cap && dy[i] < cap) ++table[(dx[i] + 1) * w + (dy[i] + 1)];
  }
  for (std::int64_t a = 1; a <= cap; ++a) {
    std::int32_t row = 0;
    for (std::int64_t b = 1; b <= cap; ++b) {
      row += table[a * w + b];
      table[a * w + b] = row + table[(a - 1) * w + b];
    }
  }
  return table;
}

}  // namespace

BlockTable::BlockTable(const BivariateSample& sample, const TuningParams& params,
                       double max_coord)
    : params_(params), n_(static_cast<std::int64_t>(sample.n())) {
  params_.require_valid(n_);
  nh_ = params_.nh(n_);
  m_ = params_.m();
  if (max_coord <= 0.0) max_coord = 2.0 * params_.T;
  q_cap_ = std::min<std::int64_t>(nh_ - 1, params_.level(max_coord));
  prefix_.reserve(m_);
  for (std::int64_t j = 0; j < m_; ++j) {
    const std::int64_t off = j * nh_;
    prefix_.push_back(
        dominance_prefix(sample.x().data() + off, sample.y().data() + off, nh_, q_cap_));
  }
}

std::int64_t BlockTable::checked_level(double coord) const {
  if (coord < 0.0) throw std::invalid_argument("estimator: negative grid coordinate");
  const std::int64_t q = params_.level(coord);
  if (q > nh_ - 1)
    throw std::out_of_range("estimator: order-statistic index out of range (floor(khu)=" +
                            std::to_string(q) + ", nh=" + std::to_string(nh_) + ")");
  if (q > q_cap_)
    throw std::out_of_range("estimator: coordinate beyond the prepared box");
  return q;
}

std::int64_t BlockTable::count(std::int64_t j, double u, double v) const {
  if (j < 1 || j > m_) throw std::out_of_range("estimator: block index");
  const std::int64_t qu = checked_level(u);
  const std::int64_t qv = checked_level(v);
  return prefix_[j - 1][qu * (q_cap_ + 1) + qv];
}

double BlockTable::rhat(std::int64_t j, double u, double v) const {
  return static_cast<double>(count(j, u, v)) / kh();
}

double BlockTable::average_at(double u, double v) const {
  const double h = params_.h_value();
  double sum = 0.0;
  for (std::int64_t j = 1; j <= m_; ++j) sum += rhat(j, u, v);
  double value = h * sum;
  if (!params_.mh_is_one()) {
    const double mh = params_.knot(m_);
    value += (1.0 - mh) * rhat(m_, u, v);
  }
  return value;
}

namespace {

TailSurface window_surface(const double* x, const double* y, std::int64_t nh,
                           const TuningParams& params, const std::vector<double>& u_pts,
                           const std::vector<double>& v_pts, Provenance prov) {
  const double kh = params.kh();
  std::int64_t q_max = 0;
  auto level_checked = [&](double coord) {
    const std::int64_t q = params.level(coord);
    if (q > nh - 1)
      throw std::out_of_range("estimator: order-statistic index out of range (floor(khu)=" +
                              std::to_string(q) + ", nh=" + std::to_string(nh) + ")");
    return q;
  };
  std::vector<std::int64_t> qu(u_pts.size()), qv(v_pts.size());
  for (std::size_t i = 0; i < u_pts.size(); ++i) {
    qu[i] = level_checked(u_pts[i]);
    q_max = std::max(q_max, qu[i]);
  }
  for (std::size_t i = 0; i < v_pts.size(); ++i) {
    qv[i] = level_checked(v_pts[i]);
    q_max = std::max(q_max, qv[i]);
  }

  const std::vector<std::int32_t> table = dominance_prefix(x, y, nh, q_max);
  const std::int64_t w = q_max + 1;
  TailSurface surf(u_pts, v_pts, prov);
  for (std::size_t iu = 0; iu < u_pts.size(); ++iu) {
    for (std::size_t iv = 0; iv < v_pts.size(); ++iv)
      surf.set(iu, iv, static_cast<double>(table[qu[iu] * w + qv[iv]]) / kh);
    surf.set_u_border(iu, static_cast<double>(qu[iu]) / kh);
  }
  for (std::size_t iv = 0; iv < v_pts.size(); ++iv)
    surf.set_v_border(iv, static_cast<double>(qv[iv]) / kh);
  return surf;
}

}  // namespace

TailSurface local_tail_copula(const BivariateSample& sample, const TuningParams& params,
                              double s, const std::vector<double>& u_pts,
                              const std::vector<double>& v_pts) {
  const std::int64_t n = static_cast<std::int64_t>(sample.n());
  params.require_valid(n);
  const std::int64_t nh = params.nh(n);
  const double half_h = params.h_value() / 2.0;
  if (s < half_h - 1e-9 || s > 1.0 - half_h + 1e-9)
    throw std::invalid_argument("estimator: s outside [h/2, 1-h/2]");
  // window = { i : s - h/2 < i/n <= s + h/2 }, 0-based offset
  const std::int64_t offset = index_floor(static_cast<double>(n) * s -
                                          static_cast<double>(nh) / 2.0);
  if (offset < 0 || offset + nh > n)
    throw std::invalid_argument("estimator: window does not fit the sample");
  return window_surface(sample.x().data() + offset, sample.y().data() + offset, nh,
                        params, u_pts, v_pts, Provenance::empirical_local);
}

std::int64_t block_of(const TuningParams& params, double s) {
  if (s <= 0.0 || s > 1.0 + 1e-12)
    throw std::invalid_argument("estimator: s must lie in (0,1]");
  const double s_over_h =
      s * static_cast<double>(params.h.den) / static_cast<double>(params.h.num);
  return std::min<std::int64_t>(std::max<std::int64_t>(index_ceil(s_over_h), 1), params.m());
}

TailSurface piecewise_r_tilde(const BivariateSample& sample, const TuningParams& params,
                              const std::vector<double>& u_pts,
                              const std::vector<double>& v_pts, double s) {
  const std::int64_t j = block_of(params, s);
  return local_tail_copula(sample, params, params.block_midpoint(j), u_pts, v_pts);
}

IntegratedCurve integrated_estimator(const BlockTable& blocks, const EvalGrid& grid) {
  const TuningParams& params = blocks.params();
  grid.check(params.T);
  const std::size_t nu = grid.u.size(), nv = grid.v.size();
  const std::int64_t m = blocks.num_blocks();
  const double h = params.h_value();

  // Block planes and their running prefix sums, computed once.
  std::vector<std::vector<double>> plane(m + 1), pre(m + 1);
  pre[0].assign(nu * nv, 0.0);
  for (std::int64_t j = 1; j <= m; ++j) {
    plane[j].resize(nu * nv);
    pre[j].resize(nu * nv);
    for (std::size_t iu = 0; iu < nu; ++iu)
      for (std::size_t iv = 0; iv < nv; ++iv) {
        const double r = blocks.rhat(j, grid.u[iu], grid.v[iv]);
        plane[j][iu * nv + iv] = r;
        pre[j][iu * nv + iv] = pre[j - 1][iu * nv + iv] + r;
      }
  }

  std::vector<double> knots;
  knots.push_back(0.0);
  for (std::int64_t j = 1; j <= m; ++j) knots.push_back(params.knot(j));
  if (!params.mh_is_one()) knots.push_back(1.0);

  IntegratedCurve curve(grid, std::move(knots));
  const double mh = params.knot(m);
  for (std::size_t is = 0; is < grid.s.size(); ++is) {
    const double s = grid.s[is];
    if (s > mh + 1e-9) {
      // constant last block extrapolates the curve linearly past mh
      const double excess = s - mh;
      for (std::size_t i = 0; i < nu * nv; ++i)
        curve.set(is, i / nv, i % nv, h * pre[m][i] + excess * plane[m][i]);
      continue;
    }
    const std::int64_t j = block_of(params, s);
    const double width = s - params.knot(j - 1);
    if (std::fabs(width - h) <= 1e-9) {
      // s is the right knot of block j: the block enters with full weight
      for (std::size_t i = 0; i < nu * nv; ++i)
        curve.set(is, i / nv, i % nv, h * pre[j][i]);
    } else {
      for (std::size_t i = 0; i < nu * nv; ++i)
        curve.set(is, i / nv, i % nv, h * pre[j - 1][i] + width * plane[j][i]);
    }
  }
  return curve;
}

IntegratedCurve integrated_estimator(const BivariateSample& sample,
                                     const TuningParams& params, const EvalGrid& grid) {
  const double max_coord = std::max(grid.u.back(), grid.v.back());
  BlockTable blocks(sample, params, max_coord);
  return integrated_estimator(blocks, grid);
}

TailSurface average_tail_copula(const BlockTable& blocks,
                                const std::vector<double>& u_pts,
                                const std::vector<double>& v_pts) {
  const TuningParams& params = blocks.params();
  TailSurface surf(u_pts, v_pts, Provenance::integrated_average);
  for (std::size_t iu = 0; iu < u_pts.size(); ++iu)
    for (std::size_t iv = 0; iv < v_pts.size(); ++iv)
      surf.set(iu, iv, blocks.average_at(u_pts[iu], v_pts[iv]));
  // every block has the same border floor(khu)/(kh); their average is itself
  const double kh = params.kh();
  for (std::size_t iu = 0; iu < u_pts.size(); ++iu)
    surf.set_u_border(iu, static_cast<double>(params.level(u_pts[iu])) / kh);
  for (std::size_t iv = 0; iv < v_pts.size(); ++iv)
    surf.set_v_border(iv, static_cast<double>(params.level(v_pts[iv])) / kh);
  return surf;
}

TailSurface average_tail_copula(const BivariateSample& sample, const TuningParams& params,
                                const std::vector<double>& u_pts,
                                const std::vector<double>& v_pts) {
  const double max_coord = std::max(u_pts.back(), v_pts.back());
  BlockTable blocks(sample, params, max_coord);
  return average_tail_copula(blocks, u_pts, v_pts);
}

std::vector<double> derivative_matrix(
    const std::function<double(double, double)>& surface_fn, std::int64_t k,
    int coordinate, const std::vector<double>& u_pts, const std::vector<double>& v_pts,
    double exponent) {
  if (k < 1) throw std::invalid_argument("derivative: k must be >= 1");
  if (coordinate != 1 && coordinate != 2)
    throw std::invalid_argument("derivative: coordinate must be 1 or 2");
  const double delta = std::pow(static_cast<double>(k), -exponent);
  std::vector<double> out(u_pts.size() * v_pts.size());
  for (std::size_t iu = 0; iu < u_pts.size(); ++iu) {
    for (std::size_t iv = 0; iv < v_pts.size(); ++iv) {
      const double u = u_pts[iu], v = v_pts[iv];
      const double a = coordinate == 1 ? u : v;
      const double hi = a + delta;
      const double lo = std::max(a - delta, 0.0);
      const double den = std::min(2.0 * delta, hi);
      const double num = coordinate == 1 ? surface_fn(hi, v) - surface_fn(lo, v)
                                         : surface_fn(u, hi) - surface_fn(u, lo);
      out[iu * v_pts.size() + iv] = std::clamp(num / den, 0.0, 1.0);
    }
  }
  return out;
}

TrendStats trend_statistics(const IntegratedCurve& curve, const TuningParams& params,
                            const EvalGrid& grid) {
  if (grid.u.size() != curve.grid().u.size() || grid.v.size() != curve.grid().v.size() ||
      grid.s.size() != curve.grid().s.size())
    throw std::invalid_argument("trend: grid does not match the curve");
  if (std::fabs(grid.s.back() - 1.0) > 1e-12)
    throw std::invalid_argument("trend: grid lacks s = 1");

  const RiemannRule rule = RiemannRule::from_grid(grid);
  const double sqrt_k = std::sqrt(static_cast<double>(params.k));
  const std::size_t nu = grid.u.size(), nv = grid.v.size();
  const std::size_t plane = curve.plane_size();
  const double* final_plane = curve.plane(grid.s.size() - 1);
  const bool symmetric = grid.u == grid.v;

  std::vector<double> d(plane);
  TrendStats stats;
  for (std::size_t is = 0; is < grid.s.size(); ++is) {
    const double s = grid.s[is];
    const double* p = curve.plane(is);
    for (std::size_t i = 0; i < plane; ++i) d[i] = sqrt_k * (p[i] - s * final_plane[i]);
    double mx = 0.0;
    for (std::size_t i = 0; i < plane; ++i) mx = std::max(mx, std::fabs(d[i]));
    double wss = 0.0;
    if (symmetric) {
      // diagonal first, then transpose pairs as single two-term sums; the
      // accumulation is then invariant under swapping the sample coordinates
      for (std::size_t i = 0; i < nu; ++i) {
        const std::size_t ii = i * nv + i;
        wss += d[ii] * d[ii] * rule.w_uv[ii];
      }
      for (std::size_t iu = 0; iu < nu; ++iu)
        for (std::size_t iv = iu + 1; iv < nv; ++iv) {
          const std::size_t ij = iu * nv + iv, ji = iv * nv + iu;
          wss += d[ij] * d[ij] * rule.w_uv[ij] + d[ji] * d[ji] * rule.w_uv[ji];
        }
    } else {
      for (std::size_t i = 0; i < plane; ++i) wss += d[i] * d[i] * rule.w_uv[i];
    }
    if (mx > stats.t_sup) stats.t_sup = mx;
    stats.t_cvm += rule.ds[is] * wss;
  }
  return stats;
}

}  // namespace tailtrend::est
