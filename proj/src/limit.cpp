#include "tailtrend/limit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tailtrend/kernels.hpp"
#include "tailtrend/parallel.hpp"

namespace tailtrend::limit {

namespace {
constexpr std::uint64_t kStreamBridge = 0xB1;

// Plain lower-triangular Cholesky; returns false if a pivot is not positive.
bool cholesky(std::vector<double>& a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (std::size_t t = 0; t < j; ++t) s -= a[i * n + t] * a[j * n + t];
      if (i == j) {
        if (!(s > 0.0)) return false;
        a[i * n + i] = std::sqrt(s);
      } else {
        a[i * n + j] = s / a[j * n + j];
      }
    }
    for (std::size_t j = i + 1; j < n; ++j) a[i * n + j] = 0.0;
  }
  return true;
}
}  // namespace

void PluginDerivatives::check() const {
  if (r1.size() != nu * nv || r2.size() != nu * nv)
    throw std::invalid_argument("derivatives: size does not match the grid");
  for (double x : r1)
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("derivatives: r1 outside [0,1]");
  for (double x : r2)
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("derivatives: r2 outside [0,1]");
}

GaussianFieldSpec::GaussianFieldSpec(EvalGrid grid, std::vector<double> cov,
                                     std::vector<double> chol, double jitter, int retries)
    : grid_(std::move(grid)),
      cov_(std::move(cov)),
      chol_(std::move(chol)),
      jitter_(jitter),
      retries_(retries) {}

GaussianFieldSpec build_field_spec(const TailSurface& surface, const EvalGrid& grid) {
  if (surface.u() != grid.u || surface.v() != grid.v)
    throw std::invalid_argument("field spec: surface grid does not match evaluation grid");
  surface.check();

  const std::size_t nu = grid.u.size(), nv = grid.v.size();
  const std::size_t ni = nu * nv;
  const std::size_t dim = ni + nu + nv;

  // node a: interior (iu,iv) for a < ni, u-border for a < ni+nu, else v-border
  enum Kind { kInterior, kUBorder, kVBorder };
  auto kind = [&](std::size_t a) {
    return a < ni ? kInterior : (a < ni + nu ? kUBorder : kVBorder);
  };
  auto iu_of = [&](std::size_t a) { return a < ni ? a / nv : a - ni; };
  auto iv_of = [&](std::size_t a) { return a < ni ? a % nv : a - ni - nu; };

  std::vector<double> cov(dim * dim, 0.0);
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const Kind ka = kind(a), kb = kind(b);
      double value = 0.0;
      if (ka == kInterior && kb == kInterior) {
        value = surface.at(std::min(iu_of(a), iu_of(b)), std::min(iv_of(a), iv_of(b)));
      } else if (ka == kUBorder && kb == kUBorder) {
        value = surface.u_border(std::min(iu_of(a), iu_of(b)));
      } else if (ka == kVBorder && kb == kVBorder) {
        value = surface.v_border(std::min(iv_of(a), iv_of(b)));
      } else if (ka == kUBorder && kb == kVBorder) {
        value = surface.at(iu_of(a), iv_of(b));
      } else if (ka == kVBorder && kb == kUBorder) {
        value = surface.at(iu_of(b), iv_of(a));
      } else {
        // interior vs border: the infinity coordinate drops out of the min
        const std::size_t ia = ka == kInterior ? a : b;
        const std::size_t ib = ka == kInterior ? b : a;
        if (kind(ib) == kUBorder)
          value = surface.at(std::min(iu_of(ia), iu_of(ib)), iv_of(ia));
        else
          value = surface.at(iu_of(ia), std::min(iv_of(ia), iv_of(ib)));
      }
      cov[a * dim + b] = value;
      cov[b * dim + a] = value;
    }
  }

  double trace = 0.0;
  for (std::size_t a = 0; a < dim; ++a) trace += cov[a * dim + a];
  const double base_jitter = 1e-10 * trace / static_cast<double>(dim);

  double jitter = base_jitter;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    std::vector<double> chol = cov;
    for (std::size_t a = 0; a < dim; ++a) chol[a * dim + a] += jitter;
    if (cholesky(chol, dim))
      return GaussianFieldSpec(grid, std::move(cov), std::move(chol), jitter, attempt);
    jitter *= 10.0;
  }
  throw std::runtime_error(
      "field spec: covariance factorization failed after jitter retries "
      "(is the input surface monotone?)");
}

std::vector<double> simulate_wi(const GaussianFieldSpec& spec, Rng& rng) {
  const std::size_t dim = spec.dim();
  const std::size_t ns = spec.grid().s.size();
  const double* chol = spec.chol().data();

  std::vector<double> rows(ns * dim, 0.0);
  std::vector<double> g(dim), z(dim);
  double prev_s = 0.0;
  for (std::size_t l = 0; l < ns; ++l) {
    const double ds = spec.grid().s[l] - prev_s;
    prev_s = spec.grid().s[l];
    for (std::size_t i = 0; i < dim; ++i) g[i] = rng.normal();
    for (std::size_t i = 0; i < dim; ++i) z[i] = kern::dot(chol + i * dim, g.data(), i + 1);
    double* row = rows.data() + l * dim;
    if (l > 0) std::copy_n(rows.data() + (l - 1) * dim, dim, row);
    kern::add_scaled(row, z.data(), std::sqrt(ds), dim);
  }
  return rows;
}

std::vector<double> simulate_bridge(const GaussianFieldSpec& spec,
                                    const PluginDerivatives& derivs, Rng& rng) {
  const std::size_t nu = spec.nu(), nv = spec.nv(), ni = spec.interior();
  if (derivs.nu != nu || derivs.nv != nv)
    throw std::invalid_argument("bridge: derivative grid mismatch");
  derivs.check();

  const std::vector<double> wi = simulate_wi(spec, rng);
  const std::size_t ns = spec.grid().s.size();
  const std::size_t dim = spec.dim();
  const double* w_final = wi.data() + (ns - 1) * dim;

  std::vector<double> bridge((ns + 1) * ni, 0.0);
  std::vector<double> bi(ni), bu(ni), bv(ni);
  for (std::size_t l = 0; l < ns; ++l) {
    const double s = spec.grid().s[l];
    const double* w = wi.data() + l * dim;
    for (std::size_t i = 0; i < ni; ++i) bi[i] = w[i] - s * w_final[i];
    for (std::size_t iu = 0; iu < nu; ++iu) {
      const double bub = w[ni + iu] - s * w_final[ni + iu];
      for (std::size_t iv = 0; iv < nv; ++iv) bu[iu * nv + iv] = bub;
    }
    for (std::size_t iv = 0; iv < nv; ++iv) {
      const double bvb = w[ni + nu + iv] - s * w_final[ni + nu + iv];
      for (std::size_t iu = 0; iu < nu; ++iu) bv[iu * nv + iv] = bvb;
    }
    kern::bridge_combine(bi.data(), bu.data(), bv.data(), derivs.r1.data(),
                         derivs.r2.data(), bridge.data() + (l + 1) * ni, ni);
  }
  return bridge;
}

BridgeFunctionals bridge_functionals(const std::vector<double>& bridge,
                                     const GaussianFieldSpec& spec, const RiemannRule& rule) {
  const std::size_t ni = spec.interior();
  const std::size_t ns = spec.grid().s.size();
  if (bridge.size() != (ns + 1) * ni)
    throw std::invalid_argument("bridge functionals: draw size mismatch");
  BridgeFunctionals out;
  for (std::size_t l = 0; l < ns; ++l) {
    const double* plane = bridge.data() + (l + 1) * ni;
    double mx = 0.0, wss = 0.0;
    kern::absmax_wsumsq(plane, rule.w_uv.data(), ni, &mx, &wss);
    if (mx > out.sup) out.sup = mx;
    out.cvm += rule.ds[l] * wss;
  }
  return out;
}

std::size_t quantile_index(std::size_t b_draws, double alpha) {
  if (b_draws < 1) throw std::invalid_argument("quantile: B must be >= 1");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("quantile: alpha must lie in (0,1)");
  const auto idx = static_cast<std::size_t>(
      index_ceil((1.0 - alpha) * static_cast<double>(b_draws)));
  return std::min(std::max<std::size_t>(idx, 1), b_draws);
}

CriticalValues critical_values(const GaussianFieldSpec& spec, const PluginDerivatives& derivs,
                               const RiemannRule& rule, std::int64_t b_draws, double alpha,
                               std::uint64_t seed, int threads) {
  if (b_draws < 1) throw std::invalid_argument("critical values: B must be >= 1");
  const std::size_t b = static_cast<std::size_t>(b_draws);
  std::vector<double> sups(b), cvms(b);
  parallel_for(b, threads, [&](std::size_t i) {
    Rng rng = Rng::derive(seed, {kStreamBridge, static_cast<std::uint64_t>(i)});
    const std::vector<double> draw = simulate_bridge(spec, derivs, rng);
    const BridgeFunctionals f = bridge_functionals(draw, spec, rule);
    sups[i] = f.sup;
    cvms[i] = f.cvm;
  });
  std::sort(sups.begin(), sups.end());
  std::sort(cvms.begin(), cvms.end());
  const std::size_t idx = quantile_index(b, alpha);
  return CriticalValues{sups[idx - 1], cvms[idx - 1]};
}

double sigma2_tdc_integrand(double theta, double fval) {
  const double tdc = 2.0 - std::pow(2.0, theta);
  const double r = tdc / 2.0;
  const double fr = fval * r;
  return fval * (tdc * (1.0 - 4.0 * fr + 2.0 * fr * fr) + 2.0 * fr * fr);
}

double integrated_sigma2_tdc(double theta, const std::function<double(double)>& f,
                             double s_upper) {
  if (!(theta > 0.0) || theta > 1.0)
    throw std::invalid_argument("sigma2: theta must lie in (0,1]");
  if (!(s_upper >= 0.0) || s_upper > 1.0)
    throw std::invalid_argument("sigma2: upper limit outside [0,1]");
  constexpr int panels = 1000;
  const double step = s_upper / (2.0 * panels);
  double acc = sigma2_tdc_integrand(theta, f(0.0)) +
               sigma2_tdc_integrand(theta, f(s_upper));
  for (int i = 1; i < 2 * panels; ++i) {
    const double t = step * static_cast<double>(i);
    acc += (i % 2 == 1 ? 4.0 : 2.0) * sigma2_tdc_integrand(theta, f(t));
  }
  return acc * step / 3.0;
}

double sigma2_tdc_constant(double theta) {
  if (!(theta > 0.0) || theta > 1.0)
    throw std::invalid_argument("sigma2: theta must lie in (0,1]");
  const double rho = 2.0 - std::pow(2.0, theta);
  const double r = rho / 2.0;
  return (1.0 - rho) * (rho - 2.0 * r * r);
}

TailSurface analytic_surface(const std::function<double(double, double)>& r,
                             const std::vector<double>& u_pts,
                             const std::vector<double>& v_pts) {
  TailSurface surf(u_pts, v_pts, Provenance::analytic);
  for (std::size_t iu = 0; iu < u_pts.size(); ++iu) {
    for (std::size_t iv = 0; iv < v_pts.size(); ++iv)
      surf.set(iu, iv, r(u_pts[iu], v_pts[iv]));
    surf.set_u_border(iu, u_pts[iu]);
  }
  for (std::size_t iv = 0; iv < v_pts.size(); ++iv) surf.set_v_border(iv, v_pts[iv]);
  return surf;
}

}  // namespace tailtrend::limit
