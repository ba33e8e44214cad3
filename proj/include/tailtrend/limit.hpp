#ifndef TAILTREND_LIMIT_HPP
#define TAILTREND_LIMIT_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "tailtrend/core.hpp"
#include "tailtrend/rng.hpp"

namespace tailtrend::limit {

// Plug-in partial derivative estimates on the interior grid, v fastest.
struct PluginDerivatives {
  std::size_t nu = 0;
  std::size_t nv = 0;
  std::vector<double> r1;
  std::vector<double> r2;

  void check() const;  // sizes and [0,1] range
};

// Covariance specification of the limit field W_I under the null: spatial
// covariance R*(u1^u2, v1^v2) on the grid nodes plus the (u,inf)/(inf,v)
// borders, Wiener structure (s^t) in the s direction. Node layout: interior
// (iu*nv+iv), then the nu u-border nodes, then the nv v-border nodes.
class GaussianFieldSpec {
 public:
  GaussianFieldSpec(EvalGrid grid, std::vector<double> cov, std::vector<double> chol,
                    double jitter, int retries);

  const EvalGrid& grid() const { return grid_; }
  std::size_t nu() const { return grid_.u.size(); }
  std::size_t nv() const { return grid_.v.size(); }
  std::size_t interior() const { return nu() * nv(); }
  std::size_t dim() const { return interior() + nu() + nv(); }
  const std::vector<double>& cov() const { return cov_; }
  const std::vector<double>& chol() const { return chol_; }
  double jitter() const { return jitter_; }
  int retries() const { return retries_; }

 private:
  EvalGrid grid_;
  std::vector<double> cov_;
  std::vector<double> chol_;
  double jitter_ = 0.0;
  int retries_ = 0;
};

// Assembles the min-rule covariance from a plug-in surface (empirical average
// or analytic) and factorizes it, retrying with 10x jitter up to 3 times.
// The surface's grid must coincide with the evaluation grid's (u,v) part.
GaussianFieldSpec build_field_spec(const TailSurface& surface, const EvalGrid& grid);

// One W_I draw: grid.s.size() rows of dim() values, independent Gaussian
// s-increments cumulated in s. W_I(.;0) = 0 is implicit.
std::vector<double> simulate_wi(const GaussianFieldSpec& spec, Rng& rng);

// One bridge draw B-hat on the interior grid: (s.size()+1) planes of
// interior() values; plane 0 is s = 0 (identically zero) and the last plane
// (s = 1) vanishes exactly by construction.
std::vector<double> simulate_bridge(const GaussianFieldSpec& spec,
                                    const PluginDerivatives& derivs, Rng& rng);

struct BridgeFunctionals {
  double sup = 0.0;
  double cvm = 0.0;
};

// sup |B| and the Riemann-sum CvM functional of one bridge draw, with the
// same rule the test statistics use.
BridgeFunctionals bridge_functionals(const std::vector<double>& bridge,
                                     const GaussianFieldSpec& spec, const RiemannRule& rule);

// 1-based ascending order-statistic index ceil((1-alpha) B).
std::size_t quantile_index(std::size_t b_draws, double alpha);

struct CriticalValues {
  double c_sup = 0.0;
  double c_cvm = 0.0;
};

// Empirical (1-alpha) quantiles of the sup and CvM functionals over B
// simulated bridge draws. Draw b uses the substream (seed, b), so results do
// not depend on the thread count.
CriticalValues critical_values(const GaussianFieldSpec& spec, const PluginDerivatives& derivs,
                               const RiemannRule& rule, std::int64_t b_draws, double alpha,
                               std::uint64_t seed, int threads = 1);

// Integrand of the endpoint variance at mixture weight value fval:
// f [ tdc (1 - 4 f r + 2 f^2 r^2) + 2 f^2 r^2 ] with r = tdc/2.
double sigma2_tdc_integrand(double theta, double fval);

// sigma^2 up to s for the time-varying tail dependence coefficient,
// composite Simpson with 1000 panels.
double integrated_sigma2_tdc(double theta, const std::function<double(double)>& f,
                             double s_upper = 1.0);

// Constant-copula closed form (1 - rho)(rho - 2 r^2), rho = 2 - 2^theta, r = rho/2.
double sigma2_tdc_constant(double theta);

// Surface from a closed-form tail copula; borders are u and v exactly.
TailSurface analytic_surface(const std::function<double(double, double)>& r,
                             const std::vector<double>& u_pts,
                             const std::vector<double>& v_pts);

}  // namespace tailtrend::limit

#endif  // TAILTREND_LIMIT_HPP
