#ifndef TAILTREND_ESTIMATOR_HPP
#define TAILTREND_ESTIMATOR_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "tailtrend/core.hpp"

namespace tailtrend::est {

// Rank data and dominance-count tables for all m blocks of a sample under
// fixed tuning. Building the table costs one stable sort per coordinate per
// block; every R-hat evaluation afterwards is a table lookup, so each block
// is computed once no matter how many grid points or s values are requested.
//
// Counting is rank-based: within a window, X_i exceeds the
// (nh - floor(k h u))-th ascending order statistic exactly when its
// descending rank is at most floor(k h u). Ties are broken by original index
// (stable sort), which keeps runs on tied data reproducible and preserves the
// exact marginal identity R(u, inf) = floor(k h u)/(k h).
class BlockTable {
 public:
  // max_coord bounds the u/v arguments that will ever be queried
  // (2T by default, covering the enlarged box used by derivative estimation).
  BlockTable(const BivariateSample& sample, const TuningParams& params,
             double max_coord = 0.0);

  std::int64_t num_blocks() const { return m_; }
  std::int64_t nh() const { return nh_; }
  double kh() const { return params_.kh(); }
  const TuningParams& params() const { return params_; }

  // R-hat(u, v; s_j) for the j-th block (1-based), s_j = (j - 1/2)h.
  double rhat(std::int64_t j, double u, double v) const;
  // Exceedance count behind rhat (integer, before division by kh).
  std::int64_t count(std::int64_t j, double u, double v) const;

  // Average surface value I_R-hat(u, v; 1) at an arbitrary point of the
  // admissible box; shares every block with the other evaluations.
  double average_at(double u, double v) const;

 private:
  TuningParams params_;
  std::int64_t n_ = 0;
  std::int64_t nh_ = 0;
  std::int64_t m_ = 0;
  std::int64_t q_cap_ = 0;
  // per block: inclusive dominance prefix, P[a*(q_cap+1)+b] = #{dx<a, dy<b}
  std::vector<std::vector<std::int32_t>> prefix_;

  std::int64_t checked_level(double coord) const;
};

// Local estimator R-hat(u, v; s) on the grid's (u,v) points, window centred
// at s. Borders carry the marginal identity floor(k h u)/(k h).
TailSurface local_tail_copula(const BivariateSample& sample, const TuningParams& params,
                              double s, const std::vector<double>& u_pts,
                              const std::vector<double>& v_pts);

// Piecewise-constant version: evaluates the local estimator at the midpoint
// of the block containing s, clamped to block m for s > mh.
TailSurface piecewise_r_tilde(const BivariateSample& sample, const TuningParams& params,
                              const std::vector<double>& u_pts,
                              const std::vector<double>& v_pts, double s);

// Block index j(s) = ceil(s/h) clamped to m, for s in (0,1].
std::int64_t block_of(const TuningParams& params, double s);

// Integrated estimator: exact integral of the piecewise-constant R-tilde,
// evaluated at every grid (u,v,s). Each block is computed once and reused.
IntegratedCurve integrated_estimator(const BlockTable& blocks, const EvalGrid& grid);
IntegratedCurve integrated_estimator(const BivariateSample& sample,
                                     const TuningParams& params, const EvalGrid& grid);

// Average tail copula R-hat(u,v) := I_R-hat(u,v;1) as a surface with borders.
TailSurface average_tail_copula(const BlockTable& blocks,
                                const std::vector<double>& u_pts,
                                const std::vector<double>& v_pts);
TailSurface average_tail_copula(const BivariateSample& sample, const TuningParams& params,
                                const std::vector<double>& u_pts,
                                const std::vector<double>& v_pts);

// Finite-difference estimate of the partial derivative of a surface in the
// given coordinate (1 = u, 2 = v), bandwidth k^(-exponent), clamped to [0,1].
// surface_fn must be evaluable on the enlarged box [0, 2T]^2.
std::vector<double> derivative_matrix(
    const std::function<double(double, double)>& surface_fn, std::int64_t k,
    int coordinate, const std::vector<double>& u_pts, const std::vector<double>& v_pts,
    double exponent = 0.2);

struct TrendStats {
  double t_sup = 0.0;
  double t_cvm = 0.0;
};

// sup and Cramer-von Mises statistics of sqrt(k)(I(s) - s I(1)) over the
// grid, with the shared right-endpoint Riemann rule for the CvM integral.
TrendStats trend_statistics(const IntegratedCurve& curve, const TuningParams& params,
                            const EvalGrid& grid);

}  // namespace tailtrend::est

#endif  // TAILTREND_ESTIMATOR_HPP
