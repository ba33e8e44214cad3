#ifndef TAILTREND_CORE_HPP
#define TAILTREND_CORE_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tailtrend/rational.hpp"

namespace tailtrend {

// Boundary-safe integer extraction. The estimator's index arithmetic
// (floor(k*h*u), ceil(s/h), window edges) is exact in the paper's real-number
// semantics; grid points such as u = 0.3 land within ~1e-13 of the intended
// integer, on either side. The nudge keeps those on the intended value while
// leaving genuinely fractional arguments untouched.
inline std::int64_t index_floor(double x) {
  return static_cast<std::int64_t>(std::floor(x + 1e-9));
}
inline std::int64_t index_ceil(double x) {
  return static_cast<std::int64_t>(std::ceil(x - 1e-9));
}

// Time-ordered bivariate observations; index i (1-based) carries time s_i = i/n.
class BivariateSample {
 public:
  BivariateSample(std::vector<double> x, std::vector<double> y);

  std::size_t n() const { return x_.size(); }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  double kh3_over_log3n = 0.0;
  double kh4 = 0.0;
  bool ok() const { return errors.empty(); }
  std::string joined_errors() const;
};

// Tuning parameters (k, h, T). h is kept as an exact rational so that nh,
// m = floor(1/h) and the block boundaries are exact integers.
struct TuningParams {
  std::int64_t k = 0;
  Rational h{1, 10};
  double T = 1.0;

  std::int64_t nh(std::int64_t n) const { return n * h.num / h.den; }
  std::int64_t m() const { return h.den / h.num; }  // floor(1/h)
  bool mh_is_one() const { return m() * h.num == h.den; }
  double h_value() const { return h.value(); }
  // k*h evaluated as (k*num)/den in one rounding; exact whenever k*h is integer.
  double kh() const {
    return static_cast<double>(k * h.num) / static_cast<double>(h.den);
  }
  // floor(k*h*u), the exceedance level used for thresholds and borders.
  std::int64_t level(double u) const { return index_floor(kh() * u); }
  // s-coordinate of the j-th block midpoint, (j - 1/2)h.
  double block_midpoint(std::int64_t j) const {
    return static_cast<double>((2 * j - 1) * h.num) / static_cast<double>(2 * h.den);
  }
  double knot(std::int64_t j) const {
    return static_cast<double>(j * h.num) / static_cast<double>(h.den);
  }

  ValidationReport validate(std::int64_t n) const;
  // Throws std::invalid_argument listing the hard failures.
  void require_valid(std::int64_t n) const;
};

// Evaluation grid. Defaults follow the simulation design: u,v on a 0.1 step
// up to T and s on the block knots {h, 2h, ...} ending at 1.
struct EvalGrid {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> s;

  static EvalGrid defaults(const TuningParams& params);
  static EvalGrid with_uv_step(const TuningParams& params, const Rational& step);
  static std::vector<double> uv_points(const Rational& step, double T);
  static std::vector<double> s_points(const TuningParams& params);

  void check(double T) const;  // throws on invariant violations
};

enum class Provenance { empirical_local, integrated_average, analytic };

// R values on the (u,v) grid plus the marginal border row/column. The
// infinity coordinate is a reserved index (nu for the u-axis, nv for the
// v-axis), not a stored numeric coordinate.
class TailSurface {
 public:
  TailSurface(std::vector<double> u, std::vector<double> v, Provenance prov);

  std::size_t nu() const { return u_.size(); }
  std::size_t nv() const { return v_.size(); }
  const std::vector<double>& u() const { return u_; }
  const std::vector<double>& v() const { return v_; }
  Provenance provenance() const { return prov_; }

  double at(std::size_t iu, std::size_t iv) const { return values_[iu * (nv() + 1) + iv]; }
  double u_border(std::size_t iu) const { return values_[iu * (nv() + 1) + nv()]; }
  double v_border(std::size_t iv) const { return values_[nu() * (nv() + 1) + iv]; }

  void set(std::size_t iu, std::size_t iv, double val) { values_[iu * (nv() + 1) + iv] = val; }
  void set_u_border(std::size_t iu, double val) { values_[iu * (nv() + 1) + nv()] = val; }
  void set_v_border(std::size_t iv, double val) { values_[nu() * (nv() + 1) + iv] = val; }

  // Shared validator: 2-increasing-measure monotonicity along both axes
  // (borders included) and value(u,v) <= min(border_u, border_v).
  void check(double tol = 1e-12) const;

 private:
  std::vector<double> u_;
  std::vector<double> v_;
  std::vector<double> values_;
  Provenance prov_;
};

// Integrated estimator values on the grid; piecewise linear in s between the
// knots {0, h, ..., mh, 1} with value 0 at s = 0.
class IntegratedCurve {
 public:
  IntegratedCurve(EvalGrid grid, std::vector<double> knots);

  const EvalGrid& grid() const { return grid_; }
  const std::vector<double>& knots() const { return knots_; }

  double at(std::size_t is, std::size_t iu, std::size_t iv) const {
    return values_[(is * grid_.u.size() + iu) * grid_.v.size() + iv];
  }
  void set(std::size_t is, std::size_t iu, std::size_t iv, double val) {
    values_[(is * grid_.u.size() + iu) * grid_.v.size() + iv] = val;
  }
  // Contiguous (u,v)-plane for one s level.
  const double* plane(std::size_t is) const {
    return values_.data() + is * grid_.u.size() * grid_.v.size();
  }
  std::size_t plane_size() const { return grid_.u.size() * grid_.v.size(); }

 private:
  EvalGrid grid_;
  std::vector<double> knots_;
  std::vector<double> values_;
};

// Right-endpoint Riemann rule shared by the test statistics and the simulated
// critical values: cell widths are differences of consecutive grid points,
// with the first cell anchored at 0.
struct RiemannRule {
  std::vector<double> w_uv;  // du * dv per interior (u,v) node, v fastest
  std::vector<double> ds;    // ds per s level
  static RiemannRule from_grid(const EvalGrid& grid);
  static const char* name() { return "right-endpoint"; }
};

// CSV input: UTF-8, comma separated, one observation per line, optional
// single header line "x,y"; row order is time order.
BivariateSample load_sample(const std::filesystem::path& path);
void save_sample(const BivariateSample& sample, const std::filesystem::path& path);

// Shortest round-trip decimal formatting (canonical form used in all files).
std::string format_double(double v);

}  // namespace tailtrend

#endif  // TAILTREND_CORE_HPP
