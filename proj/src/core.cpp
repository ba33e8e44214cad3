#include "tailtrend/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace tailtrend {

BivariateSample::BivariateSample(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size())
    throw std::invalid_argument("sample: coordinate vectors differ in length");
  if (x_.empty()) throw std::invalid_argument("sample: empty input");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i]))
      throw std::invalid_argument("sample: non-finite value at row " +
                                  std::to_string(i + 1));
  }
}

std::string ValidationReport::joined_errors() const {
  std::string out;
  for (const auto& e : errors) {
    if (!out.empty()) out += "; ";
    out += e;
  }
  return out;
}

ValidationReport TuningParams::validate(std::int64_t n) const {
  ValidationReport rep;
  if (n < 1) rep.errors.push_back("n must be >= 1");
  if (k < 1) rep.errors.push_back("k must be a positive integer");
  if (!h.positive() || h.num > h.den)
    rep.errors.push_back("h must lie in (0,1], got " + h.str());
  if (!(T > 0.0)) rep.errors.push_back("T must be positive");
  if (!rep.errors.empty()) return rep;

  if ((n * h.num) % h.den != 0)
    rep.errors.push_back("nh not integer: n=" + std::to_string(n) + ", h=" + h.str());
  if (k > n) rep.errors.push_back("k exceeds n");
  if (k * h.num < h.den) rep.errors.push_back("kh < 1: k=" + std::to_string(k) + ", h=" + h.str());
  if (static_cast<double>(k) * T >= static_cast<double>(n))
    rep.errors.push_back("k*T >= n: order-statistic index out of range");
  if (!rep.errors.empty()) return rep;

  const double khv = kh();
  const double logn = std::log(static_cast<double>(n));
  rep.kh3_over_log3n = khv * h_value() * h_value() / (logn * logn * logn);
  rep.kh4 = khv * h_value() * h_value() * h_value();
  if (rep.kh3_over_log3n < 1.0)
    rep.warnings.push_back("kh^3/log^3(n) = " + format_double(rep.kh3_over_log3n) +
                           " is small; local windows may be noisy");
  if (rep.kh4 > 1.0)
    rep.warnings.push_back("kh^4 = " + format_double(rep.kh4) +
                           " is large; smoothing bias may dominate");
  return rep;
}

void TuningParams::require_valid(std::int64_t n) const {
  const ValidationReport rep = validate(n);
  if (!rep.ok()) throw std::invalid_argument("tuning: " + rep.joined_errors());
}

std::vector<double> EvalGrid::uv_points(const Rational& step, double T) {
  if (!step.positive()) throw std::invalid_argument("grid: step must be positive");
  std::vector<double> pts;
  for (std::int64_t j = 1;; ++j) {
    const double p = static_cast<double>(j * step.num) / static_cast<double>(step.den);
    if (p > T * (1.0 + 1e-12)) break;
    pts.push_back(p);
  }
  if (pts.empty()) throw std::invalid_argument("grid: step larger than T");
  return pts;
}

std::vector<double> EvalGrid::s_points(const TuningParams& params) {
  std::vector<double> pts;
  const std::int64_t m = params.m();
  for (std::int64_t j = 1; j <= m; ++j) pts.push_back(params.knot(j));
  if (!params.mh_is_one()) pts.push_back(1.0);
  return pts;
}

EvalGrid EvalGrid::defaults(const TuningParams& params) {
  return with_uv_step(params, Rational(1, 10));
}

EvalGrid EvalGrid::with_uv_step(const TuningParams& params, const Rational& step) {
  EvalGrid g;
  g.u = uv_points(step, params.T);
  g.v = g.u;
  g.s = s_points(params);
  return g;
}

void EvalGrid::check(double T) const {
  auto ascending_positive = [](const std::vector<double>& p, const char* name) {
    if (p.empty()) throw std::invalid_argument(std::string("grid: empty ") + name);
    double prev = 0.0;
    for (double x : p) {
      if (!(x > prev))
        throw std::invalid_argument(std::string("grid: ") + name +
                                    " must be strictly ascending and positive");
      prev = x;
    }
  };
  ascending_positive(u, "u points");
  ascending_positive(v, "v points");
  ascending_positive(s, "s points");
  if (u.back() > T * (1.0 + 1e-12) || v.back() > T * (1.0 + 1e-12))
    throw std::invalid_argument("grid: u/v points exceed T");
  if (std::fabs(s.back() - 1.0) > 1e-12)
    throw std::invalid_argument("grid: s points must end at 1");
}

TailSurface::TailSurface(std::vector<double> u, std::vector<double> v, Provenance prov)
    : u_(std::move(u)), v_(std::move(v)), prov_(prov) {
  if (u_.empty() || v_.empty()) throw std::invalid_argument("surface: empty grid");
  values_.assign((u_.size() + 1) * (v_.size() + 1),
                 std::numeric_limits<double>::quiet_NaN());
}

void TailSurface::check(double tol) const {
  const std::size_t mu = nu(), mv = nv();
  auto cell = [&](std::size_t iu, std::size_t iv) {
    return iu == mu ? (iv == mv ? 0.0 : v_border(iv))
                    : (iv == mv ? u_border(iu) : at(iu, iv));
  };
  for (std::size_t iu = 0; iu <= mu; ++iu) {
    for (std::size_t iv = 0; iv <= mv; ++iv) {
      if (iu == mu && iv == mv) continue;
      const double val = cell(iu, iv);
      if (!(val >= -tol)) throw std::runtime_error("surface: negative value");
      if (iu + 1 <= mu && !(iu + 1 == mu && iv == mv)) {
        if (cell(iu + 1, iv) < val - tol)
          throw std::runtime_error("surface: not nondecreasing in u");
      }
      if (iv + 1 <= mv && !(iv + 1 == mv && iu == mu)) {
        if (cell(iu, iv + 1) < val - tol)
          throw std::runtime_error("surface: not nondecreasing in v");
      }
      if (iu < mu && iv < mv) {
        if (val > std::min(u_border(iu), v_border(iv)) + tol)
          throw std::runtime_error("surface: value exceeds marginal border");
      }
    }
  }
}

IntegratedCurve::IntegratedCurve(EvalGrid grid, std::vector<double> knots)
    : grid_(std::move(grid)), knots_(std::move(knots)) {
  values_.assign(grid_.s.size() * grid_.u.size() * grid_.v.size(), 0.0);
}

RiemannRule RiemannRule::from_grid(const EvalGrid& grid) {
  RiemannRule rule;
  rule.w_uv.resize(grid.u.size() * grid.v.size());
  for (std::size_t iu = 0; iu < grid.u.size(); ++iu) {
    const double du = grid.u[iu] - (iu == 0 ? 0.0 : grid.u[iu - 1]);
    for (std::size_t iv = 0; iv < grid.v.size(); ++iv) {
      const double dv = grid.v[iv] - (iv == 0 ? 0.0 : grid.v[iv - 1]);
      rule.w_uv[iu * grid.v.size() + iv] = du * dv;
    }
  }
  rule.ds.resize(grid.s.size());
  for (std::size_t is = 0; is < grid.s.size(); ++is)
    rule.ds[is] = grid.s[is] - (is == 0 ? 0.0 : grid.s[is - 1]);
  return rule;
}

namespace {

bool parse_field(const char* begin, const char* end, double& out) {
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

}  // namespace

BivariateSample load_sample(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<double> xs, ys;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = strip(line);
    if (row.empty()) continue;
    if (first && row == "x,y") {
      first = false;
      continue;
    }
    first = false;
    const auto comma = row.find(',');
    double x = 0.0, y = 0.0;
    if (comma == std::string::npos ||
        !parse_field(row.data(), row.data() + comma, x) ||
        !parse_field(row.data() + comma + 1, row.data() + row.size(), y)) {
      throw std::runtime_error(path.string() + ": malformed row at line " +
                               std::to_string(lineno));
    }
    if (!std::isfinite(x) || !std::isfinite(y))
      throw std::runtime_error(path.string() + ": non-finite value at line " +
                               std::to_string(lineno));
    xs.push_back(x);
    ys.push_back(y);
  }
  if (xs.empty()) throw std::runtime_error(path.string() + ": empty input");
  return BivariateSample(std::move(xs), std::move(ys));
}

void save_sample(const BivariateSample& sample, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "x,y\n";
  for (std::size_t i = 0; i < sample.n(); ++i)
    out << format_double(sample.x()[i]) << ',' << format_double(sample.y()[i]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace tailtrend
