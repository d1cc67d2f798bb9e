#include "conformlets/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "conformlets/error.hpp"
#include "conformlets/quadrature.hpp"

namespace conformlets::sphere {

namespace {

constexpr double kPi = std::numbers::pi;

void check_band_limit(int L) {
  if (L < 0) fail(ErrorCode::invalid_argument, "band limit must be non-negative");
}

// Normalized associated Legendre values P_l^m(cos theta) for m >= 0 (Condon-Shortley
// phase and the 1/sqrt(4 pi) factor included), stored at l(l+1)/2 + m.
void legendre_normalized(int L, double z, double st, std::vector<double>& p) {
  p.assign(static_cast<std::size_t>((L + 1) * (L + 2) / 2), 0.0);
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= L; ++m) {
    if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st;
    p[static_cast<std::size_t>(m * (m + 1) / 2 + m)] = pmm;
    if (m == L) break;
    double prev2 = pmm;
    double prev1 = std::sqrt(2.0 * m + 3.0) * z * pmm;
    p[static_cast<std::size_t>((m + 1) * (m + 2) / 2 + m)] = prev1;
    for (int l = m + 2; l <= L; ++l) {
      const double ll = static_cast<double>(l) * l;
      const double mm = static_cast<double>(m) * m;
      const double a = std::sqrt((4.0 * ll - 1.0) / (ll - mm));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - mm) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      const double cur = a * (z * prev1 - b * prev2);
      p[static_cast<std::size_t>(l * (l + 1) / 2 + m)] = cur;
      prev2 = prev1;
      prev1 = cur;
    }
  }
}

inline std::size_t tri(int l, int m) { return static_cast<std::size_t>(l * (l + 1) / 2 + m); }

struct Spherical {
  double z;
  double st;
  cplx eiphi;
};

Spherical to_spherical(const Vec3& x) {
  const double r = x.norm();
  if (r == 0.0) fail(ErrorCode::domain, "spherical harmonics need a nonzero point");
  const double st = std::hypot(x[0], x[1]) / r;
  const cplx e = st > 0.0 ? cplx(x[0], x[1]) / std::hypot(x[0], x[1]) : cplx(1.0, 0.0);
  return {std::clamp(x[2] / r, -1.0, 1.0), st, e};
}

Eigen::Matrix3d rotation_matrix(const Rotor& s) {
  if (s.dim() != 3) fail(ErrorCode::dimension_mismatch, "sphere operators need a Spin(3) rotor");
  return s.matrix();
}

Vec3 ball_vec(const BallPoint& a) {
  if (a.dim() != 3) fail(ErrorCode::dimension_mismatch, "sphere operators need a point of B^3");
  return a.vec();
}

// phi_a(x) for a, x in R^3.
Vec3 mobius3(const Vec3& a, const Vec3& x) {
  const double aa = a.squaredNorm();
  const double xx = x.squaredNorm();
  const double na = std::sqrt(aa);
  const double nx = std::sqrt(xx);
  // 1 - 2<a,x> + |a|^2|x|^2 and 1 + |x|^2 - 2<a,x> without cancellation near x = a/|a|.
  double den = 1.0;
  if (na > 0.0 && nx > 0.0) {
    den = (1.0 - na * nx) * (1.0 - na * nx) + na * nx * (a / na - x / nx).squaredNorm();
  }
  const double num = (x - a).squaredNorm() + (1.0 - aa);
  return ((1.0 - aa) * x - num * a) / den;
}

double weight3(const Vec3& a, const Vec3& x) {
  const double aa = a.squaredNorm();
  if (aa == 0.0) return 1.0;
  // |x + a|^2 equals 1 + 2<a,x> + |a|^2 on the sphere and does not cancel near x = -a/|a|.
  return (1.0 - aa) / (x.normalized() + a).squaredNorm();
}

double log_binomial_root(int two_j, int p, int q) {
  return 0.5 * (std::lgamma(two_j + 1.0) - std::lgamma(p + 1.0) - std::lgamma(q + 1.0));
}

// exp(log_coef) c^e1 s^e2 for c, s >= 0.
double power_product(double log_coef, double c, int e1, double s, int e2) {
  if (c > 0.0 && s > 0.0) return std::exp(log_coef + e1 * std::log(c) + e2 * std::log(s));
  return std::exp(log_coef) * std::pow(c, e1) * std::pow(s, e2);
}

// d^j_{m'm}(beta) for j = max(|m|, |m'|).
double wigner_seed(int j, int mp, int m, double beta) {
  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  if (mp == j) {
    const double sign = ((j - m) % 2 == 0) ? 1.0 : -1.0;
    return sign * power_product(log_binomial_root(2 * j, j + m, j - m), c, j + m, s, j - m);
  }
  if (m == j) {
    return power_product(log_binomial_root(2 * j, j + mp, j - mp), c, j + mp, s, j - mp);
  }
  if (m == -j) {
    const double sign = ((j + mp) % 2 == 0) ? 1.0 : -1.0;
    return sign * power_product(log_binomial_root(2 * j, j - mp, j + mp), c, j - mp, s, j + mp);
  }
  // mp == -j
  return power_product(log_binomial_root(2 * j, j - m, j + m), c, j - m, s, j + m);
}

// Fills out[l] = d^l_{m'm}(beta) for l0 <= l <= L.
void wigner_column(int L, int mp, int m, double beta, double* out) {
  const int l0 = std::max(std::abs(m), std::abs(mp));
  if (l0 > L) return;
  const double cb = std::cos(beta);
  double prev = 0.0;
  double cur = wigner_seed(l0, mp, m, beta);
  out[l0] = cur;
  for (int j = l0; j < L; ++j) {
    const double jj = j;
    const double j1 = jj + 1.0;
    const double lead = j1 * (2.0 * jj + 1.0) /
                        std::sqrt((j1 * j1 - m * m) * (j1 * j1 - mp * mp));
    const double shift = j == 0 ? 0.0 : static_cast<double>(m) * mp / (jj * j1);
    const double back =
        j == 0 ? 0.0
               : std::sqrt((jj * jj - m * m) * (jj * jj - mp * mp)) / (jj * (2.0 * jj + 1.0));
    const double next = lead * ((cb - shift) * cur - back * prev);
    prev = cur;
    cur = next;
    out[j + 1] = cur;
  }
}

}  // namespace

// --- grids and signals ---------------------------------------------------------

SphereGrid::SphereGrid(int band_limit, int oversample)
    : SphereGrid(band_limit, std::max(1, oversample) * (band_limit + 1),
                 std::max(1, oversample) * (2 * band_limit + 1)) {
  if (oversample < 1) fail(ErrorCode::invalid_argument, "oversample must be at least 1");
}

SphereGrid::SphereGrid(int band_limit, int n_theta, int n_phi)
    : band_limit_(band_limit), n_theta_(n_theta), n_phi_(n_phi) {
  check_band_limit(band_limit);
  if (n_theta < band_limit + 1 || n_phi < 2 * band_limit + 1) {
    fail(ErrorCode::grid_mismatch, "grid too coarse for band limit " + std::to_string(band_limit));
  }
  const QuadratureRule rule = gauss_legendre(n_theta);
  // theta ascending means cos(theta) descending
  for (int j = 0; j < n_theta; ++j) {
    const auto src = static_cast<std::size_t>(n_theta - 1 - j);
    cos_theta_.push_back(rule.nodes[src]);
    theta_weights_.push_back(rule.weights[src]);
  }
  points_.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  weights_.reserve(points_.capacity());
  const double dphi = 2.0 * kPi / n_phi;
  for (int j = 0; j < n_theta; ++j) {
    const double z = cos_theta_[static_cast<std::size_t>(j)];
    const double st = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int k = 0; k < n_phi; ++k) {
      const double ph = k * dphi;
      points_.emplace_back(st * std::cos(ph), st * std::sin(ph), z);
      weights_.push_back(theta_weights_[static_cast<std::size_t>(j)] * dphi);
    }
  }
}

double SphereGrid::phi(int k) const { return 2.0 * kPi * k / n_phi_; }

SphericalSignal::SphericalSignal(GridPtr g, Eigen::VectorXcd v)
    : grid(std::move(g)), values(std::move(v)) {
  if (!grid) fail(ErrorCode::invalid_argument, "signal needs a grid");
  if (static_cast<std::size_t>(values.size()) != grid->size()) {
    fail(ErrorCode::grid_mismatch, "sample count does not match the grid");
  }
}

SphericalSignal SphericalSignal::sample(GridPtr g, const SphereFunction& f) {
  if (!g) fail(ErrorCode::invalid_argument, "signal needs a grid");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(g->size()));
  for (std::size_t i = 0; i < g->size(); ++i) v[static_cast<Eigen::Index>(i)] = f(g->point(i));
  return SphericalSignal(std::move(g), std::move(v));
}

double SphericalSignal::norm() const { return std::sqrt(std::real(inner(*this))); }

cplx SphericalSignal::inner(const SphericalSignal& other) const {
  if (!grid->same_layout(*other.grid)) {
    fail(ErrorCode::grid_mismatch, "inner product of signals on different grids");
  }
  cplx sum = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    sum += grid->weight(i) * std::conj(values[k]) * other.values[k];
  }
  return sum;
}

ShCoefficients::ShCoefficients(int L)
    : band_limit(L), values(Eigen::VectorXcd::Zero(count(std::max(L, 0)))) {
  check_band_limit(L);
}

ShCoefficients::ShCoefficients(int L, Eigen::VectorXcd v) : band_limit(L), values(std::move(v)) {
  check_band_limit(L);
  if (values.size() != count(L)) {
    fail(ErrorCode::grid_mismatch, "coefficient count does not match band limit");
  }
}

ShCoefficients ShCoefficients::resized(int L) const {
  ShCoefficients out(L);
  const int n = count(std::min(L, band_limit));
  out.values.head(n) = values.head(n);
  return out;
}

// --- spherical harmonics -------------------------------------------------------

void sh_values(int L, const Vec3& x, std::span<cplx> out) {
  check_band_limit(L);
  if (out.size() != static_cast<std::size_t>(ShCoefficients::count(L))) {
    fail(ErrorCode::invalid_argument, "output span has the wrong size");
  }
  thread_local std::vector<double> p;
  const Spherical sp = to_spherical(x);
  legendre_normalized(L, sp.z, sp.st, p);
  cplx eim(1.0, 0.0);
  for (int m = 0; m <= L; ++m) {
    if (m > 0) eim *= sp.eiphi;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    for (int l = m; l <= L; ++l) {
      const cplx y = p[tri(l, m)] * eim;
      out[static_cast<std::size_t>(ShCoefficients::index(l, m))] = y;
      if (m > 0) out[static_cast<std::size_t>(ShCoefficients::index(l, -m))] = sign * std::conj(y);
    }
  }
}

Eigen::VectorXcd sh_values(int L, const Vec3& x) {
  Eigen::VectorXcd out(ShCoefficients::count(L));
  sh_values(L, x, std::span<cplx>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

cplx spherical_harmonic(int l, int m, const Vec3& x) {
  if (l < 0 || std::abs(m) > l) fail(ErrorCode::invalid_argument, "invalid harmonic index");
  return sh_values(l, x)[ShCoefficients::index(l, m)];
}

ShCoefficients sh_forward(const SphericalSignal& f, int L) {
  const SphereGrid& g = *f.grid;
  if (L < 0) L = g.band_limit();
  if (L > g.band_limit()) {
    fail(ErrorCode::grid_mismatch, "requested band limit exceeds the grid's band limit");
  }
  ShCoefficients c(L);
  std::vector<double> p;
  std::vector<cplx> fm(static_cast<std::size_t>(2 * L + 1));
  const double dphi = 2.0 * kPi / g.n_phi();
  for (int j = 0; j < g.n_theta(); ++j) {
    std::fill(fm.begin(), fm.end(), cplx(0.0));
    for (int k = 0; k < g.n_phi(); ++k) {
      const cplx v = f.values[static_cast<Eigen::Index>(j) * g.n_phi() + k];
      const cplx step = std::polar(1.0, -g.phi(k));
      cplx e(1.0, 0.0);
      for (int m = 0; m <= L; ++m) {
        fm[static_cast<std::size_t>(L + m)] += v * e;
        if (m > 0) fm[static_cast<std::size_t>(L - m)] += v * std::conj(e);
        e *= step;
      }
    }
    const double z = g.cos_theta(j);
    legendre_normalized(L, z, std::sqrt(std::max(0.0, 1.0 - z * z)), p);
    const double w = g.theta_weight(j) * dphi;
    for (int l = 0; l <= L; ++l) {
      for (int m = -l; m <= l; ++m) {
        const double sign = (m < 0 && (-m) % 2 == 1) ? -1.0 : 1.0;
        c(l, m) += w * sign * p[tri(l, std::abs(m))] * fm[static_cast<std::size_t>(L + m)];
      }
    }
  }
  return c;
}

SphericalSignal sh_inverse(const ShCoefficients& c, GridPtr grid) {
  if (!grid) fail(ErrorCode::invalid_argument, "inverse transform needs a grid");
  const SphereGrid& g = *grid;
  if (c.band_limit > g.band_limit()) {
    fail(ErrorCode::grid_mismatch, "coefficients exceed the grid's band limit");
  }
  const int L = c.band_limit;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(g.size()));
  std::vector<double> p;
  std::vector<cplx> fm(static_cast<std::size_t>(2 * L + 1));
  for (int j = 0; j < g.n_theta(); ++j) {
    const double z = g.cos_theta(j);
    legendre_normalized(L, z, std::sqrt(std::max(0.0, 1.0 - z * z)), p);
    for (int m = -L; m <= L; ++m) {
      const double sign = (m < 0 && (-m) % 2 == 1) ? -1.0 : 1.0;
      cplx sum = 0.0;
      for (int l = std::abs(m); l <= L; ++l) sum += sign * p[tri(l, std::abs(m))] * c(l, m);
      fm[static_cast<std::size_t>(L + m)] = sum;
    }
    for (int k = 0; k < g.n_phi(); ++k) {
      const cplx step = std::polar(1.0, g.phi(k));
      cplx e(1.0, 0.0);
      cplx sum = fm[static_cast<std::size_t>(L)];
      for (int m = 1; m <= L; ++m) {
        e *= step;
        sum += fm[static_cast<std::size_t>(L + m)] * e + fm[static_cast<std::size_t>(L - m)] * std::conj(e);
      }
      v[static_cast<Eigen::Index>(j) * g.n_phi() + k] = sum;
    }
  }
  return SphericalSignal(std::move(grid), std::move(v));
}

cplx sh_evaluate(const ShCoefficients& c, const Vec3& x) {
  thread_local std::vector<cplx> y;
  y.resize(static_cast<std::size_t>(ShCoefficients::count(c.band_limit)));
  sh_values(c.band_limit, x, y);
  cplx sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) sum += c.values[static_cast<Eigen::Index>(i)] * y[i];
  return sum;
}

SphereFunction as_function(ShCoefficients c) {
  auto shared = std::make_shared<const ShCoefficients>(std::move(c));
  return [shared](const Vec3& x) { return sh_evaluate(*shared, x); };
}

SphereFunction interpolate(const SphericalSignal& f) { return as_function(sh_forward(f)); }

// --- rotations -----------------------------------------------------------------

EulerAngles euler_from_rotor(const Rotor& s) {
  const Eigen::Matrix3d r = rotation_matrix(s);
  const double cb = std::clamp(r(2, 2), -1.0, 1.0);
  const double sb = std::hypot(r(0, 2), r(1, 2));
  EulerAngles e{0.0, std::atan2(sb, cb), 0.0};
  if (sb > 1e-12) {
    e.alpha = std::atan2(r(1, 2), r(0, 2));
    e.gamma = std::atan2(r(2, 1), -r(2, 0));
  } else if (cb > 0.0) {
    e.beta = 0.0;
    e.alpha = std::atan2(r(1, 0), r(0, 0));
  } else {
    e.beta = kPi;
    e.alpha = std::atan2(-r(1, 0), r(1, 1));
  }
  return e;
}

Rotor rotor_from_euler(const EulerAngles& e) {
  return clifford::rotor_from_plane(3, 2, 1, e.alpha) *
         clifford::rotor_from_plane(3, 1, 3, e.beta) *
         clifford::rotor_from_plane(3, 2, 1, e.gamma);
}

double wigner_d(int l, int mp, int m, double beta) {
  if (l < 0 || std::abs(m) > l || std::abs(mp) > l) {
    fail(ErrorCode::invalid_argument, "invalid Wigner index");
  }
  std::vector<double> col(static_cast<std::size_t>(l + 1), 0.0);
  wigner_column(l, mp, m, beta, col.data());
  return col[static_cast<std::size_t>(l)];
}

WignerSmallD::WignerSmallD(int L, double beta) : band_limit_(L) {
  check_band_limit(L);
  const int w = 2 * L + 1;
  table_.assign(static_cast<std::size_t>(w) * w * (L + 1), 0.0);
  for (int mp = -L; mp <= L; ++mp) {
    for (int m = -L; m <= L; ++m) {
      wigner_column(L, mp, m, beta,
                    &table_[(static_cast<std::size_t>(mp + L) * w + (m + L)) * (L + 1)]);
    }
  }
}

double WignerSmallD::operator()(int l, int mp, int m) const {
  const int w = 2 * band_limit_ + 1;
  return table_[(static_cast<std::size_t>(mp + band_limit_) * w + (m + band_limit_)) *
                    (band_limit_ + 1) +
                l];
}

cplx wigner_D(int l, int mp, int m, const EulerAngles& e) {
  return wigner_d(l, mp, m, e.beta) * std::polar(1.0, -(mp * e.alpha + m * e.gamma));
}

ShCoefficients rotate_coefficients(const Rotor& s, const ShCoefficients& c) {
  const EulerAngles e = euler_from_rotor(s);
  const int L = c.band_limit;
  const WignerSmallD d(L, e.beta);
  ShCoefficients out(L);
  for (int l = 0; l <= L; ++l) {
    for (int mp = -l; mp <= l; ++mp) {
      cplx sum = 0.0;
      for (int m = -l; m <= l; ++m) {
        sum += d(l, mp, m) * std::polar(1.0, -(mp * e.alpha + m * e.gamma)) * c(l, m);
      }
      out(l, mp) = sum;
    }
  }
  return out;
}

RotationGrid::RotationGrid(int n_alpha, int n_beta, int n_gamma)
    : n_alpha_(n_alpha), n_beta_(n_beta), n_gamma_(n_gamma) {
  if (n_alpha < 1 || n_beta < 1 || n_gamma < 1) {
    fail(ErrorCode::invalid_argument, "rotation grid sizes must be positive");
  }
  const QuadratureRule rule = gauss_legendre(n_beta);
  for (int j = 0; j < n_beta; ++j) {
    const auto src = static_cast<std::size_t>(n_beta - 1 - j);
    beta_.push_back(std::acos(std::clamp(rule.nodes[src], -1.0, 1.0)));
    weight_.push_back(0.5 * rule.weights[src] / (static_cast<double>(n_alpha) * n_gamma));
  }
}

RotationGrid RotationGrid::for_band_limit(int L) {
  check_band_limit(L);
  return RotationGrid(2 * L + 1, 2 * L + 1, 2 * L + 1);
}

int RotationGrid::exact_degree() const noexcept {
  return std::min({(n_alpha_ - 1) / 2, n_beta_ - 1, (n_gamma_ - 1) / 2});
}

double RotationGrid::alpha(int i) const { return 2.0 * kPi * i / n_alpha_; }
double RotationGrid::gamma(int k) const { return 2.0 * kPi * k / n_gamma_; }

EulerAngles RotationGrid::euler(std::size_t node) const {
  const auto k = static_cast<int>(node % static_cast<std::size_t>(n_gamma_));
  const std::size_t rest = node / static_cast<std::size_t>(n_gamma_);
  const auto i = static_cast<int>(rest % static_cast<std::size_t>(n_alpha_));
  const auto j = static_cast<int>(rest / static_cast<std::size_t>(n_alpha_));
  return {alpha(i), beta(j), gamma(k)};
}

double RotationGrid::node_weight(std::size_t node) const {
  return weight(static_cast<int>(node / (static_cast<std::size_t>(n_gamma_) * n_alpha_)));
}

// --- operators -----------------------------------------------------------------

double dilation_weight(const BallPoint& a, const Vec3& x) { return weight3(ball_vec(a), x); }

SphereFunction rotate(const Rotor& s, SphereFunction f) {
  const Eigen::Matrix3d rt = rotation_matrix(s).transpose();
  return [rt, f = std::move(f)](const Vec3& x) { return f(rt * x); };
}

SphereFunction dilate(const BallPoint& a, SphereFunction f) {
  const Vec3 av = ball_vec(a);
  return [av, f = std::move(f)](const Vec3& x) {
    return weight3(av, x) * f(mobius3(-av, x));
  };
}

SphereFunction represent(const Rotor& s, const BallPoint& a, SphereFunction f) {
  return rotate(s, dilate(a, std::move(f)));
}

SphericalSignal rotate_signal(const Rotor& s, const SphericalSignal& f) {
  return SphericalSignal::sample(f.grid, rotate(s, interpolate(f)));
}

SphericalSignal dilate_signal(const BallPoint& a, const SphericalSignal& f, GridPtr out) {
  return SphericalSignal::sample(out ? out : f.grid, dilate(a, interpolate(f)));
}

SphericalSignal represent_signal(const Rotor& s, const BallPoint& a, const SphericalSignal& f,
                                 GridPtr out) {
  return SphericalSignal::sample(out ? out : f.grid, represent(s, a, interpolate(f)));
}

// --- quadrature ----------------------------------------------------------------

cplx PointQuadrature::integrate(const SphereFunction& f) const {
  cplx sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) sum += weights[i] * f(points[i]);
  return sum;
}

double PointQuadrature::norm_squared(const SphereFunction& f) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) sum += weights[i] * std::norm(f(points[i]));
  return sum;
}

PointQuadrature grid_quadrature(const SphereGrid& grid) {
  return {grid.points(), grid.weights()};
}

PointQuadrature graded_quadrature(const Vec3& axis, const GradedOptions& opts) {
  if (opts.v_max <= 0.0 || opts.panel_width <= 0.0 || opts.nodes_per_panel < 1 ||
      opts.n_azimuth < 1) {
    fail(ErrorCode::invalid_argument, "invalid graded quadrature options");
  }
  const double len = axis.norm();
  const Vec3 c = len > 0.0 ? Vec3(axis / len) : Vec3::UnitZ();
  // orthonormal frame (u1, u2, c)
  const Vec3 helper = std::abs(c[2]) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 u1 = helper.cross(c).normalized();
  const Vec3 u2 = c.cross(u1);

  const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * opts.v_max / opts.panel_width)));
  const double width = 2.0 * opts.v_max / panels;
  const QuadratureRule rule = gauss_legendre(opts.nodes_per_panel);
  const double dphi = 2.0 * kPi / opts.n_azimuth;

  PointQuadrature q;
  q.points.reserve(static_cast<std::size_t>(panels) * opts.nodes_per_panel * opts.n_azimuth + 2);
  q.weights.reserve(q.points.capacity());
  for (int p = 0; p < panels; ++p) {
    const double mid = -opts.v_max + (p + 0.5) * width;
    for (int r = 0; r < opts.nodes_per_panel; ++r) {
      const double v = mid + 0.5 * width * rule.nodes[static_cast<std::size_t>(r)];
      const double sech = 1.0 / std::cosh(v);
      const double cos_t = -std::tanh(v);
      const double w = 0.5 * width * rule.weights[static_cast<std::size_t>(r)] * sech * sech * dphi;
      for (int k = 0; k < opts.n_azimuth; ++k) {
        const double ph = (k + 0.5) * dphi;
        q.points.push_back(sech * std::cos(ph) * u1 + sech * std::sin(ph) * u2 + cos_t * c);
        q.weights.push_back(w);
      }
    }
  }
  // polar caps beyond |v| = v_max, one node each
  const double cap = 4.0 * kPi / (1.0 + std::exp(2.0 * opts.v_max));
  q.points.push_back(c);
  q.weights.push_back(cap);
  q.points.push_back(-c);
  q.weights.push_back(cap);
  return q;
}

cplx dilated_inner(const BallPoint& a, const SphereFunction& g, const SphereFunction& f,
                   const GradedOptions& opts) {
  const Vec3 av = ball_vec(a);
  const PointQuadrature q = graded_quadrature(av, opts);
  cplx sum = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const Vec3& z = q.points[k];
    sum += q.weights[k] * weight3(-av, z) * std::conj(g(mobius3(av, z))) * f(z);
  }
  return sum;
}

ShCoefficients dilated_coefficients(const BallPoint& a, const SphereFunction& f, int L,
                                    const GradedOptions& opts) {
  check_band_limit(L);
  const Vec3 av = ball_vec(a);
  const PointQuadrature q = graded_quadrature(av, opts);
  ShCoefficients out(L);
  std::vector<cplx> y(static_cast<std::size_t>(ShCoefficients::count(L)));
  for (std::size_t k = 0; k < q.size(); ++k) {
    const Vec3& z = q.points[k];
    const cplx fz = f(z);
    if (fz == 0.0) continue;
    sh_values(L, mobius3(av, z), y);
    const cplx c = q.weights[k] * weight3(-av, z) * fz;
    for (std::size_t i = 0; i < y.size(); ++i) {
      out.values[static_cast<Eigen::Index>(i)] += std::conj(y[i]) * c;
    }
  }
  return out;
}

Eigen::MatrixXcd dilation_matrix(const BallPoint& a, int L, const GradedOptions& opts) {
  check_band_limit(L);
  const Vec3 av = ball_vec(a);
  const PointQuadrature q = graded_quadrature(av, opts);
  const auto n = static_cast<Eigen::Index>(ShCoefficients::count(L));
  const auto k_count = static_cast<Eigen::Index>(q.size());
  Eigen::MatrixXcd image(k_count, n);
  Eigen::MatrixXcd source(k_count, n);
  Eigen::VectorXcd row(n);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const Vec3& z = q.points[static_cast<std::size_t>(k)];
    const double w = q.weights[static_cast<std::size_t>(k)] * weight3(-av, z);
    sh_values(L, mobius3(av, z), std::span<cplx>(row.data(), static_cast<std::size_t>(n)));
    image.row(k) = row.transpose();
    sh_values(L, z, std::span<cplx>(row.data(), static_cast<std::size_t>(n)));
    source.row(k) = w * row.transpose();
  }
  return image.adjoint() * source;
}

double dilation_factorization_check(const BallPoint& c, const SphereFunction& f,
                                    const SphereGrid& grid) {
  const gyro::Decomposition dec = gyro::unique_decompose(c);
  const Rotor q = gyro::gyration(dec.a, dec.b);
  const SphereFunction lhs = dilate(c, f);
  const SphereFunction rhs = dilate(dec.b, dilate(dec.a, rotate(q, f)));
  const Vec3 cv = ball_vec(c);
  const double len = cv.norm();
  double worst = 0.0;
  for (const Vec3& x : grid.points()) {
    if (len > 0.0 && (x + cv / len).norm() < 1e-3) continue;
    worst = std::max(worst, std::abs(lhs(x) - rhs(x)));
  }
  return worst;
}

}  // namespace conformlets::sphere
