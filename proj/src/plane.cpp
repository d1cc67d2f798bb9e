#include "conformlets/plane.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "conformlets/error.hpp"

namespace conformlets::plane {

namespace {

Multivector embed(const Vector& y, int dim) {
  Vector padded = Vector::Zero(dim);
  padded.head(y.size()) = y;
  return Multivector::vector(padded);
}

Multivector unit_vector(int dim, int axis) {
  return Multivector::blade(dim, std::uint32_t{1} << (axis - 1));
}

double norm_squared(const Multivector& x) {
  const double n = x.norm();
  return n * n;
}

double max_abs_diff(const Multivector& a, const Multivector& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  }
  return worst;
}

void check_clifford_group(const Multivector& x, double tol, const char* what) {
  const Multivector nn = x * clifford::conjugate(x);
  if (nn.off_grade_norm(0) > tol * std::max(1.0, nn.norm())) {
    fail(ErrorCode::invalid_matrix, std::string(what) + " is not in the Clifford group");
  }
}

void check_vector(const Multivector& x, double tol, double scale, const char* what) {
  if (x.off_grade_norm(1) > tol * std::max(1.0, scale)) {
    fail(ErrorCode::invalid_matrix, std::string(what) + " is not a vector");
  }
}

}  // namespace

ExtendedPoint stereo(const Vector& x) {
  const int n = static_cast<int>(x.size());
  if (n < 2) fail(ErrorCode::invalid_argument, "stereographic projection needs n >= 2");
  const double den = 1.0 + x[n - 1];
  if (den <= 0.0) return ExtendedPoint::infinity(n - 1);
  return {2.0 * x.head(n - 1) / den, false};
}

ExtendedPoint stereo_cayley(const Vector& x) {
  const int n = static_cast<int>(x.size());
  if (n < 2) fail(ErrorCode::invalid_argument, "stereographic projection needs n >= 2");
  if (1.0 + x[n - 1] <= 0.0) return ExtendedPoint::infinity(n - 1);
  const Multivector X = Multivector::vector(x);
  const Multivector en = unit_vector(n, n);
  const Multivector one = Multivector::scalar(n, 1.0);
  const Multivector y = 2.0 * (X - en) * clifford_group_inverse(one - en * X);
  return {y.vector_part().head(n - 1), false};
}

Vector stereo_inv(const Vector& y) {
  const int m = static_cast<int>(y.size());
  const double yy = y.squaredNorm();
  Vector x(m + 1);
  x.head(m) = 4.0 * y / (4.0 + yy);
  x[m] = (4.0 - yy) / (4.0 + yy);
  return x;
}

Vector stereo_inv(const ExtendedPoint& y) {
  if (y.at_infinity) {
    Vector x = Vector::Zero(y.y.size() + 1);
    x[y.y.size()] = -1.0;
    return x;
  }
  return stereo_inv(y.y);
}

Vector cayley(const Vector& x) {
  const int n = static_cast<int>(x.size());
  if (n < 2) fail(ErrorCode::invalid_argument, "Cayley transform needs n >= 2");
  const Multivector X = Multivector::vector(x);
  const Multivector en = unit_vector(n, n);
  const Multivector one = Multivector::scalar(n, 1.0);
  return ((X + en) * clifford_group_inverse(one + en * X)).vector_part();
}

Multivector clifford_group_inverse(const Multivector& x, double tol) {
  const Multivector xbar = clifford::conjugate(x);
  const Multivector nn = x * xbar;
  const double s = nn.scalar_part();
  if (!(s > 0.0) || nn.off_grade_norm(0) > tol * s) {
    fail(ErrorCode::invalid_matrix, "element has no Clifford-group inverse");
  }
  return xbar * (1.0 / s);
}

VahlenMatrix::VahlenMatrix(Multivector u, Multivector v, Multivector w, Multivector z, double tol)
    : u_(std::move(u)), v_(std::move(v)), w_(std::move(w)), z_(std::move(z)), lambda_(0.0) {
  const int m = u_.dim();
  if (v_.dim() != m || w_.dim() != m || z_.dim() != m) {
    fail(ErrorCode::dimension_mismatch, "Vahlen entries must share one algebra");
  }
  check_clifford_group(u_, tol, "u");
  check_clifford_group(v_, tol, "v");
  check_clifford_group(w_, tol, "w");
  check_clifford_group(z_, tol, "z");
  using clifford::reverse;
  check_vector(u_ * reverse(v_), tol, u_.norm() * v_.norm(), "u v*");
  check_vector(w_ * reverse(z_), tol, w_.norm() * z_.norm(), "w z*");
  check_vector(reverse(w_) * u_, tol, w_.norm() * u_.norm(), "w* u");
  check_vector(reverse(z_) * v_, tol, z_.norm() * v_.norm(), "z* v");
  const Multivector det = u_ * reverse(z_) - v_ * reverse(w_);
  const double scale = std::max(1.0, u_.norm() * z_.norm() + v_.norm() * w_.norm());
  if (det.off_grade_norm(0) > tol * scale) {
    fail(ErrorCode::invalid_matrix, "pseudodeterminant is not real");
  }
  lambda_ = det.scalar_part();
  if (std::abs(lambda_) <= tol * scale) {
    fail(ErrorCode::invalid_matrix, "pseudodeterminant vanishes");
  }
}

VahlenMatrix VahlenMatrix::identity(int m) {
  return VahlenMatrix(Multivector::scalar(m, 1.0), Multivector(m), Multivector(m),
                      Multivector::scalar(m, 1.0));
}

ExtendedPoint VahlenMatrix::apply(const ExtendedPoint& y) const {
  const int m = dim();
  if (y.at_infinity) {
    if (w_.norm() == 0.0) return ExtendedPoint::infinity(m);
    return {(u_ * clifford_group_inverse(w_)).vector_part(), false};
  }
  if (y.y.size() != m) fail(ErrorCode::dimension_mismatch, "point dimension does not match matrix");
  const Multivector Y = Multivector::vector(y.y);
  const Multivector den = w_ * Y + z_;
  if (den.norm() == 0.0) return ExtendedPoint::infinity(m);
  return {((u_ * Y + v_) * clifford_group_inverse(den)).vector_part(), false};
}

VahlenMatrix VahlenMatrix::inverse() const {
  using clifford::reverse;
  const double k = 1.0 / lambda_;
  return VahlenMatrix(reverse(z_) * k, -reverse(v_) * k, -reverse(w_) * k, reverse(u_) * k, 1e-10);
}

VahlenMatrix VahlenMatrix::operator*(const VahlenMatrix& o) const {
  return VahlenMatrix(u_ * o.u_ + v_ * o.w_, u_ * o.v_ + v_ * o.z_, w_ * o.u_ + z_ * o.w_,
                      w_ * o.v_ + z_ * o.z_, 1e-10);
}

double VahlenMatrix::distance(const VahlenMatrix& o) const {
  if (o.dim() != dim()) fail(ErrorCode::dimension_mismatch, "Vahlen matrices differ in dimension");
  return std::max({max_abs_diff(u_, o.u_), max_abs_diff(v_, o.v_), max_abs_diff(w_, o.w_),
                   max_abs_diff(z_, o.z_)});
}

VahlenMatrix project_moebius(const gyro::BallPoint& a) {
  const int n = a.dim();
  const int m = n - 1;
  const Vector& av = a.vec();
  const double an = av[n - 1];
  const double s = std::sqrt(1.0 - av.squaredNorm());
  const Vector perp = av.head(m);
  return VahlenMatrix(Multivector::scalar(m, (1.0 + an) / s), Multivector::vector(-2.0 * perp / s),
                      Multivector::vector(perp / (2.0 * s)),
                      Multivector::scalar(m, (1.0 - an) / s), 1e-10);
}

Iwasawa iwasawa(const VahlenMatrix& mat) {
  if (std::abs(mat.pseudodeterminant() - 1.0) > 1e-10) {
    fail(ErrorCode::invalid_matrix, "Iwasawa decomposition needs pseudodeterminant 1");
  }
  const double uu = norm_squared(mat.u());
  const double ww = norm_squared(mat.w());
  if (uu == 0.0 && ww == 0.0) {
    fail(ErrorCode::invalid_matrix, "Iwasawa decomposition needs u or w nonzero");
  }
  using clifford::conjugate;
  Iwasawa p{Multivector(mat.dim()), Multivector(mat.dim()), 0.0, Multivector(mat.dim())};
  p.delta = 1.0 / (uu + ww);
  const double root = std::sqrt(p.delta);
  p.alpha = mat.u() * root;
  p.beta = -conjugate(mat.w()) * root;
  if (uu > 0.0) {
    p.xi = clifford_group_inverse(mat.u()) * (mat.v() + conjugate(mat.w()) * p.delta);
  } else {
    p.xi = clifford_group_inverse(mat.w()) * (mat.z() - conjugate(mat.u()) * p.delta);
  }
  return p;
}

VahlenMatrix iwasawa_compose(const Iwasawa& p) {
  using clifford::conjugate;
  const double lo = 1.0 / std::sqrt(p.delta);
  const double hi = std::sqrt(p.delta);
  const Multivector u = p.alpha * lo;
  const Multivector w = -conjugate(p.beta) * lo;
  return VahlenMatrix(u, u * p.xi + p.beta * hi, w, w * p.xi + conjugate(p.alpha) * hi, 1e-10);
}

PlanarGrid::PlanarGrid(sphere::GridPtr grid) : sphere(std::move(grid)) {
  if (!sphere) fail(ErrorCode::invalid_argument, "planar grid needs a sphere grid");
  points.reserve(sphere->size());
  weights.reserve(sphere->size());
  for (std::size_t i = 0; i < sphere->size(); ++i) {
    const Vector x = sphere->point(i);
    const ExtendedPoint y = stereo(x);
    if (y.at_infinity) fail(ErrorCode::grid_mismatch, "grid contains the south pole");
    const double scale = (4.0 + y.y.squaredNorm()) / 4.0;
    points.push_back(y.y);
    weights.push_back(sphere->weight(i) * scale * scale);
  }
}

double PlanarSignal::norm() const { return std::sqrt(std::abs(inner(*this).real())); }

cplx PlanarSignal::inner(const PlanarSignal& other) const {
  if (!grid || !other.grid || !grid->sphere->same_layout(*other.grid->sphere)) {
    fail(ErrorCode::grid_mismatch, "planar signals live on different grids");
  }
  cplx sum = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    sum += grid->weights[i] * std::conj(values[static_cast<Eigen::Index>(i)]) *
           other.values[static_cast<Eigen::Index>(i)];
  }
  return sum;
}

double theta_weight(const Vector& y) {
  return std::pow(4.0 / (4.0 + y.squaredNorm()), 0.5 * static_cast<double>(y.size()));
}

PlaneFunction theta(sphere::SphereFunction f) {
  return [f = std::move(f)](const Vector& y) {
    return theta_weight(y) * f(sphere::Vec3(stereo_inv(y)));
  };
}

sphere::SphereFunction theta_inv(PlaneFunction F) {
  return [F = std::move(F)](const sphere::Vec3& x) {
    const ExtendedPoint y = stereo(Vector(x));
    if (y.at_infinity) return cplx(0.0);
    return F(y.y) / theta_weight(y.y);
  };
}

PlanarSignal theta(const sphere::SphericalSignal& f) {
  auto grid = std::make_shared<const PlanarGrid>(f.grid);
  Eigen::VectorXcd values(f.values.size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    values[k] = theta_weight(grid->points[i]) * f.values[k];
  }
  return {std::move(grid), std::move(values)};
}

sphere::SphericalSignal theta_inv(const PlanarSignal& F) {
  if (!F.grid) fail(ErrorCode::invalid_argument, "planar signal needs a grid");
  Eigen::VectorXcd values(F.values.size());
  for (std::size_t i = 0; i < F.grid->size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    values[k] = F.values[k] / theta_weight(F.grid->points[i]);
  }
  return sphere::SphericalSignal(F.grid->sphere, std::move(values));
}

cplx planar_integral(const PlanarGrid& grid, const PlaneFunction& F) {
  cplx sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) sum += grid.weights[i] * F(grid.points[i]);
  return sum;
}

PlaneFunction rotate_RS(const Multivector& alpha, const Multivector& beta, PlaneFunction F) {
  if (alpha.dim() != beta.dim()) fail(ErrorCode::dimension_mismatch, "alpha and beta differ in dimension");
  using clifford::conjugate;
  return [alpha, beta, beta_bar = conjugate(beta), alpha_bar = conjugate(alpha),
          F = std::move(F)](const Vector& y) {
    const int m = alpha.dim();
    const Multivector Y = embed(y, m);
    const double den = norm_squared(-beta * conjugate(Y) + alpha);
    const Multivector q = -beta_bar * Y + alpha_bar;
    if (den == 0.0 || q.norm() == 0.0) return cplx(0.0);
    const Vector arg = ((alpha * Y + beta) * clifford_group_inverse(q)).vector_part();
    return std::pow(1.0 / den, 0.5 * static_cast<double>(y.size())) * F(arg.head(y.size()));
  };
}

PlaneFunction dilate_D(double delta, PlaneFunction F) {
  if (!(delta > 0.0)) fail(ErrorCode::domain, "dilation parameter must be positive");
  return [delta, F = std::move(F)](const Vector& y) {
    return std::pow(delta, -0.5 * static_cast<double>(y.size())) * F(y / delta);
  };
}

PlaneFunction translate_T(const Vector& xi, PlaneFunction F) {
  return [xi, F = std::move(F)](const Vector& y) {
    if (y.size() != xi.size()) fail(ErrorCode::dimension_mismatch, "translation dimension mismatch");
    return F(y + xi);
  };
}

PlaneFunction moebius_operator(const gyro::BallPoint& a, PlaneFunction F) {
  const int n = a.dim();
  const Vector perp = a.vec().head(n - 1);
  const double an = a.vec()[n - 1];
  const double aa = a.vec().squaredNorm();
  return [perp, an, aa, inv = project_moebius(a).inverse(), F = std::move(F)](const Vector& y) {
    const int m = static_cast<int>(perp.size());
    const Multivector q =
        -Multivector::vector(perp) * embed(y, m) + Multivector::scalar(m, 2.0 * (1.0 + an));
    const double den = norm_squared(q);
    const ExtendedPoint pre = inv.apply(y);
    if (den == 0.0 || pre.at_infinity) return cplx(0.0);
    return std::pow(4.0 * (1.0 - aa) / den, 0.5 * m) * F(pre.y);
  };
}

IntertwineResidual intertwine_check(const gyro::BallPoint& a, const sphere::SphereFunction& psi,
                                    const PlanarGrid& grid) {
  if (a.dim() != 3) fail(ErrorCode::dimension_mismatch, "intertwining check runs on S^2");
  const VahlenMatrix vm = project_moebius(a);
  const Iwasawa iw = iwasawa(vm);
  const PlaneFunction big_psi = theta(psi);
  const PlaneFunction lhs = theta(sphere::dilate(a, psi));
  const PlaneFunction m_form = moebius_operator(a, big_psi);
  Multivector minus_beta = -iw.beta;
  const PlaneFunction factored =
      rotate_RS(iw.alpha, minus_beta,
                dilate_D(1.0 / iw.delta, translate_T(-iw.xi.vector_part(), big_psi)));

  const Multivector c1 = vm.u();
  const Multivector c3 = vm.w();
  IntertwineResidual out;
  for (const Vector& y : grid.points) {
    if ((-c3 * Multivector::vector(y) + c1).norm() < 1e-6) {
      ++out.excluded;
      continue;
    }
    ++out.samples;
    const cplx ref = lhs(y);
    out.m_form = std::max(out.m_form, std::abs(ref - m_form(y)));
    out.factored = std::max(out.factored, std::abs(ref - factored(y)));
    const ExtendedPoint direct = stereo(gyro::moebius(a, stereo_inv(y)));
    const ExtendedPoint mapped = vm.apply(y);
    if (!direct.at_infinity && !mapped.at_infinity) {
      const double scale = std::max(1.0, direct.y.norm());
      out.projection = std::max(out.projection, (direct.y - mapped.y).norm() / scale);
    }
  }
  return out;
}

}  // namespace conformlets::plane
