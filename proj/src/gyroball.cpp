#include "conformlets/gyroball.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "conformlets/error.hpp"

namespace conformlets::gyro {

using clifford::Multivector;

namespace {

void check_dims(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::dimension_mismatch, "ball points have different dimensions");
  }
}

}  // namespace

BallPoint::BallPoint(Vector v) : v_(std::move(v)) {
  if (v_.size() < 2 || v_.size() > clifford::kMaxDim) {
    fail(ErrorCode::invalid_argument, "ball dimension must be in [2, 8]");
  }
  if (!(v_.norm() < 1.0 - 1e-14)) {
    fail(ErrorCode::domain, "ball point must satisfy |v| < 1");
  }
}

BallPoint BallPoint::origin(int dim) { return BallPoint(Vector::Zero(dim)); }

Vector moebius(const Vector& a, const Vector& x) {
  check_dims(a, x);
  const double xx = x.squaredNorm();
  if (xx > (1.0 + 1e-12) * (1.0 + 1e-12)) {
    fail(ErrorCode::domain, "moebius argument outside the closed unit ball");
  }
  const double aa = a.squaredNorm();
  const double ax = a.dot(x);
  const double den = 1.0 - 2.0 * ax + aa * xx;
  return ((1.0 - aa) * x - (1.0 + xx - 2.0 * ax) * a) / den;
}

BallPoint gyro_add(const BallPoint& b, const BallPoint& a) {
  return BallPoint(moebius(-b.vec(), a.vec()));
}

Rotor gyration(const BallPoint& a, const BallPoint& b) {
  check_dims(a.vec(), b.vec());
  Multivector m = -(Multivector::vector(a.vec()) * Multivector::vector(b.vec()));
  m[0] += 1.0;
  if (m.norm() < 1e-14) fail(ErrorCode::division_by_zero, "degenerate gyration");
  return Rotor::normalized(std::move(m));
}

Vector gyrate(const BallPoint& a, const BallPoint& b, const Vector& c) {
  return gyration(a, b).apply(c);
}

double check_gyroassociativity(const BallPoint& a, const BallPoint& b, const BallPoint& c) {
  const BallPoint lhs = gyro_add(a, gyro_add(b, c));
  const BallPoint rhs = gyro_add(gyro_add(a, b), BallPoint(gyrate(a, b, c.vec())));
  return (lhs.vec() - rhs.vec()).norm();
}

BallPoint left_cancel(const BallPoint& b, const BallPoint& a) {
  return gyro_add(-b, gyro_add(b, a));
}

BallPoint right_cancel(const BallPoint& a, const BallPoint& b) {
  return gyro_add(gyro_add(a, b), BallPoint(gyrate(a, b, -b.vec())));
}

GyroGroupElement group_compose(const GyroGroupElement& g1, const GyroGroupElement& g2) {
  const BallPoint rotated(g2.s.inverse().apply(g1.a.vec()));
  const Rotor q = gyration(rotated, g2.a);
  return {g1.s * g2.s * q, gyro_add(g2.a, rotated)};
}

GyroGroupElement group_inverse(const GyroGroupElement& g) {
  return {g.s.inverse(), BallPoint(-g.s.apply(g.a.vec()))};
}

SphericalCoordinates spherical_decompose(const Vector& a) {
  const int n = static_cast<int>(a.size());
  const double r = a.norm();
  std::vector<double> angles(static_cast<std::size_t>(n - 1), 0.0);
  if (r > 0.0) {
    // u_{k+1} = |u_1..u_{k+1}| cos(theta_k)
    for (int k = n - 1; k >= 2; --k) {
      const double head = a.head(k).norm();
      angles[static_cast<std::size_t>(k - 1)] = std::atan2(head, a[k]);
    }
    double theta1 = std::atan2(a[0], a[1]);
    if (theta1 < 0.0) theta1 += 2.0 * std::numbers::pi;
    if (a[0] == 0.0 && a[1] == 0.0) theta1 = 0.0;
    angles[0] = theta1;
  }
  return {rotor_from_angles(n, angles), r, std::move(angles)};
}

Rotor rotor_from_angles(int dim, std::span<const double> angles) {
  if (static_cast<int>(angles.size()) > dim - 1) {
    fail(ErrorCode::invalid_argument, "too many rotor angles for dimension");
  }
  Rotor s = Rotor::identity(dim);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const int axis = static_cast<int>(i) + 1;
    s = s * clifford::rotor_from_plane(dim, axis, axis + 1, angles[i]);
  }
  return s;
}

double decomposition_lambda(double c_perp, double c_n) {
  const double c2 = c_perp * c_perp + c_n * c_n;
  const double root = std::sqrt(((c_n + 1) * (c_n + 1) + c_perp * c_perp) *
                                ((c_n - 1) * (c_n - 1) + c_perp * c_perp));
  return 2.0 * c_perp / (root + 1.0 - c2);
}

Decomposition unique_decompose(const BallPoint& c) {
  const int n = c.dim();
  const Vector& v = c.vec();
  const double c_n = v[n - 1];
  double c_perp = 0.0;
  Rotor s_star = Rotor::identity(n);
  if (n == 2) {
    c_perp = v[0];
  } else {
    const Vector head = v.head(n - 1);
    c_perp = head.norm();
    if (c_perp >= 1e-12) {
      const SphericalCoordinates sc = spherical_decompose(head);
      // s_1 ... s_{n-2} acts on the first n-1 axes only
      s_star = rotor_from_angles(n, sc.angles);
    }
  }
  if (std::abs(c_perp) < 1e-12) {
    return {BallPoint::origin(n), BallPoint(Vector::Unit(n, n - 1) * c_n), c_n, 0.0,
            s_star};
  }
  const double lambda = decomposition_lambda(c_perp, c_n);
  const double t = c_n / (lambda * c_perp + 1.0);
  Vector a = s_star.apply(Vector::Unit(n, n - 2) * lambda);
  a[n - 1] = 0.0;
  return {BallPoint(std::move(a)), BallPoint(Vector::Unit(n, n - 1) * t), t, lambda,
          s_star};
}

OrbitSurface orbit_sphere(int dim, double t) {
  if (!(std::abs(t) < 1.0)) fail(ErrorCode::domain, "orbit parameter must satisfy |t| < 1");
  Vector center = Vector::Zero(dim);
  if (t == 0.0) return {true, center, std::numeric_limits<double>::infinity()};
  center[dim - 1] = (1.0 + t * t) / (2.0 * t);
  return {false, center, (1.0 - t * t) / (2.0 * std::abs(t))};
}

double IntertwineResiduals::max() const {
  return std::max({rotate_inside, rotate_outside, add_left, add_both});
}

IntertwineResiduals moebius_rotor_intertwine_check(const Rotor& s, const BallPoint& a,
                                                   const Vector& x) {
  const Rotor sc = s.inverse();
  const Vector sx = s.apply(x);
  const BallPoint b(x / 2.0);
  IntertwineResiduals r{};
  r.rotate_inside = (moebius(a.vec(), sx) - s.apply(moebius(sc.apply(a.vec()), x))).norm();
  r.rotate_outside = (s.apply(moebius(a.vec(), x)) - moebius(s.apply(a.vec()), sx)).norm();
  const BallPoint sas(s.apply(a.vec()));
  r.add_left = (gyro_add(sas, b).vec() -
                s.apply(gyro_add(a, BallPoint(sc.apply(b.vec()))).vec()))
                   .norm();
  r.add_both = (s.apply(gyro_add(a, b).vec()) -
                gyro_add(sas, BallPoint(s.apply(b.vec()))).vec())
                   .norm();
  return r;
}

}  // namespace conformlets::gyro
