#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "conformlets/clifford.hpp"

namespace conformlets::gyro {

using Vector = Eigen::VectorXd;
using clifford::Rotor;

/// Point of the open unit ball B^n (2 <= n <= 8).
class BallPoint {
 public:
  /// Rejects |v| >= 1 - 1e-14.
  explicit BallPoint(Vector v);
  static BallPoint origin(int dim);

  const Vector& vec() const noexcept { return v_; }
  int dim() const noexcept { return static_cast<int>(v_.size()); }
  double norm() const { return v_.norm(); }
  /// |v| > 1 - 1e-8; accepted, but the formulas lose accuracy there.
  bool near_boundary() const { return v_.norm() > 1.0 - 1e-8; }

  BallPoint operator-() const { return BallPoint(-v_); }

 private:
  Vector v_;
};

/// phi_a(x) = (x - a)(1 + a x)^{-1} in real form, for |x| <= 1.
Vector moebius(const Vector& a, const Vector& x);
inline Vector moebius(const BallPoint& a, const Vector& x) { return moebius(a.vec(), x); }

/// b (+) a = phi_{-b}(a).
BallPoint gyro_add(const BallPoint& b, const BallPoint& a);

/// q = (1 - ab)/|1 - ab|.
Rotor gyration(const BallPoint& a, const BallPoint& b);
/// gyr[a,b]c = q c conj(q).
Vector gyrate(const BallPoint& a, const BallPoint& b, const Vector& c);

/// |a(+)(b(+)c) - (a(+)b)(+)(q c conj(q))|.
double check_gyroassociativity(const BallPoint& a, const BallPoint& b, const BallPoint& c);

/// (-b) (+) (b (+) a), which equals a.
BallPoint left_cancel(const BallPoint& b, const BallPoint& a);
/// (a (+) b) (+) (q(-b)conj(q)), which equals a.
BallPoint right_cancel(const BallPoint& a, const BallPoint& b);

struct GyroGroupElement {
  Rotor s;
  BallPoint a;

  static GyroGroupElement identity(int dim) {
    return {Rotor::identity(dim), BallPoint::origin(dim)};
  }
};

/// (s1,a) x (s2,b) = (s1 s2 q, b (+) conj(s2) a s2), q = (1 - conj(s2)a s2 b)/|.|.
GyroGroupElement group_compose(const GyroGroupElement& g1, const GyroGroupElement& g2);
/// (conj(s), -s a conj(s)).
GyroGroupElement group_inverse(const GyroGroupElement& g);

/// a = s (r e_n) conj(s) with s = s_1 ... s_{n-1}, s_i = cos(theta_i/2) + e_{i+1}e_i sin(theta_i/2).
/// theta_1 in [0, 2pi), the others in [0, pi]. Undetermined angles are set to 0.
struct SphericalCoordinates {
  Rotor s;
  double r;
  std::vector<double> angles;
};

SphericalCoordinates spherical_decompose(const Vector& a);
inline SphericalCoordinates spherical_decompose(const BallPoint& a) {
  return spherical_decompose(a.vec());
}
Rotor rotor_from_angles(int dim, std::span<const double> angles);

/// c = b (+) a with a in the hyperdisc orthogonal to e_n and b = t e_n.
struct Decomposition {
  BallPoint a;
  BallPoint b;
  double t;
  double lambda;
  /// Rotation of the first n-1 axes taking lambda e_{n-1} onto a.
  Rotor s_star;
};

Decomposition unique_decompose(const BallPoint& c);

/// lambda for the planar point (c_perp e_{n-1} + c_n e_n); cancellation-free form.
double decomposition_lambda(double c_perp, double c_n);

/// Orbit of the left coset through t e_n: a sphere orthogonal to S^{n-1}, or
/// the flat hyperdisc when t = 0 (radius reported as +inf).
struct OrbitSurface {
  bool flat;
  Vector center;
  double radius;
};

OrbitSurface orbit_sphere(int dim, double t);

struct IntertwineResiduals {
  double rotate_inside;   // phi_a(s x s~) vs s phi_{s~ a s}(x) s~
  double rotate_outside;  // s phi_a(x) s~ vs phi_{s a s~}(s x s~)
  double add_left;        // (s a s~)(+)b vs s(a (+) s~ b s)s~
  double add_both;        // s(a(+)b)s~ vs (s a s~)(+)(s b s~)

  double max() const;
};

/// The gyroaddition identities are evaluated with b = x/2.
IntertwineResiduals moebius_rotor_intertwine_check(const Rotor& s, const BallPoint& a,
                                                   const Vector& x);

}  // namespace conformlets::gyro
