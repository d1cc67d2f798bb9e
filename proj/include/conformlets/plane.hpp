#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "conformlets/clifford.hpp"
#include "conformlets/gyroball.hpp"
#include "conformlets/sphere.hpp"

namespace conformlets::plane {

using clifford::Multivector;
using cplx = std::complex<double>;
using Vector = Eigen::VectorXd;
using PlaneFunction = std::function<cplx(const Vector&)>;

/// Point of R^m or the point at infinity.
struct ExtendedPoint {
  Vector y;
  bool at_infinity = false;

  static ExtendedPoint infinity(int m) { return {Vector::Zero(m), true}; }
};

/// Projection from the south pole onto the tangent plane at the north pole,
/// y = 2 x' / (1 + x_n). The south pole maps to infinity.
ExtendedPoint stereo(const Vector& x);
/// 2 (x - e_n)(1 - e_n x)^{-1}, evaluated with Clifford products.
ExtendedPoint stereo_cayley(const Vector& x);
/// (4y, 4 - |y|^2) / (4 + |y|^2); infinity maps to the south pole.
Vector stereo_inv(const ExtendedPoint& y);
Vector stereo_inv(const Vector& y);

/// (x + e_n)(1 + e_n x)^{-1}; maps B^n into the upper half space.
Vector cayley(const Vector& x);

/// x^{-1} = conj(x) / (x conj(x)) for an element of the Clifford group.
/// Throws invalid-matrix if x conj(x) is not a nonzero scalar.
Multivector clifford_group_inverse(const Multivector& x, double tol = 1e-10);

/// Vahlen matrix [[u, v], [w, z]] acting on R^m by y -> (u y + v)(w y + z)^{-1}.
/// Entries live in Cl(0,m).
class VahlenMatrix {
 public:
  /// Validates the Vahlen conditions; throws invalid-matrix on failure.
  VahlenMatrix(Multivector u, Multivector v, Multivector w, Multivector z, double tol = 1e-12);
  static VahlenMatrix identity(int m);

  int dim() const noexcept { return u_.dim(); }
  const Multivector& u() const noexcept { return u_; }
  const Multivector& v() const noexcept { return v_; }
  const Multivector& w() const noexcept { return w_; }
  const Multivector& z() const noexcept { return z_; }

  /// u z* - v w* with * the reversion.
  double pseudodeterminant() const noexcept { return lambda_; }

  ExtendedPoint apply(const ExtendedPoint& y) const;
  ExtendedPoint apply(const Vector& y) const { return apply(ExtendedPoint{y, false}); }
  VahlenMatrix inverse() const;
  VahlenMatrix operator*(const VahlenMatrix& other) const;

  /// Largest coefficient difference to another matrix.
  double distance(const VahlenMatrix& other) const;

 private:
  Multivector u_;
  Multivector v_;
  Multivector w_;
  Multivector z_;
  double lambda_;
};

/// Matrix of the map induced on R^{n-1} by phi_a: Phi(phi_a(x)) = M(Phi(x)).
VahlenMatrix project_moebius(const gyro::BallPoint& a);

/// [[alpha, beta], [-conj(beta), conj(alpha)]] diag(delta^{-1/2}, delta^{1/2}) [[1, xi], [0, 1]].
struct Iwasawa {
  Multivector alpha;
  Multivector beta;
  double delta;
  Multivector xi;
};

/// Requires pseudodeterminant 1 (within 1e-10) and (u, w) != (0, 0).
Iwasawa iwasawa(const VahlenMatrix& m);
VahlenMatrix iwasawa_compose(const Iwasawa& p);

/// Node-by-node image of a SphereGrid under Phi: radius 2 tan(theta/2), same azimuths.
struct PlanarGrid {
  sphere::GridPtr sphere;
  std::vector<Vector> points;
  /// Weights for r dr dphi; they equal sphere weights times ((4 + r^2)/4)^2.
  std::vector<double> weights;

  explicit PlanarGrid(sphere::GridPtr grid);
  std::size_t size() const noexcept { return points.size(); }
};

/// Samples of F on a PlanarGrid, indexed like the underlying sphere grid.
struct PlanarSignal {
  std::shared_ptr<const PlanarGrid> grid;
  Eigen::VectorXcd values;

  double norm() const;
  cplx inner(const PlanarSignal& other) const;
};

/// (4 / (4 + |y|^2))^{(n-1)/2} with n - 1 = y.size().
double theta_weight(const Vector& y);

/// F(y) = theta_weight(y) f(Phi^{-1}(y)).
PlaneFunction theta(sphere::SphereFunction f);
/// f(x) = F(Phi(x)) / theta_weight(Phi(x)); 0 at the south pole.
sphere::SphereFunction theta_inv(PlaneFunction F);

PlanarSignal theta(const sphere::SphericalSignal& f);
sphere::SphericalSignal theta_inv(const PlanarSignal& F);

/// Integral over R^m by the planar grid.
cplx planar_integral(const PlanarGrid& grid, const PlaneFunction& F);

/// |-beta conj(y) + alpha|^{-(n-1)} F((alpha y + beta)(-conj(beta) y + conj(alpha))^{-1}).
PlaneFunction rotate_RS(const Multivector& alpha, const Multivector& beta, PlaneFunction F);
/// delta^{-(n-1)/2} F(y / delta).
PlaneFunction dilate_D(double delta, PlaneFunction F);
/// F(y + xi).
PlaneFunction translate_T(const Vector& xi, PlaneFunction F);

/// Planar Moebius operator with M Theta = Theta D_a:
/// (4(1-|a|^2) / |-(a - a_n e_n) y + 2(1 + a_n)|^2)^{(n-1)/2} F(M_a^{-1}(y)).
PlaneFunction moebius_operator(const gyro::BallPoint& a, PlaneFunction F);

struct IntertwineResidual {
  /// max |Theta D_a psi - M Theta psi|
  double m_form = 0.0;
  /// max |Theta D_a psi - R^{alpha,-beta} D^{1/delta} T^{-xi} Theta psi|
  double factored = 0.0;
  /// max |Phi(phi_a(x)) - M_a(Phi(x))| / max(1, |Phi(phi_a(x))|) over the sample preimages
  double projection = 0.0;
  std::size_t samples = 0;
  std::size_t excluded = 0;
};

/// Evaluates both forms of the intertwining relation at the planar grid nodes,
/// skipping nodes with |-c_3 y + c_1| < 1e-6.
IntertwineResidual intertwine_check(const gyro::BallPoint& a, const sphere::SphereFunction& psi,
                                    const PlanarGrid& grid);

}  // namespace conformlets::plane
