#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "conformlets/clifford.hpp"
#include "conformlets/gyroball.hpp"

namespace conformlets::sphere {

using Vec3 = Eigen::Vector3d;
using cplx = std::complex<double>;
using clifford::Rotor;
using gyro::BallPoint;
using SphereFunction = std::function<cplx(const Vec3&)>;

/// Gauss-Legendre nodes in cos(theta) times uniform azimuth. Node index is
/// theta-major: i = j * n_phi + k, theta ascending from the north pole.
class SphereGrid {
 public:
  /// n_theta = oversample (L+1), n_phi = oversample (2L+1).
  explicit SphereGrid(int band_limit, int oversample = 1);
  /// Rejects n_theta < L+1 or n_phi < 2L+1.
  SphereGrid(int band_limit, int n_theta, int n_phi);

  int band_limit() const noexcept { return band_limit_; }
  int n_theta() const noexcept { return n_theta_; }
  int n_phi() const noexcept { return n_phi_; }
  std::size_t size() const noexcept { return points_.size(); }

  const Vec3& point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<Vec3>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double cos_theta(int j) const { return cos_theta_[static_cast<std::size_t>(j)]; }
  double theta_weight(int j) const { return theta_weights_[static_cast<std::size_t>(j)]; }
  double phi(int k) const;

  bool same_layout(const SphereGrid& other) const noexcept {
    return n_theta_ == other.n_theta_ && n_phi_ == other.n_phi_;
  }

 private:
  int band_limit_;
  int n_theta_;
  int n_phi_;
  std::vector<double> cos_theta_;
  std::vector<double> theta_weights_;
  std::vector<Vec3> points_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

/// Complex samples on a SphereGrid; real signals carry zero imaginary parts.
struct SphericalSignal {
  GridPtr grid;
  Eigen::VectorXcd values;

  SphericalSignal(GridPtr g, Eigen::VectorXcd v);
  static SphericalSignal sample(GridPtr g, const SphereFunction& f);

  double norm() const;
  /// <this, other> = sum w conj(this) other.
  cplx inner(const SphericalSignal& other) const;
};

/// Orthonormal coefficients f(l,m), 0 <= l <= L, stored at index l^2 + l + m.
struct ShCoefficients {
  int band_limit = 0;
  Eigen::VectorXcd values;

  explicit ShCoefficients(int L);
  ShCoefficients(int L, Eigen::VectorXcd v);

  static constexpr int index(int l, int m) noexcept { return l * l + l + m; }
  static constexpr int count(int L) noexcept { return (L + 1) * (L + 1); }

  cplx& operator()(int l, int m) { return values[index(l, m)]; }
  cplx operator()(int l, int m) const { return values[index(l, m)]; }
  double norm() const { return values.norm(); }
  /// Truncates or zero-pads to a new band limit.
  ShCoefficients resized(int L) const;
};

/// All Y_l^m(x), l <= L, for a unit vector x; Condon-Shortley phase,
/// Y_l^{-m} = (-1)^m conj(Y_l^m). out.size() must be (L+1)^2.
void sh_values(int L, const Vec3& x, std::span<cplx> out);
Eigen::VectorXcd sh_values(int L, const Vec3& x);
cplx spherical_harmonic(int l, int m, const Vec3& x);

/// Quadrature projection onto degrees <= L (defaults to the grid's band limit).
ShCoefficients sh_forward(const SphericalSignal& f, int L = -1);
SphericalSignal sh_inverse(const ShCoefficients& c, GridPtr grid);
cplx sh_evaluate(const ShCoefficients& c, const Vec3& x);
SphereFunction as_function(ShCoefficients c);
/// Band-limited interpolant of a sampled signal.
SphereFunction interpolate(const SphericalSignal& f);

struct EulerAngles {
  double alpha;
  double beta;
  double gamma;
};

/// Active ZYZ convention: R = R_z(alpha) R_y(beta) R_z(gamma), beta in [0, pi].
EulerAngles euler_from_rotor(const Rotor& s);
Rotor rotor_from_euler(const EulerAngles& e);

/// d^l_{m'm}(beta), seeded in closed form at l = max(|m|,|m'|) and advanced by
/// the three-term recursion in l.
double wigner_d(int l, int mp, int m, double beta);

/// Table of d^l_{m'm}(beta) for all l <= L.
class WignerSmallD {
 public:
  WignerSmallD(int L, double beta);
  int band_limit() const noexcept { return band_limit_; }
  double operator()(int l, int mp, int m) const;

 private:
  int band_limit_;
  std::vector<double> table_;
};

/// D^l_{m'm} = exp(-i m' alpha) d^l_{m'm}(beta) exp(-i m gamma), so that
/// Y_l^m(R^{-1}x) = sum_{m'} D^l_{m'm}(R) Y_l^{m'}(x).
cplx wigner_D(int l, int mp, int m, const EulerAngles& e);

/// Coefficients of R_s f, f(x) -> f(conj(s) x s), computed with Wigner-D matrices.
ShCoefficients rotate_coefficients(const Rotor& s, const ShCoefficients& c);

/// Euler product grid on Spin(3): uniform alpha and gamma, Gauss-Legendre in
/// cos(beta). Weights sum to 1.
class RotationGrid {
 public:
  RotationGrid(int n_alpha, int n_beta, int n_gamma);
  /// (2L+1) x (2L+1) x (2L+1); exact for Wigner-D products up to degree L.
  static RotationGrid for_band_limit(int L);

  int n_alpha() const noexcept { return n_alpha_; }
  int n_beta() const noexcept { return n_beta_; }
  int n_gamma() const noexcept { return n_gamma_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n_alpha_) * n_beta_ * n_gamma_;
  }
  /// Largest degree integrated exactly by Wigner-D orthogonality.
  int exact_degree() const noexcept;

  double alpha(int i) const;
  double beta(int j) const { return beta_[static_cast<std::size_t>(j)]; }
  double gamma(int k) const;
  /// Weight of every node with beta index j.
  double weight(int j) const { return weight_[static_cast<std::size_t>(j)]; }

  /// Flat node index: (j * n_alpha + i) * n_gamma + k.
  std::size_t index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(j) * n_alpha_ + i) * n_gamma_ + k;
  }
  EulerAngles euler(std::size_t node) const;
  double node_weight(std::size_t node) const;

 private:
  int n_alpha_;
  int n_beta_;
  int n_gamma_;
  std::vector<double> beta_;
  std::vector<double> weight_;
};

/// ((1-|a|^2)/(1+2<a,x>+|a|^2))^{(n-1)/2} with n = 3.
double dilation_weight(const BallPoint& a, const Vec3& x);

/// R_s f(x) = f(conj(s) x s).
SphereFunction rotate(const Rotor& s, SphereFunction f);
/// D_a f(x) = dilation_weight(a, x) f(phi_{-a}(x)).
SphereFunction dilate(const BallPoint& a, SphereFunction f);
/// U(s,a) = R_s D_a.
SphereFunction represent(const Rotor& s, const BallPoint& a, SphereFunction f);

/// Sample-space rotation of a band-limited signal.
SphericalSignal rotate_signal(const Rotor& s, const SphericalSignal& f);
/// D_a of the band-limited interpolant, sampled on out (defaults to f's grid).
SphericalSignal dilate_signal(const BallPoint& a, const SphericalSignal& f,
                              GridPtr out = nullptr);
SphericalSignal represent_signal(const Rotor& s, const BallPoint& a, const SphericalSignal& f,
                                 GridPtr out = nullptr);

/// Point quadrature on S^2.
struct PointQuadrature {
  std::vector<Vec3> points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return points.size(); }
  cplx integrate(const SphereFunction& f) const;
  double norm_squared(const SphereFunction& f) const;
};

PointQuadrature grid_quadrature(const SphereGrid& grid);

/// Log-polar rule about an axis c: v = ln tan(theta'/2) on [-v_max, v_max] in
/// Gauss-Legendre panels, trapezoid rule in azimuth, dS = sech(v)^2 dv dphi.
/// The two caps beyond |v| = v_max are single nodes at +c and -c.
/// Resolves functions concentrated at +c or -c, including images of smooth
/// functions under phi_a with a parallel to c.
struct GradedOptions {
  double v_max = 16.0;
  double panel_width = 1.0;
  int nodes_per_panel = 14;
  int n_azimuth = 64;
};

PointQuadrature graded_quadrature(const Vec3& axis, const GradedOptions& opts = {});

/// <G, D_a F> evaluated as sum w conj(G(phi_a z)) dilation_weight(-a, z) F(z)
/// on the graded rule about a.
cplx dilated_inner(const BallPoint& a, const SphereFunction& g, const SphereFunction& f,
                   const GradedOptions& opts = {});

/// Coefficients <Y_l^m, D_a F> for l <= L.
ShCoefficients dilated_coefficients(const BallPoint& a, const SphereFunction& f, int L,
                                    const GradedOptions& opts = {});

/// Matrix <Y_{l'}^{m'}, D_a Y_l^m>, rows (l',m') and columns (l,m), degrees <= L.
Eigen::MatrixXcd dilation_matrix(const BallPoint& a, int L, const GradedOptions& opts = {});

/// Max |D_c f - D_b D_a R_q f| over the grid points, with (a, b) from the unique
/// decomposition of c and q the gyration of (a, b). Points within 1e-3 of
/// -c/|c| are skipped.
double dilation_factorization_check(const BallPoint& c, const SphereFunction& f,
                                    const SphereGrid& grid);

}  // namespace conformlets::sphere
