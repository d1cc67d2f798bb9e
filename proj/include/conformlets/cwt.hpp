#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conformlets/gyroball.hpp"
#include "conformlets/sections.hpp"
#include "conformlets/sphere.hpp"

namespace conformlets::cwt {

using cplx = std::complex<double>;
using gyro::BallPoint;
using sphere::Rotor;
using sphere::ShCoefficients;
using sphere::SphereFunction;
using sphere::SphericalSignal;

/// Mother wavelet, normalized to unit L^2 norm.
struct Wavelet {
  std::string name;
  SphereFunction psi;
};

/// exp(-T/s^2) - exp(-T/(4 s^2))/4 with T = tan^2(theta/2).
Wavelet dog_wavelet(double sigma = 0.25);
/// G - D_{t e3} G / alpha with G = exp(-T/s^2) and t = (alpha-1)/(alpha+1); its image
/// under the stereographic map has zero mean.
Wavelet dog_conformal_wavelet(double sigma = 0.25, double alpha = 2.0);
/// The constant 1/sqrt(4 pi).
Wavelet constant_wavelet();
/// Band-limited interpolant of samples.
Wavelet sampled_wavelet(const SphericalSignal& samples, std::string name = "file");
/// "dog", "dog-conformal" or "constant".
Wavelet named_wavelet(const std::string& name);

/// L^2 norm on a graded rule about e3.
double wavelet_norm(const SphereFunction& psi);

struct FamilyOptions {
  int band_limit = 8;
  int t_nodes = 32;
  double u_min = 1e-4;
  double u_max = 1e4;
  /// Rotation grid sizes; 0 selects 2L+1.
  int n_alpha = 0;
  int n_beta = 0;
  int n_gamma = 0;
  /// Rule for the wavelet coefficients <Y, D_a psi>.
  sphere::GradedOptions graded{};
};

/// psi with its dilates D_{sigma(t e3)} psi at the scale nodes, their harmonic
/// coefficients up to degree L, and the rotation grid.
class WaveletFamily {
 public:
  WaveletFamily(Wavelet psi, sections::Section sec, const FamilyOptions& opts = {});

  int band_limit() const noexcept { return options_.band_limit; }
  const FamilyOptions& options() const noexcept { return options_; }
  const Wavelet& wavelet() const noexcept { return wavelet_; }
  const sections::Section& section() const noexcept { return section_; }
  const sections::MeasureWeights& measure() const noexcept { return measure_; }
  const sphere::RotationGrid& rotations() const noexcept { return rotations_; }
  std::size_t scale_count() const noexcept { return points_.size(); }
  const BallPoint& scale_point(std::size_t k) const { return points_[k]; }
  /// <Y_l^m, D_{sigma(t_k e3)} psi>, l <= L.
  const ShCoefficients& dilated(std::size_t k) const { return dilated_[k]; }
  /// max_k | ||D_{sigma(t_k e3)} psi|| - 1 |
  double norm_defect() const noexcept { return norm_defect_; }

 private:
  Wavelet wavelet_;
  sections::Section section_;
  FamilyOptions options_;
  sections::MeasureWeights measure_;
  sphere::RotationGrid rotations_;
  std::vector<BallPoint> points_;
  std::vector<ShCoefficients> dilated_;
  double norm_defect_ = 0.0;
};

using FamilyPtr = std::shared_ptr<const WaveletFamily>;

struct AdmissibilityProfile {
  /// C(l), 0 <= l <= L.
  std::vector<double> c;
  double min = 0.0;
  double max = 0.0;
  /// Largest share of C(l) contributed by scale nodes within a decade of u_min or u_max.
  double edge_fraction = 0.0;
  std::vector<std::string> warnings;

  int band_limit() const noexcept { return static_cast<int>(c.size()) - 1; }
};

inline constexpr double kSingularThreshold = 1e-14;

/// C(l) = sum_k w_k sum_m |psi_k(l,m)|^2 / (2l+1).
AdmissibilityProfile admissibility(const WaveletFamily& fam);

/// Divides coefficient (l,m) by C(l); singular-multiplier error naming l when C(l)
/// is below kSingularThreshold.
ShCoefficients frame_inverse_apply(const AdmissibilityProfile& prof, const ShCoefficients& g);
/// Multiplies coefficient (l,m) by C(l).
ShCoefficients frame_apply(const AdmissibilityProfile& prof, const ShCoefficients& g);

enum class Path { harmonic, quadrature };

/// W(s, t) on the rotation grid times the scale nodes; values(node, k).
struct WaveletCoefficients {
  FamilyPtr family;
  Eigen::MatrixXcd values;
};

struct QuadratureOptions {
  /// Rule about the dilation axis for the direct inner products.
  sphere::GradedOptions graded{16.0, 1.0, 12, 32};
};

/// W_psi[f](s, sigma(t e3)) = <R_s D_sigma psi, f>. The harmonic path uses Wigner
/// matrices; the quadrature path evaluates the inner product directly.
WaveletCoefficients analyze(const FamilyPtr& fam, const SphericalSignal& f,
                            Path path = Path::harmonic, const QuadratureOptions& q = {});
WaveletCoefficients analyze(const FamilyPtr& fam, const ShCoefficients& f);

/// W at an arbitrary rotation and scale node from coefficients.
cplx coefficient_at(const WaveletFamily& fam, const ShCoefficients& f, const Rotor& s,
                    std::size_t k);

/// <R_s D_a psi, f> by the graded rule about a.
cplx transform_at(const SphereFunction& psi, const Rotor& s, const BallPoint& a,
                  const SphereFunction& f, const sphere::GradedOptions& opts = {});

struct Reconstruction {
  ShCoefficients coefficients;
  SphericalSignal signal;
};

/// f = sum_{s,t} w W(s,t) R_s A^{-1} D_sigma psi sampled on out (defaults to SphereGrid(L)).
Reconstruction synthesize(const AdmissibilityProfile& prof, const WaveletCoefficients& W,
                          Path path = Path::harmonic, sphere::GridPtr out = nullptr);

struct PlancherelResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double relerr = 0.0;
};

/// ||f||^2 against sum conj(W~) W with W~ built from the atoms R_s A^{-1} D_sigma psi.
PlancherelResult plancherel_check(const FamilyPtr& fam, const AdmissibilityProfile& prof,
                                  const SphericalSignal& f);

struct QuadraticForm {
  /// sum_l C(l) sum_m |f(l,m)|^2
  double multiplier = 0.0;
  /// sum_{s,t} w |W(s,t)|^2
  double direct = 0.0;
  double relerr = 0.0;
};

QuadraticForm frame_quadratic_form(const FamilyPtr& fam, const AdmissibilityProfile& prof,
                                   const SphericalSignal& f, Path path = Path::quadrature,
                                   const QuadratureOptions& q = {});

struct CovarianceResult {
  /// max |W[R_{s1} f](s,t) - W[f](conj(s1) s, t)| over sampled s and all t, Wigner domain.
  double wigner = 0.0;
  /// Same comparison on the grid when s1 is a z-rotation by a multiple of 2 pi / n_alpha;
  /// negative otherwise.
  double grid = -1.0;
};

CovarianceResult covariance_check(const FamilyPtr& fam, const SphericalSignal& f, const Rotor& s1,
                                  Path grid_path = Path::harmonic, int samples = 16,
                                  std::uint64_t seed = 1);

struct NoncovarianceResult {
  cplx lhs;
  /// W_{R_{q'} psi}[f](s, (-conj(s) b s) (+) a) with q' = (1 + (conj(s) b s) a)/|.|.
  cplx rhs;
  double residual = 0.0;
  /// |lhs - W_psi[f](s, (conj(s) b s) (+) (-a))|, the form without gyration.
  double literal_residual = 0.0;
  BallPoint image;
  /// True when the new scale point is not on the section.
  bool off_section = false;
};

/// W_psi[D_b f](s, a) for a = sigma(t e3) against the rotated-wavelet identity.
NoncovarianceResult dilation_noncovariance_check(const Wavelet& psi, const sections::Section& sec,
                                                 const SphereFunction& f, const BallPoint& b,
                                                 const Rotor& s, double t,
                                                 const sphere::GradedOptions& opts = {});

/// True when c = sigma(t' e3) for the t' of its unique decomposition.
bool on_section(const sections::Section& sec, const BallPoint& c, double tol = 1e-9);

/// ||R_s D_a f|| / ||f|| with both norms on graded rules at the concentration points.
double unitarity_ratio(const Rotor& s, const BallPoint& a, const SphereFunction& f);

}  // namespace conformlets::cwt
