#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "conformlets/gyroball.hpp"

namespace conformlets::sections {

enum class SectionFamily { fundamental, constant_lambda, sigma_c, custom };

/// Section t e_n -> t e_n (+) g(t) e_{n-1} of the scale axis, described by its
/// generating function g: (-1,1) -> (-1,1).
class Section {
 public:
  static Section fundamental();
  static Section constant_lambda(double lambda);
  static Section sigma_c(double c);
  /// g must be continuous; |g| < 1 is sample-checked on 10^4 nodes.
  static Section custom(std::function<double(double)> g, std::string name = "custom");

  /// "fundamental", "constant-lambda:<x>" or "sigma-c:<x>".
  static Section parse(std::string_view text);
  std::string spec() const;

  SectionFamily family() const noexcept { return family_; }
  double parameter() const noexcept { return parameter_; }
  bool continuous() const noexcept { return true; }
  /// True when g vanishes identically.
  bool isotropic() const noexcept;

  double g(double t) const;

 private:
  Section(SectionFamily family, double parameter, std::function<double(double)> g,
          std::string name);

  SectionFamily family_;
  double parameter_;
  std::function<double(double)> g_;
  std::string name_;
};

/// Generating function of the sigma_c family; g(0) = c and sign(g) = sign(c).
double sigma_c_generating(double c, double t);

/// Closed-form section point (0, ..., g(1-t^2)/(1+t^2g^2), t(1+g^2)/(1+t^2g^2)).
gyro::Vector section_vector(const Section& sec, double t, int dim = 3);
gyro::BallPoint section_point(const Section& sec, double t, int dim = 3);

/// 2(1-t)^{n-2}/(1+t)^n.
double measure_density(int n, double t);

/// Quadrature for integrals against the scale measure: nodes are Gauss-Legendre
/// in v = ln u on [ln u_min, ln u_max] with t = (u-1)/(u+1).
struct MeasureWeights {
  int dim = 3;
  double u_min = 1e-4;
  double u_max = 1e4;
  std::vector<double> t;
  std::vector<double> u;
  std::vector<double> weights;

  std::size_t size() const noexcept { return t.size(); }
};

MeasureWeights make_measure_weights(int n, int count, double u_min = 1e-4,
                                    double u_max = 1e4);

/// Scale index of the coset of (-a) (+) t e_n, i.e. phi_a(t e_n) projected onto the axis.
double tau(const gyro::BallPoint& a, double t);
double tau_derivative(const gyro::BallPoint& a, double t);
/// chi(a, t e_n), the density of the transported scale measure.
double radon_nikodym(const gyro::BallPoint& a, double t);
/// Upper bound of chi(a, .) valid for n = 3.
double radon_nikodym_bound(const gyro::BallPoint& a);

/// Iwasawa parameters of the Vahlen matrix of phi_{sigma(t e_n)}. beta and xi
/// are the coefficients of e_{n-1}.
struct IwasawaParams {
  double alpha;
  double beta;
  double delta;
  double xi;
};

IwasawaParams iwasawa_on_section(const Section& sec, double t);

inline const double kDeltaStarBound =
    2.0 * (3.0 - 2.0 * std::sqrt(3.0)) / (3.0 * (-2.0 + std::sqrt(3.0)));

/// delta_t (1+t)/(1-t).
double delta_star(const Section& sec, double t);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Integral over (-1,1) of |sigma(t e_n) - t e_n|^p dt; p = kInfinity gives the supremum.
double p_deviation(const Section& sec, double p);

/// |sigma(t e_n) - t e_n| = |g|(1-t^2)/sqrt(1+t^2 g^2).
double section_deviation(const Section& sec, double t);

struct AnisotropyEstimate {
  double value;
  int band_limit;
};

/// Integral over t of the largest singular value of P_L (D_{g e_{n-1}} R_q - I) P_L
/// on S^2, where q is the gyration of the section's factorization.
AnisotropyEstimate anisotropy_estimate(const Section& sec, int band_limit, int t_nodes = 24);

}  // namespace conformlets::sections
