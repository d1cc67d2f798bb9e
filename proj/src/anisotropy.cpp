#include <algorithm>
#include <vector>

#include <Eigen/SVD>

#include "conformlets/error.hpp"
#include "conformlets/parallel.hpp"
#include "conformlets/quadrature.hpp"
#include "conformlets/sections.hpp"
#include "conformlets/sphere.hpp"

namespace conformlets::sections {

namespace {

// Block-diagonal Wigner-D matrix acting on coefficient vectors.
Eigen::MatrixXcd rotation_matrix(const clifford::Rotor& q, int L) {
  const sphere::EulerAngles e = sphere::euler_from_rotor(q);
  const int n = sphere::ShCoefficients::count(L);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int l = 0; l <= L; ++l) {
    for (int mp = -l; mp <= l; ++mp) {
      for (int k = -l; k <= l; ++k) {
        m(sphere::ShCoefficients::index(l, mp), sphere::ShCoefficients::index(l, k)) =
            sphere::wigner_D(l, mp, k, e);
      }
    }
  }
  return m;
}

}  // namespace

AnisotropyEstimate anisotropy_estimate(const Section& sec, int band_limit, int t_nodes) {
  if (band_limit < 1) fail(ErrorCode::invalid_argument, "anisotropy needs band limit >= 1");
  if (t_nodes < 1) fail(ErrorCode::invalid_argument, "anisotropy needs at least one t node");
  const QuadratureRule rule = gauss_legendre(t_nodes, -1.0, 1.0);
  const int n = sphere::ShCoefficients::count(band_limit);
  // the rule is coaxial with a, so azimuthal integrands have degree <= 2L
  sphere::GradedOptions opts;
  opts.n_azimuth = 2 * band_limit + 2;
  std::vector<double> norms(rule.nodes.size(), 0.0);
  parallel_for(rule.nodes.size(), [&](std::size_t k) {
    const double t = rule.nodes[k];
    const double g = sec.g(t);
    if (g == 0.0) return;
    gyro::Vector av = gyro::Vector::Zero(3);
    av[1] = g;
    gyro::Vector bv = gyro::Vector::Zero(3);
    bv[2] = t;
    const gyro::BallPoint a(av);
    const gyro::BallPoint b(bv);
    const clifford::Rotor q = gyro::gyration(a, b);
    const Eigen::MatrixXcd op = sphere::dilation_matrix(a, band_limit, opts) *
                                    rotation_matrix(q, band_limit) -
                                Eigen::MatrixXcd::Identity(n, n);
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(op);
    norms[k] = svd.singularValues()[0];
  });
  double value = 0.0;
  for (std::size_t k = 0; k < norms.size(); ++k) value += rule.weights[k] * norms[k];
  return {value, band_limit};
}

}  // namespace conformlets::sections
