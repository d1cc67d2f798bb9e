#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/spherical_harmonic.hpp>

#include "conformlets/cwt.hpp"
#include "conformlets/error.hpp"
#include "conformlets/plane.hpp"
#include "test_util.hpp"

using namespace conformlets;
using namespace conformlets::cwt;
using sections::Section;
using sphere::Vec3;

namespace {

constexpr double kPi = std::numbers::pi;

ShCoefficients random_coefficients(int L) {
  ShCoefficients c(L);
  for (Eigen::Index i = 0; i < c.values.size(); ++i) {
    c.values[i] = {testutil::uniform(-1.0, 1.0), testutil::uniform(-1.0, 1.0)};
  }
  return c;
}

SphericalSignal signal_of(const ShCoefficients& c) {
  return sphere::sh_inverse(c, std::make_shared<const sphere::SphereGrid>(c.band_limit));
}

FamilyPtr family(const Wavelet& psi, const Section& sec, int L, int t_nodes = 32) {
  FamilyOptions o;
  o.band_limit = L;
  o.t_nodes = t_nodes;
  return std::make_shared<const WaveletFamily>(psi, sec, o);
}

BallPoint point(double x, double y, double z) {
  Eigen::VectorXd v(3);
  v << x, y, z;
  return BallPoint(v);
}

Rotor random_rotor() {
  return sphere::rotor_from_euler({testutil::uniform(0.0, 2.0 * kPi),
                                   std::acos(testutil::uniform(-1.0, 1.0)),
                                   testutil::uniform(0.0, 2.0 * kPi)});
}

double relative(const ShCoefficients& a, const ShCoefficients& b) {
  return (a.values - b.values).norm() / b.norm();
}

}  // namespace

TEST_CASE("wavelets have unit norm") {
  for (const auto& w : {dog_wavelet(), dog_conformal_wavelet(), constant_wavelet()}) {
    INFO(w.name);
    CHECK(wavelet_norm(w.psi) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(named_wavelet("dog").name == "dog");
  CHECK(named_wavelet("dog-conformal").name == "dog-conformal");
  CHECK_THROWS_AS(named_wavelet("morlet"), Error);
  CHECK_THROWS_AS(dog_wavelet(0.0), Error);
  CHECK_THROWS_AS(dog_conformal_wavelet(0.25, 1.0), Error);

  const SphericalSignal s = signal_of(random_coefficients(6));
  const Wavelet w = sampled_wavelet(s);
  CHECK(wavelet_norm(w.psi) == doctest::Approx(1.0).epsilon(1e-10));
  const SphericalSignal zero(s.grid, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.grid->size())));
  CHECK_THROWS_AS(sampled_wavelet(zero), Error);
}

TEST_CASE("conformal dog has zero planar mean") {
  const plane::PlanarGrid pg(std::make_shared<const sphere::SphereGrid>(200));
  const cplx conformal = plane::planar_integral(pg, plane::theta(dog_conformal_wavelet().psi));
  const cplx plain = plane::planar_integral(pg, plane::theta(dog_wavelet().psi));
  CHECK(std::abs(conformal) < 1e-10);
  CHECK(std::abs(plain) > 0.1);
}

TEST_CASE("family dilates keep unit norm") {
  for (const auto& sec : {Section::fundamental(), Section::constant_lambda(0.3), Section::sigma_c(0.5)}) {
    INFO(sec.spec());
    const FamilyPtr fam = family(dog_wavelet(), sec, 6);
    CHECK(fam->norm_defect() < 1e-6);
    CHECK(fam->scale_count() == 32);
    CHECK(fam->rotations().size() == 13u * 13u * 13u);
  }
}

TEST_CASE("dilated coefficients of the constant match a one-dimensional integral") {
  // D_{r e3} of a constant is zonal; <Y_l^0, D_a c> = 2 pi c int Y_l^0(z) w(z) dz.
  const FamilyPtr fam = family(constant_wavelet(), Section::fundamental(), 6, 8);
  const double c = 1.0 / std::sqrt(4.0 * kPi);
  for (std::size_t k = 0; k < fam->scale_count(); ++k) {
    const double r = fam->scale_point(k).vec()[2];
    if (std::abs(r) > 0.999) continue;
    for (int l = 0; l <= 6; ++l) {
      auto integrand = [&](double z) {
        const double y = boost::math::spherical_harmonic_r(static_cast<unsigned>(l), 0, std::acos(z), 0.0);
        return y * c * (1.0 - r * r) / (1.0 + 2.0 * r * z + r * r);
      };
      const double expect =
          2.0 * kPi * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -1.0, 1.0, 15, 1e-12);
      INFO("r=" << r << " l=" << l);
      CHECK(std::abs(fam->dilated(k)(l, 0) - expect) < 1e-10);
      for (int m = 1; m <= l; ++m) {
        CHECK(std::abs(fam->dilated(k)(l, m)) < 1e-12);
        CHECK(std::abs(fam->dilated(k)(l, -m)) < 1e-12);
      }
    }
  }
}

TEST_CASE("self inner product at the origin of the scale axis") {
  const Wavelet psi = dog_wavelet();
  const BallPoint a = sections::section_point(Section::fundamental(), 0.0);
  CHECK(a.norm() == 0.0);
  const cplx w = transform_at(psi.psi, Rotor::identity(3), a, psi.psi);
  CHECK(std::abs(w - 1.0) < 1e-12);
}

TEST_CASE("admissibility profiles") {
  SUBCASE("dog on the fundamental and constant-lambda sections") {
    const auto fund = admissibility(*family(dog_wavelet(), Section::fundamental(), 16));
    const auto lam = admissibility(*family(dog_wavelet(), Section::constant_lambda(0.3), 16));
    for (int l = 0; l <= 16; ++l) {
      CHECK(fund.c[static_cast<std::size_t>(l)] > 0.0);
      CHECK(lam.c[static_cast<std::size_t>(l)] > 0.0);
    }
    const double rf = fund.max / fund.min;
    const double rl = lam.max / lam.min;
    CHECK(rl / rf < 10.0);
    CHECK(rf / rl < 10.0);
    // Not square integrable at small u: the outer decades carry a visible share.
    CHECK(fund.edge_fraction > 1e-3);
    CHECK_FALSE(fund.warnings.empty());
  }
  SUBCASE("conformal dog converges in scale") {
    const auto prof = admissibility(*family(dog_conformal_wavelet(), Section::fundamental(), 8));
    CHECK(prof.min > 0.0);
    CHECK(prof.edge_fraction < 1e-6);
    CHECK(prof.warnings.empty());
    CHECK(prof.band_limit() == 8);
  }
  SUBCASE("constant wavelet is not annihilated by dilations") {
    const auto prof = admissibility(*family(constant_wavelet(), Section::fundamental(), 4, 16));
    for (double c : prof.c) CHECK(c > 1.0);
  }
}

TEST_CASE("frame multiplier") {
  AdmissibilityProfile ones;
  ones.c.assign(5, 1.0);
  const ShCoefficients g = random_coefficients(4);
  CHECK(relative(frame_inverse_apply(ones, g), g) == 0.0);

  AdmissibilityProfile prof;
  prof.c = {0.5, 2.0, 3.0, 1e-3, 7.0};
  CHECK(relative(frame_apply(prof, frame_inverse_apply(prof, g)), g) < 1e-15);
  CHECK(relative(frame_inverse_apply(prof, frame_apply(prof, g)), g) < 1e-15);

  prof.c[3] = 1e-15;
  try {
    frame_inverse_apply(prof, g);
    FAIL("expected singular multiplier");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular_multiplier);
    CHECK(std::string(e.what()).find("l=3") != std::string::npos);
  }
  CHECK_THROWS_AS(frame_inverse_apply(prof, random_coefficients(5)), Error);
}

TEST_CASE("harmonic grid values match the direct definition") {
  const FamilyPtr fam = family(dog_wavelet(), Section::constant_lambda(0.3), 4, 6);
  const ShCoefficients c = random_coefficients(4);
  const WaveletCoefficients W = analyze(fam, signal_of(c));
  const sphere::SphereFunction f = sphere::as_function(c);
  const auto& grid = fam->rotations();
  for (std::size_t node : {std::size_t{0}, std::size_t{17}, grid.size() / 2, grid.size() - 1}) {
    const Rotor s = sphere::rotor_from_euler(grid.euler(node));
    for (std::size_t k = 0; k < fam->scale_count(); ++k) {
      const cplx direct = transform_at(fam->wavelet().psi, s, fam->scale_point(k), f);
      INFO("node=" << node << " k=" << k);
      CHECK(std::abs(W.values(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(k)) - direct) < 1e-10);
      CHECK(std::abs(coefficient_at(*fam, c, s, k) - direct) < 1e-10);
    }
  }
}

TEST_CASE("harmonic round trip") {
  SUBCASE("Y_1^1 on the fundamental section") {
    const FamilyPtr fam = family(dog_wavelet(), Section::fundamental(), 8);
    ShCoefficients c(8);
    c(1, 1) = 1.0;
    const auto r = synthesize(admissibility(*fam), analyze(fam, signal_of(c)));
    CHECK(relative(r.coefficients, c) < 1e-10);
  }
  SUBCASE("random signal on the constant-lambda section") {
    const FamilyPtr fam = family(dog_wavelet(), Section::constant_lambda(0.3), 8);
    const ShCoefficients c = random_coefficients(8);
    const SphericalSignal f = signal_of(c);
    const auto r = synthesize(admissibility(*fam), analyze(fam, f));
    CHECK(relative(r.coefficients, c) < 1e-10);
    CHECK((r.signal.values - f.values).norm() / f.values.norm() < 1e-10);
  }
  SUBCASE("sigma-c section with the conformal dog") {
    const FamilyPtr fam = family(dog_conformal_wavelet(), Section::sigma_c(-0.7), 6, 12);
    const ShCoefficients c = random_coefficients(6);
    const auto r = synthesize(admissibility(*fam), analyze(fam, signal_of(c)));
    CHECK(relative(r.coefficients, c) < 1e-10);
  }
}

TEST_CASE("quadrature and harmonic paths agree") {
  for (const auto& sec : {Section::fundamental(), Section::constant_lambda(0.3)}) {
    INFO(sec.spec());
    const FamilyPtr fam = family(dog_wavelet(), sec, 4, 6);
    const SphericalSignal f = signal_of(random_coefficients(4));
    const WaveletCoefficients wh = analyze(fam, f, Path::harmonic);
    const WaveletCoefficients wq = analyze(fam, f, Path::quadrature);
    CHECK((wh.values - wq.values).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("quadrature-path reconstruction") {
  FamilyOptions o;
  o.band_limit = 4;
  o.t_nodes = 8;
  o.n_alpha = o.n_beta = o.n_gamma = 9;
  const auto fam = std::make_shared<const WaveletFamily>(dog_wavelet(), Section::fundamental(), o);
  const ShCoefficients c = random_coefficients(4);
  const auto prof = admissibility(*fam);
  const WaveletCoefficients W = analyze(fam, signal_of(c), Path::quadrature);
  const auto r = synthesize(prof, W, Path::quadrature);
  CHECK(relative(r.coefficients, c) < 1e-2);
  const auto fine = std::make_shared<const sphere::SphereGrid>(4, 2);
  const auto rf = synthesize(prof, W, Path::quadrature, fine);
  CHECK(rf.signal.grid->size() == fine->size());
  CHECK(relative(rf.coefficients, c) < 1e-2);
}

TEST_CASE("plancherel") {
  const FamilyPtr fam = family(dog_wavelet(), Section::constant_lambda(0.3), 8);
  const auto prof = admissibility(*fam);
  const auto zero = plancherel_check(fam, prof, signal_of(ShCoefficients(8)));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  CHECK(zero.relerr == 0.0);
  ShCoefficients y20(8);
  y20(2, 0) = 1.0;
  const auto r1 = plancherel_check(fam, prof, signal_of(y20));
  CHECK(r1.lhs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r1.relerr < 1e-10);
  CHECK(plancherel_check(fam, prof, signal_of(random_coefficients(8))).relerr < 1e-10);
}

TEST_CASE("frame quadratic form") {
  const FamilyPtr fam = family(dog_wavelet(), Section::fundamental(), 4, 8);
  const auto prof = admissibility(*fam);
  const SphericalSignal f = signal_of(random_coefficients(4));
  const auto q = frame_quadratic_form(fam, prof, f);
  CHECK(q.multiplier > 0.0);
  CHECK(q.relerr < 1e-2);
  CHECK(frame_quadratic_form(fam, prof, f, Path::harmonic).relerr < 1e-12);
}

TEST_CASE("rotation covariance") {
  const FamilyPtr fam = family(dog_wavelet(), Section::constant_lambda(0.3), 6, 8);
  const SphericalSignal f = signal_of(random_coefficients(6));
  const auto id = covariance_check(fam, f, Rotor::identity(3));
  CHECK(id.wigner < 1e-12);
  CHECK(id.grid >= 0.0);
  CHECK(id.grid < 1e-12);

  const Rotor z = sphere::rotor_from_euler({2.0 * kPi * 5.0 / 13.0, 0.0, 0.0});
  const auto aligned = covariance_check(fam, f, z);
  CHECK(aligned.wigner < 1e-10);
  CHECK(aligned.grid >= 0.0);
  CHECK(aligned.grid < 1e-8);

  const auto arbitrary = covariance_check(fam, f, random_rotor());
  CHECK(arbitrary.wigner < 1e-10);
  CHECK(arbitrary.grid < 0.0);

  const auto off_grid = covariance_check(fam, f, sphere::rotor_from_euler({0.3, 0.0, 0.0}));
  CHECK(off_grid.grid < 0.0);
}

TEST_CASE("rotation covariance on the quadrature path") {
  const FamilyPtr fam = family(dog_wavelet(), Section::fundamental(), 2, 4);
  const SphericalSignal f = signal_of(random_coefficients(2));
  const Rotor z = sphere::rotor_from_euler({2.0 * kPi * 2.0 / 5.0, 0.0, 0.0});
  const auto r = covariance_check(fam, f, z, Path::quadrature);
  CHECK(r.grid >= 0.0);
  CHECK(r.grid < 1e-8);
}

TEST_CASE("dilation non-covariance") {
  const ShCoefficients c = random_coefficients(4);
  const sphere::SphereFunction f = sphere::as_function(c);
  const Wavelet psi = dog_wavelet();

  SUBCASE("b = 0") {
    const auto r = dilation_noncovariance_check(psi, Section::constant_lambda(0.3), f,
                                                BallPoint::origin(3), random_rotor(), 0.4);
    CHECK(r.residual < 1e-12);
    CHECK_FALSE(r.off_section);
  }
  SUBCASE("parallel points stay on the fundamental axis") {
    const auto r = dilation_noncovariance_check(psi, Section::fundamental(), f,
                                                point(0.0, 0.0, 0.45), Rotor::identity(3), -0.3);
    CHECK(r.residual < 1e-8);
    CHECK_FALSE(r.off_section);
    CHECK(std::abs(r.image.vec()[0]) + std::abs(r.image.vec()[1]) < 1e-15);
  }
  SUBCASE("random b leaves the constant-lambda section") {
    for (int trial = 0; trial < 4; ++trial) {
      const BallPoint b(testutil::ball_vector(3, 0.5));
      const auto r = dilation_noncovariance_check(psi, Section::constant_lambda(0.3), f, b,
                                                  random_rotor(), testutil::uniform(-0.8, 0.8));
      INFO("trial " << trial);
      CHECK(r.residual < 1e-8);
      CHECK(r.off_section);
      CHECK(r.literal_residual > 1e-3);
    }
  }
}

TEST_CASE("section membership") {
  for (const auto& sec : {Section::fundamental(), Section::constant_lambda(-0.4), Section::sigma_c(0.5)}) {
    for (double t : {-0.9, -0.2, 0.0, 0.5, 0.95}) {
      CHECK(on_section(sec, sections::section_point(sec, t)));
    }
  }
  CHECK_FALSE(on_section(Section::fundamental(), point(0.1, 0.0, 0.2)));
  CHECK_FALSE(on_section(Section::constant_lambda(0.3), point(0.0, 0.0, 0.2)));
}

TEST_CASE("unitarity of the representation") {
  const sphere::SphereFunction f = sphere::as_function(random_coefficients(5));
  for (double r : {0.0, 0.3, 0.8, 0.99, 0.9999}) {
    const BallPoint a(testutil::unit_vector(3) * r);
    INFO("|a|=" << r);
    CHECK(std::abs(unitarity_ratio(random_rotor(), a, f) - 1.0) < 1e-9);
  }
}

TEST_CASE("shape and grid errors") {
  const FamilyPtr fam = family(dog_wavelet(), Section::fundamental(), 4, 4);
  const SphericalSignal wrong = signal_of(random_coefficients(5));
  try {
    analyze(fam, wrong);
    FAIL("expected grid mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::grid_mismatch);
  }
  const auto other = admissibility(*family(dog_wavelet(), Section::fundamental(), 5, 4));
  const WaveletCoefficients W = analyze(fam, signal_of(random_coefficients(4)));
  CHECK_THROWS_AS(synthesize(other, W), Error);
  WaveletCoefficients bad = W;
  bad.values.conservativeResize(W.values.rows(), 2);
  CHECK_THROWS_AS(synthesize(admissibility(*fam), bad), Error);
}
