#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "conformlets/error.hpp"
#include "conformlets/plane.hpp"
#include "conformlets/quadrature.hpp"
#include "conformlets/sections.hpp"
#include "test_util.hpp"

using namespace conformlets;
using namespace conformlets::plane;
using gyro::BallPoint;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector random_sphere_point(int n) {
  // keep away from the south pole so the projection stays moderate
  Vector x;
  do {
    x = testutil::unit_vector(n);
  } while (x[n - 1] < -0.99);
  return x;
}

sphere::SphereFunction gaussian_cap(const sphere::Vec3& center, double kappa) {
  return [center, kappa](const sphere::Vec3& x) {
    return cplx(std::exp(kappa * (center.dot(x) - 1.0)), 0.0);
  };
}

PlaneFunction planar_gaussian(const Vector& center, double width) {
  return [center, width](const Vector& y) {
    const double r2 = (y - center).squaredNorm();
    return cplx(std::exp(-r2 / (width * width)), 0.5 * std::exp(-r2 / (2 * width * width)) * y[0]);
  };
}

std::shared_ptr<const PlanarGrid> planar_grid(int L, int oversample) {
  return std::make_shared<const PlanarGrid>(std::make_shared<const sphere::SphereGrid>(L, oversample));
}

double e_coefficient(const Multivector& x, int axis) {
  return x[std::uint32_t{1} << (axis - 1)];
}

}  // namespace

TEST_CASE("stereographic projection") {
  CHECK(stereo(vec({0, 0, 1})).y.norm() == 0.0);
  const ExtendedPoint eq = stereo(vec({1, 0, 0}));
  CHECK(!eq.at_infinity);
  CHECK((eq.y - vec({2, 0})).norm() < 1e-15);
  CHECK(stereo(vec({0, 0, -1})).at_infinity);
  CHECK(stereo_cayley(vec({0, 0, -1})).at_infinity);
  CHECK((stereo_inv(ExtendedPoint::infinity(2)) - vec({0, 0, -1})).norm() == 0.0);

  for (int n : {2, 3, 4, 6}) {
    for (int rep = 0; rep < 200; ++rep) {
      const Vector x = random_sphere_point(n);
      const ExtendedPoint y = stereo(x);
      REQUIRE(!y.at_infinity);
      CHECK((stereo_inv(y) - x).norm() < 1e-13);
      const ExtendedPoint yc = stereo_cayley(x);
      CHECK((yc.y - y.y).norm() < 1e-13 * std::max(1.0, y.y.norm()));
      const Vector p = testutil::gaussian_vector(n - 1) * 3.0;
      CHECK(std::abs(stereo_inv(p).norm() - 1.0) < 1e-15);
      CHECK((stereo(stereo_inv(p)).y - p).norm() < 1e-13 * std::max(1.0, p.norm()));
    }
  }
}

TEST_CASE("Cayley transform") {
  CHECK((cayley(vec({0, 0, 0})) - vec({0, 0, 1})).norm() < 1e-15);
  for (double t : {-0.9, -0.3, 0.0, 0.5, 0.99}) {
    CHECK((cayley(vec({0, 0, t})) - vec({0, 0, (1 + t) / (1 - t)})).norm() < 1e-12);
  }
  for (int rep = 0; rep < 200; ++rep) {
    const Vector x = testutil::ball_vector(3, 0.999);
    CHECK(cayley(x)[2] > 0.0);
    const Vector s = random_sphere_point(3);
    CHECK(std::abs(cayley(s)[2]) < 1e-12);
  }
}

TEST_CASE("Clifford-group inverse") {
  const Multivector v = Multivector::vector(vec({0.3, -1.2, 0.4}));
  const Multivector one = Multivector::scalar(3, 1.0);
  CHECK((v * clifford_group_inverse(v) - one).norm() < 1e-15);
  const Multivector w = Multivector::vector(vec({1.0, 0.5, -2.0}));
  const Multivector vw = v * w;
  CHECK((vw * clifford_group_inverse(vw) - one).norm() < 1e-14);
  CHECK((clifford_group_inverse(vw) * vw - one).norm() < 1e-14);
  CHECK((clifford_group_inverse(v + one) * (v + one) - one).norm() < 1e-15);
  // e1 + e23 times its conjugate has a trivector part
  CHECK_THROWS_AS(clifford_group_inverse(Multivector::blade(3, 0b001) + Multivector::blade(3, 0b110)),
                  Error);
  CHECK_THROWS_AS(clifford_group_inverse(Multivector(3)), Error);
}

TEST_CASE("Vahlen matrix of a Moebius map") {
  const VahlenMatrix id = project_moebius(BallPoint::origin(3));
  CHECK(id.distance(VahlenMatrix::identity(2)) < 1e-15);

  for (double t : {-0.8, -0.2, 0.4, 0.95}) {
    const VahlenMatrix m = project_moebius(BallPoint(vec({0, 0, t})));
    CHECK(m.v().norm() == 0.0);
    CHECK(m.w().norm() == 0.0);
    const Vector y = testutil::gaussian_vector(2);
    const double delta = (1 - t) / (1 + t);
    CHECK((m.apply(y).y - y / delta).norm() < 1e-12 * std::max(1.0, y.norm() / delta));
  }

  for (int n : {3, 4}) {
    for (int rep = 0; rep < 1000; ++rep) {
      const BallPoint a(testutil::ball_vector(n, 0.98));
      const VahlenMatrix m = project_moebius(a);  // validates the Vahlen conditions
      CHECK(std::abs(m.pseudodeterminant() - 1.0) < 1e-12);
    }
  }

  // intertwining with the stereographic projection
  for (int rep = 0; rep < 20; ++rep) {
    const BallPoint a(testutil::ball_vector(3, 0.95));
    const VahlenMatrix m = project_moebius(a);
    for (int k = 0; k < 100; ++k) {
      const Vector x = random_sphere_point(3);
      const ExtendedPoint lhs = stereo(gyro::moebius(a, x));
      const ExtendedPoint rhs = m.apply(stereo(x));
      if (lhs.at_infinity || rhs.at_infinity) continue;
      CHECK((lhs.y - rhs.y).norm() < 1e-10 * std::max(1.0, lhs.y.norm()));
    }
  }
}

TEST_CASE("Vahlen validity is enforced") {
  const Multivector one = Multivector::scalar(2, 1.0);
  const Multivector zero(2);
  const Multivector e1 = Multivector::blade(2, 0b01);
  const Multivector e12 = Multivector::blade(2, 0b11);
  // u v* = e12 is a bivector
  CHECK_THROWS_AS(VahlenMatrix(one, e12, zero, one), Error);
  // pseudodeterminant zero
  CHECK_THROWS_AS(VahlenMatrix(one, one, one, one), Error);
  // not in the Clifford group
  const Multivector one3 = Multivector::scalar(3, 1.0);
  const Multivector zero3(3);
  CHECK_THROWS_AS(VahlenMatrix(Multivector::blade(3, 0b001) + Multivector::blade(3, 0b110), zero3,
                               zero3, one3),
                  Error);
  CHECK_THROWS_AS(VahlenMatrix(one, zero, zero, Multivector::scalar(3, 1.0)), Error);
  // translations and inversion are valid
  CHECK_NOTHROW(VahlenMatrix(one, e1, zero, one));
  CHECK_NOTHROW(VahlenMatrix(zero, e1, e1, zero));
}

TEST_CASE("inverse of the projected map") {
  for (int rep = 0; rep < 50; ++rep) {
    const BallPoint a(testutil::ball_vector(3, 0.95));
    const VahlenMatrix m = project_moebius(a);
    const VahlenMatrix inv = m.inverse();
    CHECK((m * inv).distance(VahlenMatrix::identity(2)) < 1e-12);
    const Vector av = a.vec();
    const double s = std::sqrt(1 - av.squaredNorm());
    const double c1 = (1 + av[2]) / s;
    const double c4 = (1 - av[2]) / s;
    const Multivector c2 = Multivector::vector(-2.0 * av.head(2) / s);
    const Multivector c3 = Multivector::vector(av.head(2) / (2 * s));
    for (int k = 0; k < 20; ++k) {
      const Vector y = testutil::gaussian_vector(2) * 2.0;
      const Multivector Y = Multivector::vector(y);
      const Multivector den = -c3 * Y + Multivector::scalar(2, c1);
      if (den.norm() < 1e-3) continue;
      const Vector displayed =
          ((Multivector::scalar(2, c4) * Y - c2) * clifford_group_inverse(den)).vector_part();
      const ExtendedPoint pre = inv.apply(y);
      REQUIRE(!pre.at_infinity);
      CHECK((pre.y - displayed).norm() < 1e-12 * std::max(1.0, displayed.norm()));
      const ExtendedPoint back = m.apply(pre);
      CHECK((back.y - y).norm() < 1e-12 * std::max(1.0, y.norm()));
    }
  }
}

TEST_CASE("weight identity of the planar Moebius operator") {
  for (int rep = 0; rep < 50; ++rep) {
    const Vector a = testutil::ball_vector(3, 0.95);
    const double aa = a.squaredNorm();
    const double an = a[2];
    const double perp2 = aa - an * an;
    const VahlenMatrix inv = project_moebius(BallPoint(a)).inverse();
    for (int k = 0; k < 20; ++k) {
      const Vector y = testutil::gaussian_vector(2) * 2.0;
      const double ay = a.head(2).dot(y);
      const double yy = y.squaredNorm();
      const double q = perp2 * yy + 4 * (1 + an) * ay + 4 * (1 + an) * (1 + an);
      if (q < 1e-6) continue;
      const ExtendedPoint pre = inv.apply(y);
      const double left = 4 * (1 - aa) / q * 4 / (4 + pre.y.squaredNorm());
      const double right =
          4 * (1 - aa) / ((1 + aa) * (4 + yy) + 2 * an * (4 - yy) + 8 * ay);
      CHECK(left == doctest::Approx(right).epsilon(1e-12));
      // |phi~^{-1}(y)|^2 against its displayed rational form
      const double num = (1 - an) * (1 - an) * yy + 4 * (1 - an) * ay + 4 * perp2;
      CHECK(pre.y.squaredNorm() == doctest::Approx(4 * num / q).epsilon(1e-12));
    }
  }
}

TEST_CASE("generic Iwasawa decomposition") {
  const Iwasawa id = iwasawa(VahlenMatrix::identity(2));
  CHECK(id.alpha.scalar_part() == doctest::Approx(1.0));
  CHECK(id.beta.norm() == 0.0);
  CHECK(id.delta == doctest::Approx(1.0));
  CHECK(id.xi.norm() == 0.0);

  for (double t : {-0.7, 0.0, 0.3, 0.9}) {
    const Iwasawa p = iwasawa(project_moebius(BallPoint(vec({0, 0, t}))));
    CHECK(std::abs(p.alpha.scalar_part() - 1.0) < 1e-14);
    CHECK(p.beta.norm() < 1e-15);
    CHECK(std::abs(p.delta - (1 - t) / (1 + t)) < 1e-14);
    CHECK(p.xi.norm() < 1e-15);
  }

  for (int rep = 0; rep < 500; ++rep) {
    const Vector av = testutil::ball_vector(3, 0.98);
    const VahlenMatrix m = project_moebius(BallPoint(av));
    const Iwasawa p = iwasawa(m);
    CHECK(iwasawa_compose(p).distance(m) < 1e-12);

    // closed forms with S = 4(1+a_n)^2 + |a|^2 - a_n^2
    const double an = av[2];
    const double S = 4 * (1 + an) * (1 + an) + av.head(2).squaredNorm();
    const Vector perp = av.head(2);
    CHECK(std::abs(p.alpha.scalar_part() - 2 * (1 + an) / std::sqrt(S)) < 1e-12);
    CHECK(p.alpha.off_grade_norm(0) < 1e-15);
    CHECK((p.beta.vector_part() - perp / std::sqrt(S)).norm() < 1e-12);
    CHECK(std::abs(p.delta - 4 * (1 - av.squaredNorm()) / S) < 1e-12);
    CHECK((p.xi.vector_part() - 2 * (-perp) * (5 + 3 * an) / S).norm() < 1e-12);
    CHECK(p.xi.off_grade_norm(1) < 1e-14);
  }

  // four-dimensional ball, recomposition only
  for (int rep = 0; rep < 100; ++rep) {
    const VahlenMatrix m = project_moebius(BallPoint(testutil::ball_vector(4, 0.95)));
    CHECK(iwasawa_compose(iwasawa(m)).distance(m) < 1e-12);
  }

  const Multivector two = Multivector::scalar(2, 2.0);
  CHECK_THROWS_AS(iwasawa(VahlenMatrix(two, Multivector(2), Multivector(2), two)), Error);
}

TEST_CASE("Iwasawa parameters along sections match the generic decomposition") {
  for (double lambda : {-0.8, -0.3, 0.0, 0.4, 0.9}) {
    const sections::Section sec = lambda == 0.0 ? sections::Section::fundamental()
                                                : sections::Section::constant_lambda(lambda);
    for (int k = 0; k < 40; ++k) {
      const double t = -0.975 + 1.95 * k / 39.0;
      const Iwasawa gen = iwasawa(project_moebius(sections::section_point(sec, t)));
      const sections::IwasawaParams closed = sections::iwasawa_on_section(sec, t);
      CHECK(std::abs(gen.alpha.scalar_part() - closed.alpha) < 1e-10);
      CHECK(std::abs(e_coefficient(gen.beta, 2) - closed.beta) < 1e-10);
      CHECK(std::abs(e_coefficient(gen.beta, 1)) < 1e-15);
      CHECK(std::abs(gen.delta - closed.delta) < 1e-10 * std::max(1.0, closed.delta));
      CHECK(std::abs(e_coefficient(gen.xi, 2) - closed.xi) < 1e-10 * std::max(1.0, std::abs(closed.xi)));
    }
  }
}

TEST_CASE("unitary map to the plane") {
  const auto grid = std::make_shared<const sphere::SphereGrid>(24, 2);
  const PlanarGrid pg(grid);

  // f = 1
  const PlaneFunction one = theta([](const sphere::Vec3&) { return cplx(1.0); });
  for (int k = 0; k < 20; ++k) {
    const Vector y = testutil::gaussian_vector(2) * 3.0;
    CHECK(std::abs(one(y) - 4.0 / (4.0 + y.squaredNorm())) < 1e-15);
  }

  const sphere::SphereFunction f = gaussian_cap(sphere::Vec3(0.2, -0.5, 0.3).normalized(), 6.0);
  const sphere::SphericalSignal fs = sphere::SphericalSignal::sample(grid, f);
  const PlanarSignal F = theta(fs);
  CHECK(std::abs(F.norm() / fs.norm() - 1.0) < 1e-13);

  // the planar norm by an independent polar rule in r
  const PlaneFunction Ff = theta(f);
  const QuadratureRule rr = gauss_legendre(400, 0.0, 1.0);
  double polar = 0.0;
  for (std::size_t i = 0; i < rr.nodes.size(); ++i) {
    // r = s / (1 - s) maps [0,1) onto [0, inf)
    const double s = rr.nodes[i];
    const double r = s / (1 - s);
    const double jac = 1 / ((1 - s) * (1 - s));
    for (int k = 0; k < 128; ++k) {
      const double ph = 2 * std::numbers::pi * k / 128;
      polar += rr.weights[i] * jac * r * (2 * std::numbers::pi / 128) *
               std::norm(Ff(vec({r * std::cos(ph), r * std::sin(ph)})));
    }
  }
  CHECK(std::abs(std::sqrt(polar) / fs.norm() - 1.0) < 1e-8);

  const sphere::SphericalSignal back = theta_inv(F);
  CHECK((back.values - fs.values).norm() < 1e-14 * fs.values.norm());
  const sphere::SphereFunction fb = theta_inv(Ff);
  for (int k = 0; k < 20; ++k) {
    const sphere::Vec3 x = random_sphere_point(3);
    CHECK(std::abs(fb(x) - f(x)) < 1e-14);
  }
  CHECK(fb(sphere::Vec3(0, 0, -1)) == cplx(0.0));
}

TEST_CASE("planar operators are unitary with the stated adjoints") {
  const auto pg = planar_grid(48, 2);
  const PlaneFunction F = planar_gaussian(vec({0.3, -0.2}), 0.8);
  const PlaneFunction G = planar_gaussian(vec({-0.4, 0.5}), 1.1);
  const auto norm2 = [&](const PlaneFunction& h) {
    return planar_integral(*pg, [&](const Vector& y) { return cplx(std::norm(h(y))); }).real();
  };
  const auto inner = [&](const PlaneFunction& a, const PlaneFunction& b) {
    return planar_integral(*pg, [&](const Vector& y) { return std::conj(a(y)) * b(y); });
  };
  const double nf = norm2(F);

  const Vector y0 = vec({0.7, -1.3});
  CHECK(dilate_D(1.0, F)(y0) == F(y0));
  const Vector xi = vec({0.45, -0.3});
  CHECK(std::abs(translate_T(xi, translate_T(-xi, F))(y0) - F(y0)) < 1e-15);

  for (int rep = 0; rep < 5; ++rep) {
    const Vector av = testutil::ball_vector(3, 0.6);
    const Iwasawa p = iwasawa(project_moebius(BallPoint(av)));
    const Multivector alpha_bar = clifford::conjugate(p.alpha);
    const Multivector minus_beta = -p.beta;
    const Vector xv = p.xi.vector_part();

    const PlaneFunction R = rotate_RS(p.alpha, p.beta, F);
    const PlaneFunction D = dilate_D(p.delta, F);
    const PlaneFunction T = translate_T(xv, F);
    CHECK(norm2(R) / nf == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(norm2(D) / nf == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(norm2(T) / nf == doctest::Approx(1.0).epsilon(1e-8));

    const cplx r1 = inner(rotate_RS(p.alpha, p.beta, F), G);
    const cplx r2 = inner(F, rotate_RS(alpha_bar, minus_beta, G));
    CHECK(std::abs(r1 - r2) < 1e-8 * nf);
    const cplx d1 = inner(dilate_D(p.delta, F), G);
    const cplx d2 = inner(F, dilate_D(1 / p.delta, G));
    CHECK(std::abs(d1 - d2) < 1e-8 * nf);
    const cplx t1 = inner(translate_T(xv, F), G);
    const cplx t2 = inner(F, translate_T(-xv, G));
    CHECK(std::abs(t1 - t2) < 1e-8 * nf);

    // adjoints invert pointwise
    const Vector y = testutil::gaussian_vector(2);
    CHECK(std::abs(rotate_RS(p.alpha, p.beta, rotate_RS(alpha_bar, minus_beta, F))(y) - F(y)) < 1e-13);
    CHECK(std::abs(dilate_D(p.delta, dilate_D(1 / p.delta, F))(y) - F(y)) < 1e-14);
  }
  CHECK_THROWS_AS(dilate_D(0.0, F), Error);
}

TEST_CASE("intertwining of the dilation with the planar factorization") {
  const auto pg = planar_grid(16, 2);
  const sphere::SphereFunction psi = gaussian_cap(sphere::Vec3(0.6, 0.0, 0.8), 3.0);

  const IntertwineResidual zero = intertwine_check(BallPoint::origin(3), psi, *pg);
  CHECK(zero.m_form < 1e-15);
  CHECK(zero.factored < 1e-15);
  CHECK(zero.excluded == 0);

  // a on the axis reduces to the pure planar dilation
  for (double t : {-0.6, 0.5}) {
    const BallPoint a(vec({0, 0, t}));
    const PlaneFunction lhs = theta(sphere::dilate(a, psi));
    const PlaneFunction rhs = dilate_D((1 + t) / (1 - t), theta(psi));
    for (const Vector& y : pg->points) CHECK(std::abs(lhs(y) - rhs(y)) < 1e-13);
    const IntertwineResidual r = intertwine_check(a, psi, *pg);
    CHECK(r.factored < 1e-13);
  }

  for (int rep = 0; rep < 30; ++rep) {
    const BallPoint a(testutil::ball_vector(3, 0.95));
    const IntertwineResidual r = intertwine_check(a, psi, *pg);
    CHECK(r.samples + r.excluded == pg->size());
    CHECK(r.m_form < 1e-8);
    CHECK(r.factored < 1e-8);
    CHECK(r.projection < 1e-10);
  }
}
