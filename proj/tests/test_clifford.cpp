#include <doctest.h>

#include <cmath>
#include <numbers>

#include "conformlets/clifford.hpp"
#include "conformlets/error.hpp"
#include "test_util.hpp"

using namespace conformlets;
using namespace conformlets::clifford;

namespace {

Multivector random_mv(int dim) {
  Multivector m(dim);
  for (std::uint32_t k = 0; k < m.size(); ++k) m[k] = testutil::uniform(-1.0, 1.0);
  return m;
}

double diff(const Multivector& a, const Multivector& b) { return (a - b).norm(); }

Eigen::VectorXd e(int n, int i) { return Eigen::VectorXd::Unit(n, i - 1); }

}  // namespace

TEST_CASE("basis products follow the anticommutation rules") {
  const auto e1 = Multivector::blade(3, 0b001);
  const auto e2 = Multivector::blade(3, 0b010);
  CHECK(diff(e1 * e1, Multivector::scalar(3, -1.0)) == 0.0);
  const auto e12 = e1 * e2;
  CHECK(e12[0b011] == 1.0);
  CHECK(diff(e12 * e12, Multivector::scalar(3, -1.0)) == 0.0);
  CHECK(diff(e1 * e2 + e2 * e1, Multivector(3)) == 0.0);
  const auto b = random_mv(3);
  CHECK(diff(Multivector::scalar(3, 1.0) * b, b) == 0.0);
  // e3 e1 = -e1 e3
  CHECK((Multivector::blade(3, 0b100) * e1)[0b101] == -1.0);
}

TEST_CASE("geometric product rejects mismatched dimensions") {
  CHECK_THROWS_AS(Multivector(2) * Multivector(3), Error);
}

TEST_CASE("product is associative and the vector product has the inner product as symmetric part") {
  for (int n = 1; n <= 5; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto a = random_mv(n);
      const auto b = random_mv(n);
      const auto c = random_mv(n);
      CHECK(diff((a * b) * c, a * (b * c)) < 1e-12);
      const Eigen::VectorXd x = testutil::gaussian_vector(n);
      const Eigen::VectorXd y = testutil::gaussian_vector(n);
      const auto X = Multivector::vector(x);
      const auto Y = Multivector::vector(y);
      CHECK(diff(X * Y + Y * X, Multivector::scalar(n, -2.0 * x.dot(y))) < 1e-12);
      const Eigen::VectorXd u = x.normalized();
      const auto U = Multivector::vector(u);
      CHECK(diff(U * U, Multivector::scalar(n, -1.0)) < 1e-14);
    }
  }
}

TEST_CASE("involutions") {
  const auto e12 = Multivector::blade(3, 0b011);
  CHECK(diff(reverse(e12), -e12) == 0.0);
  const auto e1 = Multivector::blade(3, 0b001);
  CHECK(diff(conjugate(e1), -e1) == 0.0);
  const auto e123 = Multivector::blade(3, 0b111);
  CHECK(diff(conjugate(e123), e123) == 0.0);
  CHECK(diff(reverse(e123), -e123) == 0.0);
  CHECK(diff(main_involution(e123), -e123) == 0.0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = random_mv(4);
    const auto b = random_mv(4);
    CHECK(diff(reverse(reverse(a)), a) == 0.0);
    CHECK(diff(conjugate(conjugate(a)), a) == 0.0);
    CHECK(diff(conjugate(a), reverse(main_involution(a))) == 0.0);
    CHECK(diff(reverse(a * b), reverse(b) * reverse(a)) < 1e-12);
    CHECK(diff(conjugate(a * b), conjugate(b) * conjugate(a)) < 1e-12);
  }
}

TEST_CASE("grade projections sum to the multivector") {
  const auto a = random_mv(4);
  Multivector sum(4);
  for (int k = 0; k <= 4; ++k) sum += a.grade(k);
  CHECK(diff(sum, a) == 0.0);
  CHECK(a.grade(2).off_grade_norm(2) == 0.0);
}

TEST_CASE("inverse of a vector") {
  const auto e1 = Multivector::blade(3, 0b001);
  CHECK(diff(inverse_vector(e1), -e1) < 1e-15);
  const auto two_e2 = Multivector::blade(3, 0b010, 2.0);
  CHECK(diff(inverse_vector(two_e2), Multivector::blade(3, 0b010, -0.5)) < 1e-15);
  Eigen::Vector3d v(0.6, 0.8, 0.0);
  const auto x = Multivector::vector(v);
  CHECK(diff(inverse_vector(x), -x) < 1e-15);
  CHECK(diff(x * inverse_vector(x), Multivector::scalar(3, 1.0)) < 1e-12);
  CHECK_THROWS_AS(inverse_vector(Multivector(3)), Error);
  try {
    (void)inverse_vector(Multivector(3));
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::division_by_zero);
  }
  CHECK_THROWS_AS(inverse_vector(e1 * Multivector::blade(3, 0b010)), Error);
}

TEST_CASE("plane rotors") {
  const double pi = std::numbers::pi;
  CHECK((rotor_from_plane(3, 1, 2, pi).apply(e(3, 1)) + e(3, 1)).norm() < 1e-15);
  CHECK(diff(rotor_from_plane(3, 2, 3, 0.0).multivector(), Multivector::scalar(3, 1.0)) == 0.0);
  // e_i turns towards -e_j
  CHECK((rotor_from_plane(3, 1, 2, pi / 2).apply(e(3, 1)) + e(3, 2)).norm() < 1e-15);
  CHECK((rotor_from_plane(3, 1, 2, pi / 2).apply(e(3, 2)) - e(3, 1)).norm() < 1e-15);
  const double th = 0.7;
  const Eigen::VectorXd r = rotor_from_plane(4, 2, 4, th).apply(e(4, 4));
  CHECK(std::abs(r[3] - std::cos(th)) < 1e-15);
  CHECK(std::abs(r[1] - std::sin(th)) < 1e-15);
  CHECK_THROWS_AS(rotor_from_plane(3, 2, 2, 0.1), Error);
  CHECK_THROWS_AS(rotor_from_plane(3, 0, 2, 0.1), Error);
  CHECK_THROWS_AS(rotor_from_plane(3, 1, 4, 0.1), Error);
}

TEST_CASE("rotor action") {
  for (int n = 2; n <= 6; ++n) {
    for (int rep = 0; rep < 10; ++rep) {
      const Rotor s1 = Rotor::normalized(Multivector::vector(testutil::unit_vector(n)) *
                                         Multivector::vector(testutil::unit_vector(n)));
      const Rotor s2 = rotor_from_plane(n, 1, n, testutil::uniform(0, 6));
      const Eigen::VectorXd x = testutil::gaussian_vector(n);
      const Eigen::VectorXd y = testutil::gaussian_vector(n);
      CHECK(std::abs((s1.multivector() * reverse(s1.multivector())).scalar_part() - 1.0) < 1e-12);
      CHECK((Rotor::identity(n).apply(x) - x).norm() == 0.0);
      CHECK((s1.apply(x) - (-s1).apply(x)).norm() < 1e-12);
      CHECK(((s1 * s2).apply(x) - s1.apply(s2.apply(x))).norm() < 1e-12);
      CHECK(std::abs(s1.apply(x).dot(s1.apply(y)) - x.dot(y)) < 1e-12);
      CHECK(std::abs(s1.apply(x).norm() - x.norm()) < 1e-12);
      const auto full = s1.multivector() * Multivector::vector(x) * reverse(s1.multivector());
      CHECK(full.off_grade_norm(1) < 1e-12);
      CHECK((s1.inverse().apply(s1.apply(x)) - x).norm() < 1e-12);
      const Eigen::MatrixXd m = s1.matrix();
      CHECK((m * x - s1.apply(x)).norm() < 1e-12);
    }
  }
}

TEST_CASE("rotor validation") {
  CHECK_THROWS_AS(Rotor::from_multivector(Multivector::scalar(3, 2.0)), Error);
  CHECK_THROWS_AS(Rotor::from_multivector(Multivector::blade(3, 0b001)), Error);
  try {
    (void)apply_rotor(Multivector::scalar(3, 1.5), e(3, 1));
    FAIL("expected throw");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::non_unit_rotor);
  }
  const auto ok = apply_rotor(rotor_from_plane(3, 1, 3, 1.0).multivector(), e(3, 2));
  CHECK((ok - e(3, 2)).norm() < 1e-15);
}

TEST_CASE("debug printer lists terms by grade") {
  Multivector m(3);
  m[0b011] = 2.0;
  m[0b100] = -1.0;
  m[0] = 0.5;
  const std::string s = m.to_string(3);
  CHECK(s.find("0.5") < s.find("e3"));
  CHECK(s.find("e3") < s.find("e12"));
}
