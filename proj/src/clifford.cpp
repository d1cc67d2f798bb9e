#include "conformlets/clifford.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "conformlets/error.hpp"

namespace conformlets::clifford {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    fail(ErrorCode::invalid_argument,
         "clifford dimension must be in [1, 8], got " + std::to_string(dim));
  }
}

void check_same_dim(const Multivector& a, const Multivector& b) {
  if (a.dim() != b.dim()) {
    fail(ErrorCode::dimension_mismatch, "multivector dimensions differ: " +
                                            std::to_string(a.dim()) + " vs " +
                                            std::to_string(b.dim()));
  }
}

int grade_of(std::uint32_t mask) { return std::popcount(mask); }

// Sign applied to grade k by each involution.
Multivector apply_grade_signs(const Multivector& a, int (*sign)(int)) {
  Multivector out = a;
  for (std::uint32_t m = 0; m < a.size(); ++m) out[m] *= sign(grade_of(m));
  return out;
}

}  // namespace

Multivector::Multivector(int dim) : dim_(dim) {
  check_dim(dim);
  coeffs_.assign(std::size_t{1} << dim, 0.0);
}

Multivector Multivector::scalar(int dim, double value) {
  Multivector m(dim);
  m.coeffs_[0] = value;
  return m;
}

Multivector Multivector::blade(int dim, std::uint32_t mask, double coeff) {
  Multivector m(dim);
  if (mask >= m.size()) {
    fail(ErrorCode::invalid_argument, "blade mask out of range for dimension");
  }
  m.coeffs_[mask] = coeff;
  return m;
}

Multivector Multivector::vector(const Eigen::VectorXd& x) {
  Multivector m(static_cast<int>(x.size()));
  for (int i = 0; i < x.size(); ++i) m.coeffs_[std::uint32_t{1} << i] = x[i];
  return m;
}

Multivector Multivector::grade(int k) const {
  Multivector out(dim_);
  for (std::uint32_t m = 0; m < size(); ++m) {
    if (grade_of(m) == k) out.coeffs_[m] = coeffs_[m];
  }
  return out;
}

double Multivector::off_grade_norm(int k) const {
  double s = 0.0;
  for (std::uint32_t m = 0; m < size(); ++m) {
    if (grade_of(m) != k) s += coeffs_[m] * coeffs_[m];
  }
  return std::sqrt(s);
}

bool Multivector::is_even() const {
  for (std::uint32_t m = 0; m < size(); ++m) {
    if ((grade_of(m) & 1) && coeffs_[m] != 0.0) return false;
  }
  return true;
}

Eigen::VectorXd Multivector::vector_part() const {
  Eigen::VectorXd v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = coeffs_[std::uint32_t{1} << i];
  return v;
}

double Multivector::norm() const {
  return std::sqrt(std::inner_product(coeffs_.begin(), coeffs_.end(),
                                      coeffs_.begin(), 0.0));
}

Multivector& Multivector::operator+=(const Multivector& other) {
  check_same_dim(*this, other);
  for (std::size_t m = 0; m < size(); ++m) coeffs_[m] += other.coeffs_[m];
  return *this;
}

Multivector& Multivector::operator-=(const Multivector& other) {
  check_same_dim(*this, other);
  for (std::size_t m = 0; m < size(); ++m) coeffs_[m] -= other.coeffs_[m];
  return *this;
}

Multivector& Multivector::operator*=(double k) {
  for (auto& c : coeffs_) c *= k;
  return *this;
}

std::string Multivector::to_string(int precision) const {
  std::vector<std::uint32_t> masks(size());
  std::iota(masks.begin(), masks.end(), 0u);
  std::stable_sort(masks.begin(), masks.end(), [](auto a, auto b) {
    return grade_of(a) < grade_of(b);
  });
  std::ostringstream os;
  os.precision(precision);
  bool first = true;
  for (auto m : masks) {
    const double c = coeffs_[m];
    if (c == 0.0) continue;
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    os << std::abs(c);
    if (m != 0) {
      os << " e";
      for (int i = 0; i < dim_; ++i) {
        if (m & (1u << i)) os << (i + 1);
      }
    }
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

int blade_product_sign(std::uint32_t a, std::uint32_t b) noexcept {
  // transpositions needed to sort the concatenated factor list
  int swaps = 0;
  for (std::uint32_t x = a >> 1; x != 0; x >>= 1) swaps += std::popcount(x & b);
  // each repeated factor contributes e_i^2 = -1
  swaps += std::popcount(a & b);
  return (swaps & 1) ? -1 : 1;
}

Multivector geometric_product(const Multivector& a, const Multivector& b) {
  check_same_dim(a, b);
  Multivector out(a.dim());
  const auto ac = a.coeffs();
  const auto bc = b.coeffs();
  for (std::uint32_t i = 0; i < a.size(); ++i) {
    if (ac[i] == 0.0) continue;
    for (std::uint32_t j = 0; j < b.size(); ++j) {
      if (bc[j] == 0.0) continue;
      out[i ^ j] += blade_product_sign(i, j) * ac[i] * bc[j];
    }
  }
  return out;
}

Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
Multivector operator-(Multivector a) { return a *= -1.0; }
Multivector operator*(const Multivector& a, const Multivector& b) {
  return geometric_product(a, b);
}
Multivector operator*(Multivector a, double k) { return a *= k; }
Multivector operator*(double k, Multivector a) { return a *= k; }

Multivector reverse(const Multivector& a) {
  return apply_grade_signs(a, [](int k) { return ((k * (k - 1) / 2) & 1) ? -1 : 1; });
}

Multivector conjugate(const Multivector& a) {
  return apply_grade_signs(a, [](int k) { return ((k * (k + 1) / 2) & 1) ? -1 : 1; });
}

Multivector main_involution(const Multivector& a) {
  return apply_grade_signs(a, [](int k) { return (k & 1) ? -1 : 1; });
}

Multivector inverse_vector(const Multivector& x) {
  if (x.off_grade_norm(1) > 0.0) {
    fail(ErrorCode::invalid_argument, "inverse_vector expects a grade-1 element");
  }
  const double n2 = x.vector_part().squaredNorm();
  if (n2 == 0.0) fail(ErrorCode::division_by_zero, "inverse of the zero vector");
  return conjugate(x) * (1.0 / n2);
}

Rotor Rotor::identity(int dim) { return Rotor(Multivector::scalar(dim, 1.0)); }

Rotor Rotor::from_multivector(Multivector mv, double tol) {
  if (!mv.is_even()) fail(ErrorCode::non_unit_rotor, "rotor has odd-grade components");
  const Multivector n = mv * reverse(mv);
  Multivector residual = n;
  residual[0] -= 1.0;
  if (residual.norm() > tol) {
    fail(ErrorCode::non_unit_rotor,
         "rotor is not unit: |s rev(s) - 1| = " + std::to_string(residual.norm()));
  }
  return Rotor(std::move(mv));
}

Rotor Rotor::normalized(Multivector mv) {
  if (!mv.is_even()) fail(ErrorCode::non_unit_rotor, "rotor has odd-grade components");
  const double n2 = (mv * reverse(mv)).scalar_part();
  if (!(n2 > 1e-28)) fail(ErrorCode::non_unit_rotor, "cannot normalize a vanishing rotor");
  mv *= 1.0 / std::sqrt(n2);
  return Rotor(std::move(mv));
}

Rotor Rotor::inverse() const { return Rotor(reverse(mv_)); }

Rotor Rotor::operator*(const Rotor& other) const { return Rotor(mv_ * other.mv_); }

Rotor Rotor::operator-() const { return Rotor(-mv_); }

Eigen::VectorXd Rotor::apply(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) {
    fail(ErrorCode::dimension_mismatch, "rotor and vector dimensions differ");
  }
  return (mv_ * Multivector::vector(x) * reverse(mv_)).vector_part();
}

Eigen::MatrixXd Rotor::matrix() const {
  const int n = dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) m.col(i) = apply(Eigen::VectorXd::Unit(n, i));
  return m;
}

Rotor rotor_from_plane(int dim, int i, int j, double theta) {
  if (i == j) fail(ErrorCode::invalid_argument, "rotor plane needs two distinct axes");
  if (i < 1 || j < 1 || i > dim || j > dim) {
    fail(ErrorCode::invalid_argument, "rotor axis out of range");
  }
  const Multivector ej = Multivector::blade(dim, 1u << (j - 1));
  const Multivector ei = Multivector::blade(dim, 1u << (i - 1));
  Multivector mv = ej * ei * std::sin(theta / 2);
  mv[0] += std::cos(theta / 2);
  return Rotor::from_multivector(std::move(mv));
}

Eigen::VectorXd apply_rotor(const Rotor& s, const Eigen::VectorXd& x) { return s.apply(x); }

Eigen::VectorXd apply_rotor(const Multivector& s, const Eigen::VectorXd& x, double tol) {
  return Rotor::from_multivector(s, tol).apply(x);
}

}  // namespace conformlets::clifford
