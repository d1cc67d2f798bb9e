#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace conformlets::clifford {

inline constexpr int kMaxDim = 8;
inline constexpr double kDefaultTolerance = 1e-12;

/// Dense element of the real Clifford algebra Cl(0,n), n <= 8.
///
/// Coefficients are indexed by basis bit masks: bit i-1 set means e_i is a
/// factor of the blade, so mask 0b101 is e1e3. Within a blade the factors are
/// in ascending index order. Every basis vector squares to -1.
class Multivector {
 public:
  explicit Multivector(int dim);

  static Multivector scalar(int dim, double value);
  static Multivector blade(int dim, std::uint32_t mask, double coeff = 1.0);
  static Multivector vector(const Eigen::VectorXd& x);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  double operator[](std::uint32_t mask) const { return coeffs_.at(mask); }
  double& operator[](std::uint32_t mask) { return coeffs_.at(mask); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }

  /// Grade-k projection.
  Multivector grade(int k) const;
  /// Euclidean norm of the coefficients outside grade k.
  double off_grade_norm(int k) const;
  bool is_even() const;

  double scalar_part() const noexcept { return coeffs_[0]; }
  /// Grade-1 coefficients as an n-vector.
  Eigen::VectorXd vector_part() const;
  /// sqrt of the sum of squared coefficients; |x| for vectors, |ab| for products of vectors.
  double norm() const;

  Multivector& operator+=(const Multivector& other);
  Multivector& operator-=(const Multivector& other);
  Multivector& operator*=(double k);

  /// Terms "a_A e_A" sorted by grade then mask.
  std::string to_string(int precision = 6) const;

 private:
  int dim_;
  std::vector<double> coeffs_;
};

/// Sign of e_a e_b = sign * e_{a xor b} for basis masks a, b in Cl(0,n).
int blade_product_sign(std::uint32_t a, std::uint32_t b) noexcept;

Multivector geometric_product(const Multivector& a, const Multivector& b);

Multivector operator+(Multivector a, const Multivector& b);
Multivector operator-(Multivector a, const Multivector& b);
Multivector operator-(Multivector a);
Multivector operator*(const Multivector& a, const Multivector& b);
Multivector operator*(Multivector a, double k);
Multivector operator*(double k, Multivector a);

Multivector reverse(const Multivector& a);
Multivector conjugate(const Multivector& a);
Multivector main_involution(const Multivector& a);

/// x^{-1} = conj(x)/|x|^2 for a nonzero grade-1 x.
Multivector inverse_vector(const Multivector& x);

/// Even unit multivector acting on vectors by x -> s x conj(s).
class Rotor {
 public:
  static Rotor identity(int dim);
  /// Validates even grade and s * reverse(s) = 1 within tol.
  static Rotor from_multivector(Multivector mv, double tol = kDefaultTolerance);
  /// Scales an even multivector to unit norm; rejects odd parts and norms below 1e-14.
  static Rotor normalized(Multivector mv);

  const Multivector& multivector() const noexcept { return mv_; }
  int dim() const noexcept { return mv_.dim(); }

  /// The inverse rotor, conj(s) = reverse(s).
  Rotor inverse() const;
  Rotor operator*(const Rotor& other) const;
  Rotor operator-() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// Rotation matrix with columns apply(e_i).
  Eigen::MatrixXd matrix() const;

 private:
  explicit Rotor(Multivector mv) : mv_(std::move(mv)) {}
  Multivector mv_;
};

/// cos(theta/2) + e_j e_i sin(theta/2) (axes 1-based). Turns e_j towards e_i by
/// theta and e_i towards -e_j.
Rotor rotor_from_plane(int dim, int i, int j, double theta);

Eigen::VectorXd apply_rotor(const Rotor& s, const Eigen::VectorXd& x);
/// Validating variant for raw multivectors; throws non-unit-rotor on failure.
Eigen::VectorXd apply_rotor(const Multivector& s, const Eigen::VectorXd& x,
                            double tol = kDefaultTolerance);

}  // namespace conformlets::clifford
