#pragma once

#include <Eigen/Dense>

#include <optional>
#include <random>
#include <string>

namespace subeq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kSpdTolerance = 1e-12;

/// Dense symmetric matrix intended to be positive definite.
///
/// Symmetry is exact and enforced at construction. Positive definiteness is
/// checked on demand with assert_spd(), never implicitly by arithmetic.
class SpdMatrix {
public:
  SpdMatrix() = default;

  /// Throws DomainError unless `entries` is square, finite and bit-exactly symmetric.
  explicit SpdMatrix(Matrix entries);

  static SpdMatrix identity(int n);
  static SpdMatrix zero(int n);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

  SpdMatrix& operator+=(const SpdMatrix& other);
  SpdMatrix& operator/=(double divisor);

  friend SpdMatrix operator+(SpdMatrix lhs, const SpdMatrix& rhs) { return lhs += rhs; }
  friend SpdMatrix operator/(SpdMatrix lhs, double divisor) { return lhs /= divisor; }
  friend bool operator==(const SpdMatrix& a, const SpdMatrix& b) { return a.entries_ == b.entries_; }

  /// Scales by a positive factor; symmetry is preserved elementwise.
  SpdMatrix scaled(double factor) const;

private:
  Matrix entries_;
};

/// Returns XᵀX with the two off-diagonal products averaged so the result is exactly symmetric.
SpdMatrix spd_from_factor(const Matrix& factor);

/// x with A x = b through a Cholesky factorization. Throws SolveError when A is not PD.
Vector solve_spd(const SpdMatrix& a, const Vector& b);

/// Largest eigenvalue. Throws SolveError when A fails assert_spd.
double spectral_radius(const SpdMatrix& a);

/// Smallest eigenvalue. Throws SolveError when A fails assert_spd.
double min_eigenvalue(const SpdMatrix& a);

/// All eigenvalues in ascending order, without a definiteness check.
Vector symmetric_eigenvalues(const SpdMatrix& a);

/// Outcome of assert_spd. `ok` is false together with a description of the first violation.
struct SpdCheck {
  bool ok = true;
  std::string violation;
  std::optional<int> row;
  std::optional<int> col;
  std::optional<double> eigenvalue;

  explicit operator bool() const { return ok; }
};

SpdCheck assert_spd(const Matrix& a, double tol = kSpdTolerance);
inline SpdCheck assert_spd(const SpdMatrix& a, double tol = kSpdTolerance) {
  return assert_spd(a.entries(), tol);
}

/// Draws XᵀX with X having i.i.d. standard normal entries, redrawing the
/// (probability-zero) singular case.
SpdMatrix random_spd(int n, std::mt19937_64& rng);

/// Vector of i.i.d. standard normal entries.
Vector random_normal_vector(int n, std::mt19937_64& rng);

/// xᵀ A x.
double quadratic_form(const SpdMatrix& a, const Vector& x);

}  // namespace subeq
