#include "doctest.h"

#include "subeq/errors.hpp"
#include "subeq/spd.hpp"

#include <cmath>
#include <random>

using namespace subeq;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Eigenvalues of a symmetric 2x2 from its characteristic polynomial.
std::pair<double, double> char_poly_roots(const Matrix& m) {
  const double tr = m(0, 0) + m(1, 1);
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double disc = std::sqrt(tr * tr - 4.0 * det);
  return {(tr - disc) / 2.0, (tr + disc) / 2.0};
}

// Sylvester's criterion: every leading principal minor positive.
bool leading_minors_positive(const Matrix& m) {
  for (Eigen::Index k = 1; k <= m.rows(); ++k) {
    if (!(m.topLeftCorner(k, k).determinant() > 0.0)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("construction rejects asymmetric, non-square and non-finite input") {
  CHECK_THROWS_AS(SpdMatrix(mat2(1, 2, 3, 4)), DomainError);
  CHECK_THROWS_AS(SpdMatrix(Matrix::Zero(2, 3)), DomainError);
  CHECK_THROWS_AS(SpdMatrix(mat2(1, NAN, NAN, 1)), DomainError);
  CHECK_NOTHROW(SpdMatrix(mat2(1, 2, 2, 1)));  // definiteness is checked on demand
}

TEST_CASE("factor products") {
  SUBCASE("identity factor") { CHECK(spd_from_factor(Matrix::Identity(2, 2)).entries() == Matrix::Identity(2, 2)); }
  SUBCASE("upper triangular factor, multiplied by hand") {
    const SpdMatrix p = spd_from_factor(mat2(1, 1, 0, 1));
    CHECK(p.entries() == mat2(1, 1, 1, 2));
  }
  SUBCASE("3x3 normal sample with seed 7 is positive definite") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    Matrix x(3, 3);
    for (Eigen::Index i = 0; i < 9; ++i) x(i / 3, i % 3) = normal(rng);
    const SpdMatrix p = spd_from_factor(x);
    CHECK(assert_spd(p).ok);
    CHECK(leading_minors_positive(p.entries()));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(spd_from_factor(Matrix::Zero(2, 3)), DomainError);
    CHECK_THROWS_AS(spd_from_factor(mat2(1, INFINITY, 0, 1)), DomainError);
  }
}

TEST_CASE("factor products are bit-exactly symmetric") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 8;
    Matrix x(n, n);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    const Matrix p = spd_from_factor(x).entries();
    CHECK(p == p.transpose());
  }
}

TEST_CASE("solves") {
  CHECK(solve_spd(SpdMatrix::identity(2), vec2(3, -1)) == vec2(3, -1));
  CHECK(solve_spd(SpdMatrix(mat2(2, 0, 0, 4)), vec2(2, 4)).isApprox(vec2(1, 1), 1e-15));
  // Back-substitution: [[1,1],[1,2]]·(1,1) = (2,3).
  CHECK(solve_spd(SpdMatrix(mat2(1, 1, 1, 2)), vec2(2, 3)).isApprox(vec2(1, 1), 1e-14));
}

TEST_CASE("solve failures are typed errors") {
  CHECK_THROWS_AS(solve_spd(SpdMatrix(mat2(1, 2, 2, 1)), vec2(1, 1)), SolveError);
  CHECK_THROWS_AS(solve_spd(SpdMatrix(mat2(1, 0, 0, 0)), vec2(1, 1)), SolveError);
  CHECK_THROWS_AS(solve_spd(SpdMatrix(mat2(1, 0, 0, 1e-20)), vec2(1, 1)), SolveError);
  CHECK_THROWS_AS(solve_spd(SpdMatrix::identity(2), Vector::Ones(3)), DomainError);
}

TEST_CASE("solve residual property on random SPD systems") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 12;
    const SpdMatrix a = random_spd(n, rng);
    const Vector b = random_normal_vector(n, rng);
    const Vector x = solve_spd(a, b);
    CHECK((a.entries() * x - b).norm() <= 1e-9 * (1.0 + b.norm()));
  }
}

TEST_CASE("extreme eigenvalues") {
  CHECK(spectral_radius(SpdMatrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(min_eigenvalue(SpdMatrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_radius(SpdMatrix(mat2(2, 0, 0, 5))) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(min_eigenvalue(SpdMatrix(mat2(2, 0, 0, 5))) == doctest::Approx(2.0).epsilon(1e-12));

  const Matrix m = mat2(1, 1, 1, 2);
  const auto [lo, hi] = char_poly_roots(m);
  CHECK(spectral_radius(SpdMatrix(m)) == doctest::Approx(hi).epsilon(1e-9));
  CHECK(min_eigenvalue(SpdMatrix(m)) == doctest::Approx(lo).epsilon(1e-9));
  CHECK(hi == doctest::Approx((3 + std::sqrt(5.0)) / 2).epsilon(1e-12));

  CHECK_THROWS_AS(spectral_radius(SpdMatrix(mat2(1, 2, 2, 1))), SolveError);
  CHECK_THROWS_AS(min_eigenvalue(SpdMatrix(mat2(1, 0, 0, 0))), SolveError);
}

TEST_CASE("min eigenvalue equals spectral radius only for scalar multiples of the identity") {
  for (double s : {0.5, 1.0, 7.0}) {
    const SpdMatrix a = SpdMatrix::identity(3).scaled(s);
    CHECK(min_eigenvalue(a) == doctest::Approx(spectral_radius(a)).epsilon(1e-14));
  }
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 1.0, 2.0, 3.0;
  CHECK(min_eigenvalue(SpdMatrix(d)) < spectral_radius(SpdMatrix(d)));
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const SpdMatrix a = random_spd(4, rng);
    CHECK(min_eigenvalue(a) <= spectral_radius(a));
  }
}

TEST_CASE("definiteness reports") {
  CHECK(assert_spd(Matrix::Identity(2, 2)).ok);

  const auto indefinite = assert_spd(mat2(1, 2, 2, 1));
  CHECK_FALSE(indefinite.ok);
  CHECK(indefinite.eigenvalue == doctest::Approx(-1.0).epsilon(1e-12));

  CHECK_FALSE(assert_spd(mat2(1, 0, 0, 0)).ok);

  const auto asym = assert_spd(mat2(1, 0.5, 0.25, 1));
  CHECK_FALSE(asym.ok);
  CHECK(asym.row == 0);
  CHECK(asym.col == 1);
  CHECK_FALSE(assert_spd(Matrix::Zero(2, 3)).ok);
}

TEST_CASE("random SPD draws are deterministic and definite") {
  std::mt19937_64 a(3), b(3);
  for (int t = 0; t < 20; ++t) {
    const SpdMatrix x = random_spd(5, a);
    CHECK(x == random_spd(5, b));
    CHECK(assert_spd(x).ok);
  }
}

TEST_CASE("quadratic form") {
  CHECK(quadratic_form(SpdMatrix(mat2(2, 0, 0, 3)), vec2(1, 2)) == doctest::Approx(14.0));
}
