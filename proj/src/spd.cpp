#include "subeq/spd.hpp"

#include "subeq/errors.hpp"

#include <cmath>
#include <sstream>

namespace subeq {

namespace {

void require_square_finite(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a nonempty square matrix, got " << m.rows() << "x" << m.cols();
    throw DomainError(os.str());
  }
  if (!m.allFinite()) throw DomainError(std::string(what) + ": non-finite entry");
}

}  // namespace

SpdMatrix::SpdMatrix(Matrix entries) : entries_(std::move(entries)) {
  require_square_finite(entries_, "SpdMatrix");
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < entries_.cols(); ++j) {
      if (entries_(i, j) != entries_(j, i)) {
        std::ostringstream os;
        os << "SpdMatrix: entry (" << i << "," << j << ") differs from its transpose";
        throw DomainError(os.str());
      }
    }
  }
}

SpdMatrix SpdMatrix::identity(int n) { return SpdMatrix(Matrix::Identity(n, n)); }

SpdMatrix SpdMatrix::zero(int n) { return SpdMatrix(Matrix::Zero(n, n)); }

SpdMatrix& SpdMatrix::operator+=(const SpdMatrix& other) {
  if (other.dim() != dim()) throw DomainError("SpdMatrix: dimension mismatch in sum");
  entries_ += other.entries_;
  return *this;
}

SpdMatrix& SpdMatrix::operator/=(double divisor) {
  entries_ /= divisor;
  return *this;
}

SpdMatrix SpdMatrix::scaled(double factor) const {
  SpdMatrix out = *this;
  out.entries_ *= factor;
  return out;
}

SpdMatrix spd_from_factor(const Matrix& factor) {
  require_square_finite(factor, "spd_from_factor");
  Matrix product = factor.transpose() * factor;
  const Eigen::Index n = product.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (product(i, j) + product(j, i));
      product(i, j) = avg;
      product(j, i) = avg;
    }
  }
  return SpdMatrix(std::move(product));
}

Vector solve_spd(const SpdMatrix& a, const Vector& b) {
  if (b.size() != a.dim()) throw DomainError("solve_spd: dimension mismatch");
  Eigen::LLT<Matrix> llt(a.entries());
  if (llt.info() != Eigen::Success) {
    throw SolveError("solve_spd: Cholesky factorization failed (matrix not positive definite)");
  }
  // A pivot at roundoff level means the matrix is PD only by accident of rounding.
  const auto& l = llt.matrixLLT();
  const double scale = a.entries().diagonal().cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) * l(i, i) > kSpdTolerance * scale)) {
      throw SolveError("solve_spd: matrix is numerically singular");
    }
  }
  Vector x = llt.solve(b);
  if (!x.allFinite()) throw SolveError("solve_spd: non-finite solution");
  return x;
}

namespace {

Eigen::VectorXd eigenvalues_checked(const SpdMatrix& a, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.entries(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SolveError(std::string(what) + ": eigen solver failed");
  const auto& ev = solver.eigenvalues();
  if (!(ev(0) > kSpdTolerance)) {
    std::ostringstream os;
    os << what << ": matrix is not positive definite (min eigenvalue " << ev(0) << ")";
    throw SolveError(os.str());
  }
  return ev;
}

}  // namespace

double spectral_radius(const SpdMatrix& a) {
  const auto ev = eigenvalues_checked(a, "spectral_radius");
  return ev(ev.size() - 1);
}

double min_eigenvalue(const SpdMatrix& a) { return eigenvalues_checked(a, "min_eigenvalue")(0); }

Vector symmetric_eigenvalues(const SpdMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.entries(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SolveError("symmetric_eigenvalues: eigen solver failed");
  return solver.eigenvalues();
}

SpdCheck assert_spd(const Matrix& a, double tol) {
  SpdCheck check;
  if (a.rows() != a.cols() || a.rows() == 0) {
    check.ok = false;
    check.violation = "not a nonempty square matrix";
    return check;
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (!std::isfinite(a(i, j))) {
        check.ok = false;
        check.row = static_cast<int>(i);
        check.col = static_cast<int>(j);
        check.violation = "non-finite entry";
        return check;
      }
      if (j > i && a(i, j) != a(j, i)) {
        check.ok = false;
        check.row = static_cast<int>(i);
        check.col = static_cast<int>(j);
        check.violation = "asymmetric entry";
        return check;
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  const double lowest = solver.eigenvalues()(0);
  if (solver.info() != Eigen::Success || !(lowest > tol)) {
    check.ok = false;
    check.eigenvalue = lowest;
    std::ostringstream os;
    os << "smallest eigenvalue " << lowest << " not above tolerance " << tol;
    check.violation = os.str();
  }
  return check;
}

SpdMatrix random_spd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    Matrix x(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) x(i, j) = normal(rng);
    }
    SpdMatrix p = spd_from_factor(x);
    if (assert_spd(p)) return p;
  }
}

Vector random_normal_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

double quadratic_form(const SpdMatrix& a, const Vector& x) { return x.dot(a.entries() * x); }

}  // namespace subeq
