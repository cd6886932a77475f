#include "ucpdil/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace ucpdil {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotCompletelyPositive: return "NotCompletelyPositive";
    case ErrorKind::NoPositiveFixedPoint: return "NoPositiveFixedPoint";
    case ErrorKind::NonFaithfulState: return "NonFaithfulState";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::NotInAlgebra: return "NotInAlgebra";
    case ErrorKind::AlgebraNotInvariant: return "AlgebraNotInvariant";
    case ErrorKind::DegenerateGram: return "DegenerateGram";
    case ErrorKind::NotInDomain: return "NotInDomain";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::CapacityExceeded: return "CapacityExceeded";
    case ErrorKind::AdjointAbsent: return "AdjointAbsent";
  }
  return "Unknown";
}

HermitianEig hermitian_eig(const Mat& m, double herm_tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "hermitian_eig needs a square matrix");
  }
  if (hermiticity_defect(m) > herm_tol) {
    throw Error(ErrorKind::NotHermitian, "||M - M^dagger|| exceeds tolerance");
  }
  const Mat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

Mat matrix_unit(int d, int i, int j) {
  Mat e = Mat::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

Mat kron(const Mat& a, const Mat& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat pauli_y() {
  Mat m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Vec vec(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

Mat unvec(const Vec& v, int rows, int cols) {
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

namespace {

constexpr double kDropTol = 1e-10;

// Modified Gram-Schmidt in the Hilbert-Schmidt inner product, run twice per
// candidate for stability.
void orthonormal_append(std::vector<Mat>& basis, const Mat& candidate) {
  const double scale = std::max(1.0, candidate.norm());
  Mat r = candidate;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Mat& b : basis) r -= hs_inner(b, r) * b;
  }
  const double n = r.norm();
  if (n > kDropTol * scale) basis.push_back(r / n);
}

}  // namespace

MatrixSubalgebra MatrixSubalgebra::full(int d) {
  std::vector<Mat> basis;
  basis.reserve(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) basis.push_back(matrix_unit(d, i, j));
  return MatrixSubalgebra(d, std::move(basis));
}

MatrixSubalgebra MatrixSubalgebra::diagonal(int d) {
  std::vector<Mat> basis;
  for (int i = 0; i < d; ++i) basis.push_back(matrix_unit(d, i, i));
  return MatrixSubalgebra(d, std::move(basis));
}

MatrixSubalgebra MatrixSubalgebra::from_spanning_set(const std::vector<Mat>& span) {
  if (span.empty()) throw Error(ErrorKind::InvalidInput, "empty spanning set");
  const int d = static_cast<int>(span.front().rows());
  std::vector<Mat> basis;
  for (const Mat& m : span) {
    if (m.rows() != d || m.cols() != d) {
      throw Error(ErrorKind::DimensionMismatch, "spanning set elements must be d x d");
    }
    orthonormal_append(basis, m);
  }
  MatrixSubalgebra s(d, std::move(basis));
  if (s.closure_defect() > tol::structural) {
    throw Error(ErrorKind::InvalidInput,
                "span is not a unital *-subalgebra (closure defect " +
                    std::to_string(s.closure_defect()) + ")");
  }
  return s;
}

MatrixSubalgebra MatrixSubalgebra::generated_by(const std::vector<Mat>& generators) {
  if (generators.empty()) throw Error(ErrorKind::InvalidInput, "no generators");
  const int d = static_cast<int>(generators.front().rows());
  std::vector<Mat> basis;
  orthonormal_append(basis, Mat::Identity(d, d));
  for (const Mat& g : generators) {
    if (g.rows() != d || g.cols() != d) {
      throw Error(ErrorKind::DimensionMismatch, "generators must be d x d");
    }
    orthonormal_append(basis, g);
    orthonormal_append(basis, g.adjoint());
  }
  // Products of basis pairs until the span stops growing; bounded by d^2.
  for (size_t before = 0; before != basis.size();) {
    before = basis.size();
    const std::vector<Mat> snapshot = basis;
    for (const Mat& a : snapshot)
      for (const Mat& b : snapshot) orthonormal_append(basis, a * b);
  }
  return MatrixSubalgebra(d, std::move(basis));
}

double MatrixSubalgebra::closure_defect() const {
  double worst = membership_residual(*this, Mat::Identity(dim_, dim_));
  for (const Mat& a : basis_) {
    worst = std::max(worst, membership_residual(*this, a.adjoint()));
    for (const Mat& b : basis_) worst = std::max(worst, membership_residual(*this, a * b));
  }
  return worst;
}

Mat conditional_expectation(const MatrixSubalgebra& s, const Mat& x) {
  const int d = s.ambient_dim();
  if (x.rows() != d || x.cols() != d) {
    throw Error(ErrorKind::DimensionMismatch, "conditional_expectation: X is not d x d");
  }
  Mat out = Mat::Zero(d, d);
  for (const Mat& b : s.basis()) out += hs_inner(b, x) * b;
  return out;
}

double membership_residual(const MatrixSubalgebra& s, const Mat& x) {
  return operator_norm(x - conditional_expectation(s, x));
}

State State::from_density(const Mat& rho, double faithful_tol) {
  if (rho.rows() != rho.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "density matrix must be square");
  }
  if (!all_finite(rho)) throw Error(ErrorKind::InvalidInput, "density matrix not finite");
  const HermitianEig eig = hermitian_eig(rho);
  const double min_eig = eig.values.minCoeff();
  if (min_eig < -tol::psd) {
    throw Error(ErrorKind::InvalidInput, "density matrix is not positive semidefinite");
  }
  if (std::abs(rho.trace() - 1.0) > tol::psd) {
    throw Error(ErrorKind::InvalidInput, "density matrix trace differs from 1");
  }
  return State(0.5 * (rho + rho.adjoint()), min_eig > faithful_tol, min_eig);
}

State State::tracial(int d) {
  return from_density(Mat::Identity(d, d) / static_cast<double>(d));
}

Mat random_gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = cplx(normal(rng), normal(rng));
  return m;
}

Mat random_hermitian(int d, std::mt19937_64& rng) {
  const Mat g = random_gaussian(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

Mat haar_isometry(int rows, int cols, std::mt19937_64& rng) {
  if (rows < cols) throw Error(ErrorKind::InvalidInput, "isometry needs rows >= cols");
  const Mat g = random_gaussian(rows, cols, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(rows, cols);
  // Fix column phases against diag(R) so the distribution is Haar.
  const Mat r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (int j = 0; j < cols; ++j) {
    const cplx diag = r(j, j);
    if (std::abs(diag) > 0) q.col(j) *= diag / std::abs(diag);
  }
  return q;
}

Mat haar_unitary(int d, std::mt19937_64& rng) { return haar_isometry(d, d, rng); }

Vec random_unit_vector(int n, std::mt19937_64& rng) {
  Vec v = random_gaussian(n, 1, rng);
  return v / v.norm();
}

}  // namespace ucpdil
