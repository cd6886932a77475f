#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ucpdil/errors.hpp"

namespace ucpdil {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

namespace tol {
inline constexpr double structural = 1e-10;
inline constexpr double rank = 1e-8;
inline constexpr double psd = 1e-12;
}  // namespace tol

/// Largest singular value, computed from the spectrum of X^dagger X.
template <typename Derived>
double operator_norm(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() == 0) return 0.0;
  const Mat gram = x.adjoint() * x;
  Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Hilbert-Schmidt inner product tr(A^dagger B).
template <typename DA, typename DB>
cplx hs_inner(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  return (a.adjoint() * b).trace();
}

template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
  return operator_norm(m - m.adjoint());
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.array().isFinite().all();
}

struct HermitianEig {
  RealVec values;  // ascending
  Mat vectors;     // orthonormal columns
};

/// Throws NotHermitian when ||M - M^dagger|| exceeds `herm_tol`.
HermitianEig hermitian_eig(const Mat& m, double herm_tol = tol::structural);

Mat matrix_unit(int d, int i, int j);
Mat kron(const Mat& a, const Mat& b);
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();

/// Column-major vectorization and its inverse.
Vec vec(const Mat& m);
Mat unvec(const Vec& v, int rows, int cols);

/// Concrete unital *-subalgebra of M_d, stored as a Hilbert-Schmidt
/// orthonormal spanning set.
class MatrixSubalgebra {
 public:
  static MatrixSubalgebra full(int d);
  static MatrixSubalgebra diagonal(int d);
  /// Orthonormalizes `span` (Gram-Schmidt, drop tolerance 1e-10) and checks
  /// unit, adjoint and product closure. Throws InvalidInput otherwise.
  static MatrixSubalgebra from_spanning_set(const std::vector<Mat>& span);
  /// Smallest unital *-subalgebra containing `generators`.
  static MatrixSubalgebra generated_by(const std::vector<Mat>& generators);

  int ambient_dim() const { return dim_; }
  int size() const { return static_cast<int>(basis_.size()); }
  const std::vector<Mat>& basis() const { return basis_; }

  /// Largest membership residual among unit, B_i^dagger and B_i B_j.
  double closure_defect() const;

 private:
  MatrixSubalgebra(int dim, std::vector<Mat> basis)
      : dim_(dim), basis_(std::move(basis)) {}

  int dim_ = 0;
  std::vector<Mat> basis_;
};

/// Hilbert-Schmidt orthogonal projection onto span(S.basis).
Mat conditional_expectation(const MatrixSubalgebra& s, const Mat& x);

/// ||X - E(X)|| in operator norm.
double membership_residual(const MatrixSubalgebra& s, const Mat& x);

/// Density matrix rho realizing phi(a) = tr(rho a).
class State {
 public:
  static State from_density(const Mat& rho,
                            double faithful_tol = tol::structural);
  static State tracial(int d);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Mat& rho() const { return rho_; }
  bool faithful() const { return faithful_; }
  double min_eigenvalue() const { return min_eig_; }

  cplx operator()(const Mat& a) const { return (rho_ * a).trace(); }

 private:
  State(Mat rho, bool faithful, double min_eig)
      : rho_(std::move(rho)), faithful_(faithful), min_eig_(min_eig) {}

  Mat rho_;
  bool faithful_ = false;
  double min_eig_ = 0.0;
};

/// Complex Gaussian matrix (entries with unit variance), seeded.
Mat random_gaussian(int rows, int cols, std::mt19937_64& rng);
Mat random_hermitian(int d, std::mt19937_64& rng);
/// Haar-distributed isometry rows x cols (rows >= cols).
Mat haar_isometry(int rows, int cols, std::mt19937_64& rng);
Mat haar_unitary(int d, std::mt19937_64& rng);
/// Random complex vector scaled to unit norm.
Vec random_unit_vector(int n, std::mt19937_64& rng);

}  // namespace ucpdil
