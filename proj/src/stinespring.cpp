#include "ucpdil/stinespring.hpp"

#include <algorithm>
#include <memory>

namespace ucpdil {

double StinespringTriple::compression_residual() const {
  double worst = 0.0;
  for (const Mat& a : algebra_.basis()) {
    const Mat compressed = isometry_.adjoint() * rep(a) * isometry_;
    worst = std::max(worst, operator_norm(compressed - channel_.apply(a)));
  }
  return worst;
}

double StinespringTriple::isometry_defect() const {
  const int d = base_dim();
  return operator_norm(isometry_.adjoint() * isometry_ - Mat::Identity(d, d));
}

double StinespringTriple::homomorphism_defect() const {
  const int m = space_dim();
  const int d = base_dim();
  double worst = operator_norm(rep(Mat::Identity(d, d)) - Mat::Identity(m, m));
  const auto& basis = algebra_.basis();
  std::vector<Mat> images;
  images.reserve(basis.size());
  for (const Mat& a : basis) images.push_back(rep(a));
  for (size_t i = 0; i < basis.size(); ++i) {
    worst = std::max(worst, operator_norm(rep(basis[i].adjoint()) - images[i].adjoint()));
    for (size_t j = 0; j < basis.size(); ++j) {
      worst = std::max(worst, operator_norm(rep(basis[i] * basis[j]) - images[i] * images[j]));
    }
  }
  return worst;
}

StinespringTriple gns_dilate(const UcpMap& phi, const MatrixSubalgebra& algebra, double tol) {
  const int d = phi.dim();
  if (algebra.ambient_dim() != d) {
    throw Error(ErrorKind::DimensionMismatch, "algebra and channel act on different M_d");
  }
  const auto& basis = algebra.basis();
  const int na = algebra.size();
  for (const Mat& b : basis) {
    if (membership_residual(algebra, phi.apply(b)) > tol) {
      throw Error(ErrorKind::AlgebraNotInvariant, "Phi does not map the algebra into itself");
    }
  }

  // Gram matrix on B_i (x) e_k, flattened as i * d + k.
  const int n = na * d;
  Mat gram(n, n);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) {
      const Mat block = phi.apply(basis[i].adjoint() * basis[j]);
      gram.block(i * d, j * d, d, d) = block;
    }
  const HermitianEig eig = hermitian_eig(gram, std::max(tol, tol::structural));
  const double lmax = eig.values.maxCoeff();
  std::vector<int> kept;
  for (int s = n - 1; s >= 0; --s)
    if (lmax > 0 && eig.values(s) > tol * lmax) kept.push_back(s);
  if (kept.empty()) throw Error(ErrorKind::DegenerateGram, "Gram matrix vanishes");

  const int m = static_cast<int>(kept.size());
  // Quotient coordinates y = Lambda^{1/2} U^dagger c; lift c = U Lambda^{-1/2} y.
  Mat to_quotient(m, n);
  Mat lift(n, m);
  for (int s = 0; s < m; ++s) {
    const double lambda = eig.values(kept[s]);
    to_quotient.row(s) = std::sqrt(lambda) * eig.vectors.col(kept[s]).adjoint();
    lift.col(s) = eig.vectors.col(kept[s]) / std::sqrt(lambda);
  }

  // V x = 1 (x) x, with 1 = sum_i <B_i, I> B_i.
  Mat unit_coords = Mat::Zero(n, d);
  const Mat id = Mat::Identity(d, d);
  for (int i = 0; i < na; ++i) {
    const cplx w = hs_inner(basis[i], id);
    for (int k = 0; k < d; ++k) unit_coords(i * d + k, k) = w;
  }
  Mat isometry = to_quotient * unit_coords;

  auto shared_basis = std::make_shared<const std::vector<Mat>>(basis);
  auto rep = [shared_basis, to_quotient, lift, d](const Mat& a) -> Mat {
    const auto& b = *shared_basis;
    const int na_ = static_cast<int>(b.size());
    // Left multiplication a (B_j (x) e_l) = sum_i <B_i, a B_j> B_i (x) e_l.
    Mat left(na_, na_);
    for (int i = 0; i < na_; ++i)
      for (int j = 0; j < na_; ++j) left(i, j) = hs_inner(b[i], a * b[j]);
    Mat lifted(na_ * d, lift.cols());
    for (int i = 0; i < na_; ++i) {
      lifted.middleRows(i * d, d).setZero();
      for (int j = 0; j < na_; ++j) {
        if (left(i, j) != cplx(0.0)) lifted.middleRows(i * d, d) += left(i, j) * lift.middleRows(j * d, d);
      }
    }
    return to_quotient * lifted;
  };
  return StinespringTriple(phi, algebra, std::move(isometry), std::move(rep), lift);
}

StinespringTriple kraus_dilate(const UcpMap& phi_in) {
  const UcpMap phi = minimal_kraus(phi_in);
  const int d = phi.dim();
  const int r = phi.kraus_count();
  Mat isometry(r * d, d);
  for (int i = 0; i < r; ++i) isometry.middleRows(i * d, d) = phi.kraus()[i];
  auto rep = [r](const Mat& a) -> Mat { return kron(Mat::Identity(r, r), a); };
  return StinespringTriple(phi, MatrixSubalgebra::full(d), std::move(isometry), std::move(rep),
                           Mat());
}

double unitarity_defect(const StinespringTriple& t) {
  const int m = t.space_dim();
  return operator_norm(t.isometry() * t.isometry().adjoint() - Mat::Identity(m, m));
}

bool multiplicative_commutation_check(const StinespringTriple& t, const Mat& x, double tol) {
  if (!multiplicative_domain_member(t.channel(), x, std::max(tol, tol::structural))) {
    throw Error(ErrorKind::NotInDomain, "x is outside the multiplicative domain");
  }
  const Mat proj = t.isometry() * t.isometry().adjoint();
  const Mat s = t.rep(x);
  return operator_norm(s * proj - proj * s) <= tol;
}

}  // namespace ucpdil
