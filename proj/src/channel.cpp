#include "ucpdil/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

namespace ucpdil {

UcpMap UcpMap::from_kraus(std::vector<Mat> kraus, double unital_tol) {
  if (kraus.empty()) throw Error(ErrorKind::InvalidInput, "no Kraus operators");
  const int d = static_cast<int>(kraus.front().rows());
  if (d == 0) throw Error(ErrorKind::InvalidInput, "zero-dimensional channel");
  Mat sum = Mat::Zero(d, d);
  for (const Mat& k : kraus) {
    if (k.rows() != d || k.cols() != d) {
      throw Error(ErrorKind::DimensionMismatch, "Kraus operators must all be d x d");
    }
    if (!all_finite(k)) throw Error(ErrorKind::InvalidInput, "non-finite Kraus entry");
    sum += k.adjoint() * k;
  }
  const double defect = operator_norm(sum - Mat::Identity(d, d));
  if (defect > unital_tol) {
    throw Error(ErrorKind::InvalidInput,
                "map is not unital: ||sum K^dagger K - I|| = " + std::to_string(defect));
  }
  return UcpMap(d, std::move(kraus));
}

Mat UcpMap::apply(const Mat& a) const {
  if (a.rows() != dim_ || a.cols() != dim_) {
    throw Error(ErrorKind::DimensionMismatch, "apply: operand is not d x d");
  }
  Mat out = Mat::Zero(dim_, dim_);
  for (const Mat& k : kraus_) out.noalias() += k.adjoint() * a * k;
  return out;
}

Mat UcpMap::apply_power(const Mat& a, int k) const {
  Mat out = a;
  for (int i = 0; i < k; ++i) out = apply(out);
  return out;
}

Mat UcpMap::apply_dual(const Mat& x) const {
  if (x.rows() != dim_ || x.cols() != dim_) {
    throw Error(ErrorKind::DimensionMismatch, "apply_dual: operand is not d x d");
  }
  Mat out = Mat::Zero(dim_, dim_);
  for (const Mat& k : kraus_) out.noalias() += k * x * k.adjoint();
  return out;
}

Mat UcpMap::transfer_matrix() const {
  const int n = dim_ * dim_;
  Mat t = Mat::Zero(n, n);
  for (const Mat& k : kraus_) t += Eigen::kroneckerProduct(Mat(k.transpose()), Mat(k.adjoint()));
  return t;
}

Mat UcpMap::dual_transfer_matrix() const {
  const int n = dim_ * dim_;
  Mat t = Mat::Zero(n, n);
  for (const Mat& k : kraus_) t += Eigen::kroneckerProduct(Mat(k.conjugate()), k);
  return t;
}

namespace {

Mat choi_of(int d, const auto& map) {
  Mat j = Mat::Zero(d * d, d * d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) j.block(r * d, c * d, d, d) = map(matrix_unit(d, r, c));
  return j;
}

}  // namespace

ChoiMatrix choi(const UcpMap& phi) {
  const int d = phi.dim();
  return {d, choi_of(d, [&](const Mat& e) { return phi.apply(e); })};
}

UcpMap kraus_from_choi(const ChoiMatrix& c, double tol) {
  const int d = c.dim;
  if (c.matrix.rows() != d * d || c.matrix.cols() != d * d) {
    throw Error(ErrorKind::DimensionMismatch, "Choi matrix must be d^2 x d^2");
  }
  const HermitianEig eig = hermitian_eig(c.matrix, std::max(tol, tol::structural));
  if (eig.values.minCoeff() < -tol) {
    throw Error(ErrorKind::NotCompletelyPositive,
                "Choi matrix has eigenvalue " + std::to_string(eig.values.minCoeff()));
  }
  const double cut = tol * std::max(1.0, eig.values.maxCoeff());
  std::vector<Mat> kraus;
  for (int s = static_cast<int>(eig.values.size()) - 1; s >= 0; --s) {
    if (eig.values(s) <= cut) continue;
    // J = sum_k v_k v_k^dagger with v_k[i d + l] = conj(K_k(i, l)).
    const Vec v = std::sqrt(eig.values(s)) * eig.vectors.col(s);
    Mat k(d, d);
    for (int i = 0; i < d; ++i)
      for (int l = 0; l < d; ++l) k(i, l) = std::conj(v(i * d + l));
    kraus.push_back(std::move(k));
  }
  if (kraus.empty()) throw Error(ErrorKind::InvalidInput, "Choi matrix is numerically zero");
  return UcpMap::from_kraus(std::move(kraus), std::max(tol, tol::structural));
}

int choi_rank(const UcpMap& phi, double tol) {
  const HermitianEig eig = hermitian_eig(choi(phi).matrix);
  const double cut = tol * std::max(1.0, eig.values.maxCoeff());
  return static_cast<int>((eig.values.array() > cut).count());
}

UcpMap minimal_kraus(const UcpMap& phi, double tol) { return kraus_from_choi(choi(phi), tol); }

double map_distance(const UcpMap& a, const UcpMap& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "maps act on different M_d");
  const int d = a.dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Mat e = matrix_unit(d, i, j);
      worst = std::max(worst, operator_norm(a.apply(e) - b.apply(e)));
    }
  return worst;
}

InvariantState invariant_state(const UcpMap& phi, double tol) {
  const int d = phi.dim();
  const int n = d * d;
  const Mat m = phi.dual_transfer_matrix() - Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVec& sv = svd.singularValues();  // descending
  int null_dim = 0;
  for (int i = 0; i < n; ++i)
    if (sv(i) <= tol) ++null_dim;
  if (null_dim == 0) {
    throw Error(ErrorKind::NoPositiveFixedPoint, "dual transfer matrix has no eigenvalue 1");
  }
  const Mat right = svd.matrixV().rightCols(null_dim);
  const Mat left = svd.matrixU().rightCols(null_dim);
  // Spectral projector onto the fixed space along the complementary
  // invariant subspace; valid because eigenvalue 1 is semisimple for CP maps.
  const Mat overlap = left.adjoint() * right;
  const Vec target = vec(Mat::Identity(d, d) / static_cast<double>(d));
  const Vec projected = right * overlap.fullPivLu().solve(left.adjoint() * target);
  Mat rho = unvec(projected, d, d);
  rho = 0.5 * (rho + rho.adjoint());
  const cplx tr = rho.trace();
  if (std::abs(tr) < tol::structural) {
    throw Error(ErrorKind::NoPositiveFixedPoint, "fixed point has vanishing trace");
  }
  rho /= tr.real();
  const HermitianEig eig = hermitian_eig(rho);
  if (eig.values.minCoeff() < -tol) {
    throw Error(ErrorKind::NoPositiveFixedPoint, "fixed point is not positive");
  }
  if (eig.values.minCoeff() < 0.0) {
    // Clip roundoff-level negative eigenvalues.
    RealVec vals = eig.values.cwiseMax(0.0);
    rho = eig.vectors * vals.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
    rho /= rho.trace().real();
  }
  return {State::from_density(rho), null_dim, null_dim == 1};
}

double invariance_defect(const UcpMap& phi, const State& state) {
  const int d = phi.dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Mat e = matrix_unit(d, i, j);
      worst = std::max(worst, std::abs(state(phi.apply(e)) - state(e)));
    }
  return worst;
}

bool multiplicative_domain_member(const UcpMap& phi, const Mat& a, double tol) {
  const Mat pa = phi.apply(a);
  const Mat pad = phi.apply(a.adjoint());
  const double left = operator_norm(pad * pa - phi.apply(a.adjoint() * a));
  const double right = operator_norm(pa * pad - phi.apply(a * a.adjoint()));
  return left <= tol && right <= tol;
}

bool is_multiplicative(const UcpMap& phi, double tol) {
  const int d = phi.dim();
  std::vector<Mat> images;
  std::vector<Mat> units;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      units.push_back(matrix_unit(d, i, j));
      images.push_back(phi.apply(units.back()));
    }
  for (size_t p = 0; p < units.size(); ++p)
    for (size_t q = 0; q < units.size(); ++q) {
      if (operator_norm(phi.apply(units[p] * units[q]) - images[p] * images[q]) > tol)
        return false;
    }
  return true;
}

double phi_adjoint_identity_residual(const UcpMap& phi, const UcpMap& adjoint,
                                     const State& state) {
  const int d = phi.dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const Mat a = matrix_unit(d, i, j);
          const Mat b = matrix_unit(d, k, l);
          worst = std::max(worst, std::abs(state(phi.apply(a) * b) - state(a * adjoint.apply(b))));
        }
  return worst;
}

PhiAdjoint phi_adjoint(const UcpMap& phi, const State& state, double tol) {
  const int d = phi.dim();
  if (state.dim() != d) throw Error(ErrorKind::DimensionMismatch, "state and map dimensions differ");
  if (!state.faithful()) {
    throw Error(ErrorKind::NonFaithfulState,
                "state has min eigenvalue " + std::to_string(state.min_eigenvalue()));
  }
  if (invariance_defect(phi, state) > tol) {
    throw Error(ErrorKind::NotInvariant, "phi o Phi != phi on the matrix units");
  }
  const Mat rho = state.rho();
  const Mat rho_inv = rho.inverse();
  const auto candidate = [&](const Mat& b) -> Mat { return phi.apply_dual(b * rho) * rho_inv; };

  double identity = 0.0;
  double adjointness = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Mat b = matrix_unit(d, i, j);
      const Mat nb = candidate(b);
      adjointness = std::max(adjointness, operator_norm(candidate(b.adjoint()) - nb.adjoint()));
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const Mat a = matrix_unit(d, k, l);
          identity = std::max(identity, std::abs(state(phi.apply(a) * b) - state(a * nb)));
        }
    }
  if (identity > tol) return AdjointAbsent{"defining identity", identity};
  const double unital = operator_norm(candidate(Mat::Identity(d, d)) - Mat::Identity(d, d));
  if (unital > tol) return AdjointAbsent{"unitality", unital};
  if (adjointness > tol) return AdjointAbsent{"adjoint preservation", adjointness};

  ChoiMatrix c{d, choi_of(d, candidate)};
  c.matrix = 0.5 * (c.matrix + c.matrix.adjoint());
  const double min_eig = hermitian_eig(c.matrix).values.minCoeff();
  const double cp_tol = std::max(tol, tol::rank);
  if (min_eig < -cp_tol) return AdjointAbsent{"complete positivity", -min_eig};
  return kraus_from_choi(c, cp_tol);
}

namespace presets {

UcpMap identity(int d) { return UcpMap::from_kraus({Mat::Identity(d, d)}); }

UcpMap adjoint_unitary(const Mat& u) { return UcpMap::from_kraus({u}); }

UcpMap adu_phase(double theta) {
  Mat u = Mat::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = std::polar(1.0, theta);
  return adjoint_unitary(u);
}

UcpMap depolarizing(int d, double p) {
  if (p < 0.0 || p > 1.0) throw Error(ErrorKind::InvalidInput, "depolarizing p outside [0,1]");
  std::vector<Mat> kraus;
  kraus.push_back(std::sqrt(1.0 - p) * Mat::Identity(d, d));
  const double w = std::sqrt(p / d);
  // tr(a) I = sum_ij E_ij a E_ji.
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) kraus.push_back(w * matrix_unit(d, j, i));
  return UcpMap::from_kraus(std::move(kraus));
}

UcpMap cyclic_shift(int d) {
  Mat p = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) p((i + 1) % d, i) = 1.0;
  return adjoint_unitary(p);
}

UcpMap amplitude_damping(double gamma) {
  if (gamma <= 0.0 || gamma > 1.0) {
    throw Error(ErrorKind::InvalidInput, "amplitude damping gamma outside (0,1]");
  }
  Mat k0 = Mat::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  Mat k1 = Mat::Zero(2, 2);
  k1(0, 1) = std::sqrt(gamma);
  return UcpMap::from_kraus({k0, k1});
}

UcpMap random_ucp(int d, int rank, std::uint64_t seed) {
  if (d < 1 || rank < 1) throw Error(ErrorKind::InvalidInput, "random_ucp needs d, rank >= 1");
  std::mt19937_64 rng(seed);
  const Mat v = haar_isometry(rank * d, d, rng);
  std::vector<Mat> kraus;
  for (int i = 0; i < rank; ++i) kraus.push_back(v.middleRows(i * d, d));
  return UcpMap::from_kraus(std::move(kraus));
}

UcpMap rank2_faithful(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.25, 0.75);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Mat u1 = haar_unitary(d, rng);
    const Mat u2 = haar_unitary(d, rng);
    const double p = weight(rng);
    const UcpMap phi = UcpMap::from_kraus({std::sqrt(p) * u1, std::sqrt(1.0 - p) * u2});
    const InvariantState inv = invariant_state(phi);
    if (!inv.unique || inv.state.min_eigenvalue() <= 0.1) continue;
    if (!std::holds_alternative<UcpMap>(phi_adjoint(phi, inv.state))) continue;
    Eigen::ComplexEigenSolver<Mat> es(phi.transfer_matrix(), false);
    int unit = 0;
    double subdominant = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const cplx l = es.eigenvalues()(i);
      if (std::abs(l - 1.0) <= tol::rank) {
        ++unit;
      } else {
        subdominant = std::max(subdominant, std::abs(l));
      }
    }
    if (unit == 1 && subdominant <= 0.9) return phi;
  }
  throw Error(ErrorKind::InvalidInput, "rank2_faithful: search exhausted");
}

const std::vector<PresetInfo>& catalog() {
  static const std::vector<PresetInfo> entries = {
      {"adu", "conjugation by diag(1, e^{i theta}) on M_2 (params: theta)",
       {"multiplicative <=> unitary dilation", "phi-adjoint = Ad_{U^dagger}",
        "spectral verdict: neither"}},
      {"amplitude-damping", "qubit amplitude damping (params: gamma)",
       {"non-faithful invariant state", "phi-adjoint rejected"}},
      {"cyclic3", "cyclic shift conjugation on M_3 (diagonal subalgebra)",
       {"ergodic but not weakly mixing", "Cesaro base numerics"}},
      {"depolarizing", "Phi(a) = (1-p) a + p tr(a) I/d (params: p)",
       {"Stinespring compression", "non-unitary dilation", "tower growth",
        "Nagy identities", "weak mixing transfer"}},
      {"identity", "identity channel on M_d",
       {"multiplicative <=> unitary dilation", "trivial tower"}},
      {"random", "Haar-random isometry Kraus blocks (params: rank)",
       {"GNS vs Kraus dilation", "tower covariance"}},
      {"rank2-faithful",
       "seeded rank-2 mixed-unitary channel with faithful state and phi-adjoint",
       {"string calculus", "lemma reduction cross-check", "dilated transfer theorem"}},
  };
  return entries;
}

}  // namespace presets

}  // namespace ucpdil
