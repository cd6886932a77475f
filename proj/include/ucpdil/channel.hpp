#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ucpdil/algebra.hpp"

namespace ucpdil {

/// Unital completely positive map on M_d in Heisenberg-picture Kraus form,
/// Phi(a) = sum_i K_i^dagger a K_i with sum_i K_i^dagger K_i = I.
class UcpMap {
 public:
  /// Throws InvalidInput when the operators are not d x d, contain non-finite
  /// entries, or violate unitality by more than `unital_tol`.
  static UcpMap from_kraus(std::vector<Mat> kraus, double unital_tol = tol::structural);

  int dim() const { return dim_; }
  const std::vector<Mat>& kraus() const { return kraus_; }
  int kraus_count() const { return static_cast<int>(kraus_.size()); }

  /// Phi(a). Throws DimensionMismatch.
  Mat apply(const Mat& a) const;
  /// Phi^k(a), k >= 0.
  Mat apply_power(const Mat& a, int k) const;
  /// Trace dual Phi_*(x) = sum_i K_i x K_i^dagger, tr(Phi(a) x) = tr(a Phi_*(x)).
  Mat apply_dual(const Mat& x) const;

  /// d^2 x d^2 matrix of Phi acting on column-major vec(a).
  Mat transfer_matrix() const;
  /// d^2 x d^2 matrix of Phi_* acting on column-major vec(rho).
  Mat dual_transfer_matrix() const;

 private:
  UcpMap(int dim, std::vector<Mat> kraus) : dim_(dim), kraus_(std::move(kraus)) {}

  int dim_ = 0;
  std::vector<Mat> kraus_;
};

inline Mat apply(const UcpMap& phi, const Mat& a) { return phi.apply(a); }

struct ChoiMatrix {
  int dim = 0;
  Mat matrix;  // J = sum_ij E_ij (x) Phi(E_ij), d^2 x d^2
};

ChoiMatrix choi(const UcpMap& phi);
/// Kraus operators from the eigendecomposition of C; eigenvalues above
/// tol * max(1, lambda_max) are kept. Throws NotCompletelyPositive when the
/// smallest eigenvalue is below -tol.
UcpMap kraus_from_choi(const ChoiMatrix& c, double tol = tol::rank);
int choi_rank(const UcpMap& phi, double tol = tol::rank);
/// Same map with a linearly independent Kraus family of size choi_rank.
UcpMap minimal_kraus(const UcpMap& phi, double tol = tol::rank);

/// Largest ||Phi(B) - Phi'(B)|| over the matrix units of M_d.
double map_distance(const UcpMap& a, const UcpMap& b);

struct InvariantState {
  State state;
  int fixed_space_dim = 0;
  bool unique = true;
};

/// Fixed point of the trace dual. With a degenerate fixed space the ergodic
/// projection of I/d is returned; it has maximal support among fixed states.
InvariantState invariant_state(const UcpMap& phi, double tol = tol::rank);

/// |phi(Phi(B)) - phi(B)| maximized over matrix units.
double invariance_defect(const UcpMap& phi, const State& state);

bool multiplicative_domain_member(const UcpMap& phi, const Mat& a,
                                  double tol = tol::structural);
bool is_multiplicative(const UcpMap& phi, double tol = tol::rank);

struct AdjointAbsent {
  std::string failed_check;
  double residual = 0.0;
};

using PhiAdjoint = std::variant<UcpMap, AdjointAbsent>;

/// phi-adjoint candidate Phi_nat(b) = Phi_*(b rho) rho^{-1} with its four
/// checks (defining identity, unitality, adjoint preservation, Choi PSD).
/// Throws NonFaithfulState or NotInvariant when preconditions fail.
PhiAdjoint phi_adjoint(const UcpMap& phi, const State& state, double tol = 1e-9);

/// max |phi(Phi(B_i) B_j) - phi(B_i Phi_nat(B_j))| over matrix units.
double phi_adjoint_identity_residual(const UcpMap& phi, const UcpMap& adjoint,
                                     const State& state);

namespace presets {

UcpMap identity(int d);
/// Conjugation Phi(a) = U^dagger a U.
UcpMap adjoint_unitary(const Mat& u);
/// U = diag(1, e^{i theta}).
UcpMap adu_phase(double theta);
/// Phi(a) = (1-p) a + p tr(a) I / d.
UcpMap depolarizing(int d, double p);
/// Conjugation by the cyclic shift |i> -> |i+1 mod d>.
UcpMap cyclic_shift(int d);
/// Qubit amplitude damping in Heisenberg form; |0><0| is the fixed state.
UcpMap amplitude_damping(double gamma);
/// Haar-random isometry split into `rank` Kraus blocks.
UcpMap random_ucp(int d, int rank, std::uint64_t seed);
/// Seeded search for a rank-2 channel with faithful invariant state
/// (min eigenvalue > 0.1), an existing phi-adjoint, a weakly mixing spectrum
/// and subdominant eigenvalue modulus <= 0.9.
UcpMap rank2_faithful(int d, std::uint64_t seed);

struct PresetInfo {
  std::string name;
  std::string description;
  std::vector<std::string> exercises;
};

/// Stable, sorted listing.
const std::vector<PresetInfo>& catalog();

}  // namespace presets

}  // namespace ucpdil
