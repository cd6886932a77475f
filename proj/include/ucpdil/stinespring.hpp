#pragma once

#include <functional>

#include "ucpdil/channel.hpp"

namespace ucpdil {

/// (L, sigma, V) with Phi(a) = V^dagger sigma(a) V. The representation is
/// evaluated lazily.
class StinespringTriple {
 public:
  using Rep = std::function<Mat(const Mat&)>;

  StinespringTriple(UcpMap channel, MatrixSubalgebra algebra, Mat isometry, Rep rep,
                    Mat quotient_basis)
      : channel_(std::move(channel)),
        algebra_(std::move(algebra)),
        isometry_(std::move(isometry)),
        rep_(std::move(rep)),
        quotient_basis_(std::move(quotient_basis)) {}

  int base_dim() const { return static_cast<int>(isometry_.cols()); }
  int space_dim() const { return static_cast<int>(isometry_.rows()); }
  const Mat& isometry() const { return isometry_; }
  Mat rep(const Mat& a) const { return rep_(a); }
  const UcpMap& channel() const { return channel_; }
  /// Domain algebra of sigma.
  const MatrixSubalgebra& algebra() const { return algebra_; }
  /// Columns: coordinates (in the B_i (x) e_k basis) of the retained
  /// orthonormal directions. Empty for Kraus-built triples.
  const Mat& quotient_basis() const { return quotient_basis_; }

  /// max over the algebra basis of ||V^dagger sigma(a) V - Phi(a)||.
  double compression_residual() const;
  /// ||V^dagger V - I||.
  double isometry_defect() const;
  /// max over basis pairs of ||sigma(ab) - sigma(a)sigma(b)||,
  /// ||sigma(a^dagger) - sigma(a)^dagger|| and ||sigma(I) - I||.
  double homomorphism_defect() const;

 private:
  UcpMap channel_;
  MatrixSubalgebra algebra_;
  Mat isometry_;
  Rep rep_;
  Mat quotient_basis_;
};

/// GNS quotient of A (x) C^d under <a1 (x) x, a2 (x) y> = <x, Phi(a1^dagger a2) y>.
/// Throws AlgebraNotInvariant or DegenerateGram.
StinespringTriple gns_dilate(const UcpMap& phi, const MatrixSubalgebra& algebra,
                             double tol = tol::structural);

/// L = C^r (x) C^d, V x = sum_i e_i (x) K_i x, sigma(a) = I_r (x) a.
StinespringTriple kraus_dilate(const UcpMap& phi);

/// ||V V^dagger - I_m||.
double unitarity_defect(const StinespringTriple& t);

/// ||sigma(x) V V^dagger - V V^dagger sigma(x)|| <= tol. Throws NotInDomain
/// when x is outside the multiplicative domain of the triple's channel.
bool multiplicative_commutation_check(const StinespringTriple& t, const Mat& x,
                                      double tol = tol::structural);

}  // namespace ucpdil
