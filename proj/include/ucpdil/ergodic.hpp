#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ucpdil/strings.hpp"

namespace ucpdil {

enum class Verdict { Ergodic, WeaklyMixing, Neither };
enum class AverageMethod { Cesaro, Spectral, Both, Direct, Reduction };

std::string_view to_string(Verdict v);
std::string_view to_string(AverageMethod m);

struct ErgodicReport {
  std::vector<int> n_values;
  std::vector<double> signed_averages;
  std::vector<double> abs_averages;
  Verdict verdict = Verdict::Neither;
  AverageMethod method = AverageMethod::Cesaro;
};

/// Running Cesaro means of the terms t_k, k = 0..N, sampled at every N in
/// `n_values` (ascending). The signed mean is the real part of the complex
/// mean.
ErgodicReport cesaro_from_terms(const std::vector<cplx>& terms, const std::vector<int>& n_values);

/// Terms phi(a Phi^k(b)) - phi(a) phi(b) for k = 0..N. Throws NotInvariant when
/// phi is not Phi-invariant to 1e-9 and NotInAlgebra when a or b lies outside
/// `algebra` by more than 1e-9.
std::vector<cplx> correlation_terms(const UcpMap& phi, const State& state, const Mat& a,
                                    const Mat& b, int N, const MatrixSubalgebra& algebra);

double cesaro_signed(const UcpMap& phi, const State& state, const Mat& a, const Mat& b, int N);
double cesaro_abs(const UcpMap& phi, const State& state, const Mat& a, const Mat& b, int N);
double cesaro_signed(const UcpMap& phi, const State& state, const Mat& a, const Mat& b, int N,
                     const MatrixSubalgebra& algebra);
double cesaro_abs(const UcpMap& phi, const State& state, const Mat& a, const Mat& b, int N,
                  const MatrixSubalgebra& algebra);

/// Spectrum of Phi restricted to the algebra. Throws AlgebraNotInvariant.
std::vector<cplx> restricted_spectrum(const UcpMap& phi, const MatrixSubalgebra& algebra);
/// Ergodic iff eigenvalue 1 is simple; weakly mixing iff moreover every other
/// eigenvalue has modulus < 1 - 1e-8.
Verdict spectral_verdict(const UcpMap& phi, const MatrixSubalgebra& algebra);

/// Off-diagonal corner X_12 : l^2(FH) -> H of a dilated observable. Either
/// A Gamma(gamma) Delta_m(B, alpha, beta) or a single Gamma(theta).
struct OffDiagonal {
  enum class Kind { GammaNapla, Gamma };
  Kind kind = Kind::GammaNapla;
  Mat a;
  AlgebraString gamma;
  Mat b;
  AlgebraString alpha;
  AlgebraString beta;
  int m = 0;
  AlgebraString theta;  // Gamma kind only

  static OffDiagonal gamma_napla(Mat a, AlgebraString gamma, Mat b, AlgebraString alpha,
                                 AlgebraString beta, int m);
  static OffDiagonal single_gamma(AlgebraString theta);

  /// Tail slot read by X_12.
  int slot() const;
  /// False when the gamma and napla slots do not meet, so X_12 = 0.
  bool nonzero() const;
  GradedVector apply(const Tower& t, const TailSequence& xi) const;
  /// Words W_i with X_12 = sum_i c_i W_i F Pi_slot.
  WordSum words() const;
};

/// X = [[pi(x11), X_12], [0, 0]] and Y = Z pi(y) Z* or Vhat* Z pi(y) Z* Vhat.
struct DilatedPair {
  Mat x11;
  OffDiagonal x12;
  Mat y;
  bool y_conjugated = false;

  /// Y_11: y or Phi(y).
  Mat y11(const UcpMap& phi) const;
};

NagyOperator x_operator(const NagyDilation& dil, const DilatedPair& p);
NagyOperator y_operator(const NagyDilation& dil, const DilatedPair& p);

/// phi(Z* X Vhat^{k*} Y Vhat^k Z) from the level-0 block of the composition.
cplx dilated_value_direct(const NagyDilation& dil, const NagyOperator& x, const NagyOperator& y,
                          const State& state, int k);

/// Direct Cesaro averages of |phi(Z* X Vhat^{k*} Y Vhat^k Z) - phi(Z*XZ) phi(Z*YZ)|
/// for N = 0..N_max. Throws CapacityExceeded when N_max exceeds the window.
ErgodicReport dilated_cesaro_direct(const NagyDilation& dil, const NagyOperator& x,
                                    const NagyOperator& y, const State& state, int n_max);

struct LemmaTerms {
  cplx term_c;  // phi(X_12 C(k)* Y_11 V^k)
  cplx term_w;  // phi(X_12 W^{k*} Y_21 V^k)
};

LemmaTerms lemma_terms(const NagyDilation& dil, const DilatedPair& p, const State& state, int k);

/// Closed form of the corner terms using powers of Phi and of its phi-adjoint.
class LemmaReduction {
 public:
  /// Throws AdjointAbsent (as Error) when the phi-adjoint does not exist.
  LemmaReduction(const UcpMap& phi, const State& state, const OffDiagonal& x12);

  /// term_C at step k; zero for k <= slot.
  cplx term_c(const Mat& y11, int k) const;
  /// term_W at step k for Y_21 = Pi_0* F y V; nonzero only at k = slot.
  cplx term_w(const Mat& y, int k) const;
  /// phi(R (theta| F Phi^j(Y) V^{w}) summed over the reduced words.
  cplx value(const Mat& y, int j) const;

  struct Reduced {
    cplx coef;
    Mat r;
    AlgebraString theta;
    Mat c1;
    Mat c2;
  };
  const std::vector<Reduced>& reduced() const { return reduced_; }
  int slot() const { return slot_; }

 private:
  UcpMap phi_;
  State state_;
  int slot_;
  std::vector<Reduced> reduced_;
};

/// Reduction-path Cesaro averages of the dilated quantity at each N in n_values.
ErgodicReport dilated_cesaro_reduced(const UcpMap& phi, const State& state, const DilatedPair& p,
                                     const std::vector<int>& n_values);

/// Seeded member of the generated family with string weights <= 2.
DilatedPair random_dilated_pair(int d, std::uint64_t seed);

}  // namespace ucpdil
