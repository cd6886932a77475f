#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ucpdil/nagy.hpp"

namespace ucpdil {

/// (n_1..n_r; A_1..A_r) with ket |alpha) = A_1 V^{n_1} ... A_r V^{n_r} and
/// bra (alpha| = V^{n_r*} A_r ... V^{n_1*} A_1.
class AlgebraString {
 public:
  /// Empty string; its ket and bra are the identity.
  AlgebraString() = default;
  AlgebraString(std::vector<int> exponents, std::vector<Mat> coefficients);

  /// (0; I), the unit string.
  static AlgebraString unit(int d);
  /// (n; A).
  static AlgebraString single(int n, const Mat& a);

  int length() const { return static_cast<int>(exponents_.size()); }
  int weight() const { return weight_; }
  const std::vector<int>& exponents() const { return exponents_; }
  const std::vector<Mat>& coefficients() const { return coefficients_; }

  /// Same exponents, coefficients replaced by their adjoints: (alpha|^dagger = |alpha*).
  AlgebraString star() const;
  /// Prepends V^* to the bra, i.e. n_r -> n_r + 1.
  AlgebraString raise_last() const;

 private:
  std::vector<int> exponents_;
  std::vector<Mat> coefficients_;
  int weight_ = 0;
};

/// Letter of an operator word on H_infinity: pi(a), V, V^dagger or F.
struct Letter {
  enum class Kind { Alg, V, VStar, F };
  Kind kind;
  Mat a;  // Alg only
};

/// Finite product of letters, read as an operator (rightmost letter acts first).
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  static Word alg(const Mat& a);
  static Word v(int n = 1);
  static Word vstar(int n = 1);
  static Word f();
  static Word ket(const AlgebraString& s);
  static Word bra(const AlgebraString& s);

  const std::vector<Letter>& letters() const { return letters_; }
  bool empty() const { return letters_.empty(); }
  Word adjoint() const;
  bool contains_f() const;

  /// Applies right to left on the tower.
  GradedVector apply(const Tower& t, const GradedVector& x) const;

 private:
  std::vector<Letter> letters_;
};

Word operator*(const Word& a, const Word& b);

/// Linear combination of words.
using WordSum = std::vector<std::pair<cplx, Word>>;

WordSum operator*(const WordSum& a, const WordSum& b);
WordSum word_sum(const Word& w);
GradedVector apply(const Tower& t, const WordSum& s, const GradedVector& x);
WordSum adjoint(const WordSum& s);

/// Replaces every F by I - V V^dagger.
WordSum expand_f(const Word& w);
/// Rewrites V^dagger pi(X) V -> pi(Phi(X)) and merges adjacent algebra
/// letters until neither applies. F letters are left untouched.
Word reduce(const Word& w, const UcpMap& phi);

/// Normal form |ket) R (bra| of an F-free reduced word; every reduced F-free
/// word has all V letters before all V^dagger letters.
struct NormalForm {
  AlgebraString ket;
  Mat r;
  AlgebraString bra;
};

NormalForm normal_form(const Word& reduced, int d);

/// (alpha| R |beta), classified.
struct BraRKet {
  bool bra_form = true;  // R'(theta| when alpha.weight >= beta.weight, else |theta)R'
  Mat r;
  AlgebraString theta;
  /// max ||direct - factorized|| / ||x|| over seeded test vectors.
  double residual = 0.0;
};

BraRKet bra_R_ket(const Tower& t, const AlgebraString& alpha, const Mat& r,
                  const AlgebraString& beta, std::uint64_t seed = 1, int trials = 4);

/// Largest ||T x - sigma_n(a) x|| / ||x|| over level-0 basis vectors and
/// seeded random vectors at levels 1..level_cap, with a the level-0 block of T.
using GradedApplier = std::function<GradedVector(const GradedVector&)>;
double algebra_membership_residual(const Tower& t, const GradedApplier& op, int level_cap,
                                   std::uint64_t seed = 7, int samples = 2);
/// The level-0 block of op.
Mat level0_block(const Tower& t, const GradedApplier& op);

GradedVector ket_apply(const Tower& t, const AlgebraString& s, const GradedVector& x);
GradedVector bra_apply(const Tower& t, const AlgebraString& s, const GradedVector& x);

/// Gamma(alpha) = (alpha| F Pi_{alpha.weight - 1}.
class GammaOperator {
 public:
  explicit GammaOperator(AlgebraString s);
  const AlgebraString& string() const { return s_; }
  int slot() const { return s_.weight() - 1; }
  GradedVector apply(const Tower& t, const TailSequence& xi) const;
  /// Gamma(alpha)^dagger = Pi*_{weight-1} F |alpha*).
  TailSequence adjoint_apply(const Tower& t, const GradedVector& x) const;

 private:
  AlgebraString s_;
};

/// Gamma(alpha) Gamma(beta)^dagger as words: (alpha|F|beta*) when the weights
/// agree, empty (zero) otherwise.
WordSum gamma_pair_product(const GammaOperator& a, const GammaOperator& b);

/// Delta_k(A, alpha, beta) = Pi*_{alpha.weight+k} F |alpha) A (beta| F Pi_{beta.weight+k}.
/// k may be negative as long as both slots are non-negative.
struct NaplaOperator {
  int k = 0;
  Mat a;
  AlgebraString alpha;
  AlgebraString beta;

  int in_slot() const { return beta.weight() + k; }
  int out_slot() const { return alpha.weight() + k; }
  TailSequence apply(const Tower& t, const TailSequence& xi) const;
  /// Delta_k(A^dagger, beta*, alpha*).
  NaplaOperator adjoint() const;
  /// W* Delta_k W = Delta_{k+1}.
  NaplaOperator shifted() const;
};

using NaplaSum = std::vector<std::pair<cplx, NaplaOperator>>;

TailSequence apply(const Tower& t, const NaplaSum& s, const TailSequence& xi);
NaplaSum adjoint(const NaplaSum& s);
/// Delta1 Delta2 expressed as a sum of naplas; empty when the middle slots
/// differ.
NaplaSum napla_product(const NaplaOperator& d1, const NaplaOperator& d2, const UcpMap& phi);

using TailOperator = std::function<TailSequence(const TailSequence&)>;

struct SigmaReport {
  bool pass = true;
  double worst = 0.0;
  int pairs = 0;
  std::string family;
};

/// Necessary-condition sampler for the operator system: Gamma_1 T Gamma_2^dagger
/// must lie in pi(M_d) for every pair from `gammas`.
SigmaReport sigma_membership(const Tower& t, const TailOperator& op,
                             const std::vector<AlgebraString>& gammas, int level_cap, double tol);

/// Default gamma family: strings (w; B) for weights 1..max_weight and B in a
/// seeded sample of matrices, plus two-letter strings of weight 2.
std::vector<AlgebraString> gamma_family(int d, int max_weight, std::uint64_t seed);

struct WInvarianceReport {
  double shift_residual = 0.0;  // ||W* Delta W xi - Delta_{k+1} xi||
  SigmaReport sigma;
  bool pass = false;
};

WInvarianceReport w_invariance_check(const NagyDilation& dil, const NaplaOperator& delta,
                                     const std::vector<AlgebraString>& gammas, double tol,
                                     int trials, std::uint64_t seed);

/// Gamma(alpha) W* T W Gamma(beta)^dagger versus
/// (alpha| F Pi_{alpha-2} T Pi*_{beta-2} F |beta*), both weights >= 2.
double gamma_conjugation_residual(const NagyDilation& dil, const AlgebraString& alpha,
                                  const AlgebraString& beta, const TailOperator& op, int trials,
                                  std::uint64_t seed);

/// Block operator [[pi(a), Gamma_1], [Gamma_2^dagger, T]] on H (+) l^2(FH) with
/// Gamma_i linear combinations of gammas and T = t_scalar I + sum of naplas.
struct SElement {
  Mat a;
  std::vector<std::pair<cplx, AlgebraString>> gamma1;
  std::vector<std::pair<cplx, AlgebraString>> gamma2;
  NaplaSum t;
  cplx t_scalar = 0.0;

  NagyVector apply(const NagyDilation& dil, const NagyVector& v) const;
  TailSequence apply_tail(const Tower& tw, const TailSequence& xi) const;
};

/// Vhat* S Vhat assembled from the block identifications: Phi(a) in the
/// corner, gammas (1; a) and raised strings off the diagonal, naplas below.
SElement s_conjugate(const SElement& s, const UcpMap& phi);

/// max ||Vhat* S Vhat v - s_conjugate(S) v|| over seeded supported v.
double s_conjugation_residual(const NagyDilation& dil, const SElement& s, int trials,
                              std::uint64_t seed);

using NagyOperator = std::function<NagyVector(const NagyVector&)>;

/// Z* X Z as a graded applier.
GradedApplier compress(const NagyOperator& x);
NagyOperator as_operator(const NagyDilation& dil, const SElement& s);
NagyOperator compose(NagyOperator a, NagyOperator b);
/// Vhat* X Vhat.
NagyOperator conjugate_by_vhat(const NagyDilation& dil, NagyOperator x);

AlgebraString random_string(int d, int weight, int max_length, std::mt19937_64& rng);

}  // namespace ucpdil
