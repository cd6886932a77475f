#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ucpdil/tower.hpp"

namespace ucpdil {

/// Finitely supported sequence (xi_0, xi_1, ...) in l^2(FH); slot j is tail[j].
using TailSequence = std::vector<GradedVector>;

/// Element (head, tail) of H (+) l^2(FH).
struct NagyVector {
  GradedVector head;
  TailSequence tail;

  NagyVector& operator+=(const NagyVector& other);
  NagyVector& operator-=(const NagyVector& other);
  NagyVector& operator*=(cplx s);

  cplx inner(const NagyVector& other) const;
  double norm() const;
  /// Slot j, or the zero vector when j is past the stored tail.
  GradedVector slot(int j) const;
};

NagyVector operator+(NagyVector a, const NagyVector& b);
NagyVector operator-(NagyVector a, const NagyVector& b);
NagyVector operator*(cplx s, NagyVector a);

cplx tail_inner(const TailSequence& a, const TailSequence& b);
double tail_norm(const TailSequence& a);
TailSequence tail_add(TailSequence a, const TailSequence& b, cplx s = 1.0);

/// Minimal unitary dilation of V_infinity. Powers up to `window` are exact on
/// vectors whose levels leave room in the tower.
class NagyDilation {
 public:
  NagyDilation(std::shared_ptr<const Tower> tower, int window);

  const Tower& tower() const { return *tower_; }
  std::shared_ptr<const Tower> tower_ptr() const { return tower_; }
  int window() const { return window_; }

  /// Builds a NagyVector, projecting every tail entry through F.
  NagyVector make_vector(GradedVector head, TailSequence tail) const;
  /// max_j ||F xi_j - xi_j||.
  double f_range_defect(const NagyVector& v) const;

  GradedVector v_power(int n, const GradedVector& x) const;
  GradedVector v_power_adjoint(int n, const GradedVector& x) const;
  GradedVector f(const GradedVector& x) const;

  /// C(n) xi = sum_{j=1}^{n} V^{n-j} F xi_{j-1}.
  GradedVector corner(int n, const TailSequence& xi) const;
  /// C(n)^dagger x: slot p < n holds F V^{(n-p-1)*} x.
  TailSequence corner_adjoint(int n, const GradedVector& x) const;

  /// Vhat^n computed from the block form [[V^n, C(n)], [0, W^n]].
  NagyVector vhat_apply(int n, const NagyVector& v) const;
  /// Vhat^{n*} = [[V^{n*}, 0], [C(n)^dagger, W^{n*}]].
  NagyVector vhat_adjoint_apply(int n, const NagyVector& v) const;
  /// n single steps of Vhat, for cross-checking the block form.
  NagyVector vhat_apply_iterated(int n, const NagyVector& v) const;
  /// Vhat^k for k >= 0 and Vhat^{|k|*} for k < 0.
  NagyVector vhat_power(int k, const NagyVector& v) const;

 private:
  void check_power(int n) const;

  std::shared_ptr<const Tower> tower_;
  int window_;
};

NagyVector z_embed(const GradedVector& x);
GradedVector z_adjoint(const NagyVector& v);

/// Pi_j and Pi_j^dagger.
GradedVector slot_project(const TailSequence& xi, int j);
TailSequence slot_embed(int j, const GradedVector& x);
/// W^m: left shift by m slots; W^{m*}: right shift by m with zero fill.
TailSequence w_shift(int m, const TailSequence& xi);
TailSequence w_shift_adjoint(int m, const TailSequence& xi);

struct RelIdentityReport {
  double rel1 = 0.0;          // Pi_n W^m = Pi_{n+m}
  double rel1_adjoint = 0.0;  // Pi_n W^{m*} = Pi_{n-m}, or 0 when n < m
  double rel2 = 0.0;          // Pi_p C(k)^dagger = F V^{(k-p-1)*}, or 0 when k <= p
  double max() const;
};

/// Evaluates both sides of the slot identities on `trials` seeded random
/// heads and tails.
RelIdentityReport rel_identities_check(const NagyDilation& dil, int n, int m, int k, int p,
                                       int trials, std::uint64_t seed);

/// Numerical rank (relative threshold 1e-8) of the Gram matrix of
/// {Vhat^k Z e_i : |k| <= K} over the level-0 basis.
int minimality_span_dim(const NagyDilation& dil, int K);

/// Seeded random tail with entries in F H at levels [0, max_level] and slots
/// [0, slots), normalized to unit norm.
TailSequence random_tail(const NagyDilation& dil, int slots, int max_level,
                         std::mt19937_64& rng);

}  // namespace ucpdil
