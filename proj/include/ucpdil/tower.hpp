#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "ucpdil/channel.hpp"

namespace ucpdil {

/// Finitely supported element (x_0, x_1, ...) of the level-graded space
/// H_0 (+) H_1 (+) ...; absent levels are zero.
class GradedVector {
 public:
  GradedVector() = default;
  static GradedVector at_level(int level, Vec v);

  const std::map<int, Vec>& levels() const { return levels_; }
  bool empty() const { return levels_.empty(); }
  /// Highest stored level, -1 when empty.
  int max_level() const { return levels_.empty() ? -1 : levels_.rbegin()->first; }
  int min_level() const { return levels_.empty() ? -1 : levels_.begin()->first; }

  bool has(int level) const { return levels_.count(level) > 0; }
  /// Component at `level`, or a zero vector of dimension `dim` when absent.
  Vec component(int level, int dim) const;
  void set(int level, Vec v);
  void accumulate(int level, const Vec& v);

  GradedVector& operator+=(const GradedVector& other);
  GradedVector& operator-=(const GradedVector& other);
  GradedVector& operator*=(cplx s);

  cplx inner(const GradedVector& other) const;  // conjugate-linear in *this
  double norm() const;

 private:
  std::map<int, Vec> levels_;
};

GradedVector operator+(GradedVector a, const GradedVector& b);
GradedVector operator-(GradedVector a, const GradedVector& b);
GradedVector operator*(cplx s, GradedVector a);
inline cplx inner(const GradedVector& a, const GradedVector& b) { return a.inner(b); }

/// Iterated Stinespring dilation of Phi truncated at level N. Level n has
/// dimension d r^n with H_{n+1} = C^r (x) H_n, sigma_n(a) = I_{r^n} (x) a and
/// V_n x = sum_i e_i (x) sigma_n(K_i) x for a minimal Kraus family {K_i}.
class Tower {
 public:
  static constexpr std::size_t kDefaultBudget = std::size_t{1} << 26;

  /// Throws InvalidInput for N < 1 and BudgetExceeded when sum_n d_n^2 would
  /// exceed `budget` entries.
  static Tower build(const UcpMap& phi, int levels, std::size_t budget = kDefaultBudget);

  int depth() const { return depth_; }  // N
  int base_dim() const { return phi_.dim(); }
  int kraus_rank() const { return phi_.kraus_count(); }
  int level_dim(int n) const;
  std::vector<int> level_dims() const;
  const UcpMap& channel() const { return phi_; }

  /// sigma_n(a) x for x in H_n.
  Vec apply_rep(int n, const Mat& a, const Vec& x) const;
  /// V_n x in H_{n+1}; needs n < N.
  Vec apply_step(int n, const Vec& x) const;
  /// V_n^dagger y for y in H_{n+1}.
  Vec apply_step_adjoint(int n, const Vec& y) const;
  /// Dense V_n (d_{n+1} x d_n); intended for small levels and tests.
  Mat step_isometry(int n) const;
  /// Dense sigma_n(a).
  Mat rep_matrix(int n, const Mat& a) const;

  /// max over levels and basis vectors e of ||V_n^dagger V_n e - e||.
  double isometry_defect() const;
  /// max over matrix units a and levels n < N of
  /// ||(V_n^dagger sigma_{n+1}(a) V_n - sigma_n(Phi(a))) e|| over basis vectors e.
  double step_covariance_defect() const;

 private:
  Tower(UcpMap phi, int depth) : phi_(std::move(phi)), depth_(depth) {}

  void check_level(int n, const char* what) const;

  UcpMap phi_;
  int depth_ = 0;
};

/// Operator on graded vectors with fixed level shift; blocks act on one level
/// at a time and are never materialized over the whole space.
class GradedOperator {
 public:
  using Block = std::function<Vec(int level, const Vec&)>;

  GradedOperator(int shift, int max_input_level, Block block)
      : shift_(shift), max_input_level_(max_input_level), block_(std::move(block)) {}

  int shift() const { return shift_; }
  int max_input_level() const { return max_input_level_; }

  /// Throws CapacityExceeded when x has support above max_input_level.
  GradedVector apply(const GradedVector& x) const;
  GradedVector operator()(const GradedVector& x) const { return apply(x); }
  Vec apply_block(int level, const Vec& v) const { return block_(level, v); }

 private:
  int shift_;
  int max_input_level_;
  Block block_;
};

/// Shift 0, block sigma_n(a) at level n.
GradedOperator pi_infty(std::shared_ptr<const Tower> tower, const Mat& a);
/// Shift +1, (x_0, x_1, ...) -> (0, V_0 x_0, V_1 x_1, ...).
GradedOperator v_infty(std::shared_ptr<const Tower> tower);
/// Shift -1, level n receives V_n^dagger x_{n+1}; x_0 is dropped.
GradedOperator v_infty_adjoint(std::shared_ptr<const Tower> tower);
/// Shift 0, I at level 0 and I - V_{n-1} V_{n-1}^dagger at level n >= 1.
GradedOperator f_projection(std::shared_ptr<const Tower> tower);

GradedVector v_infty_apply(const Tower& tower, const GradedVector& x);
GradedVector v_infty_adjoint_apply(const Tower& tower, const GradedVector& x);
GradedVector pi_infty_apply(const Tower& tower, const Mat& a, const GradedVector& x);
GradedVector f_apply(const Tower& tower, const GradedVector& x);

/// max over basis vectors e supported at levels <= level_cap of
/// ||(V^dagger pi(a) V - pi(b)) e||; with b = Phi(a) this is the covariance
/// residual.
double covariance_residual(const Tower& tower, const Mat& a, int level_cap);
double covariance_residual_against(const Tower& tower, const Mat& a, const Mat& b,
                                   int level_cap);

/// Seeded random graded vector supported at levels [lo, hi], unit norm.
GradedVector random_graded(const Tower& tower, int lo, int hi, std::mt19937_64& rng);

}  // namespace ucpdil
