#include "ucpdil/tower.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ucpdil {

GradedVector GradedVector::at_level(int level, Vec v) {
  GradedVector g;
  g.set(level, std::move(v));
  return g;
}

Vec GradedVector::component(int level, int dim) const {
  auto it = levels_.find(level);
  if (it == levels_.end()) return Vec::Zero(dim);
  return it->second;
}

void GradedVector::set(int level, Vec v) {
  if (level < 0) throw Error(ErrorKind::InvalidInput, "negative level");
  levels_[level] = std::move(v);
}

void GradedVector::accumulate(int level, const Vec& v) {
  auto it = levels_.find(level);
  if (it == levels_.end()) {
    set(level, v);
  } else {
    if (it->second.size() != v.size()) {
      throw Error(ErrorKind::DimensionMismatch, "level component size mismatch");
    }
    it->second += v;
  }
}

GradedVector& GradedVector::operator+=(const GradedVector& other) {
  for (const auto& [n, v] : other.levels_) accumulate(n, v);
  return *this;
}

GradedVector& GradedVector::operator-=(const GradedVector& other) {
  for (const auto& [n, v] : other.levels_) accumulate(n, -v);
  return *this;
}

GradedVector& GradedVector::operator*=(cplx s) {
  for (auto& [n, v] : levels_) v *= s;
  return *this;
}

cplx GradedVector::inner(const GradedVector& other) const {
  cplx acc = 0.0;
  for (const auto& [n, v] : levels_) {
    auto it = other.levels_.find(n);
    if (it == other.levels_.end()) continue;
    if (it->second.size() != v.size()) {
      throw Error(ErrorKind::DimensionMismatch, "level component size mismatch");
    }
    acc += v.dot(it->second);
  }
  return acc;
}

double GradedVector::norm() const {
  double s = 0.0;
  for (const auto& [n, v] : levels_) s += v.squaredNorm();
  return std::sqrt(s);
}

GradedVector operator+(GradedVector a, const GradedVector& b) { return a += b; }
GradedVector operator-(GradedVector a, const GradedVector& b) { return a -= b; }
GradedVector operator*(cplx s, GradedVector a) { return a *= s; }

Tower Tower::build(const UcpMap& phi, int levels, std::size_t budget) {
  if (levels < 1) throw Error(ErrorKind::InvalidInput, "tower depth must be at least 1");
  UcpMap minimal = minimal_kraus(phi);
  const double d = minimal.dim();
  const double r = minimal.kraus_count();
  double total = 0.0;
  double dn = d;
  for (int n = 0; n <= levels; ++n) {
    total += dn * dn;
    if (total > static_cast<double>(budget)) {
      throw Error(ErrorKind::BudgetExceeded,
                  "tower of depth " + std::to_string(levels) + " needs more than " +
                      std::to_string(budget) + " dense entries");
    }
    dn *= r;
  }
  return Tower(std::move(minimal), levels);
}

int Tower::level_dim(int n) const {
  check_level(n, "level_dim");
  int dim = base_dim();
  for (int k = 0; k < n; ++k) dim *= kraus_rank();
  return dim;
}

std::vector<int> Tower::level_dims() const {
  std::vector<int> dims;
  for (int n = 0; n <= depth_; ++n) dims.push_back(level_dim(n));
  return dims;
}

void Tower::check_level(int n, const char* what) const {
  if (n < 0 || n > depth_) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": level " + std::to_string(n) +
                                             " outside [0, " + std::to_string(depth_) + "]");
  }
}

namespace {

// x in H_n viewed as the d x r^n matrix X with x = vec(X); sigma_n(a) x = vec(a X).
Eigen::Map<const Mat> as_block(const Vec& x, int d) {
  return Eigen::Map<const Mat>(x.data(), d, x.size() / d);
}

}  // namespace

Vec Tower::apply_rep(int n, const Mat& a, const Vec& x) const {
  check_level(n, "apply_rep");
  const int d = base_dim();
  if (a.rows() != d || a.cols() != d) throw Error(ErrorKind::DimensionMismatch, "a is not d x d");
  if (x.size() != level_dim(n)) throw Error(ErrorKind::DimensionMismatch, "vector not in H_n");
  Mat out = a * as_block(x, d);
  return Eigen::Map<Vec>(out.data(), out.size());
}

Vec Tower::apply_step(int n, const Vec& x) const {
  if (n >= depth_) check_level(n + 1, "apply_step");
  check_level(n, "apply_step");
  const int d = base_dim();
  const int dn = level_dim(n);
  if (x.size() != dn) throw Error(ErrorKind::DimensionMismatch, "vector not in H_n");
  const auto xb = as_block(x, d);
  Vec y(static_cast<Eigen::Index>(dn) * kraus_rank());
  for (int i = 0; i < kraus_rank(); ++i) {
    Mat blk = phi_.kraus()[i] * xb;
    y.segment(static_cast<Eigen::Index>(i) * dn, dn) = Eigen::Map<Vec>(blk.data(), blk.size());
  }
  return y;
}

Vec Tower::apply_step_adjoint(int n, const Vec& y) const {
  if (n >= depth_) check_level(n + 1, "apply_step_adjoint");
  check_level(n, "apply_step_adjoint");
  const int d = base_dim();
  const int dn = level_dim(n);
  if (y.size() != static_cast<Eigen::Index>(dn) * kraus_rank()) {
    throw Error(ErrorKind::DimensionMismatch, "vector not in H_{n+1}");
  }
  Mat acc = Mat::Zero(d, dn / d);
  for (int i = 0; i < kraus_rank(); ++i) {
    const Vec seg = y.segment(static_cast<Eigen::Index>(i) * dn, dn);
    acc += phi_.kraus()[i].adjoint() * as_block(seg, d);
  }
  return Eigen::Map<Vec>(acc.data(), acc.size());
}

Mat Tower::step_isometry(int n) const {
  const int dn = level_dim(n);
  Mat v(static_cast<Eigen::Index>(dn) * kraus_rank(), dn);
  for (int j = 0; j < dn; ++j) v.col(j) = apply_step(n, Vec::Unit(dn, j));
  return v;
}

Mat Tower::rep_matrix(int n, const Mat& a) const {
  const int reps = level_dim(n) / base_dim();
  return kron(Mat::Identity(reps, reps), a);
}

double Tower::isometry_defect() const {
  double worst = 0.0;
  for (int n = 0; n < depth_; ++n) {
    const int dn = level_dim(n);
    for (int j = 0; j < dn; ++j) {
      const Vec e = Vec::Unit(dn, j);
      worst = std::max(worst, (apply_step_adjoint(n, apply_step(n, e)) - e).norm());
    }
  }
  return worst;
}

double Tower::step_covariance_defect() const {
  const int d = base_dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      worst = std::max(worst, covariance_residual(*this, matrix_unit(d, i, j), depth_ - 1));
    }
  return worst;
}

GradedVector GradedOperator::apply(const GradedVector& x) const {
  GradedVector out;
  for (const auto& [n, v] : x.levels()) {
    if (n > max_input_level_) {
      throw Error(ErrorKind::CapacityExceeded,
                  "input supported at level " + std::to_string(n) + " beyond capacity " +
                      std::to_string(max_input_level_));
    }
    const int target = n + shift_;
    if (target < 0) continue;
    out.accumulate(target, block_(n, v));
  }
  return out;
}

GradedOperator pi_infty(std::shared_ptr<const Tower> tower, const Mat& a) {
  const int cap = tower->depth();
  return GradedOperator(0, cap, [tower, a](int n, const Vec& v) { return tower->apply_rep(n, a, v); });
}

GradedOperator v_infty(std::shared_ptr<const Tower> tower) {
  const int cap = tower->depth() - 1;
  return GradedOperator(1, cap, [tower](int n, const Vec& v) { return tower->apply_step(n, v); });
}

GradedOperator v_infty_adjoint(std::shared_ptr<const Tower> tower) {
  const int cap = tower->depth();
  return GradedOperator(-1, cap, [tower](int n, const Vec& v) {
    return n == 0 ? Vec() : tower->apply_step_adjoint(n - 1, v);
  });
}

GradedOperator f_projection(std::shared_ptr<const Tower> tower) {
  const int cap = tower->depth();
  return GradedOperator(0, cap, [tower](int n, const Vec& v) -> Vec {
    if (n == 0) return v;
    return v - tower->apply_step(n - 1, tower->apply_step_adjoint(n - 1, v));
  });
}

namespace {

std::shared_ptr<const Tower> borrow(const Tower& t) {
  return std::shared_ptr<const Tower>(&t, [](const Tower*) {});
}

}  // namespace

GradedVector v_infty_apply(const Tower& tower, const GradedVector& x) {
  return v_infty(borrow(tower)).apply(x);
}

GradedVector v_infty_adjoint_apply(const Tower& tower, const GradedVector& x) {
  return v_infty_adjoint(borrow(tower)).apply(x);
}

GradedVector pi_infty_apply(const Tower& tower, const Mat& a, const GradedVector& x) {
  return pi_infty(borrow(tower), a).apply(x);
}

GradedVector f_apply(const Tower& tower, const GradedVector& x) {
  return f_projection(borrow(tower)).apply(x);
}

double covariance_residual_against(const Tower& tower, const Mat& a, const Mat& b,
                                   int level_cap) {
  if (level_cap < 0 || level_cap >= tower.depth()) {
    throw Error(ErrorKind::CapacityExceeded,
                "covariance needs level_cap < N = " + std::to_string(tower.depth()));
  }
  double worst = 0.0;
  for (int n = 0; n <= level_cap; ++n) {
    const int dn = tower.level_dim(n);
    for (int j = 0; j < dn; ++j) {
      const Vec e = Vec::Unit(dn, j);
      const Vec lhs = tower.apply_step_adjoint(n, tower.apply_rep(n + 1, a, tower.apply_step(n, e)));
      worst = std::max(worst, (lhs - tower.apply_rep(n, b, e)).norm());
    }
  }
  return worst;
}

double covariance_residual(const Tower& tower, const Mat& a, int level_cap) {
  return covariance_residual_against(tower, a, tower.channel().apply(a), level_cap);
}

GradedVector random_graded(const Tower& tower, int lo, int hi, std::mt19937_64& rng) {
  if (lo < 0 || hi < lo || hi > tower.depth()) {
    throw Error(ErrorKind::InvalidInput, "bad level range for random_graded");
  }
  GradedVector g;
  for (int n = lo; n <= hi; ++n) {
    const int dn = tower.level_dim(n);
    g.set(n, random_gaussian(dn, 1, rng).col(0));
  }
  g *= 1.0 / g.norm();
  return g;
}

}  // namespace ucpdil
