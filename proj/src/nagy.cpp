#include "ucpdil/nagy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ucpdil {

NagyVector& NagyVector::operator+=(const NagyVector& other) {
  head += other.head;
  tail = tail_add(std::move(tail), other.tail);
  return *this;
}

NagyVector& NagyVector::operator-=(const NagyVector& other) {
  head -= other.head;
  tail = tail_add(std::move(tail), other.tail, -1.0);
  return *this;
}

NagyVector& NagyVector::operator*=(cplx s) {
  head *= s;
  for (auto& x : tail) x *= s;
  return *this;
}

cplx NagyVector::inner(const NagyVector& other) const {
  return head.inner(other.head) + tail_inner(tail, other.tail);
}

double NagyVector::norm() const {
  return std::sqrt(std::norm(head.norm()) + std::norm(tail_norm(tail)));
}

GradedVector NagyVector::slot(int j) const { return slot_project(tail, j); }

NagyVector operator+(NagyVector a, const NagyVector& b) { return a += b; }
NagyVector operator-(NagyVector a, const NagyVector& b) { return a -= b; }
NagyVector operator*(cplx s, NagyVector a) { return a *= s; }

cplx tail_inner(const TailSequence& a, const TailSequence& b) {
  cplx acc = 0.0;
  const size_t n = std::min(a.size(), b.size());
  for (size_t j = 0; j < n; ++j) acc += a[j].inner(b[j]);
  return acc;
}

double tail_norm(const TailSequence& a) {
  double s = 0.0;
  for (const auto& x : a) s += std::norm(x.norm());
  return std::sqrt(s);
}

TailSequence tail_add(TailSequence a, const TailSequence& b, cplx s) {
  if (a.size() < b.size()) a.resize(b.size());
  for (size_t j = 0; j < b.size(); ++j) a[j] += s * b[j];
  return a;
}

NagyDilation::NagyDilation(std::shared_ptr<const Tower> tower, int window)
    : tower_(std::move(tower)), window_(window) {
  if (!tower_) throw Error(ErrorKind::InvalidInput, "null tower");
  if (window < 0) throw Error(ErrorKind::InvalidInput, "window must be non-negative");
}

void NagyDilation::check_power(int n) const {
  if (n < 0) throw Error(ErrorKind::InvalidInput, "negative power");
  if (n > window_) {
    throw Error(ErrorKind::CapacityExceeded,
                "power " + std::to_string(n) + " exceeds window " + std::to_string(window_));
  }
}

GradedVector NagyDilation::f(const GradedVector& x) const { return f_apply(*tower_, x); }

NagyVector NagyDilation::make_vector(GradedVector head, TailSequence tail) const {
  for (auto& x : tail) x = f(x);
  return NagyVector{std::move(head), std::move(tail)};
}

double NagyDilation::f_range_defect(const NagyVector& v) const {
  double worst = 0.0;
  for (const auto& x : v.tail) worst = std::max(worst, (f(x) - x).norm());
  return worst;
}

GradedVector NagyDilation::v_power(int n, const GradedVector& x) const {
  GradedVector y = x;
  for (int i = 0; i < n; ++i) y = v_infty_apply(*tower_, y);
  return y;
}

GradedVector NagyDilation::v_power_adjoint(int n, const GradedVector& x) const {
  GradedVector y = x;
  for (int i = 0; i < n; ++i) y = v_infty_adjoint_apply(*tower_, y);
  return y;
}

GradedVector NagyDilation::corner(int n, const TailSequence& xi) const {
  check_power(n);
  GradedVector acc;
  for (int j = 1; j <= n; ++j) {
    const GradedVector s = slot_project(xi, j - 1);
    if (s.empty()) continue;
    acc += v_power(n - j, f(s));
  }
  return acc;
}

TailSequence NagyDilation::corner_adjoint(int n, const GradedVector& x) const {
  check_power(n);
  TailSequence out(n);
  for (int p = 0; p < n; ++p) out[p] = f(v_power_adjoint(n - p - 1, x));
  return out;
}

NagyVector NagyDilation::vhat_apply(int n, const NagyVector& v) const {
  check_power(n);
  NagyVector out;
  out.head = v_power(n, v.head) + corner(n, v.tail);
  out.tail = w_shift(n, v.tail);
  return out;
}

NagyVector NagyDilation::vhat_adjoint_apply(int n, const NagyVector& v) const {
  check_power(n);
  NagyVector out;
  out.head = v_power_adjoint(n, v.head);
  out.tail = tail_add(corner_adjoint(n, v.head), w_shift_adjoint(n, v.tail));
  return out;
}

NagyVector NagyDilation::vhat_apply_iterated(int n, const NagyVector& v) const {
  check_power(n);
  NagyVector cur = v;
  for (int i = 0; i < n; ++i) {
    NagyVector next;
    next.head = v_infty_apply(*tower_, cur.head) + f(slot_project(cur.tail, 0));
    next.tail = w_shift(1, cur.tail);
    cur = std::move(next);
  }
  return cur;
}

NagyVector NagyDilation::vhat_power(int k, const NagyVector& v) const {
  return k >= 0 ? vhat_apply(k, v) : vhat_adjoint_apply(-k, v);
}

NagyVector z_embed(const GradedVector& x) { return NagyVector{x, {}}; }

GradedVector z_adjoint(const NagyVector& v) { return v.head; }

GradedVector slot_project(const TailSequence& xi, int j) {
  if (j < 0 || j >= static_cast<int>(xi.size())) return GradedVector();
  return xi[j];
}

TailSequence slot_embed(int j, const GradedVector& x) {
  if (j < 0) throw Error(ErrorKind::InvalidInput, "negative slot");
  TailSequence out(j + 1);
  out[j] = x;
  return out;
}

TailSequence w_shift(int m, const TailSequence& xi) {
  if (m >= static_cast<int>(xi.size())) return {};
  return TailSequence(xi.begin() + m, xi.end());
}

TailSequence w_shift_adjoint(int m, const TailSequence& xi) {
  TailSequence out(m);
  out.insert(out.end(), xi.begin(), xi.end());
  return out;
}

double RelIdentityReport::max() const { return std::max({rel1, rel1_adjoint, rel2}); }

TailSequence random_tail(const NagyDilation& dil, int slots, int max_level,
                         std::mt19937_64& rng) {
  const Tower& t = dil.tower();
  TailSequence xi(slots);
  for (int j = 0; j < slots; ++j) xi[j] = dil.f(random_graded(t, 0, max_level, rng));
  const double nrm = tail_norm(xi);
  if (nrm > 0) for (auto& x : xi) x *= 1.0 / nrm;
  return xi;
}

RelIdentityReport rel_identities_check(const NagyDilation& dil, int n, int m, int k, int p,
                                       int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Tower& t = dil.tower();
  const int head_cap = std::min(t.depth(), 3);
  const int slots = std::max({n + m, p, k}) + 2;
  RelIdentityReport rep;
  for (int trial = 0; trial < trials; ++trial) {
    const TailSequence xi = random_tail(dil, slots, std::min(t.depth(), 2), rng);
    const GradedVector h = random_graded(t, 0, head_cap, rng);

    rep.rel1 = std::max(rep.rel1,
                        (slot_project(w_shift(m, xi), n) - slot_project(xi, n + m)).norm());

    const GradedVector lhs_adj = slot_project(w_shift_adjoint(m, xi), n);
    const GradedVector rhs_adj = n >= m ? slot_project(xi, n - m) : GradedVector();
    rep.rel1_adjoint = std::max(rep.rel1_adjoint, (lhs_adj - rhs_adj).norm());

    const GradedVector lhs2 = slot_project(dil.corner_adjoint(k, h), p);
    const GradedVector rhs2 = p < k ? dil.f(dil.v_power_adjoint(k - p - 1, h)) : GradedVector();
    rep.rel2 = std::max(rep.rel2, (lhs2 - rhs2).norm());
  }
  return rep;
}

int minimality_span_dim(const NagyDilation& dil, int K) {
  const Tower& t = dil.tower();
  const int d = t.base_dim();
  std::vector<NagyVector> family;
  for (int k = -K; k <= K; ++k)
    for (int i = 0; i < d; ++i)
      family.push_back(dil.vhat_power(k, z_embed(GradedVector::at_level(0, Vec::Unit(d, i)))));
  const int n = static_cast<int>(family.size());
  Mat gram(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) gram(a, b) = family[a].inner(family[b]);
  const HermitianEig eig = hermitian_eig(gram, 1e-8);
  const double lmax = eig.values.maxCoeff();
  int rank = 0;
  for (int s = 0; s < n; ++s)
    if (eig.values(s) > 1e-8 * std::max(lmax, 1.0)) ++rank;
  return rank;
}

}  // namespace ucpdil
