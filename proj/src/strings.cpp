#include "ucpdil/strings.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ucpdil {

AlgebraString::AlgebraString(std::vector<int> exponents, std::vector<Mat> coefficients)
    : exponents_(std::move(exponents)), coefficients_(std::move(coefficients)) {
  if (exponents_.size() != coefficients_.size()) {
    throw Error(ErrorKind::InvalidInput, "string needs one coefficient per exponent");
  }
  for (size_t i = 0; i < exponents_.size(); ++i) {
    if (exponents_[i] < 0) throw Error(ErrorKind::InvalidInput, "negative string exponent");
    const Mat& a = coefficients_[i];
    if (a.rows() != a.cols() || a.rows() != coefficients_[0].rows() || a.rows() == 0) {
      throw Error(ErrorKind::DimensionMismatch, "string coefficients must share a square shape");
    }
    weight_ += exponents_[i];
  }
}

AlgebraString AlgebraString::unit(int d) { return single(0, Mat::Identity(d, d)); }

AlgebraString AlgebraString::single(int n, const Mat& a) { return AlgebraString({n}, {a}); }

AlgebraString AlgebraString::star() const {
  std::vector<Mat> c;
  c.reserve(coefficients_.size());
  for (const Mat& a : coefficients_) c.push_back(a.adjoint());
  return AlgebraString(exponents_, std::move(c));
}

AlgebraString AlgebraString::raise_last() const {
  if (exponents_.empty()) throw Error(ErrorKind::InvalidInput, "cannot raise the empty string");
  std::vector<int> e = exponents_;
  e.back() += 1;
  return AlgebraString(std::move(e), coefficients_);
}

Word Word::alg(const Mat& a) { return Word({Letter{Letter::Kind::Alg, a}}); }

Word Word::v(int n) { return Word(std::vector<Letter>(n, Letter{Letter::Kind::V, Mat()})); }

Word Word::vstar(int n) {
  return Word(std::vector<Letter>(n, Letter{Letter::Kind::VStar, Mat()}));
}

Word Word::f() { return Word({Letter{Letter::Kind::F, Mat()}}); }

Word Word::ket(const AlgebraString& s) {
  Word w;
  for (int j = 0; j < s.length(); ++j) w = w * alg(s.coefficients()[j]) * v(s.exponents()[j]);
  return w;
}

Word Word::bra(const AlgebraString& s) {
  Word w;
  for (int j = s.length() - 1; j >= 0; --j) w = w * vstar(s.exponents()[j]) * alg(s.coefficients()[j]);
  return w;
}

Word Word::adjoint() const {
  std::vector<Letter> out;
  out.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
    switch (it->kind) {
      case Letter::Kind::Alg: out.push_back({Letter::Kind::Alg, it->a.adjoint()}); break;
      case Letter::Kind::V: out.push_back({Letter::Kind::VStar, Mat()}); break;
      case Letter::Kind::VStar: out.push_back({Letter::Kind::V, Mat()}); break;
      case Letter::Kind::F: out.push_back({Letter::Kind::F, Mat()}); break;
    }
  }
  return Word(std::move(out));
}

bool Word::contains_f() const {
  return std::any_of(letters_.begin(), letters_.end(),
                     [](const Letter& l) { return l.kind == Letter::Kind::F; });
}

GradedVector Word::apply(const Tower& t, const GradedVector& x) const {
  GradedVector y = x;
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
    if (y.empty()) return y;
    switch (it->kind) {
      case Letter::Kind::Alg: y = pi_infty_apply(t, it->a, y); break;
      case Letter::Kind::V: y = v_infty_apply(t, y); break;
      case Letter::Kind::VStar: y = v_infty_adjoint_apply(t, y); break;
      case Letter::Kind::F: y = f_apply(t, y); break;
    }
  }
  return y;
}

Word operator*(const Word& a, const Word& b) {
  std::vector<Letter> l = a.letters();
  l.insert(l.end(), b.letters().begin(), b.letters().end());
  return Word(std::move(l));
}

WordSum operator*(const WordSum& a, const WordSum& b) {
  WordSum out;
  for (const auto& [ca, wa] : a)
    for (const auto& [cb, wb] : b) out.emplace_back(ca * cb, wa * wb);
  return out;
}

WordSum word_sum(const Word& w) { return {{cplx(1.0), w}}; }

GradedVector apply(const Tower& t, const WordSum& s, const GradedVector& x) {
  GradedVector acc;
  for (const auto& [c, w] : s) acc += c * w.apply(t, x);
  return acc;
}

WordSum adjoint(const WordSum& s) {
  WordSum out;
  for (const auto& [c, w] : s) out.emplace_back(std::conj(c), w.adjoint());
  return out;
}

WordSum expand_f(const Word& w) {
  WordSum partial{{cplx(1.0), Word()}};
  const Word vvstar = Word::v() * Word::vstar();
  for (const Letter& l : w.letters()) {
    WordSum next;
    for (const auto& [c, p] : partial) {
      if (l.kind == Letter::Kind::F) {
        next.emplace_back(c, p);
        next.emplace_back(-c, p * vvstar);
      } else {
        next.emplace_back(c, p * Word({l}));
      }
    }
    partial = std::move(next);
  }
  return partial;
}

Word reduce(const Word& w, const UcpMap& phi) {
  using K = Letter::Kind;
  std::vector<Letter> l = w.letters();
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i + 1 < l.size(); ++i) {
      if (l[i].kind == K::Alg && l[i + 1].kind == K::Alg) {
        l[i].a = l[i].a * l[i + 1].a;
        l.erase(l.begin() + static_cast<long>(i) + 1);
        changed = true;
        break;
      }
      if (l[i].kind != K::VStar) continue;
      if (l[i + 1].kind == K::V) {
        l.erase(l.begin() + static_cast<long>(i), l.begin() + static_cast<long>(i) + 2);
        changed = true;
        break;
      }
      if (l[i + 1].kind == K::Alg && i + 2 < l.size() && l[i + 2].kind == K::V) {
        const Mat image = phi.apply(l[i + 1].a);
        l.erase(l.begin() + static_cast<long>(i) + 1, l.begin() + static_cast<long>(i) + 3);
        l[i] = Letter{K::Alg, image};
        changed = true;
        break;
      }
    }
  }
  return Word(std::move(l));
}

NormalForm normal_form(const Word& reduced, int d) {
  using K = Letter::Kind;
  const auto& l = reduced.letters();
  const int n = static_cast<int>(l.size());
  int last_v = -1;
  int first_vs = n;
  for (int i = 0; i < n; ++i) {
    if (l[i].kind == K::F) throw Error(ErrorKind::InvalidInput, "normal form needs an F-free word");
    if (l[i].kind == K::V) last_v = i;
    if (l[i].kind == K::VStar && first_vs == n) first_vs = i;
  }
  if (last_v > first_vs) throw Error(ErrorKind::InvalidInput, "word is not reduced");

  const Mat id = Mat::Identity(d, d);
  NormalForm nf{AlgebraString::unit(d), id, AlgebraString::unit(d)};

  if (last_v >= 0) {
    std::vector<int> e;
    std::vector<Mat> c;
    Mat coef = id;
    int run = 0;
    for (int i = 0; i <= last_v; ++i) {
      if (l[i].kind == K::Alg) {
        if (run > 0) {
          e.push_back(run);
          c.push_back(coef);
          coef = id;
          run = 0;
        }
        coef = coef * l[i].a;
      } else {
        ++run;
      }
    }
    e.push_back(run);
    c.push_back(coef);
    nf.ket = AlgebraString(std::move(e), std::move(c));
  }

  for (int i = last_v + 1; i < first_vs; ++i) nf.r = nf.r * l[i].a;

  if (first_vs < n) {
    std::vector<std::pair<int, Mat>> groups;
    for (int i = first_vs; i < n; ++i) {
      if (l[i].kind == K::VStar) {
        if (groups.empty() || groups.back().second.size() > 0) groups.emplace_back(0, Mat());
        groups.back().first += 1;
      } else {
        groups.back().second = groups.back().second.size() > 0 ? Mat(groups.back().second * l[i].a)
                                                                 : l[i].a;
      }
    }
    std::vector<int> e;
    std::vector<Mat> c;
    for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
      e.push_back(it->first);
      c.push_back(it->second.size() > 0 ? it->second : id);
    }
    nf.bra = AlgebraString(std::move(e), std::move(c));
  }
  return nf;
}

GradedVector ket_apply(const Tower& t, const AlgebraString& s, const GradedVector& x) {
  return Word::ket(s).apply(t, x);
}

GradedVector bra_apply(const Tower& t, const AlgebraString& s, const GradedVector& x) {
  return Word::bra(s).apply(t, x);
}

BraRKet bra_R_ket(const Tower& t, const AlgebraString& alpha, const Mat& r,
                  const AlgebraString& beta, std::uint64_t seed, int trials) {
  const int d = t.base_dim();
  const Word direct = Word::bra(alpha) * Word::alg(r) * Word::ket(beta);
  const NormalForm nf = normal_form(reduce(direct, t.channel()), d);
  BraRKet out;
  out.bra_form = alpha.weight() >= beta.weight();
  out.r = nf.r;
  Word factored;
  if (out.bra_form) {
    if (nf.ket.weight() != 0) throw Error(ErrorKind::InvalidInput, "unexpected ket remainder");
    out.r = nf.ket.coefficients()[0] * nf.r;
    out.theta = nf.bra;
    factored = Word::alg(out.r) * Word::bra(out.theta);
  } else {
    if (nf.bra.weight() != 0) throw Error(ErrorKind::InvalidInput, "unexpected bra remainder");
    out.r = nf.r * nf.bra.coefficients()[0];
    out.theta = nf.ket;
    factored = Word::ket(out.theta) * Word::alg(out.r);
  }
  std::mt19937_64 rng(seed);
  const int top = std::min(3, t.depth() - beta.weight());
  if (top < 0) throw Error(ErrorKind::CapacityExceeded, "tower too shallow for the ket");
  for (int trial = 0; trial < trials; ++trial) {
    const GradedVector x = random_graded(t, 0, top, rng);
    out.residual = std::max(out.residual, (direct.apply(t, x) - factored.apply(t, x)).norm());
  }
  return out;
}

Mat level0_block(const Tower& t, const GradedApplier& op) {
  const int d = t.base_dim();
  Mat a(d, d);
  for (int i = 0; i < d; ++i) a.col(i) = op(GradedVector::at_level(0, Vec::Unit(d, i))).component(0, d);
  return a;
}

double algebra_membership_residual(const Tower& t, const GradedApplier& op, int level_cap,
                                   std::uint64_t seed, int samples) {
  const int d = t.base_dim();
  const Mat a = level0_block(t, op);
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    const GradedVector e = GradedVector::at_level(0, Vec::Unit(d, i));
    worst = std::max(worst, (op(e) - pi_infty_apply(t, a, e)).norm());
  }
  std::mt19937_64 rng(seed);
  for (int n = 1; n <= level_cap; ++n)
    for (int s = 0; s < samples; ++s) {
      const GradedVector x = random_graded(t, n, n, rng);
      worst = std::max(worst, (op(x) - pi_infty_apply(t, a, x)).norm());
    }
  return worst;
}

GammaOperator::GammaOperator(AlgebraString s) : s_(std::move(s)) {
  if (s_.weight() < 1) throw Error(ErrorKind::InvalidInput, "gamma needs a string of weight >= 1");
}

GradedVector GammaOperator::apply(const Tower& t, const TailSequence& xi) const {
  const GradedVector x = slot_project(xi, slot());
  if (x.empty()) return x;
  return bra_apply(t, s_, f_apply(t, x));
}

TailSequence GammaOperator::adjoint_apply(const Tower& t, const GradedVector& x) const {
  return slot_embed(slot(), f_apply(t, ket_apply(t, s_.star(), x)));
}

WordSum gamma_pair_product(const GammaOperator& a, const GammaOperator& b) {
  if (a.string().weight() != b.string().weight()) return {};
  return word_sum(Word::bra(a.string()) * Word::f() * Word::ket(b.string().star()));
}

TailSequence NaplaOperator::apply(const Tower& t, const TailSequence& xi) const {
  if (in_slot() < 0 || out_slot() < 0) throw Error(ErrorKind::InvalidInput, "napla slot is negative");
  const GradedVector x = slot_project(xi, in_slot());
  if (x.empty()) return {};
  const Word w = Word::f() * Word::ket(alpha) * Word::alg(a) * Word::bra(beta) * Word::f();
  return slot_embed(out_slot(), w.apply(t, x));
}

NaplaOperator NaplaOperator::adjoint() const { return {k, a.adjoint(), beta.star(), alpha.star()}; }

NaplaOperator NaplaOperator::shifted() const { return {k + 1, a, alpha, beta}; }

TailSequence apply(const Tower& t, const NaplaSum& s, const TailSequence& xi) {
  TailSequence acc;
  for (const auto& [c, n] : s) {
    TailSequence y = n.apply(t, xi);
    acc = tail_add(std::move(acc), y, c);
  }
  return acc;
}

NaplaSum adjoint(const NaplaSum& s) {
  NaplaSum out;
  for (const auto& [c, n] : s) out.emplace_back(std::conj(c), n.adjoint());
  return out;
}

NaplaSum napla_product(const NaplaOperator& d1, const NaplaOperator& d2, const UcpMap& phi) {
  if (d1.in_slot() != d2.out_slot()) return {};
  const int d = phi.dim();
  const Word w = Word::ket(d1.alpha) * Word::alg(d1.a) * Word::bra(d1.beta) * Word::f() *
                 Word::ket(d2.alpha) * Word::alg(d2.a) * Word::bra(d2.beta);
  NaplaSum out;
  for (const auto& [c, term] : expand_f(w)) {
    const NormalForm nf = normal_form(reduce(term, phi), d);
    const int k = d1.out_slot() - nf.ket.weight();
    if (d2.in_slot() - nf.bra.weight() != k) {
      throw Error(ErrorKind::InvalidInput, "napla product slots are inconsistent");
    }
    out.emplace_back(c, NaplaOperator{k, nf.r, nf.ket, nf.bra});
  }
  return out;
}

std::vector<AlgebraString> gamma_family(int d, int max_weight, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Mat id = Mat::Identity(d, d);
  std::vector<AlgebraString> out;
  for (int w = 1; w <= max_weight; ++w) {
    out.push_back(AlgebraString::single(w, id));
    const Mat b = random_gaussian(d, d, rng);
    out.push_back(AlgebraString::single(w, b / operator_norm(b)));
    if (w >= 2) {
      const Mat b1 = random_gaussian(d, d, rng);
      const Mat b2 = random_gaussian(d, d, rng);
      out.push_back(AlgebraString({1, w - 1}, {b1 / operator_norm(b1), b2 / operator_norm(b2)}));
    }
  }
  return out;
}

SigmaReport sigma_membership(const Tower& t, const TailOperator& op,
                             const std::vector<AlgebraString>& gammas, int level_cap,
                             double tol) {
  SigmaReport rep;
  int max_w = 0;
  for (const auto& g : gammas) max_w = std::max(max_w, g.weight());
  rep.family = "gamma strings of weight <= " + std::to_string(max_w) + ", " +
               std::to_string(gammas.size()) + " strings";
  for (const auto& s1 : gammas)
    for (const auto& s2 : gammas) {
      const GammaOperator g1(s1);
      const GammaOperator g2(s2);
      auto conj = [&](const GradedVector& x) { return g1.apply(t, op(g2.adjoint_apply(t, x))); };
      rep.worst = std::max(rep.worst, algebra_membership_residual(t, conj, level_cap));
      ++rep.pairs;
    }
  rep.pass = rep.worst <= tol;
  return rep;
}

WInvarianceReport w_invariance_check(const NagyDilation& dil, const NaplaOperator& delta,
                                     const std::vector<AlgebraString>& gammas, double tol,
                                     int trials, std::uint64_t seed) {
  const Tower& t = dil.tower();
  std::mt19937_64 rng(seed);
  WInvarianceReport rep;
  TailOperator conj = [&t, delta](const TailSequence& xi) {
    return w_shift_adjoint(1, delta.apply(t, w_shift(1, xi)));
  };
  const NaplaOperator next = delta.shifted();
  const int slots = std::max(delta.in_slot(), next.in_slot()) + 3;
  for (int trial = 0; trial < trials; ++trial) {
    const TailSequence xi = random_tail(dil, slots, std::min(2, t.depth()), rng);
    const TailSequence diff = tail_add(conj(xi), next.apply(t, xi), -1.0);
    rep.shift_residual = std::max(rep.shift_residual, tail_norm(diff));
  }
  rep.sigma = sigma_membership(t, conj, gammas, 1, tol);
  rep.pass = rep.shift_residual <= tol && rep.sigma.pass;
  return rep;
}

double gamma_conjugation_residual(const NagyDilation& dil, const AlgebraString& alpha,
                                  const AlgebraString& beta, const TailOperator& op, int trials,
                                  std::uint64_t seed) {
  if (alpha.weight() < 2 || beta.weight() < 2) {
    throw Error(ErrorKind::InvalidInput, "gamma conjugation needs weights >= 2");
  }
  const Tower& t = dil.tower();
  const GammaOperator ga(alpha);
  const GammaOperator gb(beta);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const GradedVector x = random_graded(t, 0, std::min(2, t.depth()), rng);
    const GradedVector lhs = ga.apply(t, w_shift_adjoint(1, op(w_shift(1, gb.adjoint_apply(t, x)))));
    const TailSequence mid =
        op(slot_embed(beta.weight() - 2, f_apply(t, ket_apply(t, beta.star(), x))));
    const GradedVector rhs = bra_apply(t, alpha, f_apply(t, slot_project(mid, alpha.weight() - 2)));
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

TailSequence SElement::apply_tail(const Tower& tw, const TailSequence& xi) const {
  TailSequence out = ucpdil::apply(tw, t, xi);
  if (t_scalar != cplx(0.0)) out = tail_add(std::move(out), xi, t_scalar);
  return out;
}

NagyVector SElement::apply(const NagyDilation& dil, const NagyVector& v) const {
  const Tower& tw = dil.tower();
  NagyVector out;
  out.head = pi_infty_apply(tw, a, v.head);
  for (const auto& [c, s] : gamma1) out.head += c * GammaOperator(s).apply(tw, v.tail);
  for (const auto& [c, s] : gamma2) {
    out.tail = tail_add(std::move(out.tail), GammaOperator(s).adjoint_apply(tw, v.head), std::conj(c));
  }
  out.tail = tail_add(std::move(out.tail), apply_tail(tw, v.tail));
  return out;
}

SElement s_conjugate(const SElement& s, const UcpMap& phi) {
  const int d = phi.dim();
  const Mat id = Mat::Identity(d, d);
  const AlgebraString e = AlgebraString::unit(d);
  SElement out;
  out.a = phi.apply(s.a);
  out.gamma1.emplace_back(1.0, AlgebraString::single(1, s.a));
  for (const auto& [c, g] : s.gamma1) out.gamma1.emplace_back(c, g.raise_last());
  out.gamma2.emplace_back(1.0, AlgebraString::single(1, s.a.adjoint()));
  for (const auto& [c, g] : s.gamma2) out.gamma2.emplace_back(c, g.raise_last());
  out.t.emplace_back(1.0, NaplaOperator{0, s.a, e, e});
  for (const auto& [c, g] : s.gamma1) out.t.emplace_back(c, NaplaOperator{0, id, e, g});
  for (const auto& [c, g] : s.gamma2) out.t.emplace_back(std::conj(c), NaplaOperator{0, id, g.star(), e});
  for (const auto& [c, n] : s.t) out.t.emplace_back(c, n.shifted());
  if (s.t_scalar != cplx(0.0)) {
    out.t_scalar = s.t_scalar;
    out.t.emplace_back(-s.t_scalar, NaplaOperator{0, id, e, e});
  }
  return out;
}

double s_conjugation_residual(const NagyDilation& dil, const SElement& s, int trials,
                              std::uint64_t seed) {
  const Tower& t = dil.tower();
  const SElement conj = s_conjugate(s, t.channel());
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const NagyVector v = dil.make_vector(random_graded(t, 0, std::min(2, t.depth()), rng),
                                         random_tail(dil, 4, std::min(2, t.depth()), rng));
    const NagyVector lhs = dil.vhat_adjoint_apply(1, s.apply(dil, dil.vhat_apply(1, v)));
    worst = std::max(worst, (lhs - conj.apply(dil, v)).norm());
  }
  return worst;
}

GradedApplier compress(const NagyOperator& x) {
  return [x](const GradedVector& h) { return x(z_embed(h)).head; };
}

NagyOperator as_operator(const NagyDilation& dil, const SElement& s) {
  return [&dil, s](const NagyVector& v) { return s.apply(dil, v); };
}

NagyOperator compose(NagyOperator a, NagyOperator b) {
  return [a = std::move(a), b = std::move(b)](const NagyVector& v) { return a(b(v)); };
}

NagyOperator conjugate_by_vhat(const NagyDilation& dil, NagyOperator x) {
  return [&dil, x = std::move(x)](const NagyVector& v) {
    return dil.vhat_adjoint_apply(1, x(dil.vhat_apply(1, v)));
  };
}

AlgebraString random_string(int d, int weight, int max_length, std::mt19937_64& rng) {
  const int r = weight == 0 ? 1
                            : std::uniform_int_distribution<int>(1, std::min(max_length, weight))(rng);
  // r - 1 distinct cut points in [1, weight - 1] give exponents >= 1.
  std::vector<int> cuts;
  for (int c = 1; c < weight; ++c) cuts.push_back(c);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(std::max(0, r - 1));
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> e;
  int prev = 0;
  for (int c : cuts) {
    e.push_back(c - prev);
    prev = c;
  }
  e.push_back(weight - prev);
  std::vector<Mat> coef;
  for (size_t i = 0; i < e.size(); ++i) {
    const Mat b = random_gaussian(d, d, rng);
    coef.push_back(b / operator_norm(b));
  }
  return AlgebraString(std::move(e), std::move(coef));
}

}  // namespace ucpdil
