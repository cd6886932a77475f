#include <gtest/gtest.h>

#include "ucpdil/strings.hpp"

using namespace ucpdil;

namespace {

struct Fixture {
  UcpMap phi = presets::rank2_faithful(2, 11);
  std::shared_ptr<const Tower> tower = std::make_shared<const Tower>(Tower::build(phi, 8));
  NagyDilation dil{tower, 6};
  const Tower& t() const { return *tower; }
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

// Reduction of (alpha| R |beta) by peeling V^* powers against V powers from
// the middle outward: V^{n*} X V^m -> Phi^{min}(X) with the excess left over.
// Returns the operator as a closure on graded vectors.
GradedApplier bra_r_ket_oracle(const Tower& t, const AlgebraString& alpha, const Mat& r,
                               const AlgebraString& beta) {
  const UcpMap& phi = t.channel();
  const int d = t.base_dim();
  const auto& ae = alpha.exponents();
  const auto& ac = alpha.coefficients();
  const auto& be = beta.exponents();
  const auto& bc = beta.coefficients();
  size_t i = 0, j = 0;
  Mat x = r;
  int lv = 0, rv = 0;
  while (true) {
    if (lv == 0 && i < ae.size()) {
      x = ac[i] * x;
      lv = ae[i++];
      continue;
    }
    if (rv == 0 && j < be.size()) {
      x = x * bc[j];
      rv = be[j++];
      continue;
    }
    if (lv > 0 && rv > 0) {
      const int c = std::min(lv, rv);
      x = phi.apply_power(x, c);
      lv -= c;
      rv -= c;
      continue;
    }
    break;
  }
  const Mat id = Mat::Identity(d, d);
  if (rv > 0 || j < be.size()) {
    std::vector<int> e = {rv};
    std::vector<Mat> c = {id};
    for (; j < be.size(); ++j) {
      e.push_back(be[j]);
      c.push_back(bc[j]);
    }
    const AlgebraString theta(e, c);
    return [&t, x, theta](const GradedVector& v) {
      return pi_infty_apply(t, x, ket_apply(t, theta, v));
    };
  }
  std::vector<int> e = {lv};
  std::vector<Mat> c = {id};
  for (; i < ae.size(); ++i) {
    e.push_back(ae[i]);
    c.push_back(ac[i]);
  }
  const AlgebraString theta(e, c);
  return [&t, x, theta](const GradedVector& v) {
    return bra_apply(t, theta, pi_infty_apply(t, x, v));
  };
}

GradedVector apply_factored(const Tower& t, const BraRKet& b, const GradedVector& v) {
  if (b.bra_form) return pi_infty_apply(t, b.r, bra_apply(t, b.theta, v));
  return ket_apply(t, b.theta, pi_infty_apply(t, b.r, v));
}

}  // namespace

TEST(Strings, WeightAndStar) {
  std::mt19937_64 rng(1);
  const Mat a = random_gaussian(2, 2, rng), b = random_gaussian(2, 2, rng);
  const AlgebraString s({1, 2}, {a, b});
  EXPECT_EQ(s.weight(), 3);
  EXPECT_EQ(s.length(), 2);
  EXPECT_LE(operator_norm(s.star().coefficients()[1] - b.adjoint()), 0.0);
  EXPECT_EQ(s.raise_last().exponents(), (std::vector<int>{1, 3}));
  EXPECT_EQ(AlgebraString().weight(), 0);
}

TEST(Strings, KetBraBasics) {
  const Tower& t = fx().t();
  std::mt19937_64 rng(2);
  const GradedVector x = random_graded(t, 0, 3, rng);
  EXPECT_LE((ket_apply(t, AlgebraString::unit(2), x) - x).norm(), 0.0);
  const Mat a = random_gaussian(2, 2, rng);
  const GradedVector kx = ket_apply(t, AlgebraString::single(1, a), x);
  EXPECT_LE((kx - pi_infty_apply(t, a, v_infty_apply(t, x))).norm(), 1e-14);
  EXPECT_EQ(kx.min_level(), x.min_level() + 1);
}

TEST(Strings, KetBraAdjointBookkeeping) {
  const Tower& t = fx().t();
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const AlgebraString s = random_string(2, 1 + trial % 3, 2, rng);
    const GradedVector x = random_graded(t, 0, 2, rng);
    const GradedVector y = random_graded(t, s.weight(), s.weight() + 2, rng);
    EXPECT_LE(std::abs(ket_apply(t, s, x).inner(y) - x.inner(bra_apply(t, s.star(), y))), 1e-13);
  }
}

TEST(Words, ReduceAndNormalForm) {
  const UcpMap& phi = fx().phi;
  std::mt19937_64 rng(4);
  const Mat a = random_gaussian(2, 2, rng);
  const Word w = reduce(Word::vstar() * Word::alg(a) * Word::v(), phi);
  ASSERT_EQ(w.letters().size(), 1u);
  EXPECT_LE(operator_norm(w.letters()[0].a - phi.apply(a)), 1e-14);
  EXPECT_TRUE(reduce(Word::vstar(2) * Word::v(2), phi).empty());

  const Word mixed = Word::v() * Word::alg(a) * Word::vstar(2);
  const NormalForm nf = normal_form(reduce(mixed, phi), 2);
  EXPECT_EQ(nf.ket.weight(), 1);
  EXPECT_EQ(nf.bra.weight(), 2);
  EXPECT_THROW(normal_form(Word::f(), 2), Error);
}

TEST(Words, ExpandFMatchesProjection) {
  const Tower& t = fx().t();
  std::mt19937_64 rng(5);
  const GradedVector x = random_graded(t, 0, 3, rng);
  const Word w = Word::alg(random_gaussian(2, 2, rng)) * Word::f() * Word::v();
  EXPECT_EQ(expand_f(w).size(), 2u);
  EXPECT_LE((apply(t, expand_f(w), x) - w.apply(t, x)).norm(), 1e-13);
}

TEST(BraRKet, TrivialIsAlgebraElement) {
  const Tower& t = fx().t();
  const BraRKet b = bra_R_ket(t, AlgebraString::unit(2), Mat::Identity(2, 2), AlgebraString::unit(2));
  EXPECT_TRUE(b.bra_form);
  EXPECT_EQ(b.theta.weight(), 0);
  EXPECT_LE(operator_norm(b.r - Mat::Identity(2, 2)), 1e-14);
}

TEST(BraRKet, PowerRuleAgainstChannel) {
  const Tower& t = fx().t();
  std::mt19937_64 rng(6);
  const Mat r = random_gaussian(2, 2, rng);
  const Mat id = Mat::Identity(2, 2);
  // V^{1*} R V^3 = Phi(R) V^2.
  const BraRKet lo = bra_R_ket(t, AlgebraString::single(1, id), r, AlgebraString::single(3, id));
  EXPECT_FALSE(lo.bra_form);
  EXPECT_EQ(lo.theta.weight(), 2);
  EXPECT_LE(lo.residual, 1e-9);
  // V^{3*} R V^1 = V^{2*} Phi(R).
  const BraRKet hi = bra_R_ket(t, AlgebraString::single(3, id), r, AlgebraString::single(1, id));
  EXPECT_TRUE(hi.bra_form);
  EXPECT_EQ(hi.theta.weight(), 2);
  EXPECT_LE(hi.residual, 1e-9);
}

TEST(BraRKet, RecursionOracle) {
  const Tower& t = fx().t();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 12; ++trial) {
    const AlgebraString a = random_string(2, static_cast<int>(rng() % 4), 2, rng);
    const AlgebraString b = random_string(2, static_cast<int>(rng() % 4), 2, rng);
    const Mat r = random_gaussian(2, 2, rng);
    const BraRKet got = bra_R_ket(t, a, r, b, 1 + trial);
    EXPECT_EQ(got.bra_form, a.weight() >= b.weight());
    EXPECT_EQ(got.theta.weight(), std::abs(a.weight() - b.weight()));
    EXPECT_LE(got.residual, 1e-9);
    const GradedApplier oracle = bra_r_ket_oracle(t, a, r, b);
    for (int s = 0; s < 3; ++s) {
      const GradedVector x = random_graded(t, 0, 8 - std::max(a.weight(), b.weight()) - 1, rng);
      const GradedVector direct = bra_apply(t, a, pi_infty_apply(t, r, ket_apply(t, b, x)));
      EXPECT_LE((oracle(x) - direct).norm(), 1e-12 * std::max(1.0, direct.norm()));
      EXPECT_LE((apply_factored(t, got, x) - direct).norm(), 1e-9);
    }
  }
}

TEST(Gamma, ZeroSlotAndDefinition) {
  const Tower& t = fx().t();
  const NagyDilation& dil = fx().dil;
  std::mt19937_64 rng(8);
  TailSequence xi = random_tail(dil, 3, 2, rng);
  const GammaOperator g(AlgebraString::single(2, random_gaussian(2, 2, rng)));
  TailSequence zeroed = xi;
  zeroed[1] = GradedVector();
  EXPECT_LE(g.apply(t, zeroed).norm(), 0.0);
  const GammaOperator g1(AlgebraString::single(1, Mat::Identity(2, 2)));
  EXPECT_LE((g1.apply(t, xi) - v_infty_adjoint_apply(t, f_apply(t, xi[0]))).norm(), 1e-14);
}

TEST(Gamma, NormBound) {
  const Tower& t = fx().t();
  const NagyDilation& dil = fx().dil;
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 6; ++trial) {
    const AlgebraString s = random_string(2, 1 + trial % 3, 2, rng);
    double bound = 1.0;
    for (const Mat& c : s.coefficients()) bound *= operator_norm(c);
    const TailSequence xi = random_tail(dil, 4, 2, rng);
    const GammaOperator g(s);
    EXPECT_LE(g.apply(t, xi).norm(), bound * xi[g.slot()].norm() + 1e-12);
  }
}

TEST(Gamma, ZeroLawOnDifferentWeights) {
  const Tower& t = fx().t();
  std::mt19937_64 rng(10);
  const GammaOperator a(random_string(2, 1, 1, rng)), b(random_string(2, 2, 2, rng));
  EXPECT_TRUE(gamma_pair_product(a, b).empty());
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const GradedVector x = random_graded(t, 0, 2, rng);
    worst = std::max(worst, a.apply(t, b.adjoint_apply(t, x)).norm());
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Gamma, PairProductAndMembership) {
  const Tower& t = fx().t();
  std::mt19937_64 rng(11);
  for (int w = 1; w <= 3; ++w) {
    const AlgebraString sa = random_string(2, w, 2, rng), sb = random_string(2, w, 2, rng);
    const GammaOperator ga(sa), gb(sb);
    const GradedApplier prod = [&](const GradedVector& x) {
      return ga.apply(t, gb.adjoint_apply(t, x));
    };
    EXPECT_LE(algebra_membership_residual(t, prod, 2), 1e-8);
    const WordSum words = gamma_pair_product(ga, gb);
    // (a|F|b*) = (a|I|b*) - (a|VV*|b*).
    const Word plain = Word::bra(sa) * Word::ket(sb.star());
    const Word with_vv = Word::bra(sa) * Word::v() * Word::vstar() * Word::ket(sb.star());
    for (int s = 0; s < 3; ++s) {
      const GradedVector x = random_graded(t, 0, 2, rng);
      EXPECT_LE((apply(t, words, x) - prod(x)).norm(), 1e-13);
      EXPECT_LE((plain.apply(t, x) - with_vv.apply(t, x) - prod(x)).norm(), 1e-13);
    }
  }
  const GammaOperator e(AlgebraString::single(1, Mat::Identity(2, 2)));
  const GradedApplier self = [&](const GradedVector& x) { return e.apply(t, e.adjoint_apply(t, x)); };
  EXPECT_LE(algebra_membership_residual(t, self, 2), 1e-8);
}

TEST(Napla, AdjointRelation) {
  const Tower& t = fx().t();
  const NagyDilation& dil = fx().dil;
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 8; ++trial) {
    const NaplaOperator d{static_cast<int>(rng() % 2), random_gaussian(2, 2, rng),
                          random_string(2, static_cast<int>(rng() % 3), 2, rng),
                          random_string(2, static_cast<int>(rng() % 3), 2, rng)};
    const TailSequence xi = random_tail(dil, 6, 2, rng), eta = random_tail(dil, 6, 2, rng);
    EXPECT_LE(std::abs(tail_inner(eta, d.apply(t, xi)) - tail_inner(d.adjoint().apply(t, eta), xi)),
              1e-13);
  }
}

TEST(Napla, ZeroInputSlot) {
  const Tower& t = fx().t();
  const NagyDilation& dil = fx().dil;
  std::mt19937_64 rng(13);
  const NaplaOperator d{1, random_gaussian(2, 2, rng), random_string(2, 1, 1, rng),
                        random_string(2, 1, 1, rng)};
  TailSequence xi = random_tail(dil, 4, 2, rng);
  xi[d.in_slot()] = GradedVector();
  EXPECT_LE(tail_norm(d.apply(t, xi)), 0.0);
}

TEST(Napla, CornerSandwich) {
  const Tower& t = fx().t();
  const NagyDilation& dil = fx().dil;
  std::mt19937_64 rng(14);
  const Mat a = random_gaussian(2, 2, rng);
  const NaplaOperator d{0, a, AlgebraString::unit(2), AlgebraString::unit(2)};
  const TailSequence xi = random_tail(dil, 3, 2, rng);
  const TailSequence direct = dil.corner_adjoint(1, pi_infty_apply(t, a, dil.corner(1, xi)));
  EXPECT_LE(tail_norm(tail_add(d.apply(t, xi), direct, -1.0)), 1e-13);
}

TEST(Napla, ProductTable) {
  const UcpMap& phi = fx().phi;
  const Tower& t = fx().t();
  const NagyDilation& dil = fx().dil;
  std::mt19937_64 rng(15);
  int zero = 0, nonzero = 0;
  double largest = 0;
  for (int k = 0; k <= 1; ++k)
    for (int h = 0; h <= 1; ++h)
      for (int wb = 0; wb <= 2; ++wb)
        for (int wg = 0; wg <= 2; ++wg) {
          const NaplaOperator d1{k, random_gaussian(2, 2, rng),
                                 random_string(2, static_cast<int>(rng() % 3), 2, rng),
                                 random_string(2, wb, 2, rng)};
          const NaplaOperator d2{h, random_gaussian(2, 2, rng), random_string(2, wg, 2, rng),
                                 random_string(2, static_cast<int>(rng() % 3), 2, rng)};
          const NaplaSum prod = napla_product(d1, d2, phi);
          if (k + wb != h + wg) {
            EXPECT_TRUE(prod.empty());
            ++zero;
          } else {
            ++nonzero;
          }
          const TailSequence xi = random_tail(dil, 6, 2, rng);
          const TailSequence lhs = d1.apply(t, d2.apply(t, xi));
          largest = std::max(largest, tail_norm(lhs));
          EXPECT_LE(tail_norm(tail_add(lhs, apply(t, prod, xi), -1.0)), 1e-9);
          // (D1 D2)^dagger = D2^dagger D1^dagger.
          const TailSequence eta = random_tail(dil, 6, 2, rng);
          const TailSequence radj = d2.adjoint().apply(t, d1.adjoint().apply(t, eta));
          EXPECT_LE(tail_norm(tail_add(apply(t, adjoint(prod), eta), radj, -1.0)), 1e-9);
        }
  EXPECT_GT(zero, 0);
  EXPECT_GT(nonzero, 0);
  EXPECT_GT(largest, 1e-3);
}

TEST(Sigma, MembershipOfStandardElements) {
  const Tower& t = fx().t();
  const auto fam = gamma_family(2, 2, 3);
  std::mt19937_64 rng(16);
  const TailOperator id = [](const TailSequence& xi) { return xi; };
  EXPECT_TRUE(sigma_membership(t, id, fam, 1, 1e-8).pass);
  const NaplaOperator d{0, random_gaussian(2, 2, rng), random_string(2, 1, 1, rng),
                        random_string(2, 1, 1, rng)};
  const TailOperator napla = [&](const TailSequence& xi) { return d.apply(t, xi); };
  const SigmaReport r = sigma_membership(t, napla, fam, 1, 1e-8);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.pairs, static_cast<int>(fam.size() * fam.size()));
  const GammaOperator g1(random_string(2, 1, 1, rng)), g2(random_string(2, 2, 2, rng));
  const Mat a = random_gaussian(2, 2, rng);
  const TailOperator sandwich = [&](const TailSequence& xi) {
    return g1.adjoint_apply(t, pi_infty_apply(t, a, g2.apply(t, xi)));
  };
  EXPECT_TRUE(sigma_membership(t, sandwich, fam, 1, 1e-8).pass);
}

TEST(Sigma, DetectsNonMember) {
  const Tower& t = fx().t();
  std::mt19937_64 rng(17);
  // A tail map acting on slot 0 by an arbitrary matrix on level 1 breaks the
  // level consistency of Gamma T Gamma^dagger.
  const Mat g = random_gaussian(t.level_dim(1), t.level_dim(1), rng);
  const TailOperator wild = [&](const TailSequence& xi) {
    TailSequence out(xi.size());
    if (!xi.empty()) {
      GradedVector v = xi[0];
      if (v.has(1)) v.set(1, g * v.component(1, t.level_dim(1)));
      out[0] = v;
    }
    return out;
  };
  const auto fam = gamma_family(2, 1, 3);
  EXPECT_FALSE(sigma_membership(t, wild, fam, 1, 1e-8).pass);
}

TEST(WInvariance, NaplaAndIdentity) {
  const Tower& t = fx().t();
  const NagyDilation& dil = fx().dil;
  std::mt19937_64 rng(18);
  const auto fam = gamma_family(2, 3, 5);
  const NaplaOperator d{0, random_gaussian(2, 2, rng), AlgebraString::unit(2),
                        AlgebraString::unit(2)};
  const WInvarianceReport r = w_invariance_check(dil, d, fam, 1e-9, 5, 9);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.shift_residual, 1e-12);

  // W* I W = I - Delta_0(I, e, e) on F-range tails.
  const NaplaOperator e0{0, Mat::Identity(2, 2), AlgebraString::unit(2), AlgebraString::unit(2)};
  const TailSequence xi = random_tail(dil, 4, 2, rng);
  const TailSequence lhs = w_shift_adjoint(1, w_shift(1, xi));
  EXPECT_LE(tail_norm(tail_add(lhs, tail_add(xi, e0.apply(t, xi), -1.0), -1.0)), 1e-13);
}

TEST(WInvariance, GammaConjugation) {
  const Tower& t = fx().t();
  const NagyDilation& dil = fx().dil;
  std::mt19937_64 rng(19);
  const NaplaOperator d{0, random_gaussian(2, 2, rng), random_string(2, 1, 1, rng),
                        random_string(2, 1, 1, rng)};
  const TailOperator op = [&](const TailSequence& xi) { return d.apply(t, xi); };
  const TailOperator id = [](const TailSequence& xi) { return xi; };
  for (int trial = 0; trial < 3; ++trial) {
    const AlgebraString a = random_string(2, 2 + trial % 2, 2, rng);
    const AlgebraString b = random_string(2, 2 + trial % 2, 2, rng);
    EXPECT_LE(gamma_conjugation_residual(dil, a, b, op, 3, trial), 1e-12);
    EXPECT_LE(gamma_conjugation_residual(dil, a, b, id, 3, trial), 1e-12);
  }
  EXPECT_THROW(gamma_conjugation_residual(dil, AlgebraString::single(1, Mat::Identity(2, 2)),
                                          AlgebraString::single(2, Mat::Identity(2, 2)), id, 1, 1),
               Error);
}

TEST(SElement, ConjugationIdentifications) {
  const Tower& t = fx().t();
  const NagyDilation& dil = fx().dil;
  std::mt19937_64 rng(20);
  const Mat a = random_gaussian(2, 2, rng);
  SElement za;
  za.a = a;
  const NagyOperator conj = conjugate_by_vhat(dil, as_operator(dil, za));
  // Upper right block of Vhat* Z a Z* Vhat is Gamma((1; a)).
  const TailSequence xi = random_tail(dil, 3, 2, rng);
  const NagyVector tail_only = dil.make_vector({}, xi);
  const GammaOperator g(AlgebraString::single(1, a));
  EXPECT_LE((conj(tail_only).head - g.apply(t, xi)).norm(), 1e-13);

  // C(1)* Gamma(alpha) W = Delta_0(I, e, alpha).
  const AlgebraString alpha = random_string(2, 2, 2, rng);
  const GammaOperator ga(alpha);
  const TailSequence eta = random_tail(dil, 5, 2, rng);
  const TailSequence lhs = dil.corner_adjoint(1, ga.apply(t, w_shift(1, eta)));
  const NaplaOperator want{0, Mat::Identity(2, 2), AlgebraString::unit(2), alpha};
  EXPECT_LE(tail_norm(tail_add(lhs, want.apply(t, eta), -1.0)), 1e-13);
}

TEST(SElement, GeneratedElementsConjugate) {
  const NagyDilation& dil = fx().dil;
  std::mt19937_64 rng(21);
  SElement trivial;
  trivial.a = Mat::Identity(2, 2);
  trivial.t_scalar = 1.0;
  EXPECT_LE(s_conjugation_residual(dil, trivial, 4, 1), 1e-12);
  for (int trial = 0; trial < 4; ++trial) {
    SElement s;
    s.a = random_gaussian(2, 2, rng);
    s.gamma1 = {{1.0, random_string(2, 1 + trial % 2, 2, rng)}};
    s.gamma2 = {{cplx(0.5, 0.2), random_string(2, 1, 1, rng)}};
    s.t = {{1.0, NaplaOperator{trial % 2, random_gaussian(2, 2, rng), random_string(2, 1, 1, rng),
                               random_string(2, 1, 1, rng)}}};
    s.t_scalar = 0.3;
    EXPECT_LE(s_conjugation_residual(dil, s, 4, trial), 1e-9);
  }
}

TEST(InvariantAlgebra, CompressionProperties) {
  const Tower& t = fx().t();
  const NagyDilation& dil = fx().dil;
  const UcpMap& phi = fx().phi;
  std::mt19937_64 rng(22);
  SElement s;
  s.a = random_gaussian(2, 2, rng);
  s.gamma1 = {{1.0, random_string(2, 1, 1, rng)}};
  s.gamma2 = {{1.0, random_string(2, 2, 2, rng)}};
  s.t = {{1.0, NaplaOperator{0, random_gaussian(2, 2, rng), random_string(2, 1, 1, rng),
                             random_string(2, 1, 1, rng)}}};
  SElement za;
  za.a = random_gaussian(2, 2, rng);
  const std::vector<NagyOperator> family = {
      as_operator(dil, za), conjugate_by_vhat(dil, as_operator(dil, za)), as_operator(dil, s),
      compose(as_operator(dil, s), as_operator(dil, za))};
  for (const NagyOperator& x : family) {
    const GradedApplier zxz = compress(x);
    EXPECT_LE(algebra_membership_residual(t, zxz, 2), 1e-8);
    const GradedApplier lhs = compress(conjugate_by_vhat(dil, x));
    for (int trial = 0; trial < 3; ++trial) {
      const GradedVector v = random_graded(t, 0, 2, rng);
      const GradedVector rhs = v_infty_adjoint_apply(t, zxz(v_infty_apply(t, v)));
      EXPECT_LE((lhs(v) - rhs).norm(), 1e-9);
    }
  }
  const GradedApplier p4 = compress(conjugate_by_vhat(dil, as_operator(dil, za)));
  for (int trial = 0; trial < 3; ++trial) {
    const GradedVector v = random_graded(t, 0, 2, rng);
    EXPECT_LE((p4(v) - pi_infty_apply(t, phi.apply(za.a), v)).norm(), 1e-9);
  }
}
