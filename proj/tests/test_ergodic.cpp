#include <gtest/gtest.h>

#include "ucpdil/ergodic.hpp"

using namespace ucpdil;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidInput;
}

// Dense matrices of the tower on an explicit window, built from the Kraus
// family with Kronecker products only.
class DenseWindow {
 public:
  explicit DenseWindow(const Tower& t) : t_(t) {}

  int dim(int n) const { return t_.level_dim(n); }
  Mat rep(int n, const Mat& a) const {
    const int rn = dim(n) / t_.base_dim();
    return kron(Mat::Identity(rn, rn), a);
  }
  Mat step(int n) const {
    const auto& k = t_.channel().kraus();
    const int r = static_cast<int>(k.size());
    const int rn = dim(n) / t_.base_dim();
    Mat v = Mat::Zero(r * dim(n), dim(n));
    for (int i = 0; i < r; ++i) v.block(i * dim(n), 0, dim(n), dim(n)) = kron(Mat::Identity(rn, rn), k[i]);
    return v;
  }
  Mat f(int n) const {
    if (n == 0) return Mat::Identity(dim(0), dim(0));
    const Mat v = step(n - 1);
    return Mat::Identity(dim(n), dim(n)) - v * v.adjoint();
  }
  // V^{hi-lo} from level lo to level hi.
  Mat vchain(int lo, int hi) const {
    Mat m = Mat::Identity(dim(lo), dim(lo));
    for (int n = lo; n < hi; ++n) m = step(n) * m;
    return m;
  }
  // |s) from level lo to lo + weight.
  Mat ket(const AlgebraString& s, int lo) const {
    Mat m = Mat::Identity(dim(lo), dim(lo));
    int level = lo;
    for (int i = s.length() - 1; i >= 0; --i) {
      for (int j = 0; j < s.exponents()[i]; ++j) m = step(level++) * m;
      m = rep(level, s.coefficients()[i]) * m;
    }
    return m;
  }
  // (s| from level hi to hi - weight, as the adjoint of |s*).
  Mat bra(const AlgebraString& s, int hi) const { return ket(s.star(), hi - s.weight()).adjoint(); }

  // X_12 restricted to tail slot `slot` at level slot+1, landing at level 0.
  Mat x12(const OffDiagonal& x) const {
    const int s = x.slot();
    if (x.kind == OffDiagonal::Kind::Gamma) return bra(x.theta, s + 1) * f(s + 1);
    if (!x.nonzero()) return Mat::Zero(dim(0), dim(s + 1));
    const int mid = x.alpha.weight() + x.m + 1;
    return rep(0, x.a) * bra(x.gamma, mid) * f(mid) * ket(x.alpha, x.m + 1) *
           rep(x.m + 1, x.b) * bra(x.beta, s + 1) * f(s + 1);
  }

 private:
  const Tower& t_;
};

LemmaTerms dense_lemma_terms(const Tower& t, const DilatedPair& p, const State& st, int k) {
  const DenseWindow w(t);
  const int s = p.x12.slot();
  const int d = t.base_dim();
  Mat mc = Mat::Zero(d, d), mw = Mat::Zero(d, d);
  if (k >= s + 1) {
    // Slot s of C(k)^dagger h is F V^{(k-s-1)*} h.
    const Mat down = w.f(s + 1) * w.vchain(s + 1, k).adjoint();
    mc = w.x12(p.x12) * down * w.rep(k, p.y11(t.channel())) * w.vchain(0, k);
  }
  if (p.y_conjugated && k == s)
    mw = w.x12(p.x12) * w.f(k + 1) * w.rep(k + 1, p.y) * w.vchain(0, k + 1);
  return {st(mc), st(mw)};
}

}  // namespace

TEST(Cesaro, FromTermsByHand) {
  const ErgodicReport r = cesaro_from_terms({1.0, -1.0, cplx(0, 1)}, {0, 1, 2});
  EXPECT_NEAR(r.signed_averages[0], 1.0, 1e-15);
  EXPECT_NEAR(r.signed_averages[1], 0.0, 1e-15);
  EXPECT_NEAR(r.signed_averages[2], 0.0, 1e-15);
  EXPECT_NEAR(r.abs_averages[2], 1.0, 1e-15);
}

TEST(Cesaro, DepolarizingClosedForm) {
  const UcpMap dep = presets::depolarizing(2, 0.5);
  const State tr = State::tracial(2);
  // (1/4) sum_{k<=3} 0.5^k.
  EXPECT_NEAR(cesaro_abs(dep, tr, pauli_z(), pauli_z(), 3), 0.25 * 1.875, 1e-10);
  for (int n : {0, 1, 5, 12}) {
    double want = 0;
    for (int k = 0; k <= n; ++k) want += std::pow(0.5, k);
    EXPECT_NEAR(cesaro_signed(dep, tr, pauli_z(), pauli_z(), n), want / (n + 1), 1e-12);
  }
}

TEST(Cesaro, CyclicHitPattern) {
  const UcpMap cyc = presets::cyclic_shift(3);
  const MatrixSubalgebra diag = MatrixSubalgebra::diagonal(3);
  const State tr = State::tracial(3);
  const Mat e = matrix_unit(3, 0, 0);
  EXPECT_NEAR(cesaro_signed(cyc, tr, e, e, 5, diag), 0.0, 1e-12);
  EXPECT_NEAR(cesaro_abs(cyc, tr, e, e, 5, diag), 4.0 / 27.0, 1e-10);
}

TEST(Cesaro, UnitObservableGivesZero) {
  const UcpMap phi = presets::random_ucp(3, 2, 4);
  const State st = invariant_state(phi).state;
  std::mt19937_64 rng(1);
  const Mat a = random_gaussian(3, 3, rng);
  EXPECT_LE(cesaro_abs(phi, st, Mat::Identity(3, 3), a, 10), 1e-12);
  EXPECT_LE(cesaro_abs(phi, st, a, Mat::Identity(3, 3), 10), 1e-12);
}

TEST(Cesaro, Preconditions) {
  const UcpMap phi = presets::random_ucp(2, 2, 3);
  Mat rho = Mat::Zero(2, 2);
  rho(0, 0) = 0.9;
  rho(1, 1) = 0.1;
  EXPECT_EQ(kind_of([&] { cesaro_abs(phi, State::from_density(rho), pauli_z(), pauli_z(), 3); }),
            ErrorKind::NotInvariant);
  EXPECT_EQ(kind_of([&] {
              cesaro_abs(presets::cyclic_shift(2), State::tracial(2), pauli_x(), pauli_z(), 3,
                         MatrixSubalgebra::diagonal(2));
            }),
            ErrorKind::NotInAlgebra);
}

TEST(Spectral, Verdicts) {
  EXPECT_EQ(spectral_verdict(presets::depolarizing(2, 0.5), MatrixSubalgebra::full(2)),
            Verdict::WeaklyMixing);
  EXPECT_EQ(spectral_verdict(presets::adu_phase(0.7), MatrixSubalgebra::full(2)), Verdict::Neither);
  EXPECT_EQ(spectral_verdict(presets::cyclic_shift(3), MatrixSubalgebra::diagonal(3)),
            Verdict::Ergodic);
  std::vector<cplx> spec =
      restricted_spectrum(presets::depolarizing(2, 0.5), MatrixSubalgebra::full(2));
  std::sort(spec.begin(), spec.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  ASSERT_EQ(spec.size(), 4u);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(spec[i] - 0.5), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(spec[3] - 1.0), 0.0, 1e-10);
  EXPECT_EQ(kind_of([] {
              restricted_spectrum(presets::random_ucp(2, 2, 1), MatrixSubalgebra::diagonal(2));
            }),
            ErrorKind::AlgebraNotInvariant);
}

TEST(Spectral, CoherenceWithCesaro) {
  const State tr2 = State::tracial(2);
  const MatrixSubalgebra full = MatrixSubalgebra::full(2);
  for (const Mat& a : full.basis())
    for (const Mat& b : full.basis())
      EXPECT_LE(cesaro_abs(presets::depolarizing(2, 0.5), tr2, a, b, 400), 0.05);
  const Mat e = matrix_unit(3, 0, 0);
  EXPECT_GE(cesaro_abs(presets::cyclic_shift(3), State::tracial(3), e, e, 400,
                       MatrixSubalgebra::diagonal(3)),
            0.1);
}

class Dilated : public ::testing::Test {
 protected:
  UcpMap phi = presets::rank2_faithful(2, 1);
  State st = invariant_state(phi).state;
  std::shared_ptr<const Tower> tower = std::make_shared<const Tower>(Tower::build(phi, 9));
  NagyDilation dil{tower, 8};
};

TEST_F(Dilated, CompressionsReduceToBaseAverage) {
  std::mt19937_64 rng(2);
  const Mat a = random_hermitian(2, rng);
  DilatedPair p;
  p.x11 = a;
  // Weight mismatch makes X_12 vanish.
  p.x12 = OffDiagonal::gamma_napla(Mat::Identity(2, 2), AlgebraString::single(3, Mat::Identity(2, 2)),
                                    Mat::Identity(2, 2), AlgebraString::unit(2),
                                    AlgebraString::unit(2), 0);
  ASSERT_FALSE(p.x12.nonzero());
  p.y = a;
  const ErgodicReport r = dilated_cesaro_direct(dil, x_operator(dil, p), y_operator(dil, p), st, 8);
  for (int n = 0; n <= 8; ++n)
    EXPECT_NEAR(r.abs_averages[n], cesaro_abs(phi, st, a, a, n), 1e-10);

  p.y = Mat::Identity(2, 2);
  const ErgodicReport unit =
      dilated_cesaro_direct(dil, x_operator(dil, p), y_operator(dil, p), st, 8);
  for (double v : unit.abs_averages) EXPECT_LE(v, 1e-10);
  EXPECT_EQ(kind_of([&] {
              dilated_cesaro_direct(dil, x_operator(dil, p), y_operator(dil, p), st, 9);
            }),
            ErrorKind::CapacityExceeded);
}

TEST_F(Dilated, LemmaTermsMatchDenseWindow) {
  double largest_c = 0, largest_w = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const DilatedPair p = random_dilated_pair(2, 300 + seed);
    for (int k = 0; k <= 6; ++k) {
      const LemmaTerms got = lemma_terms(dil, p, st, k);
      const LemmaTerms want = dense_lemma_terms(*tower, p, st, k);
      EXPECT_LE(std::abs(got.term_c - want.term_c), 1e-12) << "seed " << seed << " k " << k;
      EXPECT_LE(std::abs(got.term_w - want.term_w), 1e-12) << "seed " << seed << " k " << k;
      largest_c = std::max(largest_c, std::abs(want.term_c));
      largest_w = std::max(largest_w, std::abs(want.term_w));
    }
  }
  EXPECT_GT(largest_c, 1e-4);
  EXPECT_GT(largest_w, 1e-4);
}

TEST_F(Dilated, VanishingOffDiagonalGivesZeroTerms) {
  DilatedPair p;
  p.x11 = pauli_z();
  p.x12 = OffDiagonal::gamma_napla(pauli_x(), AlgebraString::single(2, pauli_z()), pauli_y(),
                                    AlgebraString::single(1, pauli_x()), AlgebraString::unit(2), 1);
  ASSERT_FALSE(p.x12.nonzero());
  p.y = pauli_z();
  p.y_conjugated = true;
  for (int k = 0; k <= 5; ++k) {
    const LemmaTerms lt = lemma_terms(dil, p, st, k);
    EXPECT_LE(std::abs(lt.term_c), 1e-14);
    EXPECT_LE(std::abs(lt.term_w), 1e-14);
  }
}

TEST_F(Dilated, ReductionMatchesDirect) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const DilatedPair p = random_dilated_pair(2, 100 + seed);
    const LemmaReduction red(phi, st, p.x12);
    for (int k = 0; k <= 8; ++k) {
      const LemmaTerms lt = lemma_terms(dil, p, st, k);
      EXPECT_LE(std::abs(lt.term_c - red.term_c(p.y11(phi), k)), 1e-8);
      if (p.y_conjugated) {
        EXPECT_LE(std::abs(lt.term_w - red.term_w(p.y, k)), 1e-8);
      }
      if (k > p.x12.slot()) {
        EXPECT_LE(std::abs(lt.term_w), 1e-12);
      }
    }
    std::vector<int> ns;
    for (int n = 0; n <= 8; ++n) ns.push_back(n);
    const ErgodicReport direct =
        dilated_cesaro_direct(dil, x_operator(dil, p), y_operator(dil, p), st, 8);
    const ErgodicReport reduced = dilated_cesaro_reduced(phi, st, p, ns);
    for (int n = 0; n <= 8; ++n) {
      EXPECT_NEAR(direct.abs_averages[n], reduced.abs_averages[n], 1e-8);
      EXPECT_NEAR(direct.signed_averages[n], reduced.signed_averages[n], 1e-8);
    }
  }
}

TEST_F(Dilated, TrivialStringsTelescope) {
  const Mat id = Mat::Identity(2, 2);
  const OffDiagonal x = OffDiagonal::gamma_napla(id, AlgebraString::single(1, id), id,
                                                 AlgebraString::unit(2), AlgebraString::unit(2), 0);
  const LemmaReduction red(phi, st, x);
  for (int k = 1; k <= 10; ++k) EXPECT_LE(std::abs(red.term_c(id, k)), 1e-12);
}

TEST(DilatedDecay, DepolarizingScenario) {
  const UcpMap dep = presets::depolarizing(2, 0.5);
  const State tr = State::tracial(2);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const DilatedPair p = random_dilated_pair(2, seed);
    const ErgodicReport r = dilated_cesaro_reduced(dep, tr, p, {200});
    EXPECT_LE(r.abs_averages[0], 0.02);
  }
}

TEST(DilatedDecay, AdjointAbsentIsReported) {
  int found = 0;
  for (std::uint64_t seed = 1; seed <= 60 && found == 0; ++seed) {
    const UcpMap phi = presets::random_ucp(2, 2, seed);
    const InvariantState inv = invariant_state(phi);
    if (!inv.state.faithful()) continue;
    if (std::holds_alternative<UcpMap>(phi_adjoint(phi, inv.state))) continue;
    ++found;
    const DilatedPair p = random_dilated_pair(2, 1);
    EXPECT_EQ(kind_of([&] { LemmaReduction(phi, inv.state, p.x12); }), ErrorKind::AdjointAbsent);
  }
  EXPECT_EQ(found, 1);
}
