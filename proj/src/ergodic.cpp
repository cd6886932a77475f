#include "ucpdil/ergodic.hpp"

#include <algorithm>
#include <cmath>

namespace ucpdil {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Ergodic: return "ergodic";
    case Verdict::WeaklyMixing: return "weakly_mixing";
    case Verdict::Neither: return "neither";
  }
  return "neither";
}

std::string_view to_string(AverageMethod m) {
  switch (m) {
    case AverageMethod::Cesaro: return "cesaro";
    case AverageMethod::Spectral: return "spectral";
    case AverageMethod::Both: return "both";
    case AverageMethod::Direct: return "direct";
    case AverageMethod::Reduction: return "reduction";
  }
  return "cesaro";
}

ErgodicReport cesaro_from_terms(const std::vector<cplx>& terms, const std::vector<int>& n_values) {
  ErgodicReport rep;
  cplx sum = 0.0;
  double abs_sum = 0.0;
  size_t next = 0;
  for (size_t k = 0; k < terms.size() && next < n_values.size(); ++k) {
    sum += terms[k];
    abs_sum += std::abs(terms[k]);
    while (next < n_values.size() && n_values[next] == static_cast<int>(k)) {
      const double count = static_cast<double>(k + 1);
      rep.n_values.push_back(n_values[next]);
      rep.signed_averages.push_back(sum.real() / count);
      rep.abs_averages.push_back(abs_sum / count);
      ++next;
    }
  }
  if (next < n_values.size()) throw Error(ErrorKind::InvalidInput, "N beyond the computed terms");
  return rep;
}

std::vector<cplx> correlation_terms(const UcpMap& phi, const State& state, const Mat& a,
                                    const Mat& b, int N, const MatrixSubalgebra& algebra) {
  if (N < 0) throw Error(ErrorKind::InvalidInput, "N must be non-negative");
  if (invariance_defect(phi, state) > 1e-9) {
    throw Error(ErrorKind::NotInvariant, "state is not invariant for the channel");
  }
  if (membership_residual(algebra, a) > 1e-9 || membership_residual(algebra, b) > 1e-9) {
    throw Error(ErrorKind::NotInAlgebra, "observable outside the declared algebra");
  }
  const cplx base = state(a) * state(b);
  std::vector<cplx> terms;
  terms.reserve(N + 1);
  Mat pk = b;
  for (int k = 0; k <= N; ++k) {
    terms.push_back(state(a * pk) - base);
    pk = phi.apply(pk);
  }
  return terms;
}

double cesaro_signed(const UcpMap& phi, const State& state, const Mat& a, const Mat& b, int N,
                     const MatrixSubalgebra& algebra) {
  return cesaro_from_terms(correlation_terms(phi, state, a, b, N, algebra), {N}).signed_averages[0];
}

double cesaro_abs(const UcpMap& phi, const State& state, const Mat& a, const Mat& b, int N,
                  const MatrixSubalgebra& algebra) {
  return cesaro_from_terms(correlation_terms(phi, state, a, b, N, algebra), {N}).abs_averages[0];
}

double cesaro_signed(const UcpMap& phi, const State& state, const Mat& a, const Mat& b, int N) {
  return cesaro_signed(phi, state, a, b, N, MatrixSubalgebra::full(phi.dim()));
}

double cesaro_abs(const UcpMap& phi, const State& state, const Mat& a, const Mat& b, int N) {
  return cesaro_abs(phi, state, a, b, N, MatrixSubalgebra::full(phi.dim()));
}

std::vector<cplx> restricted_spectrum(const UcpMap& phi, const MatrixSubalgebra& algebra) {
  if (algebra.ambient_dim() != phi.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "algebra and channel act on different M_d");
  }
  const auto& basis = algebra.basis();
  const int n = algebra.size();
  Mat m(n, n);
  for (int j = 0; j < n; ++j) {
    const Mat image = phi.apply(basis[j]);
    if (membership_residual(algebra, image) > 1e-8) {
      throw Error(ErrorKind::AlgebraNotInvariant, "Phi does not preserve the algebra");
    }
    for (int i = 0; i < n; ++i) m(i, j) = hs_inner(basis[i], image);
  }
  Eigen::ComplexEigenSolver<Mat> es(m, false);
  std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    return std::arg(a) < std::arg(b);
  });
  return out;
}

Verdict spectral_verdict(const UcpMap& phi, const MatrixSubalgebra& algebra) {
  int ones = 0;
  int peripheral = 0;
  for (cplx l : restricted_spectrum(phi, algebra)) {
    if (std::abs(l - 1.0) <= 1e-8) {
      ++ones;
    } else if (std::abs(l) >= 1.0 - 1e-8) {
      ++peripheral;
    }
  }
  if (ones != 1) return Verdict::Neither;
  return peripheral == 0 ? Verdict::WeaklyMixing : Verdict::Ergodic;
}

OffDiagonal OffDiagonal::gamma_napla(Mat a, AlgebraString gamma, Mat b, AlgebraString alpha,
                                     AlgebraString beta, int m) {
  if (gamma.weight() < 1) throw Error(ErrorKind::InvalidInput, "gamma string needs weight >= 1");
  if (m < 0) throw Error(ErrorKind::InvalidInput, "napla index must be non-negative");
  OffDiagonal o;
  o.kind = Kind::GammaNapla;
  o.a = std::move(a);
  o.gamma = std::move(gamma);
  o.b = std::move(b);
  o.alpha = std::move(alpha);
  o.beta = std::move(beta);
  o.m = m;
  return o;
}

OffDiagonal OffDiagonal::single_gamma(AlgebraString theta) {
  if (theta.weight() < 1) throw Error(ErrorKind::InvalidInput, "gamma string needs weight >= 1");
  OffDiagonal o;
  o.kind = Kind::Gamma;
  o.theta = std::move(theta);
  return o;
}

int OffDiagonal::slot() const {
  return kind == Kind::Gamma ? theta.weight() - 1 : beta.weight() + m;
}

bool OffDiagonal::nonzero() const {
  return kind == Kind::Gamma || gamma.weight() - 1 == alpha.weight() + m;
}

GradedVector OffDiagonal::apply(const Tower& t, const TailSequence& xi) const {
  if (kind == Kind::Gamma) return GammaOperator(theta).apply(t, xi);
  const NaplaOperator delta{m, b, alpha, beta};
  return pi_infty_apply(t, a, GammaOperator(gamma).apply(t, delta.apply(t, xi)));
}

WordSum OffDiagonal::words() const {
  if (!nonzero()) return {};
  if (kind == Kind::Gamma) return word_sum(Word::bra(theta));
  return word_sum(Word::alg(a) * Word::bra(gamma) * Word::f() * Word::ket(alpha) * Word::alg(b) *
                  Word::bra(beta));
}

Mat DilatedPair::y11(const UcpMap& phi) const { return y_conjugated ? phi.apply(y) : y; }

NagyOperator x_operator(const NagyDilation& dil, const DilatedPair& p) {
  return [&dil, p](const NagyVector& v) {
    const Tower& t = dil.tower();
    NagyVector out;
    out.head = pi_infty_apply(t, p.x11, v.head) + p.x12.apply(t, v.tail);
    return out;
  };
}

NagyOperator y_operator(const NagyDilation& dil, const DilatedPair& p) {
  const Mat y = p.y;
  NagyOperator base = [&dil, y](const NagyVector& v) {
    return z_embed(pi_infty_apply(dil.tower(), y, v.head));
  };
  return p.y_conjugated ? conjugate_by_vhat(dil, base) : base;
}

namespace {

Mat dilated_block(const NagyDilation& dil, const NagyOperator& x, const NagyOperator& y, int k) {
  const int d = dil.tower().base_dim();
  Mat m(d, d);
  for (int i = 0; i < d; ++i) {
    const NagyVector v = z_embed(GradedVector::at_level(0, Vec::Unit(d, i)));
    const NagyVector u = x(dil.vhat_adjoint_apply(k, y(dil.vhat_apply(k, v))));
    m.col(i) = u.head.component(0, d);
  }
  return m;
}

}  // namespace

cplx dilated_value_direct(const NagyDilation& dil, const NagyOperator& x, const NagyOperator& y,
                          const State& state, int k) {
  return state(dilated_block(dil, x, y, k));
}

ErgodicReport dilated_cesaro_direct(const NagyDilation& dil, const NagyOperator& x,
                                    const NagyOperator& y, const State& state, int n_max) {
  if (n_max > dil.window()) {
    throw Error(ErrorKind::CapacityExceeded, "direct dilated averages are limited to the window");
  }
  const Tower& t = dil.tower();
  const cplx base = state(level0_block(t, compress(x))) * state(level0_block(t, compress(y)));
  std::vector<cplx> terms;
  std::vector<int> ns;
  for (int k = 0; k <= n_max; ++k) {
    terms.push_back(dilated_value_direct(dil, x, y, state, k) - base);
    ns.push_back(k);
  }
  ErgodicReport rep = cesaro_from_terms(terms, ns);
  rep.method = AverageMethod::Direct;
  return rep;
}

LemmaTerms lemma_terms(const NagyDilation& dil, const DilatedPair& p, const State& state, int k) {
  const Tower& t = dil.tower();
  const UcpMap& phi = t.channel();
  const int d = t.base_dim();
  const Mat y11 = p.y11(phi);
  Mat mc(d, d);
  Mat mw = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const GradedVector vk = dil.v_power(k, GradedVector::at_level(0, Vec::Unit(d, i)));
    const TailSequence c_tail = dil.corner_adjoint(k, pi_infty_apply(t, y11, vk));
    mc.col(i) = p.x12.apply(t, c_tail).component(0, d);
    if (p.y_conjugated) {
      const GradedVector y21 = f_apply(t, pi_infty_apply(t, p.y, v_infty_apply(t, vk)));
      mw.col(i) = p.x12.apply(t, w_shift_adjoint(k, slot_embed(0, y21))).component(0, d);
    }
  }
  return {state(mc), state(mw)};
}

LemmaReduction::LemmaReduction(const UcpMap& phi, const State& state, const OffDiagonal& x12)
    : phi_(phi), state_(state), slot_(x12.slot()) {
  const PhiAdjoint adj = phi_adjoint(phi, state);
  if (const auto* absent = std::get_if<AdjointAbsent>(&adj)) {
    throw Error(ErrorKind::AdjointAbsent, "phi-adjoint fails check " + absent->failed_check);
  }
  const UcpMap& nat = std::get<UcpMap>(adj);
  const int d = phi.dim();
  for (const auto& [c0, w] : x12.words()) {
    for (const auto& [c1, term] : expand_f(w)) {
      const NormalForm nf = normal_form(reduce(term, phi), d);
      if (nf.ket.weight() != 0 || nf.bra.weight() != slot_ + 1) {
        throw Error(ErrorKind::InvalidInput, "corner word does not reduce to a bra of weight slot+1");
      }
      Reduced red{c0 * c1, nf.ket.coefficients()[0] * nf.r, nf.bra, Mat(), Mat()};
      const auto& n = red.theta.exponents();
      const auto& a = red.theta.coefficients();
      const int r = red.theta.length();
      Mat b = red.r;
      for (int i = r - 1; i >= 1; --i) b = nat.apply_power(b, n[i]) * a[i];
      red.c1 = nat.apply_power(b, n[0]) * a[0];
      red.c2 = nat.apply_power(b, n[0] - 1) * phi.apply(a[0]);
      reduced_.push_back(std::move(red));
    }
  }
}

cplx LemmaReduction::value(const Mat& y, int j) const {
  const Mat pj = phi_.apply_power(y, j);
  const Mat pj1 = phi_.apply(pj);
  cplx acc = 0.0;
  for (const auto& red : reduced_) acc += red.coef * (state_(red.c1 * pj) - state_(red.c2 * pj1));
  return acc;
}

cplx LemmaReduction::term_c(const Mat& y11, int k) const {
  if (k <= slot_) return 0.0;
  return value(y11, k - slot_ - 1);
}

cplx LemmaReduction::term_w(const Mat& y, int k) const {
  if (k != slot_) return 0.0;
  return value(y, 0);
}

ErgodicReport dilated_cesaro_reduced(const UcpMap& phi, const State& state, const DilatedPair& p,
                                     const std::vector<int>& n_values) {
  if (n_values.empty()) return {};
  const int n_max = *std::max_element(n_values.begin(), n_values.end());
  const LemmaReduction red(phi, state, p.x12);
  const Mat y11 = p.y11(phi);
  const cplx base = state(p.x11) * state(y11);
  const int s = red.slot();
  std::vector<cplx> terms;
  terms.reserve(n_max + 1);
  Mat yk = y11;                  // Phi^k(Y_11)
  Mat yj = y11;                  // Phi^{k-s-1}(Y_11) once k > s
  for (int k = 0; k <= n_max; ++k) {
    cplx v = state(p.x11 * yk) - base;
    if (k > s) {
      const Mat yj1 = phi.apply(yj);
      for (const auto& r : red.reduced()) v += r.coef * (state(r.c1 * yj) - state(r.c2 * yj1));
      yj = yj1;
    }
    if (p.y_conjugated) v += red.term_w(p.y, k);
    terms.push_back(v);
    yk = phi.apply(yk);
  }
  ErgodicReport rep = cesaro_from_terms(terms, n_values);
  rep.method = AverageMethod::Reduction;
  return rep;
}

DilatedPair random_dilated_pair(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unit_norm = [&] {
    const Mat g = random_gaussian(d, d, rng);
    return Mat(g / operator_norm(g));
  };
  static const int kAlphaM[3][2] = {{0, 0}, {0, 1}, {1, 0}};
  const auto& am = kAlphaM[rng() % 3];
  const int beta_w = static_cast<int>(rng() % 3);
  DilatedPair p;
  p.x11 = unit_norm();
  const AlgebraString alpha = random_string(d, am[0], 2, rng);
  const AlgebraString beta = random_string(d, beta_w, 2, rng);
  const AlgebraString gamma = random_string(d, am[0] + am[1] + 1, 2, rng);
  p.x12 = OffDiagonal::gamma_napla(unit_norm(), gamma, unit_norm(), alpha, beta, am[1]);
  p.y = unit_norm();
  p.y_conjugated = rng() % 4 != 0;
  return p;
}

}  // namespace ucpdil
