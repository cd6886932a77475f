#include "ucpdil/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <memory>
#include <sstream>

#include "ucpdil/stinespring.hpp"

namespace ucpdil {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidInput, what); }

cplx parse_entry(const json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  invalid("matrix entry must be a number or [re, im]");
}

int get_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) invalid(std::string(key) + " must be an integer");
  return j[key].get<int>();
}

double get_double(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) invalid(std::string(key) + " must be a number");
  return j[key].get<double>();
}

}  // namespace

Mat parse_matrix(const json& j, int d) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "identity") return Mat::Identity(d, d);
    if (d == 2 && name == "pauli_x") return pauli_x();
    if (d == 2 && name == "pauli_y") return pauli_y();
    if (d == 2 && name == "pauli_z") return pauli_z();
    if (name.rfind("unit:", 0) == 0) {
      int i = -1;
      int k = -1;
      char comma = 0;
      std::istringstream in(name.substr(5));
      if (in >> i >> comma >> k && comma == ',' && i >= 0 && k >= 0 && i < d && k < d) {
        return matrix_unit(d, i, k);
      }
    }
    invalid("unknown matrix name '" + name + "'");
  }
  if (!j.is_array() || j.empty()) invalid("matrix must be a non-empty array of rows");
  const int rows = static_cast<int>(j.size());
  if (!j[0].is_array()) invalid("matrix rows must be arrays");
  const int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) invalid("ragged matrix");
    for (int c = 0; c < cols; ++c) m(r, c) = parse_entry(j[r][c]);
  }
  if (d > 0 && (rows != d || cols != d)) {
    throw Error(ErrorKind::DimensionMismatch, "matrix is not " + std::to_string(d) + "x" + std::to_string(d));
  }
  return m;
}

UcpMap build_channel(const json& spec, std::uint64_t default_seed) {
  if (!spec.is_object()) invalid("channel must be an object");
  if (spec.contains("kraus")) {
    if (!spec["kraus"].is_array() || spec["kraus"].empty()) invalid("kraus must be a non-empty array");
    std::vector<Mat> kraus;
    for (const auto& k : spec["kraus"]) kraus.push_back(parse_matrix(k, 0));
    return UcpMap::from_kraus(std::move(kraus), 1e-9);
  }
  if (!spec.contains("preset") || !spec["preset"].is_string()) invalid("channel needs 'preset' or 'kraus'");
  const std::string p = spec["preset"].get<std::string>();
  const int d = get_int(spec, "d", 2);
  if (d < 1 || d > 8) invalid("channel dimension must lie in [1, 8]");
  const auto seed = spec.contains("seed") ? spec["seed"].get<std::uint64_t>() : default_seed;
  if (p == "identity") return presets::identity(d);
  if (p == "adu") return presets::adu_phase(get_double(spec, "theta", 0.7));
  if (p == "depolarizing") return presets::depolarizing(d, get_double(spec, "p", 0.5));
  if (p == "cyclic3") return presets::cyclic_shift(3);
  if (p == "amplitude-damping") return presets::amplitude_damping(get_double(spec, "gamma", 0.3));
  if (p == "random") return presets::random_ucp(d, get_int(spec, "rank", 2), seed);
  if (p == "rank2-faithful") return presets::rank2_faithful(d, seed);
  invalid("unknown preset '" + p + "'");
}

Scenario parse_scenario(const json& j) {
  if (!j.is_object()) invalid("scenario must be a JSON object");
  Scenario s;
  s.name = j.value("name", std::string("scenario"));
  if (!j.contains("channel")) invalid("scenario needs a channel");
  s.channel = j["channel"];
  s.levels = get_int(j, "levels", s.levels);
  s.window = get_int(j, "window", s.window);
  s.n_max = get_int(j, "N", s.n_max);
  s.instances = get_int(j, "instances", s.instances);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) invalid("seed must be a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tolerance")) s.tolerance = get_double(j, "tolerance", 0.0);

  if (j.contains("suites")) {
    if (!j["suites"].is_array()) invalid("suites must be an array");
    for (const auto& x : j["suites"]) {
      if (!x.is_string()) invalid("suite names must be strings");
      s.suites.push_back(x.get<std::string>());
    }
  } else {
    s.suites = known_suites();
  }

  const UcpMap phi = build_channel(s.channel, s.seed);
  const int d = phi.dim();
  if (j.contains("algebra")) {
    const json& a = j["algebra"];
    if (a.is_string()) {
      s.algebra = a.get<std::string>();
      if (s.algebra != "full" && s.algebra != "diagonal") invalid("algebra must be full, diagonal or {basis}");
    } else if (a.is_object() && a.contains("basis") && a["basis"].is_array()) {
      s.algebra = "custom";
      for (const auto& m : a["basis"]) s.algebra_basis.push_back(parse_matrix(m, d));
    } else {
      invalid("algebra must be full, diagonal or {basis}");
    }
  }
  if (j.contains("state")) {
    const json& st = j["state"];
    if (st.is_object() && st.contains("density")) {
      s.density = parse_matrix(st["density"], d);
    } else if (!(st.is_string() && st.get<std::string>() == "auto")) {
      invalid("state must be \"auto\" or {density}");
    }
  }
  if (j.contains("pairs")) {
    if (!j["pairs"].is_array()) invalid("pairs must be an array");
    for (const auto& p : j["pairs"]) {
      if (!p.is_object() || !p.contains("a") || !p.contains("b")) invalid("pair needs a and b");
      ObservablePair op{parse_matrix(p["a"], d), parse_matrix(p["b"], d), p.value("label", std::string())};
      if (op.label.empty()) op.label = p["a"].dump() + "|" + p["b"].dump();
      s.pairs.push_back(std::move(op));
    }
  }
  return s;
}

std::string csv_from_report(const ErgodicReport& r) {
  std::ostringstream out;
  out << std::setprecision(12);
  for (size_t i = 0; i < r.n_values.size(); ++i) {
    out << r.n_values[i] << ',' << r.signed_averages[i] << ',' << r.abs_averages[i] << ','
        << to_string(r.method) << '\n';
  }
  return out.str();
}

namespace {

constexpr const char* kCsvHeader = "N,signed_avg,abs_avg,method\n";

class Runner {
 public:
  Runner(const Scenario& s, UcpMap phi) : s_(s), phi_(std::move(phi)), d_(phi_.dim()) {
    if (s.algebra == "diagonal") {
      algebra_ = MatrixSubalgebra::diagonal(d_);
    } else if (s.algebra == "custom") {
      algebra_ = MatrixSubalgebra::from_spanning_set(s.algebra_basis);
    } else {
      algebra_ = MatrixSubalgebra::full(d_);
    }
    if (s.density) {
      state_ = State::from_density(*s.density);
    } else {
      state_ = invariant_state(phi_).state;
    }
  }

  RunOutput run() {
    RunOutput out;
    ordered_json suites = ordered_json::array();
    for (const std::string& name : s_.suites) {
      rows_.clear();
      data_ = ordered_json::object();
      if (name == "stinespring") {
        stinespring();
      } else if (name == "tower") {
        tower_suite();
      } else if (name == "nagy") {
        nagy_suite();
      } else if (name == "strings") {
        strings_suite();
      } else if (name == "ergodic") {
        ergodic_suite();
      } else if (name == "dilated") {
        dilated_suite();
      } else {
        invalid("unknown suite '" + name + "'");
      }
      bool pass = true;
      ordered_json props = ordered_json::array();
      for (const auto& r : rows_) {
        pass = pass && r.pass;
        props.push_back({{"property", r.property},
                         {"anchor", r.anchor},
                         {"residual", r.residual},
                         {"tolerance", r.tolerance},
                         {"pass", r.pass}});
      }
      out.pass = out.pass && pass;
      ordered_json suite = {{"name", name}, {"pass", pass}, {"properties", props}};
      if (!data_.empty()) suite["data"] = data_;
      suites.push_back(suite);
    }
    out.report["scenario"] = s_.name;
    out.report["pass"] = out.pass;
    out.report["suites"] = suites;
    ordered_json env;
    env["seed"] = s_.seed;
    env["d"] = d_;
    env["kraus_rank"] = choi_rank(phi_);
    env["levels"] = s_.levels;
    env["window"] = s_.window;
    env["N"] = s_.n_max;
    if (tower_) env["level_dims"] = tower_->level_dims();
    out.report["environment"] = env;
    out.csv = std::move(csv_);
    return out;
  }

 private:
  void row(const std::string& property, const std::string& anchor, double residual, double tol) {
    const double t = s_.tolerance.value_or(tol);
    rows_.push_back({property, anchor, residual, t, std::isfinite(residual) && residual <= t});
  }

  std::shared_ptr<const Tower> tower() {
    if (!tower_) tower_ = std::make_shared<const Tower>(Tower::build(phi_, s_.levels));
    return tower_;
  }

  const NagyDilation& dilation() {
    if (s_.window < 1 || s_.window >= s_.levels) {
      invalid("window must satisfy 1 <= window < levels");
    }
    if (!dil_) dil_ = std::make_unique<NagyDilation>(tower(), s_.window);
    return *dil_;
  }

  Mat random_unit_matrix(std::mt19937_64& rng) const {
    const Mat g = random_gaussian(d_, d_, rng);
    return g / operator_norm(g);
  }

  void stinespring() {
    const StinespringTriple gns = gns_dilate(phi_, algebra_);
    const StinespringTriple kr = kraus_dilate(phi_);
    row("gns compression", "Stinespring compression", gns.compression_residual(), 1e-9);
    row("kraus compression", "Stinespring compression", kr.compression_residual(), 1e-9);
    row("gns isometry", "GNS isometry", gns.isometry_defect(), 1e-9);
    row("gns representation is a homomorphism", "GNS representation", gns.homomorphism_defect(), 1e-9);
    if (s_.algebra == "full") {
      row("gns dimension equals Choi rank times d", "GNS quotient",
          std::abs(gns.space_dim() - choi_rank(phi_) * d_), 0.0);
    }
    const StinespringTriple full = gns_dilate(phi_, MatrixSubalgebra::full(d_));
    const double udef = unitarity_defect(full);
    const bool mult = is_multiplicative(phi_);
    row("multiplicative iff unitary dilation", "multiplicative domain",
        mult == (udef <= 1e-8) ? 0.0 : 1.0, 0.0);
    data_["gns_dim"] = gns.space_dim();
    data_["choi_rank"] = choi_rank(phi_);
    data_["multiplicative"] = mult;
    data_["unitarity_defect"] = udef;
  }

  void tower_suite() {
    const auto t = tower();
    row("step isometries", "iterated dilation", t->isometry_defect(), 1e-10);
    row("step covariance", "iterated dilation", t->step_covariance_defect(), 1e-9);
    std::mt19937_64 rng(s_.seed);
    double cov = 0.0;
    for (int i = 0; i < 10; ++i) cov = std::max(cov, covariance_residual(*t, random_unit_matrix(rng), t->depth() - 1));
    row("covariance on supported vectors", "covariant representation", cov, 1e-9);

    // Truncation exactness: the same computation in a tower of different depth.
    std::shared_ptr<const Tower> other;
    try {
      other = std::make_shared<const Tower>(Tower::build(phi_, s_.levels + 1));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BudgetExceeded || s_.levels < 2) throw;
      other = std::make_shared<const Tower>(Tower::build(phi_, s_.levels - 1));
    }
    const int cap = std::min(t->depth(), other->depth()) - 1;
    double trunc = 0.0;
    for (int i = 0; i < 5; ++i) {
      const GradedVector x = random_graded(*t, 0, cap, rng);
      const Mat a = random_unit_matrix(rng);
      const GradedVector y1 = v_infty_adjoint_apply(*t, pi_infty_apply(*t, a, v_infty_apply(*t, x)));
      const GradedVector y2 =
          v_infty_adjoint_apply(*other, pi_infty_apply(*other, a, v_infty_apply(*other, x)));
      trunc = std::max(trunc, (y1 - y2).norm());
    }
    row("truncation exactness", "covariant representation", trunc, 1e-12);

    double fdef = 0.0;
    for (int i = 0; i < 5; ++i) {
      const GradedVector x = random_graded(*t, 0, t->depth(), rng);
      const GradedVector fx = f_apply(*t, x);
      const GradedVector y = random_graded(*t, 0, t->depth(), rng);
      fdef = std::max({fdef, (f_apply(*t, fx) - fx).norm(),
                       std::abs(y.inner(fx) - f_apply(*t, y).inner(x))});
    }
    row("defect projection", "defect projection F", fdef, 1e-10);
  }

  void nagy_suite() {
    const NagyDilation& dil = dilation();
    const Tower& t = dil.tower();
    const int top = t.depth() - dil.window();
    std::mt19937_64 rng(s_.seed + 1);
    double dil_prop = 0.0;
    double unit = 0.0;
    double coherent = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = trial % (dil.window() + 1);
      const GradedVector x = random_graded(t, 0, top, rng);
      dil_prop = std::max(dil_prop, (dil.vhat_apply(n, z_embed(x)) - z_embed(dil.v_power(n, x))).norm());
      const NagyVector v = dil.make_vector(random_graded(t, 0, top, rng), random_tail(dil, 4, top, rng));
      const NagyVector w = dil.make_vector(random_graded(t, 0, top, rng), random_tail(dil, 4, top, rng));
      unit = std::max({unit, std::abs(dil.vhat_apply(n, v).inner(dil.vhat_apply(n, w)) - v.inner(w)),
                       (dil.vhat_adjoint_apply(n, dil.vhat_apply(n, v)) - v).norm(),
                       (dil.vhat_apply(n, dil.vhat_adjoint_apply(n, v)) - v).norm()});
      coherent = std::max(coherent, (dil.vhat_apply(n, v) - dil.vhat_apply_iterated(n, v)).norm());
    }
    row("dilation property", "minimal unitary dilation", dil_prop, 1e-12);
    row("unitarity on the window", "minimal unitary dilation", unit, 1e-12);
    row("corner sum agrees with iterated steps", "corner operators C(n)", coherent, 1e-12);

    double rel = 0.0;
    const int kmax = std::min(3, dil.window());
    for (int n = 0; n <= 3; ++n)
      for (int m = 0; m <= 3; ++m)
        for (int k = 0; k <= kmax; ++k)
          for (int p = 0; p <= 3; ++p) {
            rel = std::max(rel, rel_identities_check(dil, n, m, k, p, 2, s_.seed + 97 * n + 13 * m + 5 * k + p).max());
          }
    row("slot and corner identities", "shift and corner relations", rel, 1e-12);

    std::vector<int> ranks;
    double drop = 0.0;
    for (int K = 0; K <= std::min(2, dil.window()); ++K) {
      ranks.push_back(minimality_span_dim(dil, K));
      if (K > 0 && ranks[K] < ranks[K - 1]) drop += 1.0;
    }
    row("minimality span is non-decreasing", "minimal unitary dilation", drop, 0.0);
    data_["minimality_ranks"] = ranks;
  }

  void strings_suite() {
    const NagyDilation& dil = dilation();
    const Tower& t = dil.tower();
    const int wmax = t.depth() >= 7 ? 2 : 1;
    std::mt19937_64 rng(s_.seed + 2);
    double zero = 0.0;
    double member = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
      const GammaOperator g1(random_string(d_, 1, 2, rng));
      const GammaOperator g2(random_string(d_, 2, 2, rng));
      const GradedVector x = random_graded(t, 0, 1, rng);
      zero = std::max(zero, g1.apply(t, g2.adjoint_apply(t, x)).norm());
      for (int w = 1; w <= wmax; ++w) {
        const GammaOperator a(random_string(d_, w, 2, rng));
        const GammaOperator b(random_string(d_, w, 2, rng));
        member = std::max(member, algebra_membership_residual(
                                      t, [&](const GradedVector& y) { return a.apply(t, b.adjoint_apply(t, y)); }, 1));
      }
    }
    row("gamma zero law", "gamma pair products", zero, 1e-12);
    row("gamma membership law", "gamma pair products", member, 1e-8);

    double table = 0.0;
    double adj = 0.0;
    int nonzero_products = 0;
    for (int trial = 0; trial < 24; ++trial) {
      auto str = [&] { return random_string(d_, static_cast<int>(rng() % (wmax + 1)), 2, rng); };
      const NaplaOperator d1{static_cast<int>(rng() % 2), random_unit_matrix(rng), str(), str()};
      const NaplaOperator d2{static_cast<int>(rng() % 2), random_unit_matrix(rng), str(), str()};
      const NaplaSum prod = napla_product(d1, d2, phi_);
      if (!prod.empty()) ++nonzero_products;
      const TailSequence xi = random_tail(dil, 5, 1, rng);
      const TailSequence eta = random_tail(dil, 5, 1, rng);
      table = std::max(table, tail_norm(tail_add(d1.apply(t, d2.apply(t, xi)), apply(t, prod, xi), -1.0)));
      adj = std::max(adj, std::abs(tail_inner(eta, d1.apply(t, xi)) - tail_inner(d1.adjoint().apply(t, eta), xi)));
    }
    row("napla product table", "napla product law", table, 1e-9);
    row("napla adjoint", "napla operators", adj, 1e-9);
    data_["nonzero_napla_products"] = nonzero_products;

    const auto family = gamma_family(d_, wmax + 1, s_.seed);
    const NaplaOperator delta{0, random_unit_matrix(rng), random_string(d_, wmax, 2, rng),
                              random_string(d_, 1, 1, rng)};
    const WInvarianceReport winv = w_invariance_check(dil, delta, family, 1e-9, 4, s_.seed);
    row("W-invariance shift", "W-invariance corollary", winv.shift_residual, 1e-9);
    row("W-invariance membership", "W-invariance corollary", winv.sigma.worst, 1e-9);
    data_["sigma_family"] = winv.sigma.family;

    SElement s1;
    s1.a = random_unit_matrix(rng);
    s1.gamma1 = {{1.0, random_string(d_, wmax, 2, rng)}};
    s1.gamma2 = {{cplx(0.5, 0.25), random_string(d_, 1, 1, rng)}};
    s1.t = {{1.0, delta}};
    s1.t_scalar = 0.5;
    SElement s2;
    s2.a = random_unit_matrix(rng);
    s2.gamma1 = {{cplx(0.0, 1.0), random_string(d_, 1, 1, rng)}};
    s2.gamma2 = {{1.0, random_string(d_, 1, 1, rng)}};
    row("S conjugation identifications", "operator system S", s_conjugation_residual(dil, s1, 4, s_.seed), 1e-9);

    const NagyOperator x = compose(as_operator(dil, s1), as_operator(dil, s2));
    const GradedApplier zxz = compress(x);
    row("compression lands in the algebra", "invariant algebra: compression",
        algebra_membership_residual(t, zxz, 1), 1e-8);
    const GradedApplier lhs3 = compress(conjugate_by_vhat(dil, x));
    double p3 = 0.0;
    double p4 = 0.0;
    const Mat a = random_unit_matrix(rng);
    SElement za;
    za.a = a;
    const GradedApplier lhs4 = compress(conjugate_by_vhat(dil, as_operator(dil, za)));
    for (int trial = 0; trial < 4; ++trial) {
      const GradedVector h = random_graded(t, 0, 1, rng);
      const GradedVector rhs3 = v_infty_adjoint_apply(t, zxz(v_infty_apply(t, h)));
      p3 = std::max(p3, (lhs3(h) - rhs3).norm());
      const GradedVector rhs4 = v_infty_adjoint_apply(t, pi_infty_apply(t, a, v_infty_apply(t, h)));
      p4 = std::max(p4, (lhs4(h) - rhs4).norm());
    }
    row("compression intertwines Vhat and V", "invariant algebra: intertwining", p3, 1e-9);
    row("corner conjugation", "invariant algebra: corner", p4, 1e-9);
  }

  void ergodic_suite() {
    const Verdict v = spectral_verdict(phi_, algebra_);
    std::vector<ObservablePair> pairs = s_.pairs;
    if (pairs.empty()) {
      const auto& b = algebra_.basis();
      for (size_t i = 0; i < b.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) pairs.push_back({b[i], b[j], "basis " + std::to_string(i) + "," + std::to_string(j)});
    }
    std::vector<int> ns(s_.n_max + 1);
    for (int n = 0; n <= s_.n_max; ++n) ns[n] = n;
    double dominance = 0.0;
    double max_abs = 0.0;
    ordered_json per_pair = ordered_json::array();
    for (size_t i = 0; i < pairs.size(); ++i) {
      const auto& p = pairs[i];
      ErgodicReport r = cesaro_from_terms(correlation_terms(phi_, state_, p.a, p.b, s_.n_max, algebra_), ns);
      r.verdict = v;
      for (size_t k = 0; k < r.n_values.size(); ++k) {
        dominance = std::max(dominance, std::abs(r.signed_averages[k]) - r.abs_averages[k]);
      }
      max_abs = std::max(max_abs, r.abs_averages.back());
      per_pair.push_back({{"pair", p.label},
                          {"signed_avg", r.signed_averages.back()},
                          {"abs_avg", r.abs_averages.back()}});
      if (i == 0) csv_.push_back({s_.name + "_ergodic.csv", kCsvHeader + csv_from_report(r)});
    }
    const Mat id = Mat::Identity(d_, d_);
    const double unit_avg = std::abs(cesaro_abs(phi_, state_, id, pairs[0].b, s_.n_max, algebra_));
    row("absolute average dominates signed", "ergodic and weakly mixing states", std::max(0.0, dominance), 1e-12);
    row("unit observable has no correlation", "ergodic and weakly mixing states", unit_avg, 1e-12);
    if (v == Verdict::WeaklyMixing) {
      row("spectral weak mixing implies Cesaro decay", "weakly mixing states", max_abs, 0.05);
    } else {
      row("persistent correlations without weak mixing", "weakly mixing states",
          std::max(0.0, 0.1 - max_abs), 0.0);
    }
    data_["verdict"] = std::string(to_string(v));
    ordered_json spectrum = ordered_json::array();
    for (cplx l : restricted_spectrum(phi_, algebra_)) spectrum.push_back({l.real(), l.imag()});
    data_["spectrum"] = spectrum;
    data_["pairs"] = per_pair;
  }

  void dilated_suite() {
    const NagyDilation& dil = dilation();
    const Tower& t = dil.tower();
    const int K = dil.window();
    double cross = 0.0;
    double vanish = 0.0;
    double paths = 0.0;
    double ratio = 0.0;
    double limit = 0.0;
    const int quarter = s_.n_max / 4;
    std::vector<int> ns;
    for (int n = 0; n <= K; ++n) ns.push_back(n);
    std::vector<int> long_ns(s_.n_max + 1);
    for (int n = 0; n <= s_.n_max; ++n) long_ns[n] = n;
    const Verdict v = spectral_verdict(phi_, MatrixSubalgebra::full(d_));

    // Z pi(a) Z* compressions collapse to the base correlations.
    std::mt19937_64 rng(s_.seed + 3);
    const Mat a = random_unit_matrix(rng);
    const Mat b = random_unit_matrix(rng);
    NagyOperator za = [&t, a](const NagyVector& x) { return z_embed(pi_infty_apply(t, a, x.head)); };
    NagyOperator zb = [&t, b](const NagyVector& x) { return z_embed(pi_infty_apply(t, b, x.head)); };
    double collapse = 0.0;
    for (int k = 0; k <= K; ++k) {
      collapse = std::max(collapse, std::abs(dilated_value_direct(dil, za, zb, state_, k) -
                                             state_(a * phi_.apply_power(b, k))));
    }
    row("compressed observables reduce to base correlations", "dilated averages", collapse, 1e-10);

    for (int i = 0; i < s_.instances; ++i) {
      const DilatedPair p = random_dilated_pair(d_, s_.seed * 1000 + static_cast<std::uint64_t>(i));
      const LemmaReduction red(phi_, state_, p.x12);
      const Mat y11 = p.y11(phi_);
      for (int k = 0; k <= K; ++k) {
        const LemmaTerms lt = lemma_terms(dil, p, state_, k);
        cross = std::max(cross, std::abs(lt.term_c - red.term_c(y11, k)));
        if (p.y_conjugated) cross = std::max(cross, std::abs(lt.term_w - red.term_w(p.y, k)));
        if (k > p.x12.slot()) vanish = std::max(vanish, std::abs(lt.term_w));
      }
      const ErgodicReport direct = dilated_cesaro_direct(dil, x_operator(dil, p), y_operator(dil, p), state_, K);
      const ErgodicReport reduced = dilated_cesaro_reduced(phi_, state_, p, long_ns);
      for (int n = 0; n <= K; ++n) {
        paths = std::max({paths, std::abs(direct.abs_averages[n] - reduced.abs_averages[n]),
                          std::abs(direct.signed_averages[n] - reduced.signed_averages[n])});
      }
      const double last = reduced.abs_averages.back();
      ratio = std::max(ratio, last / std::max(reduced.abs_averages[quarter], 1e-300));
      limit = std::max(limit, last);
      if (i == 0) {
        ErgodicReport head;
        head.method = AverageMethod::Direct;
        head.n_values = direct.n_values;
        head.signed_averages = direct.signed_averages;
        head.abs_averages = direct.abs_averages;
        csv_.push_back({s_.name + "_dilated.csv", kCsvHeader + csv_from_report(head) + csv_from_report(reduced)});
      }
    }
    row("corner term cross-validation", "corner reduction lemma", cross, 1e-8);
    row("shift term vanishes past the slot", "corner reduction lemma", vanish, 1e-12);
    row("direct and reduced averages agree", "dilated averages", paths, 1e-8);
    if (v == Verdict::WeaklyMixing) {
      row("dilated average halves from N/4 to N", "transfer of weak mixing", ratio, 0.5);
      row("dilated average is small at N", "transfer of weak mixing", limit, 0.05);
    }
    data_["verdict"] = std::string(to_string(v));
    data_["instances"] = s_.instances;
  }

  const Scenario& s_;
  UcpMap phi_;
  int d_;
  MatrixSubalgebra algebra_ = MatrixSubalgebra::full(1);
  State state_ = State::tracial(1);
  std::shared_ptr<const Tower> tower_;
  std::unique_ptr<NagyDilation> dil_;
  std::vector<PropertyRow> rows_;
  ordered_json data_;
  std::vector<CsvFile> csv_;
};

}  // namespace

RunOutput run_scenario(const Scenario& s) {
  for (const auto& name : s.suites) {
    if (std::find(known_suites().begin(), known_suites().end(), name) == known_suites().end()) {
      invalid("unknown suite '" + name + "'");
    }
  }
  if (s.levels < 1) invalid("levels must be >= 1");
  if (s.n_max < 4) invalid("N must be >= 4");
  if (s.instances < 1) invalid("instances must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  Runner runner(s, build_channel(s.channel, s.seed));
  RunOutput out = runner.run();
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out.report["environment"]["timing"] = {{"timestamp", stamp}, {"wall_seconds", wall}};
  return out;
}

}  // namespace ucpdil
