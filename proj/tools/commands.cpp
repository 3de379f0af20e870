#include "commands.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

#include "psk/accel.hpp"
#include "psk/identities.hpp"
#include "psk/instances.hpp"
#include "psk/lattices.hpp"
#include "psk/psop.hpp"
#include "psk/version.hpp"
#include "psk/vpade.hpp"

namespace pskctl {

using namespace psk;

namespace {

// ---------------------------------------------------------------- config

enum class Kind { String, Int, Number, Bool, Object, Array, Scalar };

bool kind_ok(const json& v, Kind k) {
  switch (k) {
    case Kind::String: return v.is_string();
    case Kind::Int: return v.is_number_integer();
    case Kind::Number: return v.is_number();
    case Kind::Bool: return v.is_boolean();
    case Kind::Object: return v.is_object();
    case Kind::Array: return v.is_array();
    case Kind::Scalar: return v.is_number() || v.is_string();
  }
  return false;
}

void check_keys(const json& obj, const std::map<std::string, Kind>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, val] : obj.items()) {
    auto it = allowed.find(key);
    if (it == allowed.end()) throw ConfigError("unknown key '" + key + "' in " + where);
    if (!kind_ok(val, it->second)) throw ConfigError("key '" + key + "' in " + where + " has the wrong type");
  }
}

const std::map<std::string, Kind> kTopKeys = {
    {"command", Kind::String}, {"suite", Kind::String},  {"system", Kind::String},  {"backend", Kind::String},
    {"tol", Kind::Number},     {"seed", Kind::Int},      {"trials", Kind::Int},     {"corrupt", Kind::Bool},
    {"measure", Kind::Object}, {"kernel", Kind::Object}, {"lambda", Kind::Scalar},  {"nodes", Kind::Int},
    {"n_max", Kind::Int},      {"k_max", Kind::Int},     {"l_max", Kind::Int},      {"N", Kind::Int},
    {"K", Kind::Int},          {"n", Kind::Int},         {"nmax", Kind::Int},       {"steps", Kind::Int},
    {"dt", Kind::Number},      {"record_every", Kind::Int}, {"series", Kind::Object}, {"sequence", Kind::Array},
    {"matrix", Kind::Array}};

int geti(const json& c, const char* key, int def) { return c.contains(key) ? c.at(key).get<int>() : def; }
double getd(const json& c, const char* key, double def) { return c.contains(key) ? c.at(key).get<double>() : def; }
std::string gets(const json& c, const char* key, const std::string& def) {
  return c.contains(key) ? c.at(key).get<std::string>() : def;
}

Rational number(const json& v, const std::string& what) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_unsigned()) return Rational(v.get<unsigned long>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_number_float()) return parse_rational(v.dump());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(what + ": " + e.what());
  }
  throw ConfigError(what + ": expected a number or a \"p/q\" string");
}

std::vector<Rational> numbers(const json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + ": expected an array");
  std::vector<Rational> out;
  for (const auto& x : v) out.push_back(number(x, what));
  return out;
}

std::vector<std::vector<Rational>> matrix(const json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + ": expected an array of rows");
  std::vector<std::vector<Rational>> out;
  for (const auto& row : v) out.push_back(numbers(row, what));
  for (const auto& row : out)
    if (row.size() != out.size()) throw ConfigError(what + ": matrix must be square");
  return out;
}

void check_skew(const std::vector<std::vector<Rational>>& a, const std::string& what) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[i][j] != -a[j][i]) throw ConfigError(what + ": matrix is not skew-symmetric");
}

bool exact_backend(const json& cfg) { return gets(cfg, "backend", "exact") == "exact"; }
double tolerance(const json& cfg) { return getd(cfg, "tol", 1e-9); }
std::uint64_t seed_of(const json& cfg) { return static_cast<std::uint64_t>(geti(cfg, "seed", 1)); }

template <class T>
std::vector<T> convert(const std::vector<Rational>& v) {
  std::vector<T> out;
  for (const auto& x : v) out.push_back(from_rational<T>(x));
  return out;
}

template <class T>
Measure<T> convert(const Measure<Rational>& m) {
  Measure<T> r;
  r.nodes = convert<T>(m.nodes);
  r.weights = convert<T>(m.weights);
  r.label = m.label;
  return r;
}

template <class T>
Measure<T> measure_from(const json& m) {
  if (m.contains("rule")) {
    if constexpr (!std::is_same_v<T, double>) {
      throw ConfigError("quadrature rules need the float backend");
    } else {
      std::string rule = m.at("rule").get<std::string>();
      int n = geti(m, "n", 0);
      if (n < 1) throw ConfigError("quadrature rule needs n >= 1");
      Measure<double> r;
      if (rule == "gauss_laguerre") r = gauss_laguerre(n, getd(m, "alpha", 0.0));
      else if (rule == "gauss_hermite") r = gauss_hermite(n);
      else if (rule == "gauss_legendre01") r = gauss_legendre01(n);
      else throw ConfigError("unknown quadrature rule '" + rule + "'");
      r.pairs.clear();  // the rule's nodes are used as a discrete measure
      return r;
    }
  }
  if (!m.contains("nodes") || !m.contains("weights"))
    throw ConfigError("measure needs nodes and weights, or a quadrature rule");
  return discrete_measure(convert<T>(numbers(m.at("nodes"), "measure nodes")),
                          convert<T>(numbers(m.at("weights"), "measure weights")));
}

Kernel kernel_from(const json& k) {
  KernelId id = parse_kernel_id(gets(k, "id", "bures"));
  switch (id) {
    case KernelId::Bures: return Kernel::bures();
    case KernelId::Shifted: return Kernel::shifted();
    case KernelId::Sgn: return Kernel::sgn();
    case KernelId::QRatio: {
      if (!k.contains("q")) throw ConfigError("qratio kernel needs q");
      return Kernel::qratio(Poly<Rational>(numbers(k.at("q"), "kernel q")));
    }
    case KernelId::Generic: {
      if (!k.contains("table")) throw ConfigError("generic kernel needs a table");
      auto t = matrix(k.at("table"), "kernel table");
      check_skew(t, "kernel table");
      return Kernel::generic(std::move(t));
    }
  }
  throw ConfigError("unknown kernel");
}

// -------------------------------------------------------------- formatting

std::string fmt(const Rational& x) { return x.get_str(); }
std::string fmt(double x) { return psk::to_string(x); }

template <class T>
json poly_json(const Poly<T>& p) {
  json a = json::array();
  for (const auto& c : p.c) a.push_back(fmt(c));
  return a;
}

json header(const json& cfg) {
  return {{"tool", "pskctl"}, {"version", kVersion}, {"config", cfg}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// First nonzero coefficient, or zero.
template <class T>
T poly_residual(const Poly<T>& p) {
  for (const auto& c : p.c)
    if (!exactly_zero(c)) return c;
  return T(0);
}

template <class T>
bool passes(const T& r, double tol, double scale = 1.0) {
  if constexpr (std::is_same_v<T, double>) return std::isfinite(r) && std::fabs(r) <= tol * std::max(1.0, scale);
  else return sgn(r) == 0;
}

// ------------------------------------------------------ residual reports

struct Rows {
  json rows = json::array();
  int failures = 0;

  void add(const std::string& check, const std::string& site, const Rational& value) {
    bool ok = sgn(value) == 0;
    rows.push_back({{"check", check}, {"site", site}, {"value", fmt(value)}, {"pass", ok}});
    failures += !ok;
  }
  void skip(const std::string& check, const std::string& site, const std::string& why) {
    rows.push_back({{"check", check}, {"site", site}, {"value", nullptr}, {"pass", true}, {"status", why}});
  }
};

std::string at(int trial) { return "trial=" + std::to_string(trial); }
ExtIndex I(int n) { return ExtIndex::I(n); }

void suite_pfcore(Rows& R, Rng& rng, int trials, bool corrupt) {
  auto d0 = ExtIndex::d0(), d1 = ExtIndex::d1(), c0 = ExtIndex::c0();
  for (int t = 0; t < trials; ++t) {
    int m = 2 + 2 * (t % 6);
    auto a = random_skew(rng, m);
    auto b = a;
    if (corrupt && t == 0) {
      b[0][1] += 1;
      b[1][0] -= 1;
    }
    Rational p = pf(a);
    std::string site = at(t) + " order=" + std::to_string(m);
    R.add("pf_squared_minus_det", site, p * p - det(b));
    R.add("pivot_independence", site, p - pf(a, Pivot::First));

    auto o = random_oracle(rng, 0, 12);
    R.add("pf1", at(t), pf1_residual(o, irange(1, 4), {I(9), d0, I(10), c0}));
    R.add("pf2", at(t), pf2_residual(o, irange(1, 3), I(4), {d0, I(8), I(9)}));

    auto s = rng.distinct_nodes(6, 20, 7);
    R.add("schur_even", at(t), schur_residual(s));
    s.pop_back();
    R.add("schur_odd", at(t), schur_odd_residual(s));

    for (int order : {3, 4}) {
      auto A = random_skew(rng, order);
      std::vector<Rational> x, y;
      for (int i = 0; i < order; ++i) {
        x.push_back(rng.rational(9, 4));
        y.push_back(rng.rational(9, 4));
      }
      R.add(order % 2 ? "bordered_det_odd" : "bordered_det_even", at(t),
            det_pf_border_residual(A, x, y, rng.rational(9, 4)));
    }

    auto g = random_oracle(rng, 0, 12, {{d0, d1}});
    Rational lam = rng.rational(5, 3);
    for (int N = 1; N <= 2; ++N) {
      std::string sn = at(t) + " N=" + std::to_string(N);
      R.add("add_g1", sn, add_g1_residual(g, d0, d1, lam, irange(1, 2 * N)));
      R.add("add_g2", sn, add_g2_residual(g, d0, d1, lam, irange(1, 2 * N - 1)));
      R.add("add_w1", sn, add_w1_residual(g, lam, N));
      R.add("add_w2", sn, add_w2_residual(g, d0, lam, N));
    }

    Binding bt;
    bt.t_order = 1;
    MomentSystem<Rational> ws(random_discrete(rng, 6), random_generic_kernel(rng, 6), bt);
    R.add("der1", at(t), der1_residual(ws.oracle(), 0, 3));
    R.add("der1_odd", at(t), der1_odd_residual(ws.oracle(), d0, 0, 3));
    R.add("der1_general", at(t), der1_gen_residual(ws.oracle(), {I(0), I(2), I(3), I(5)}));

    Binding bs;
    bs.s_order = 1;
    bs.d1 = Binding::D1::QMoment;
    MomentSystem<Rational> qs(random_discrete(rng, 6), Kernel::qratio(Poly<Rational>(std::vector<Rational>{0, 0, 1})),
                              bs);
    R.add("der2_1", at(t), der2_1_residual(qs.oracle(), d0, d1, irange(0, 3), Deriv::S));
    R.add("der2_2", at(t), der2_2_residual(qs.oracle(), d0, d1, irange(0, 2), Deriv::S));
  }
}

void suite_schur(Rows& R, Rng& rng, int trials, bool corrupt) {
  std::vector<Rational> s4 = {1, 2, 3, 4};
  R.add("schur_even", "s=1,2,3,4", schur_residual(s4));
  R.add("schur_value_minus_1/1050", "s=1,2,3,4", schur_product(s4) - Rational(1, 1050));
  for (int t = 0; t < trials; ++t) {
    int m = 2 + 2 * (t % 3);
    auto s = rng.distinct_nodes(m, 20, 7);
    std::string site = at(t) + " size=" + std::to_string(m);
    if (corrupt && t == 0) {
      auto o = schur_oracle(s);
      EntryOracle<Rational> bad;
      bad.entry = [o](const ExtIndex& a, const ExtIndex& b) {
        Rational v = o(a, b);
        if (a.is_int() && b.is_int() && a.n == 1 && b.n == 2) v += 1;
        if (a.is_int() && b.is_int() && a.n == 2 && b.n == 1) v -= 1;
        return v;
      };
      R.add("schur_even", site, pf_indexed(bad, irange(1, m)) - schur_product(s));
    } else {
      R.add("schur_even", site, schur_residual(s));
    }
    s.pop_back();
    R.add("schur_odd", at(t) + " size=" + std::to_string(m - 1), schur_odd_residual(s));
  }
}

std::vector<Kernel> kernel_zoo() {
  return {Kernel::bures(), Kernel::shifted(), Kernel::sgn(),
          Kernel::qratio(Poly<Rational>(std::vector<Rational>{0, 1, 2}))};
}

void suite_psop(Rows& R, Rng& rng, int trials, bool corrupt) {
  for (int t = 0; t < trials; ++t) {
    auto m = random_discrete(rng, 6);
    bool first = true;
    for (const auto& k : kernel_zoo()) {
      MomentSystem<Rational> sys(m, k, Binding{});
      PsopFamily<Rational> fam(sys);
      for (int n = 0; 2 * n + 2 <= 6; ++n) {
        std::vector<Rational> r;
        try {
          r = verify_orthogonality(fam, n);
        } catch (const DegenerateTau&) {
          R.skip("orthogonality", at(t) + " kernel=" + k.name() + " n=" + std::to_string(n), "degenerate");
          continue;
        }
        for (std::size_t i = 0; i < r.size(); ++i) {
          int mm = static_cast<int>(i % (2 * n + 2));
          // corrupted family: constant term of P_{2n} raised by one
          if (corrupt && t == 0 && first && n == 0 && i < static_cast<std::size_t>(2 * n + 2))
            r[i] += skew_inner(sys, Poly<Rational>::constant(1), Poly<Rational>::monomial(1, mm));
          R.add(i < static_cast<std::size_t>(2 * n + 2) ? "orthogonality_even" : "orthogonality_odd",
                at(t) + " kernel=" + k.name() + " n=" + std::to_string(n) + " m=" + std::to_string(mm), r[i]);
        }
      }
      first = false;
    }

    Binding b;
    b.t_order = 1;
    PsopFamily<Rational> bures(MomentSystem<Rational>(m, Kernel::bures(), b));
    for (int n = 2; n <= 4; ++n)
      R.add("four_term", at(t) + " n=" + std::to_string(n), poly_residual(four_term_residual(bures, n)));

    int nodes = 1 + t % 5;
    MomentSystem<Rational> small(random_discrete(rng, nodes), Kernel::bures(), Binding{});
    PsopFamily<Rational> sf(small);
    for (int n = 0; n <= nodes; ++n)
      R.add("bures_char_poly", at(t) + " nodes=" + std::to_string(nodes) + " n=" + std::to_string(n),
            poly_residual(bures_char_poly_average(small, n) - sf.P(n)));
  }
}

struct Ranges {
  int n = 4, k = 2, l = 2;
};

Ranges ranges_of(const json& cfg) {
  Ranges r;
  r.n = geti(cfg, "n_max", 4);
  r.k = geti(cfg, "k_max", 2);
  r.l = geti(cfg, "l_max", 2);
  if (r.n < 0 || r.k < 0 || r.l < 0 || r.n > 8 || r.k > 6 || r.l > 6)
    throw ConfigError("ranges must satisfy 0 <= n_max <= 8, 0 <= k_max, l_max <= 6");
  return r;
}

MomentSystem<Rational> random_lattice_system(LatticeId id, Rng& rng, int nodes) {
  auto m = random_discrete(rng, nodes);
  Kernel k = lattice_kernel(id, random_generic_kernel(rng, nodes), Poly<Rational>(std::vector<Rational>{0, 1, 1}));
  return lattice_system(id, m, k);
}

void sweep_lattice(Rows& R, LatticeId id, const MomentSystem<Rational>& sys, const Ranges& rg, const std::string& tag,
                   bool corrupt) {
  Reach r = bilinear_reach(id);
  auto tab = tau_table(id, sys, rg.n + r.n, rg.k + r.k, rg.l + r.l);
  if (corrupt) tab.cells.at({2, 0, 0}) = Jet<Rational>(tab.at(2, 0, 0).value() + 1);
  for (const auto& s : interior_sites(id, tab.n_max, tab.k_max, tab.l_max))
    R.add(lattice_name(id), tag + " site=" + s.str(), bilinear_residual(id, tab, s));
}

void sweep_pade(Rows& R, Rng& rng, const Ranges& rg, const std::string& tag) {
  int nodes = 6;
  auto m = random_discrete(rng, nodes);
  auto mom = pade_moments(m, random_generic_kernel(rng, nodes));
  for (int n = 0; n <= std::min(rg.n, 2); ++n)
    for (int k = 0; k <= rg.k; ++k)
      for (int l = 0; l <= rg.l; ++l)
        R.add("PADE", tag + " site=" + Site{n, k, l}.str(), pade_bilinear_residual(mom, n, k, l));
}

void suite_lattice(Rows& R, Rng& rng, const json& cfg, int trials, bool corrupt) {
  Ranges rg = ranges_of(cfg);
  int nodes = geti(cfg, "nodes", 6);
  if (nodes < 1 || nodes > 12) throw ConfigError("nodes must be in 1..12");
  std::vector<std::string> ids;
  if (cfg.contains("system")) {
    ids.push_back(cfg.at("system").get<std::string>());
  } else {
    for (auto id : all_lattices()) ids.push_back(lattice_name(id));
    ids.push_back("PADE");
  }
  bool first = true;
  for (const auto& name : ids) {
    if (name == "PADE") {
      if (cfg.contains("measure")) throw ConfigError("the PADE sweep draws its own measures");
      for (int t = 0; t < trials; ++t) sweep_pade(R, rng, rg, at(t));
      continue;
    }
    LatticeId id = parse_lattice_id(name);
    if (cfg.contains("measure")) {
      Kernel k = lattice_kernel(id, cfg.contains("kernel") ? kernel_from(cfg.at("kernel")) : Kernel::sgn(),
                                Poly<Rational>(std::vector<Rational>{0, 1, 1}));
      Rational lambda = cfg.contains("lambda") ? number(cfg.at("lambda"), "lambda") : Rational(1);
      auto sys = lattice_system(id, measure_from<Rational>(cfg.at("measure")), k, lambda);
      check_binding(id, sys);
      sweep_lattice(R, id, sys, rg, "given", corrupt && first);
    } else {
      for (int t = 0; t < trials; ++t)
        sweep_lattice(R, id, random_lattice_system(id, rng, nodes), rg, at(t), corrupt && first && t == 0);
    }
    first = false;
  }
}

VectorSeries<Rational> random_series(Rng& rng, int d, int M) {
  std::vector<std::vector<Rational>> c(M + 1, std::vector<Rational>(d));
  for (auto& row : c)
    for (auto& x : row) x = rng.rational(5, 3);
  return vector_series(std::move(c));
}

void suite_gipa(Rows& R, Rng& rng, int trials, bool corrupt) {
  bool corrupted = false;
  for (int t = 0; t < trials; ++t) {
    int d = 1 + static_cast<int>(rng.uniform(0, 2));
    int K = 1 + static_cast<int>(rng.uniform(0, 1));
    int N = static_cast<int>(rng.uniform(K, 4));
    auto f = random_series(rng, d, N + 2 * K);
    std::string site = at(t) + " d=" + std::to_string(d) + " N=" + std::to_string(N) + " K=" + std::to_string(K);
    GipaResult<Rational> a, b;
    try {
      a = gipa_pfaffian(f, N, K);
      b = gipa_recursive(f, N, K);
    } catch (const DegenerateTau&) {
      R.skip("gipa", site, "degenerate tau");
      continue;
    } catch (const AxiomViolation& e) {
      // a vanishing leading Pfaffian lowers deg P; not a type [N/2K] instance
      if (std::string(e.what()).find("deg P") == std::string::npos) throw;
      R.skip("gipa", site, "leading Pfaffian vanishes");
      continue;
    }
    auto Q = a.Q;
    if (corrupt && !corrupted) {
      Q[0].c[0] += 1;
      corrupted = true;
    }
    auto rep = verify_axioms(a.P, Q, f, N, K);
    R.add("axiom_failures", site, Rational(static_cast<long>(rep.failures.size())));
    R.add("paths_agree", site, poly_residual(a.P - b.P));
  }
}

void suite_accel(Rows& R, Rng& rng, int trials, bool corrupt) {
  for (int t = 0; t < trials; ++t) {
    auto sys = accel_system(random_discrete_not_one(rng, 6), random_generic_kernel(rng, 6));
    auto tab = tau_sigma_tables(sys, 2, 2, 2);
    if (corrupt && t == 0) tab.sigma.at({2, 1, 1}) += 1;
    for (int n = 0; n <= 2; ++n)
      for (int k = 0; k <= 2; ++k)
        for (int l = 1; l <= 2; ++l) {
          auto [r1, r2] = bilinear_residual_accel(tab, {n, k, l});
          std::string site = at(t) + " site=" + Site{n, k, l}.str();
          R.add("accel_bilinear_1", site, r1);
          R.add("accel_bilinear_2", site, r2);
        }
    for (int n = 0; n <= 1; ++n)
      for (int k = 0; k <= 1; ++k)
        for (int l = 0; l <= 1; ++l) {
          std::string site = at(t) + " site=" + Site{n, k, l}.str();
          try {
            auto res = accel_recurrence_residual(tab, n, k, l);
            const char* names[] = {"accel_r", "accel_v", "accel_u"};
            for (std::size_t i = 0; i < res.size(); ++i) R.add(names[i], site, res[i]);
          } catch (const DegenerateSite&) {
            R.skip("accel_recurrence", site, "vanishing tau");
          }
        }
  }
}

Outcome finish(const json& cfg, const std::string& suite, const Rows& R) {
  json out = header(cfg);
  out["suite"] = suite;
  out["residuals"] = R.rows;
  out["count"] = R.rows.size();
  out["failures"] = R.failures;
  out["status"] = R.failures ? "fail" : "pass";
  return {R.failures ? kResidualFailure : kPass, dump(out), {}};
}

void require_exact(const json& cfg, const std::string& what) {
  if (!exact_backend(cfg)) throw ConfigError(what + " runs in exact arithmetic only");
}

// ------------------------------------------------------------ lattice run

std::string csv_join(const std::vector<std::string>& f) {
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + f[i];
  return s + "\n";
}

Outcome lattice_trajectory(const json& cfg, LatticeId id) {
  int N = geti(cfg, "N", 5), steps = geti(cfg, "steps", 100), every = geti(cfg, "record_every", 10);
  double dt = getd(cfg, "dt", 1e-3);
  if (N < 1 || N > 10) throw ConfigError("N must be in 1..10");
  if (steps < 1 || every < 1) throw ConfigError("steps and record_every must be positive");
  Rng rng(seed_of(cfg));
  Measure<double> m;
  Kernel base = Kernel::sgn();
  if (cfg.contains("measure")) {
    m = measure_from<double>(cfg.at("measure"));
  } else {
    m = convert<double>(random_discrete(rng, N));
  }
  if (cfg.contains("kernel")) base = kernel_from(cfg.at("kernel"));
  else if (id == LatticeId::GLV_1p2) base = random_generic_kernel(rng, static_cast<int>(m.size()));
  Kernel kern = lattice_kernel(id, base);
  int k_extent = id == LatticeId::GLV_1p2 ? N + 1 : 0;
  auto state_at = [&](double t) {
    auto mt = exact_copy(t == 0 ? m : reweighted(m, t, 0, Poly<Rational>()));
    auto sys = lattice_system(id, mt, kern);
    return flow_state(nonlinear_vars(id, tau_table(id, sys, N + 1, k_extent)));
  };
  auto tr = evolve_semidiscrete(id, state_at(0.0), N, dt, steps, every);

  std::vector<std::string> names;
  for (const auto& [name, grid] : tr.frames.front().vars) names.push_back(name);
  std::vector<std::string> head = {"t", "n", "k", "l"};
  for (const auto& v : names) head.push_back(v);
  for (const auto& v : names) head.push_back("err_" + v);
  std::string csv = csv_join(head);
  double worst = 0;
  for (std::size_t f = 0; f < tr.frames.size(); ++f) {
    const auto& fr = tr.frames[f];
    auto exact = state_at(tr.times[f]);
    std::set<Site> sites;
    for (const auto& [name, grid] : fr.vars)
      for (const auto& [s, v] : grid) sites.insert(s);
    for (const auto& s : sites) {
      std::vector<std::string> row = {fmt(tr.times[f]), std::to_string(s.n), std::to_string(s.k), std::to_string(s.l)};
      std::vector<std::string> errs;
      for (const auto& v : names) {
        auto it = fr.vars.at(v).find(s);
        bool have = it != fr.vars.at(v).end();
        row.push_back(have ? fmt(it->second) : "");
        auto ev = exact.vars.find(v);
        bool frozen = s.n + s.k >= N;  // closure cells, held at their initial values
        if (have && !frozen && ev != exact.vars.end() && ev->second.count(s)) {
          double e = it->second - ev->second.at(s);
          errs.push_back(fmt(e));
          if (std::isfinite(e)) worst = std::max(worst, std::fabs(e));
        } else {
          errs.push_back("");
        }
      }
      row.insert(row.end(), errs.begin(), errs.end());
      csv += csv_join(row);
    }
  }
  json meta = header(cfg);
  meta["system"] = lattice_name(id);
  meta["closure"] = tr.closure;
  meta["columns"] = head;
  meta["max_abs_error"] = fmt(worst);
  meta["error_reference"] = "exact tau ratios of the measure reweighted by exp(t x)";
  meta["error_columns"] = "empty on the frozen cells n + k = N";
  return {kPass, csv, dump(meta)};
}

template <class T>
Outcome lattice_table(const json& cfg, LatticeId id) {
  Ranges rg = ranges_of(cfg);
  Rng rng(seed_of(cfg));
  int nodes = geti(cfg, "nodes", 8);
  Rational lambda = cfg.contains("lambda") ? number(cfg.at("lambda"), "lambda") : Rational(1);
  MomentSystem<T> sys = [&] {
    if (cfg.contains("measure")) {
      Kernel k = lattice_kernel(id, cfg.contains("kernel") ? kernel_from(cfg.at("kernel")) : Kernel::sgn(),
                                Poly<Rational>(std::vector<Rational>{0, 1, 1}));
      return lattice_system(id, measure_from<T>(cfg.at("measure")), k, lambda);
    }
    auto m = random_discrete(rng, nodes);
    Kernel k = lattice_kernel(id, random_generic_kernel(rng, nodes), Poly<Rational>(std::vector<Rational>{0, 1, 1}));
    return lattice_system(id, convert<T>(m), k, lambda);
  }();
  check_binding(id, sys);
  Reach r = bilinear_reach(id);
  auto tab = tau_table(id, sys, rg.n + r.n + 2, rg.k + r.k + 1, rg.l + r.l + 1);
  auto st = nonlinear_vars(id, tab);
  double scale = 1;
  for (const auto& [s, c] : tab.cells) scale = std::max(scale, magnitude(c.value()) * magnitude(c.value()));

  std::vector<std::string> names;
  for (const auto& [name, grid] : st.vars) names.push_back(name);
  struct Row {
    Site s;
    T bilinear;
    std::vector<std::string> nl;
  };
  std::vector<Row> rows;
  std::size_t width = 0;
  int failures = 0;
  for (const auto& s : interior_sites(id, rg.n + r.n, rg.k + r.k, rg.l + r.l)) {
    Row row{s, bilinear_residual(id, tab, s), {}};
    if (!passes(row.bilinear, tolerance(cfg), scale)) ++failures;
    try {
      for (const auto& x : nonlinear_residual(id, st, s)) row.nl.push_back(fmt(x));
    } catch (const Error&) {
      // ratio undefined or stencil outside the table
    }
    width = std::max(width, row.nl.size());
    rows.push_back(std::move(row));
  }
  std::vector<std::string> head = {"n", "k", "l", "tau", "bilinear"};
  for (const auto& v : names) head.push_back(v);
  for (std::size_t i = 0; i < width; ++i) head.push_back("nonlinear_" + std::to_string(i + 1));
  std::string csv = csv_join(head);
  for (auto& row : rows) {
    const Site& s = row.s;
    std::vector<std::string> f = {std::to_string(s.n), std::to_string(s.k), std::to_string(s.l),
                                  fmt(tab.at(s.n, s.k, s.l).value()), fmt(row.bilinear)};
    for (const auto& v : names) f.push_back(st.has(v, s) ? fmt(st.get(v, s).value()) : "");
    row.nl.resize(width);
    f.insert(f.end(), row.nl.begin(), row.nl.end());
    csv += csv_join(f);
  }
  json meta = header(cfg);
  meta["system"] = lattice_name(id);
  meta["columns"] = head;
  meta["bilinear_failures"] = failures;
  meta["status"] = failures ? "fail" : "pass";
  return {failures ? kResidualFailure : kPass, csv, dump(meta)};
}

// ------------------------------------------------------------------ psop

template <class T>
Outcome psop_impl(const json& cfg) {
  Rng rng(seed_of(cfg));
  Measure<T> m = cfg.contains("measure") ? measure_from<T>(cfg.at("measure")) : convert<T>(random_discrete(rng, 6));
  Kernel k = cfg.contains("kernel") ? kernel_from(cfg.at("kernel")) : Kernel::bures();
  Binding b;
  if (k.id == KernelId::Bures) b.t_order = 1;  // four-term recurrence needs d/dt
  MomentSystem<T> sys(m, k, b);
  PsopFamily<T> fam(sys);
  int nodes = static_cast<int>(m.size());
  int n_top = geti(cfg, "n", nodes);
  if (n_top < 0) throw ConfigError("n must be nonnegative");
  double tol = tolerance(cfg);

  json P = json::array();
  int last = -1;
  for (int n = 0; n <= n_top; ++n) {
    try {
      P.push_back({{"n", n}, {"coeffs", poly_json(fam.P(n))}});
      last = n;
    } catch (const DegenerateTau&) {
      break;
    }
  }
  int failures = 0;
  json orth = json::array();
  for (int n = 0; 2 * n + 2 <= nodes && 2 * n + 1 <= last; ++n) {
    auto r = verify_orthogonality(fam, n);
    // float residuals are judged against the size of the terms that cancel
    double scale = 0;
    for (int i = 0; i <= 2 * n + 1; ++i) {
      double pc = std::max(magnitude(fam.P(2 * n).coef(i)), magnitude(fam.P(2 * n + 1).coef(i)));
      for (int j = 0; j <= 2 * n + 1; ++j) scale = std::max(scale, pc * magnitude(sys.mu(i, j).value()));
      scale = std::max(scale, magnitude(sys.beta(i).value()) * magnitude(fam.zeta(n)));
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
      bool ok = passes(r[i], tol, scale);
      failures += !ok;
      orth.push_back({{"poly", i < r.size() / 2 ? 2 * n : 2 * n + 1},
                      {"m", static_cast<int>(i % (r.size() / 2))},
                      {"value", fmt(r[i])},
                      {"pass", ok}});
    }
  }
  json four = json::array();
  if (k.id == KernelId::Bures)
    for (int n = 2; n <= nodes - 2 && n + 1 <= last; ++n) {
      T v = poly_residual(four_term_residual(fam, n));
      // bound on the size of the terms: |P| times the cube of the largest u, b
      double pc = 0, ub = 1;
      for (int j = n - 2; j <= n + 1; ++j)
        for (const auto& c : fam.P(j).c) pc = std::max(pc, magnitude(c));
      for (int j = n - 1; j <= n + 1; ++j) {
        auto x = un_bn(fam, j);
        ub = std::max({ub, magnitude(x.u), magnitude(x.b)});
      }
      bool ok = passes(v, tol, pc * ub * ub * ub);
      failures += !ok;
      four.push_back({{"n", n}, {"value", fmt(v)}, {"pass", ok}});
    }
  json out = header(cfg);
  out["kernel"] = k.name();
  out["nodes"] = nodes;
  out["P"] = P;
  if (last < n_top) out["degenerate_from"] = last + 1;
  out["orthogonality"] = orth;
  out["four_term"] = four;
  out["failures"] = failures;
  out["status"] = failures ? "fail" : "pass";
  return {failures ? kResidualFailure : kPass, dump(out), {}};
}

// ------------------------------------------------------------------ gipa

template <class T>
Outcome gipa_impl(const json& cfg) {
  if (!cfg.contains("series")) throw ConfigError("gipa needs a series");
  if (!cfg.contains("N") || !cfg.contains("K")) throw ConfigError("gipa needs N and K");
  const json& s = cfg.at("series");
  check_keys(s, {{"d", Kind::Int}, {"coeffs", Kind::Array}}, "series");
  if (!s.contains("d") || !s.contains("coeffs")) throw ConfigError("series needs d and coeffs");
  int d = s.at("d").get<int>();
  std::vector<std::vector<T>> c;
  for (const auto& row : s.at("coeffs")) {
    auto v = numbers(row, "series coeffs");
    if (static_cast<int>(v.size()) != d) throw ConfigError("every series coefficient must have d components");
    c.push_back(convert<T>(v));
  }
  auto f = vector_series(std::move(c));
  int N = cfg.at("N").get<int>(), K = cfg.at("K").get<int>();
  if (N < 0 || K < 0) throw ConfigError("N and K must be nonnegative");
  double tol = exact_backend(cfg) ? 0.0 : tolerance(cfg);

  json out = header(cfg);
  GipaResult<T> a;
  try {
    a = gipa_pfaffian(f, N, K, tol);
  } catch (const DegenerateTau& e) {
    out["status"] = "degenerate";
    out["error"] = e.what();
    return {kResidualFailure, dump(out), {}};
  } catch (const AxiomViolation& e) {
    out["status"] = "axiom_violation";
    out["error"] = e.what();
    return {kResidualFailure, dump(out), {}};
  }
  out["P"] = poly_json(a.P);
  json Q = json::array();
  for (const auto& q : a.Q) Q.push_back(poly_json(q));
  out["Q"] = Q;
  out["tau"] = fmt(a.tau);
  out["symmetric_defect"] = fmt(a.defect);
  const auto& rep = a.report;
  out["axioms"] = {{"degree_q", rep.degree_q},
                   {"degree_p", rep.degree_p},
                   {"divisibility", rep.divisibility},
                   {"order", rep.order},
                   {"p0_nonzero", rep.p0_nonzero},
                   {"divisibility_residual", fmt(rep.divisibility_residual)},
                   {"order_residual", fmt(rep.order_residual)},
                   {"failures", rep.failures}};
  json rec;
  try {
    auto b = gipa_recursive(f, N, K, tol);
    T diff(0);
    double size = 0;
    for (int i = 0; i <= 2 * K; ++i) {
      T dd = a.P.coef(i) - b.P.coef(i);
      if (magnitude(dd) > magnitude(diff)) diff = dd;
      size = std::max(size, magnitude(a.P.coef(i)));
    }
    rec = {{"status", "ok"}, {"agree", passes(diff, tol, size)}, {"rescaled", b.rescaled}};
  } catch (const DegenerateTau& e) {
    rec = {{"status", "degenerate"}, {"error", e.what()}};
  } catch (const AxiomViolation& e) {
    rec = {{"status", "axiom_violation"}, {"error", e.what()}};
  }
  out["recursive"] = rec;
  bool fail = rec.value("agree", true) == false || rec["status"] == "axiom_violation";
  out["status"] = fail ? "fail" : "pass";
  return {fail ? kResidualFailure : kPass, dump(out), {}};
}

// ------------------------------------------------------------ accelerate

template <class T>
Outcome accel_impl(const json& cfg) {
  if (!cfg.contains("sequence")) throw ConfigError("accelerate needs a sequence");
  auto S = convert<T>(numbers(cfg.at("sequence"), "sequence"));
  if (S.empty()) throw ConfigError("empty sequence");
  int nmax = geti(cfg, "nmax", 2);
  if (nmax < 1) throw ConfigError("nmax must be at least 1");
  auto run = run_acceleration(S, nmax);
  std::vector<std::string> head = {"k", "S_k"};
  for (int n = 1; n <= nmax; ++n) head.push_back("T_" + std::to_string(n));
  std::string csv = csv_join(head);
  for (int k = 0; k < static_cast<int>(S.size()); ++k) {
    std::vector<std::string> row = {std::to_string(k), fmt(S[k])};
    for (int n = 1; n <= nmax; ++n) {
      auto t = run.transformed(n, k);
      row.push_back(t ? fmt(*t) : "");
    }
    csv += csv_join(row);
  }
  json meta = header(cfg);
  meta["extraction"] = run.extraction;
  meta["extraction_note"] = "interpretation: the transformed value is u over r, see README";
  json un = json::array();
  for (const auto& [grid, s] : run.unavailable) un.push_back({{"grid", grid}, {"site", s.str()}});
  meta["unavailable"] = un;
  meta["columns"] = head;
  return {kPass, csv, dump(meta)};
}

// -------------------------------------------------------------- pfaffian

template <class T>
Outcome pfaffian_impl(const json& cfg) {
  if (!cfg.contains("matrix")) throw ConfigError("pfaffian needs a matrix");
  auto a = matrix(cfg.at("matrix"), "matrix");
  check_skew(a, "matrix");
  if (a.size() % 2) throw ConfigError("matrix order must be even");
  std::vector<std::vector<T>> m;
  for (const auto& row : a) m.push_back(convert<T>(row));
  T p = pf(m), q = pf(m, Pivot::First), dd = det(m);
  T r = p * p - dd;
  bool ok = passes(r, tolerance(cfg), magnitude(dd)) && passes(T(p - q), tolerance(cfg), magnitude(p));
  json out = header(cfg);
  out["order"] = a.size();
  out["pfaffian"] = fmt(p);
  out["pfaffian_first_pivot"] = fmt(q);
  out["det"] = fmt(dd);
  out["pf_squared_minus_det"] = fmt(r);
  out["status"] = ok ? "pass" : "fail";
  return {ok ? kPass : kResidualFailure, dump(out), {}};
}

}  // namespace

// ------------------------------------------------------------------ public

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

json load_sequence_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  json seq = json::array();
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    std::string field = line.substr(line.find_last_of(',') == std::string::npos ? 0 : line.find_last_of(',') + 1);
    try {
      parse_rational(field);
    } catch (const std::exception&) {
      if (first) {
        first = false;
        continue;
      }
      throw ConfigError("bad sequence value '" + field + "' in " + path);
    }
    first = false;
    seq.push_back(field);
  }
  return seq;
}

void check_config(const json& cfg) {
  check_keys(cfg, kTopKeys, "config");
  if (cfg.contains("backend")) {
    auto b = cfg.at("backend").get<std::string>();
    if (b != "exact" && b != "float") throw ConfigError("backend must be exact or float");
  }
  if (cfg.contains("tol") && !(cfg.at("tol").get<double>() > 0)) throw ConfigError("tol must be positive");
  if (cfg.contains("seed") && cfg.at("seed").get<long long>() < 0) throw ConfigError("seed must be nonnegative");
  if (cfg.contains("trials")) {
    int t = cfg.at("trials").get<int>();
    if (t < 1 || t > 1000) throw ConfigError("trials must be in 1..1000");
  }
  if (cfg.contains("measure"))
    check_keys(cfg.at("measure"),
               {{"nodes", Kind::Array}, {"weights", Kind::Array}, {"rule", Kind::String}, {"n", Kind::Int},
                {"alpha", Kind::Number}},
               "measure");
  if (cfg.contains("kernel"))
    check_keys(cfg.at("kernel"), {{"id", Kind::String}, {"q", Kind::Array}, {"table", Kind::Array}}, "kernel");
  if (cfg.contains("series")) check_keys(cfg.at("series"), {{"d", Kind::Int}, {"coeffs", Kind::Array}}, "series");
  if (cfg.contains("system") && cfg.at("system") != "PADE") parse_lattice_id(cfg.at("system").get<std::string>());
}

Outcome cmd_validate(const json& cfg) {
  if (!cfg.contains("suite")) throw ConfigError("validate needs a suite");
  require_exact(cfg, "validate");
  std::string suite = cfg.at("suite").get<std::string>();
  Rng rng(seed_of(cfg));
  int trials = geti(cfg, "trials", 3);
  bool corrupt = cfg.value("corrupt", false);
  Rows R;
  if (suite == "pfcore") suite_pfcore(R, rng, trials, corrupt);
  else if (suite == "schur") suite_schur(R, rng, trials, corrupt);
  else if (suite == "psop") suite_psop(R, rng, trials, corrupt);
  else if (suite == "lattice") suite_lattice(R, rng, cfg, trials, corrupt);
  else if (suite == "gipa") suite_gipa(R, rng, trials, corrupt);
  else if (suite == "accel") suite_accel(R, rng, trials, corrupt);
  else throw ConfigError("unknown suite '" + suite + "' (pfcore, schur, psop, lattice, gipa, accel)");
  return finish(cfg, suite, R);
}

Outcome cmd_lattice_validate(const json& cfg) {
  if (!cfg.contains("system")) throw ConfigError("lattice validate needs --system");
  require_exact(cfg, "lattice validate");
  Rng rng(seed_of(cfg));
  Rows R;
  suite_lattice(R, rng, cfg, geti(cfg, "trials", 3), cfg.value("corrupt", false));
  return finish(cfg, "lattice", R);
}

Outcome cmd_lattice_run(const json& cfg) {
  if (!cfg.contains("system")) throw ConfigError("lattice run needs --system");
  LatticeId id = parse_lattice_id(cfg.at("system").get<std::string>());
  if (is_semidiscrete(id) && geti(cfg, "steps", 100) > 0) return lattice_trajectory(cfg, id);
  return exact_backend(cfg) ? lattice_table<Rational>(cfg, id) : lattice_table<double>(cfg, id);
}

Outcome cmd_psop(const json& cfg) { return exact_backend(cfg) ? psop_impl<Rational>(cfg) : psop_impl<double>(cfg); }
Outcome cmd_gipa(const json& cfg) { return exact_backend(cfg) ? gipa_impl<Rational>(cfg) : gipa_impl<double>(cfg); }
Outcome cmd_accelerate(const json& cfg) {
  return exact_backend(cfg) ? accel_impl<Rational>(cfg) : accel_impl<double>(cfg);
}
Outcome cmd_pfaffian(const json& cfg) {
  return exact_backend(cfg) ? pfaffian_impl<Rational>(cfg) : pfaffian_impl<double>(cfg);
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ConfigError("cannot move output into place: " + ec.message());
  }
}

}  // namespace pskctl
