// Command line front end: algebra inspection, symbol evaluation, invariant
// checks and the quantization experiment suites. All numeric artifacts are
// deterministic functions of (config, seed); files are written with full
// precision while the terminal shows rounded columns.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "berezin/errors.hpp"
#include "berezin/exactla.hpp"
#include "berezin/io.hpp"
#include "berezin/orbit.hpp"
#include "berezin/pbw.hpp"
#include "berezin/repr.hpp"
#include "berezin/rootsys.hpp"
#include "berezin/starprod.hpp"
#include "berezin/symbols.hpp"
#include "berezin/version.hpp"

namespace {

using namespace berezin;
using Cplx = std::complex<double>;
using nlohmann::json;

// thrown after the artifact is written; carries the failing invariant
struct SuiteFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string g6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

int env_threads() {
  const char* v = std::getenv("BEREZIN_THREADS");
  if (!v) return 1;
  int t = std::atoi(v);
  return t < 1 ? 1 : t;
}

// ---------------------------------------------------------------------------
// configuration

struct Config {
  std::string type;
  std::string lambda;
  std::string suite;
  std::string f1, f2;
  std::string u;
  std::string quad_in, quad_out;
  std::string format = "json";
  int nmin = 0;  // 0 means suite default
  int nmax = 0;
  int frame = 0;
  int samples = 0;
  std::vector<double> tgrid;
  std::uint64_t seed = 1;
  std::string out;
  std::string config_path;
  std::vector<std::string> tol_kv;
  std::map<std::string, double> tol;
  bool quick = false;  // smaller sampling defaults (symbol check)
};

double tol_of(const Config& cfg, const std::string& name, double fallback) {
  auto it = cfg.tol.find(name);
  return it == cfg.tol.end() ? fallback : it->second;
}

void parse_tol_flags(Config& cfg) {
  for (const std::string& kv : cfg.tol_kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("bad tolerance override '" + kv + "', expected name=value");
    try {
      cfg.tol[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad tolerance override '" + kv + "', expected name=value");
    }
  }
}

// json config file; command line flags win field by field
void apply_config_file(const CLI::App& cmd, Config& cfg) {
  if (cfg.config_path.empty()) return;
  std::ifstream in(cfg.config_path);
  if (!in) throw ConfigError("config file '" + cfg.config_path + "' is not readable");
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    throw ConfigError("config file '" + cfg.config_path + "' is not valid json");
  }
  if (!j.is_object()) throw ConfigError("config file '" + cfg.config_path + "' must be an object");

  static const std::vector<std::string> known = {
      "type", "lambda", "suite", "f1",   "f2",     "u",    "nmin", "nmax",
      "w",    "samples", "tgrid", "seed", "out",    "tol"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config field '" + key + "'");
    (void)value;
  }

  auto absent = [&](const char* flag) {
    return cmd.get_option_no_throw(flag) == nullptr || cmd.count(flag) == 0;
  };
  auto pull = [&](const char* flag, const char* key, auto& slot) {
    if (!absent(flag) || !j.contains(key)) return;
    try {
      slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
  };
  pull("--type", "type", cfg.type);
  pull("--lambda", "lambda", cfg.lambda);
  pull("--f1", "f1", cfg.f1);
  pull("--f2", "f2", cfg.f2);
  pull("--u", "u", cfg.u);
  pull("--nmin", "nmin", cfg.nmin);
  pull("--nmax", "nmax", cfg.nmax);
  pull("--w", "w", cfg.frame);
  pull("--samples", "samples", cfg.samples);
  pull("--tgrid", "tgrid", cfg.tgrid);
  pull("--seed", "seed", cfg.seed);
  pull("--out", "out", cfg.out);
  if (cfg.suite.empty() && j.contains("suite")) {
    try {
      cfg.suite = j.at("suite").get<std::string>();
    } catch (const json::exception&) {
      throw ConfigError("config field 'suite' has the wrong type");
    }
  }
  if (j.contains("tol")) {
    if (!j.at("tol").is_object()) throw ConfigError("config field 'tol' must be an object");
    for (const auto& [name, value] : j.at("tol").items()) {
      if (!value.is_number())
        throw ConfigError("config field 'tol." + name + "' must be a number");
      if (!cfg.tol.count(name)) cfg.tol[name] = value.get<double>();
    }
  }
}

void require_field(const std::string& value, const char* name) {
  if (value.empty()) throw ConfigError(std::string("missing required field '") + name + "'");
}

json config_echo(const Config& cfg) {
  json tol = json::object();
  for (const auto& [k, v] : cfg.tol) tol[k] = v;
  return {{"type", cfg.type},   {"lambda", cfg.lambda}, {"suite", cfg.suite},
          {"f1", cfg.f1},       {"f2", cfg.f2},         {"u", cfg.u},
          {"nmin", cfg.nmin},   {"nmax", cfg.nmax},     {"w", cfg.frame},
          {"samples", cfg.samples}, {"tgrid", cfg.tgrid}, {"seed", cfg.seed},
          {"out", cfg.out},     {"tol", tol}};
}

// ---------------------------------------------------------------------------
// output plumbing; all writes go through here, on the main thread

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write output file '" + path + "'");
  f << text;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// deterministic random draws shared by the sampling suites

PBWExact rand_element(const RootSystem& rs, std::mt19937_64& rng, int max_deg) {
  std::uniform_int_distribution<int> len(1, max_deg), num(-3, 3), den(1, 2);
  std::uniform_int_distribution<int> pick(0, rs.dim() - 1);
  PBWExact u(rs);
  for (int t = 0; t < 3; ++t) {
    Word w;
    int l = len(rng);
    for (int j = 0; j < l; ++j) w.push_back(rs.basis_to_letter(pick(rng)));
    GaussRat c(make_rat(num(rng), den(rng)), make_rat(num(rng), den(rng)));
    if (c.is_zero()) c = GaussRat(1);
    u += PBWExact::word(rs, w, c);
  }
  if (u.is_zero()) u = PBWExact::letter(rs, rs.letter_H(0));
  return u;
}

CompactGroupElement random_group_word(int dim, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> basis(0, dim - 1);
  std::uniform_real_distribution<double> angle(-1.5, 1.5);
  CompactGroupElement k;
  for (int j = 0; j < 3; ++j)
    k = k * CompactGroupElement::generator(dim, basis(rng), angle(rng));
  return k;
}

CompactGroupElement direction_shift(const Eigen::VectorXd& y, double t) {
  CompactLetter l;
  l.coeffs = y;
  l.angle = t;
  CompactGroupElement k;
  k.word.push_back(l);
  return k;
}

std::shared_ptr<const QuadratureSet> shared_quad(QuadratureSet q) {
  return std::make_shared<const QuadratureSet>(std::move(q));
}

// ---------------------------------------------------------------------------
// check bookkeeping

struct Check {
  std::string name;
  bool pass = false;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct SuiteResult {
  std::vector<Check> checks;
  json detail = json::object();

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const Check* first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }
};

json checks_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const auto& c : checks) {
    json e = {{"name", c.name},
              {"pass", c.pass},
              {"max_error", c.max_error},
              {"tolerance", c.tolerance}};
    if (!c.note.empty()) e["note"] = c.note;
    arr.push_back(e);
  }
  return arr;
}

// ---------------------------------------------------------------------------
// shared context pieces

Weight lambda_of(const Config& cfg, const RootSystem& rs) {
  require_field(cfg.lambda, "lambda");
  return parse_weight_text(cfg.lambda, rs.rank());
}

Weight module_weight_of(const Config& cfg, const RootSystem& rs, const char* suite) {
  Weight lam = lambda_of(cfg, rs);
  if (!lam.is_integral() || !lam.is_dominant())
    throw ConfigError(std::string("field 'lambda': suite ") + suite +
                      " needs a dominant integral weight, got " + weight_text(lam));
  return lam;
}

long coroot_long(const RootSystem& rs, const Weight& lam, int p) {
  Rat r = rs.pair_coroot(lam, p);
  return r.get_num().get_si();
}

int mc_default(const Config& cfg, int full, int quick) {
  if (cfg.samples > 0) return cfg.samples;
  return cfg.quick ? quick : full;
}

// ---------------------------------------------------------------------------
// suites

SuiteResult suite_prop2(const Config& cfg) {
  RootSystem rs = RootSystem::build(cfg.type);
  CompactStructure cs(rs);
  Weight lam = lambda_of(cfg, rs);
  SuiteResult res;
  Regularity reg = rs.regularity(lam);
  res.detail["relatively_regular"] = reg.relatively_regular;
  if (!reg.relatively_regular) {
    res.checks.push_back({"the weight is relatively regular", false, 1.0, 0.0,
                          "a vanishing positive root of height above one blocks right invariance"});
    return res;
  }

  const int pairs = mc_default(cfg, 50, 12);
  const double tol = tol_of(cfg, "max_error", 1e-7);
  std::mt19937_64 rng(cfg.seed);
  auto dirs = cs.stabilizer_basis(lam);
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    PBWComplex u = complexify(rs, rand_element(rs, rng, 3));
    CompactGroupElement k = random_group_word(cs.dim(), rng);
    CompactGroupElement l = direction_shift(dirs[t % dirs.size()], 0.37);
    Cplx shifted = symbol_value(cs, lam, u, k * l);
    Cplx plain = symbol_value(cs, lam, u, k);
    worst = std::max(worst, std::abs(shifted - plain) / (1.0 + std::abs(plain)));
  }
  res.detail["pairs"] = pairs;
  res.detail["stabilizer_directions"] = dirs.size();
  res.checks.push_back({"symbols are right invariant under the stabilizer", worst < tol, worst,
                        tol, ""});
  return res;
}

SuiteResult suite_lemma4(const Config& cfg) {
  RootSystem rs = RootSystem::build(cfg.type);
  CompactStructure cs(rs);
  Weight lam = module_weight_of(cfg, rs, "lemma4");
  Irrep rep = Irrep::build(rs, lam);
  const int q = rep.dim();
  const Weight mu = rs.weyl_act_shifted(rs.weyl_longest(), rs.dual_weight(lam));
  std::mt19937_64 rng(cfg.seed);
  SuiteResult res;
  res.detail["dim"] = q;

  if (rs.rank() == 1) {
    long m = coroot_long(rs, lam, 0);
    auto quad = shared_quad(haar_quadrature(cs, static_cast<int>(2 * m) + 4));
    const double tol = tol_of(cfg, "max_error", 1e-7);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      PBWExact u1 = rand_element(rs, rng, 2);
      PBWExact u2 = rand_element(rs, rng, 2);
      SampledFunction f = sample_covariant(rep, rep.matrix_numeric(u1), quad);
      SampledFunction g = sample_s(cs, mu, complexify(rs, u2), quad);
      Cplx integral = trace_pairing(f, g, q);
      Cplx trace = rep.trace_of(u1 * pbw_check(u2)).to_complex();
      worst = std::max(worst, std::abs(integral - trace) / (1.0 + std::abs(trace)));
    }
    res.detail["quadrature"] = quad->mode;
    res.checks.push_back({"the trace pairing equals the operator trace", worst < tol, worst, tol,
                          "exact torus quadrature"});

    Eigen::Index count = static_cast<Eigen::Index>(quad->samples.size());
    SampledFunction ones{quad, Eigen::VectorXcd::Ones(count), "s-map"};
    double unit_err = std::abs(trace_pairing(ones, ones, q) - static_cast<double>(q));
    res.checks.push_back({"the unit pair integrates to the dimension", unit_err < tol, unit_err,
                          tol, ""});
    return res;
  }

  const int n = mc_default(cfg, 20000, 4000);
  auto mc = shared_quad(haar_monte_carlo(cs, n, cfg.seed));
  PBWExact u1 = rand_element(rs, rng, 2);
  PBWExact u2 = rand_element(rs, rng, 2);
  SampledFunction f = sample_covariant(rep, rep.matrix_numeric(u1), mc);
  SampledFunction g = sample_s(cs, mu, complexify(rs, u2), mc);
  Cplx integral = trace_pairing(f, g, q);
  Cplx trace = rep.trace_of(u1 * pbw_check(u2)).to_complex();
  double var = 0.0;
  for (int j = 0; j < f.size(); ++j)
    var += std::norm(static_cast<double>(q) * f.values(j) * g.values(j) - trace);
  double se = std::sqrt(var) / static_cast<double>(f.size());
  double sigma = tol_of(cfg, "sigma", 3.0);
  double bound = sigma * se + 1e-9;
  double err = std::abs(integral - trace);
  res.detail["samples"] = n;
  res.detail["standard_error"] = se;
  res.checks.push_back({"the trace pairing sits inside the Monte Carlo spread", err < bound, err,
                        bound, "bound is sigma * standard error"});
  return res;
}

SuiteResult suite_lemma6(const Config& cfg) {
  RootSystem rs = RootSystem::build(cfg.type);
  CompactStructure cs(rs);
  Weight lam = module_weight_of(cfg, rs, "lemma6");
  Irrep rep = Irrep::build(rs, lam);
  const Weight mu = rs.weyl_act_shifted(rs.weyl_longest(), rs.dual_weight(lam));
  std::mt19937_64 rng(cfg.seed);
  SuiteResult res;
  res.detail["dim"] = rep.dim();

  if (rs.rank() == 1) {
    long m = coroot_long(rs, lam, 0);
    auto quad = shared_quad(haar_quadrature(cs, static_cast<int>(4 * m) + 4));
    const double tol = tol_of(cfg, "max_error", 1e-6);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      PBWExact u = rand_element(rs, rng, 2);
      SampledFunction g = sample_s(cs, mu, complexify(rs, u), quad);
      Eigen::MatrixXcd b = contravariant_reconstruct(rep, g);
      Eigen::MatrixXcd expected = rep.matrix_numeric(pbw_check(u));
      worst = std::max(worst, (b - expected).norm() / (1.0 + expected.norm()));
    }
    res.checks.push_back({"dual symbols reconstruct the checked operator", worst < tol, worst,
                          tol, "exact torus quadrature"});

    Eigen::MatrixXcd a(rep.dim(), rep.dim());
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int i = 0; i < rep.dim(); ++i)
      for (int j = 0; j < rep.dim(); ++j) a(i, j) = Cplx(coef(rng), coef(rng));
    SampledFunction fm = mixed_symbol(rep, cs, a, rs.weyl_longest(), quad);
    Eigen::MatrixXcd back = contravariant_reconstruct(rep, fm, cs.coxeter_lift());
    double err = (back - a).norm() / (1.0 + a.norm());
    res.checks.push_back({"mixed symbols at the longest element invert to the operator",
                          err < tol, err, tol, ""});
    return res;
  }

  const int n = mc_default(cfg, 20000, 4000);
  auto mc = shared_quad(haar_monte_carlo(cs, n, cfg.seed));
  const double tol = tol_of(cfg, "mc_error", 0.1);
  PBWExact u = rand_element(rs, rng, 2);
  SampledFunction g = sample_s(cs, mu, complexify(rs, u), mc);
  Eigen::MatrixXcd b = contravariant_reconstruct(rep, g);
  Eigen::MatrixXcd expected = rep.matrix_numeric(pbw_check(u));
  double err = (b - expected).norm() / (1.0 + expected.norm());
  res.detail["samples"] = n;
  res.checks.push_back({"dual symbols reconstruct the checked operator", err < tol, err, tol,
                        "Monte Carlo quadrature"});

  auto small = shared_quad(haar_monte_carlo(cs, 12, cfg.seed + 1));
  PBWExact u2 = rand_element(rs, rng, 2);
  Eigen::MatrixXcd a = rep.matrix_numeric(u2);
  SampledFunction mixed = mixed_symbol(rep, cs, a, rs.weyl_identity(), small);
  SampledFunction cov = sample_covariant(rep, a, small);
  double worst = 0.0;
  for (int j = 0; j < mixed.size(); ++j)
    worst = std::max(worst, std::abs(mixed.values(j) - cov.values(j)) / (1.0 + a.norm()));
  res.checks.push_back({"the identity frame mixed symbol is the covariant symbol", worst < 1e-7,
                        worst, 1e-7, ""});
  return res;
}

SuiteResult suite_theorem2(const Config& cfg) {
  RootSystem rs = RootSystem::build(cfg.type);
  CompactStructure cs(rs);
  Weight lam = lambda_of(cfg, rs);
  Regularity reg = rs.regularity(lam);
  SuiteResult res;
  res.detail["relatively_regular"] = reg.relatively_regular;
  json vanishing = json::array();
  for (int p : reg.delta_plus_lambda) vanishing.push_back(rs.positive_root(p).str());
  res.detail["vanishing_positive_roots"] = vanishing;

  if (reg.relatively_regular) {
    Config sub = cfg;
    if (sub.samples == 0) sub.samples = cfg.quick ? 8 : 20;
    SuiteResult inv = suite_prop2(sub);
    res.checks.push_back({"relative regularity forces right invariance",
                          inv.checks.back().pass, inv.checks.back().max_error,
                          inv.checks.back().tolerance, ""});
    return res;
  }

  int bad = -1;
  for (int p : reg.delta_plus_lambda)
    if (rs.positive_root(p).height() > 1) bad = p;
  if (bad < 0)
    throw ConfigError("field 'lambda': no vanishing root of height above one at " +
                      weight_text(lam));

  PBWExact y = PBWExact::letter(rs, rs.letter_E(bad)) - PBWExact::letter(rs, rs.letter_F(bad));
  double witness = 0.0;
  PBWExact best(rs);
  for (const PBWExact& u : pbw_monomials(rs, 2)) {
    if (u.degree() == 0) continue;
    GaussRat der = -phi_lambda(y * u - u * y, lam);
    double mag = std::abs(der.to_complex());
    if (mag > witness) {
      witness = mag;
      best = u;
    }
  }
  const double wtol = tol_of(cfg, "witness", 0.1);
  res.detail["witness"] = {{"root", rs.positive_root(bad).str()},
                           {"element", pbw_text(best)},
                           {"derivative", witness}};
  res.checks.push_back({"a non-simple vanishing root moves some symbol", witness > wtol, witness,
                        wtol, "stabilizer flow derivative along " + rs.positive_root(bad).str()});

  PBWComplex uc = complexify(rs, best);
  CompactGroupElement e = CompactGroupElement::identity();
  CompactGroupElement l =
      CompactGroupElement::generator(cs.dim(), cs.index_re(bad), 0.3);
  double gap = std::abs(symbol_value(cs, lam, uc, e * l) - symbol_value(cs, lam, uc, e));
  res.checks.push_back({"the invariance failure is visible at a finite shift", gap > 1e-3, gap,
                        1e-3, ""});
  return res;
}

SuiteResult suite_prop3(const Config& cfg) {
  RootSystem rs = RootSystem::build(cfg.type);
  CompactStructure cs(rs);
  Weight lam = lambda_of(cfg, rs);
  std::vector<double> tgrid = cfg.tgrid.empty()
                                  ? std::vector<double>{4.0, 8.0, 16.0, 32.0, 64.0}
                                  : cfg.tgrid;
  const int draws = mc_default(cfg, 12, 6);
  const double lo = tol_of(cfg, "slope_lo", -1.2);
  const double hi = tol_of(cfg, "slope_hi", -0.8);
  const double dominance = tol_of(cfg, "dominance", 0.35);
  std::mt19937_64 rng(cfg.seed);

  // contamination of the first-order term at the smallest grid point,
  // measured by fitting a/t + b/t^2 to the error curve; the slope window
  // only applies where this stays small
  auto contamination = [](const DecayReport& r) {
    const auto count = static_cast<Eigen::Index>(r.grid.size());
    Eigen::MatrixXd m(count, 2);
    Eigen::VectorXd e(count);
    for (Eigen::Index j = 0; j < count; ++j) {
      m(j, 0) = 1.0 / r.grid[j];
      m(j, 1) = 1.0 / (r.grid[j] * r.grid[j]);
      e(j) = r.error[j];
    }
    Eigen::Vector2d ab = m.colPivHouseholderQr().solve(e);
    double a = std::abs(ab(0));
    if (a < 1e-12) return std::numeric_limits<double>::infinity();
    return std::abs(ab(1)) / (a * r.grid.front());
  };

  SuiteResult res;
  int generic = 0, fast = 0, flat = 0;
  double window_dev = 0.0, worst_slope = -std::numeric_limits<double>::infinity();
  json rows = json::array();
  for (int t = 0; t < draws; ++t) {
    PBWExact u = rand_element(rs, rng, 3);
    CompactGroupElement k = random_group_word(cs.dim(), rng);
    DecayReport rep = scaled_symbol_limit(cs, u, lam, k, tgrid);
    double mix = rep.flat ? 0.0 : contamination(rep);
    json row = {{"degree", rep.degree},   {"slope", rep.slope},
                {"flat", rep.flat},       {"subleading", rep.subleading},
                {"contamination", mix}};
    rows.push_back(row);
    if (rep.flat) {
      ++flat;
      continue;
    }
    worst_slope = std::max(worst_slope, rep.slope);
    if (mix <= dominance) {
      ++generic;
      window_dev = std::max(window_dev, std::abs(rep.slope + 1.0));
    } else {
      ++fast;
    }
  }
  res.detail["draws"] = rows;
  res.detail["generic"] = generic;
  res.detail["degenerate"] = fast;
  res.detail["flat"] = flat;

  bool window_ok = generic > 0 && window_dev <= (hi - lo) / 2.0 + 1e-12;
  res.checks.push_back({"generic elements decay at first order", window_ok, window_dev,
                        (hi - lo) / 2.0,
                        "fitted slope within [" + g6(lo) + ", " + g6(hi) + "]"});
  bool rate_ok = flat == draws || worst_slope <= hi + 1e-12;
  res.checks.push_back({"no element decays slower than first order", rate_ok,
                        flat == draws ? 0.0 : worst_slope, hi, ""});

  PBWExact hom = PBWExact::word(
      rs, {rs.letter_H(0), rs.letter_H(0), rs.letter_H(0)}, GaussRat(1));
  CompactGroupElement torus =
      CompactGroupElement::generator(cs.dim(), cs.index_torus(0), 0.8);
  DecayReport cartan = scaled_symbol_limit(cs, hom, lam, torus, tgrid);
  double cartan_err = 0.0;
  for (double e : cartan.error) cartan_err = std::max(cartan_err, e);
  res.checks.push_back({"homogeneous Cartan elements at torus points are already limiting",
                        cartan.flat && cartan_err == 0.0, cartan_err, 0.0, ""});
  return res;
}

// core of both `star converge` and `run converge`
struct ConvergeBundle {
  ConvergenceReport rep;
  std::string csv;
  json summary;
};

ConvergeBundle converge_core(const Config& cfg) {
  RootSystem rs = RootSystem::build(cfg.type);
  CompactStructure cs(rs);
  Weight lam = lambda_of(cfg, rs);
  std::string f1_text = cfg.f1.empty() ? "z" : cfg.f1;
  std::string f2_text = cfg.f2.empty() ? "z" : cfg.f2;
  SymPolynomial<Cplx> f1 = parse_function(rs, f1_text);
  SymPolynomial<Cplx> f2 = parse_function(rs, f2_text);
  int nmin = cfg.nmin > 0 ? cfg.nmin : 1;
  int nmax = cfg.nmax > 0 ? cfg.nmax : 12;
  int max_deg = std::max({2, f1.degree(), f2.degree()});

  StarFamily fam(cs, lam, cfg.frame, max_deg, cfg.seed);
  ConvergeBundle out;
  out.rep = correspondence_suite(fam, f1, f2, nmin, nmax, env_threads());

  std::string csv;
  csv += "# berezin " + std::string(kVersion) + "\n";
  csv += "# type " + cfg.type + " lambda " + weight_text(lam) + " w " +
         std::to_string(cfg.frame) + " seed " + std::to_string(cfg.seed) + "\n";
  csv += "# f1 " + f1_text + "\n";
  csv += "# f2 " + f2_text + "\n";
  csv += "n,e1,e2,rational_residual,cond\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : out.rep.rows) {
    double e1 = row.in_algebra ? row.e1 : nan;
    double e2 = row.in_algebra ? row.e2 : nan;
    double rr = row.in_algebra ? row.rational_residual : nan;
    csv += std::to_string(row.n) + "," + g17(e1) + "," + g17(e2) + "," + g17(rr) + "," +
           g17(row.cond) + "\n";
  }
  out.csv = csv;

  json rational = {{"certified", out.rep.rational.certified},
                   {"max_residual", out.rep.rational.max_residual},
                   {"at_infinity_re", out.rep.rational.at_infinity.real()},
                   {"at_infinity_im", out.rep.rational.at_infinity.imag()}};
  out.summary = {{"version", kVersion},
                 {"seed", cfg.seed},
                 {"config", config_echo(cfg)},
                 {"slope1", out.rep.slope1},
                 {"slope2", out.rep.slope2},
                 {"exact1", out.rep.exact1},
                 {"exact2", out.rep.exact2},
                 {"nesting_ok", out.rep.nesting_ok},
                 {"rational", rational},
                 {"rows", out.rep.rows.size()}};
  return out;
}

void show_converge_table(const ConvergeBundle& b) {
  std::cout << "   n        e1        e2  rational      cond\n";
  for (const auto& row : b.rep.rows) {
    char line[160];
    if (row.in_algebra)
      std::snprintf(line, sizeof(line), "%4d %9s %9s %9s %9s\n", row.n, g6(row.e1).c_str(),
                    g6(row.e2).c_str(), g6(row.rational_residual).c_str(), g6(row.cond).c_str());
    else
      std::snprintf(line, sizeof(line), "%4d %9s %9s %9s %9s\n", row.n, "-", "-", "-",
                    g6(row.cond).c_str());
    std::cout << line;
  }
  std::cout << "slope1 " << g6(b.rep.slope1) << (b.rep.exact1 ? " (exact)" : "") << ", slope2 "
            << g6(b.rep.slope2) << (b.rep.exact2 ? " (exact)" : "") << ", rational "
            << (b.rep.rational.certified ? "certified" : "uncertified") << "\n";
}

SuiteResult suite_converge(const Config& cfg, ConvergeBundle* bundle_out) {
  ConvergeBundle b = converge_core(cfg);
  SuiteResult res;
  const double slope_hi = tol_of(cfg, "slope_hi", -0.8);
  const double rtol = tol_of(cfg, "rational", 1e-6);

  res.checks.push_back({"membership is monotone in the level", b.rep.nesting_ok,
                        b.rep.nesting_ok ? 0.0 : 1.0, 0.0, ""});
  bool e1_ok = b.rep.exact1 || b.rep.slope1 <= slope_hi;
  res.checks.push_back({"the product defect vanishes at first order", e1_ok,
                        b.rep.exact1 ? 0.0 : b.rep.slope1, slope_hi,
                        b.rep.exact1 ? "defect at the floating floor" : "fitted slope"});
  bool e2_ok = b.rep.exact2 || b.rep.slope2 <= slope_hi;
  res.checks.push_back({"the commutator defect matches the bracket at first order", e2_ok,
                        b.rep.exact2 ? 0.0 : b.rep.slope2, slope_hi,
                        b.rep.exact2 ? "defect at the floating floor" : "fitted slope"});
  res.checks.push_back({"the level dependence is a certified rational function",
                        b.rep.rational.certified, b.rep.rational.max_residual, rtol, ""});
  res.detail["summary"] = b.summary;
  if (bundle_out) *bundle_out = std::move(b);
  return res;
}

SuiteResult suite_rationality(const Config& cfg) {
  RootSystem rs = RootSystem::build(cfg.type);
  CompactStructure cs(rs);
  Weight lam = lambda_of(cfg, rs);
  std::string f1_text = cfg.f1.empty() ? "e1^2" : cfg.f1;
  std::string f2_text = cfg.f2.empty() ? "f1^2" : cfg.f2;
  SymPolynomial<Cplx> f1 = parse_function(rs, f1_text);
  SymPolynomial<Cplx> f2 = parse_function(rs, f2_text);
  int nmin = cfg.nmin > 0 ? cfg.nmin : 4;
  int nmax = cfg.nmax > 0 ? cfg.nmax : 24;
  int max_deg = std::max({2, f1.degree(), f2.degree()});
  const double rtol = tol_of(cfg, "rational", 1e-6);
  const double exact_tol = tol_of(cfg, "exact", 1e-8);

  StarFamily fam(cs, lam, cfg.frame, max_deg, cfg.seed);
  SuiteResult res;

  ConvergenceReport rep = correspondence_suite(fam, f1, f2, nmin, nmax, env_threads());
  double worst_row = 0.0;
  for (const auto& row : rep.rows)
    if (row.in_algebra) worst_row = std::max(worst_row, row.rational_residual);
  res.detail["pair"] = {{"f1", f1_text}, {"f2", f2_text},
                        {"max_residual", rep.rational.max_residual}};
  res.checks.push_back({"quadratic pairs have certified rational level dependence",
                        rep.rational.certified && worst_row < rtol,
                        std::max(worst_row, rep.rational.max_residual), rtol, ""});
  bool bounded = std::isfinite(rep.rational.at_infinity.real()) &&
                 std::isfinite(rep.rational.at_infinity.imag());
  res.checks.push_back({"the numerator degree stays within the denominator degree", bounded,
                        bounded ? 0.0 : 1.0, 0.0,
                        "the fitted function has a finite value at infinite level"});

  std::vector<int> ns;
  std::vector<Cplx> const_probe, lin_probe;
  SymPolynomial<Cplx> one = SymPolynomial<Cplx>::constant(rs, 1.0);
  SymPolynomial<Cplx> z = parse_function(rs, "z");
  for (int n = nmin; n <= std::min(nmax, nmin + 8); ++n) {
    ns.push_back(n);
    const_probe.push_back(fam.star(one, one, n).on_holdout.values(0));
    lin_probe.push_back(fam.star(z, z, n).on_holdout.values(0));
  }
  RationalFit cfit = fit_rational(ns, const_probe, 1, exact_tol);
  res.checks.push_back({"constant pairs are exactly rational", cfit.max_residual < exact_tol,
                        cfit.max_residual, exact_tol, ""});
  RationalFit lfit = fit_rational(ns, lin_probe, 2, exact_tol);
  res.checks.push_back({"linear pairs close at quadratic degree", lfit.max_residual < exact_tol,
                        lfit.max_residual, exact_tol, ""});
  return res;
}

SuiteResult suite_theorem4(const Config& cfg) {
  RootSystem rs = RootSystem::build(cfg.type);
  CompactStructure cs(rs);
  Weight lam = lambda_of(cfg, rs);
  int nmax = cfg.nmax > 0 ? cfg.nmax : 4;
  FamilyReport fr = quantization_family_demo(cs, lam, cfg.frame, nmax, cfg.seed);

  SuiteResult res;
  res.detail["dims"] = fr.dims;
  int mismatches = 0;
  for (int n = 1; n <= nmax; ++n) {
    Weight mu = rs.weyl_act_shifted(cfg.frame, Rat(n) * lam);
    if (fr.dims[n - 1] != rs.irrep_dimension(mu)) ++mismatches;
  }
  res.checks.push_back({"module dimensions follow the dimension formula", mismatches == 0,
                        static_cast<double>(mismatches), 0.0, ""});
  res.checks.push_back({"membership is monotone in the level", fr.conv.nesting_ok,
                        fr.conv.nesting_ok ? 0.0 : 1.0, 0.0, ""});
  if (cfg.frame == rs.weyl_identity()) {
    const double tol = tol_of(cfg, "closure", 1e-6);
    res.checks.push_back({"re-quantized star symbols return the operator product",
                          fr.closure_residual < tol, fr.closure_residual, tol,
                          "identity frame, levels with a spanning operator basis"});
  }
  res.detail["slope1"] = fr.conv.slope1;
  res.detail["exact2"] = fr.conv.exact2;
  return res;
}

SuiteResult suite_parseval(const Config& cfg) {
  RootSystem rs = RootSystem::build(cfg.type);
  CompactStructure cs(rs);
  Weight lam = module_weight_of(cfg, rs, "parseval");
  Irrep rep = Irrep::build(rs, lam);
  const int q = rep.dim();
  SuiteResult res;
  res.detail["dim"] = q;

  std::shared_ptr<const QuadratureSet> quad;
  double tol;
  std::string note;
  if (rs.rank() == 1) {
    long m = coroot_long(rs, lam, 0);
    quad = shared_quad(haar_quadrature(cs, static_cast<int>(2 * m) + 2));
    tol = tol_of(cfg, "max_error", 1e-8);
    note = "exact torus quadrature";
  } else {
    int n = mc_default(cfg, 20000, 4000);
    quad = shared_quad(haar_monte_carlo(cs, n, cfg.seed));
    tol = tol_of(cfg, "mc_error", 0.05);
    note = "Monte Carlo quadrature, " + std::to_string(n) + " samples";
  }
  Eigen::Index count = static_cast<Eigen::Index>(quad->samples.size());
  SampledFunction ones{quad, Eigen::VectorXcd::Ones(count), "covariant"};
  Eigen::MatrixXcd b = contravariant_reconstruct(rep, ones);
  double err = (b - Eigen::MatrixXcd::Identity(q, q)).cwiseAbs().maxCoeff();
  res.checks.push_back({"coherent states resolve the identity", err < tol, err, tol, note});
  return res;
}

SuiteResult run_suite(const Config& cfg, ConvergeBundle* bundle_out) {
  if (cfg.suite == "prop2") return suite_prop2(cfg);
  if (cfg.suite == "lemma4") return suite_lemma4(cfg);
  if (cfg.suite == "lemma6") return suite_lemma6(cfg);
  if (cfg.suite == "theorem2") return suite_theorem2(cfg);
  if (cfg.suite == "prop3") return suite_prop3(cfg);
  if (cfg.suite == "converge") return suite_converge(cfg, bundle_out);
  if (cfg.suite == "rationality") return suite_rationality(cfg);
  if (cfg.suite == "theorem4") return suite_theorem4(cfg);
  if (cfg.suite == "parseval") return suite_parseval(cfg);
  throw ConfigError("field 'suite': unknown suite '" + cfg.suite + "'");
}

// ---------------------------------------------------------------------------
// commands

void cmd_algebra_info(const Config& cfg) {
  require_field(cfg.type, "type");
  RootSystem rs = RootSystem::build(cfg.type);
  CompactStructure cs(rs);
  json j = root_datum_json(rs);
  j["version"] = kVersion;

  json irreps = json::array();
  auto weight_row = [&](const Weight& w) {
    Regularity reg = rs.regularity(w);
    return json{{"highest_weight", weight_text(w)},
                {"dim", rs.irrep_dimension(w)},
                {"orbit_dim", cs.orbit_dimension(w)},
                {"relatively_regular", reg.relatively_regular}};
  };
  for (int i = 0; i < rs.rank(); ++i) irreps.push_back(weight_row(rs.fundamental_weight(i)));
  irreps.push_back(weight_row(rs.rho()));
  j["irreps"] = irreps;

  if (!cfg.lambda.empty()) {
    Weight lam = parse_weight_text(cfg.lambda, rs.rank());
    Regularity reg = rs.regularity(lam);
    json w = {{"text", weight_text(lam)},
              {"integral", lam.is_integral()},
              {"dominant", lam.is_dominant()},
              {"orbit_dim", cs.orbit_dimension(lam)},
              {"relatively_regular", reg.relatively_regular}};
    json vanishing = json::array();
    for (int p : reg.delta_plus_lambda) vanishing.push_back(rs.positive_root(p).str());
    w["vanishing_positive_roots"] = vanishing;
    if (lam.is_integral() && lam.is_dominant()) {
      long d = rs.irrep_dimension(lam);
      w["dim"] = d;
      if (d <= Irrep::kDefaultDimCap) {
        Irrep rep = Irrep::build(rs, lam);
        std::map<std::string, int> mult;
        for (int b = 0; b < rep.dim(); ++b) ++mult[weight_text(rep.basis_weight(b))];
        json weights = json::array();
        for (const auto& [text, m] : mult)
          weights.push_back({{"weight", text}, {"multiplicity", m}});
        w["module"] = {{"dim", rep.dim()},
                       {"gram_det", rat_str(exact_det(rep.gram()))},
                       {"weights", weights}};
      } else {
        w["module"] = {{"note", "dimension exceeds the build cap"}};
      }
    }
    j["weight"] = w;
  }
  write_text(cfg.out, dump_json(j));
}

void cmd_repr_matrix(const Config& cfg) {
  require_field(cfg.type, "type");
  require_field(cfg.u, "u");
  RootSystem rs = RootSystem::build(cfg.type);
  Weight lam = lambda_of(cfg, rs);
  if (!lam.is_integral() || !lam.is_dominant())
    throw ConfigError("field 'lambda': a matrix needs a dominant integral weight, got " +
                      weight_text(lam));
  Irrep rep = Irrep::build(rs, lam);
  PBWExact u = parse_pbw_text(rs, cfg.u);
  Eigen::MatrixXcd m = rep.matrix_numeric(u);

  if (cfg.format == "csv") {
    std::string csv;
    csv += "# berezin " + std::string(kVersion) + "\n";
    csv += "# type " + cfg.type + " lambda " + weight_text(lam) + " dim " +
           std::to_string(rep.dim()) + "\n";
    csv += "# u " + pbw_text(u) + "\n";
    csv += "i,j,re,im\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index jx = 0; jx < m.cols(); ++jx)
        csv += std::to_string(i) + "," + std::to_string(jx) + "," + g17(m(i, jx).real()) + "," +
               g17(m(i, jx).imag()) + "\n";
    write_text(cfg.out, csv);
    return;
  }
  if (cfg.format != "json")
    throw ConfigError("field 'format': expected json or csv, got '" + cfg.format + "'");
  json j = {{"version", kVersion},
            {"type", cfg.type},
            {"lambda", weight_text(lam)},
            {"u", pbw_text(u)},
            {"dim", rep.dim()},
            {"highest_weight", weight_text(rep.highest_weight())},
            {"gram_det", rat_str(exact_det(rep.gram()))},
            {"matrix", matrix_to_json(m)}};
  write_text(cfg.out, dump_json(j));
}

void cmd_symbol_eval(const Config& cfg) {
  require_field(cfg.type, "type");
  require_field(cfg.u, "u");
  RootSystem rs = RootSystem::build(cfg.type);
  CompactStructure cs(rs);
  Weight lam = lambda_of(cfg, rs);
  PBWExact u = parse_pbw_text(rs, cfg.u);
  PBWComplex uc = complexify(rs, u);

  QuadratureSet quad;
  if (!cfg.quad_in.empty()) {
    std::ifstream in(cfg.quad_in);
    if (!in) throw ConfigError("quadrature file '" + cfg.quad_in + "' is not readable");
    json j;
    try {
      in >> j;
    } catch (const json::exception&) {
      throw ConfigError("quadrature file '" + cfg.quad_in + "' is not valid json");
    }
    quad = quadrature_from_json(j);
  } else {
    int n = cfg.samples > 0 ? cfg.samples : 8;
    quad = haar_monte_carlo(cs, n, cfg.seed);
  }
  if (!cfg.quad_out.empty()) write_text(cfg.quad_out, dump_json(quadrature_to_json(quad)));

  std::string csv;
  csv += "# berezin " + std::string(kVersion) + "\n";
  csv += "# type " + cfg.type + " lambda " + weight_text(lam) + " seed " +
         std::to_string(quad.seed) + " samples " + std::to_string(quad.samples.size()) + "\n";
  csv += "# u " + pbw_text(u) + "\n";
  csv += "word,re,im\n";
  for (const auto& s : quad.samples) {
    Cplx v = symbol_value(cs, lam, uc, s.k);
    csv += "\"" + compact_word_text(s.k) + "\"," + g17(v.real()) + "," + g17(v.imag()) + "\n";
  }
  write_text(cfg.out, csv);
}

void finish_checked_command(const Config& cfg, const std::string& label, json artifact,
                            const SuiteResult& res) {
  artifact["pass"] = res.pass();
  artifact["checks"] = checks_json(res.checks);
  if (!res.detail.empty()) artifact["detail"] = res.detail;
  write_text(cfg.out, dump_json(artifact));
  if (!cfg.out.empty()) {
    for (const auto& c : res.checks)
      std::cout << (c.pass ? "pass  " : "FAIL  ") << c.name << "  (max error " << g6(c.max_error)
                << ", tolerance " << g6(c.tolerance) << ")\n";
  }
  if (!res.pass())
    throw SuiteFailure(label + " failed: " + res.first_failure()->name);
}

void cmd_symbol_check(const Config& cfg) {
  require_field(cfg.type, "type");
  require_field(cfg.suite, "check");
  SuiteResult res = run_suite(cfg, nullptr);
  double worst = 0.0;
  for (const auto& c : res.checks) worst = std::max(worst, c.max_error);
  json artifact = {{"version", kVersion}, {"check", cfg.suite},  {"type", cfg.type},
                   {"lambda", cfg.lambda}, {"seed", cfg.seed},   {"max_error", worst}};
  finish_checked_command(cfg, "check " + cfg.suite, std::move(artifact), res);
}

void cmd_star_converge(const Config& cfg) {
  require_field(cfg.type, "type");
  ConvergeBundle b = converge_core(cfg);
  write_text(cfg.out, b.csv);
  if (!cfg.out.empty()) {
    write_text(cfg.out + ".json", dump_json(b.summary));
    show_converge_table(b);
  }
}

void cmd_run(const Config& cfg) {
  require_field(cfg.type, "type");
  require_field(cfg.suite, "suite");
  ConvergeBundle bundle;
  SuiteResult res = run_suite(cfg, &bundle);
  if (cfg.suite == "converge" && !cfg.out.empty()) {
    write_text(cfg.out + ".csv", bundle.csv);
    show_converge_table(bundle);
  }
  json artifact = {{"version", kVersion},
                   {"suite", cfg.suite},
                   {"seed", cfg.seed},
                   {"config", config_echo(cfg)}};
  finish_checked_command(cfg, "suite " + cfg.suite, std::move(artifact), res);
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"Berezin quantization on flag manifolds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  auto add_common = [&](CLI::App* c) {
    c->add_option("--type", cfg.type, "algebra type label (A1, A2, B2, ...)");
    c->add_option("--lambda", cfg.lambda, "base weight, e.g. 1,-1 or w[1,-1]");
    c->add_option("--seed", cfg.seed, "random seed recorded in the artifact");
    c->add_option("--out", cfg.out, "output file (stdout when omitted)");
    c->add_option("--config", cfg.config_path, "json config file; flags win field by field");
    c->add_option("--tol", cfg.tol_kv, "tolerance override name=value (repeatable)");
    return c;
  };
  auto finalize = [&](const CLI::App* c) {
    parse_tol_flags(cfg);
    apply_config_file(*c, cfg);
  };

  auto* algebra = app.add_subcommand("algebra", "root datum and module inspection");
  auto* info = add_common(algebra->add_subcommand("info", "dump the root datum"));
  info->callback([&, info] {
    finalize(info);
    cmd_algebra_info(cfg);
  });

  auto* repr = app.add_subcommand("repr", "highest weight module tools");
  auto* matrix = add_common(repr->add_subcommand("matrix", "matrix of an enveloping element"));
  matrix->add_option("--u", cfg.u, "enveloping element, e.g. \"H[a1]\" or \"2 * E[a1] F[a1]\"");
  matrix->add_option("--format", cfg.format, "json or csv");
  matrix->callback([&, matrix] {
    finalize(matrix);
    cmd_repr_matrix(cfg);
  });

  auto* symbol = app.add_subcommand("symbol", "symbol evaluation and invariant checks");
  auto* eval = add_common(symbol->add_subcommand("eval", "sample a symbol over the group"));
  eval->add_option("--u", cfg.u, "enveloping element text");
  eval->add_option("--samples", cfg.samples, "number of Haar samples");
  eval->add_option("--quad", cfg.quad_in, "replay a quadrature json file");
  eval->add_option("--quad-out", cfg.quad_out, "write the quadrature used as json");
  eval->callback([&, eval] {
    finalize(eval);
    cmd_symbol_eval(cfg);
  });

  auto* check = add_common(symbol->add_subcommand("check", "run one invariant check"));
  check->add_option("name", cfg.suite, "prop2, lemma4, lemma6 or theorem2")
      ->check(CLI::IsMember({"prop2", "lemma4", "lemma6", "theorem2"}));
  check->add_option("--samples", cfg.samples, "sampling size override");
  check->callback([&, check] {
    cfg.quick = true;
    finalize(check);
    cmd_symbol_check(cfg);
  });

  auto* star = app.add_subcommand("star", "star product experiments");
  auto* conv = add_common(star->add_subcommand("converge", "level scan of the star defects"));
  conv->add_option("--f1", cfg.f1, "first factor, e.g. \"z\" or \"e1*f1\"");
  conv->add_option("--f2", cfg.f2, "second factor");
  conv->add_option("--nmin", cfg.nmin, "first level");
  conv->add_option("--nmax", cfg.nmax, "last level");
  conv->add_option("--w", cfg.frame, "Weyl frame index");
  conv->callback([&, conv] {
    finalize(conv);
    cmd_star_converge(cfg);
  });

  auto* run = add_common(app.add_subcommand("run", "run an experiment suite"));
  run->add_option("suite", cfg.suite,
                  "prop2, lemma4, lemma6, theorem2, prop3, converge, rationality, theorem4 or "
                  "parseval")
      ->check(CLI::IsMember({"prop2", "lemma4", "lemma6", "theorem2", "prop3", "converge",
                             "rationality", "theorem4", "parseval"}));
  run->add_option("--f1", cfg.f1, "first factor for the star suites");
  run->add_option("--f2", cfg.f2, "second factor for the star suites");
  run->add_option("--nmin", cfg.nmin, "first level");
  run->add_option("--nmax", cfg.nmax, "last level");
  run->add_option("--w", cfg.frame, "Weyl frame index");
  run->add_option("--samples", cfg.samples, "sampling size override");
  run->add_option("--tgrid", cfg.tgrid, "scaling grid for prop3")->delimiter(',');
  run->callback([&, run] {
    finalize(run);
    cmd_run(cfg);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SuiteFailure& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
