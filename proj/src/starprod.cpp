#include "berezin/starprod.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "berezin/errors.hpp"

namespace berezin {

using Cplx = std::complex<double>;

namespace {

Cplx i_pow(int e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// least-squares slope of log(err) against log(x), ignoring floor entries
double fit_slope(const std::vector<std::pair<double, double>>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& [x, err] : rows) {
    if (err < 1e-14) continue;
    double lx = std::log(x), ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return 0.0;
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// conditioning of the design restricted to its numerical rank; columns are
// dependent whenever the basis meets the kernel ideal of the symbol map
double condition_number(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0.0) return std::numeric_limits<double>::infinity();
  const double cut = static_cast<double>(std::max(m.rows(), m.cols())) *
                     std::numeric_limits<double>::epsilon() * s(0);
  double lo = s(0);
  for (Eigen::Index j = 0; j < s.size(); ++j)
    if (s(j) > cut) lo = s(j);
  return s(0) / lo;
}

}  // namespace

StarFamily::StarFamily(const CompactStructure& cs, Weight lambda, int w, int max_deg,
                       std::uint64_t seed)
    : cs_(&cs), lambda_(std::move(lambda)), w_(w), max_deg_(max_deg), seed_(seed) {
  const RootSystem& rs = cs.root_system();
  if (lambda_.rank() != rs.rank())
    throw ConfigError("StarFamily: weight rank does not match the root system");
  if (w_ < 0 || w_ >= rs.weyl_order())
    throw ConfigError("StarFamily: Weyl element index out of range");
  if (max_deg_ < 1) throw ConfigError("StarFamily: operator basis degree must be positive");
  ops_ = pbw_monomials(rs, max_deg_);
  draw_samples(seed_);
  build_profiles();
}

void StarFamily::draw_samples(std::uint64_t seed) {
  const int fit_count = 2 * op_count();
  const int holdout_count = std::max(op_count(), 8);
  fit_quad_ = std::make_shared<const QuadratureSet>(haar_monte_carlo(*cs_, fit_count, seed));
  holdout_quad_ =
      std::make_shared<const QuadratureSet>(haar_monte_carlo(*cs_, holdout_count, seed + 1000003));
  fit_points_.clear();
  holdout_points_.clear();
  for (const auto& s : fit_quad_->samples) fit_points_.push_back(cs_->psi(lambda_, s.k));
  for (const auto& s : holdout_quad_->samples) holdout_points_.push_back(cs_->psi(lambda_, s.k));
}

void StarFamily::build_profiles() {
  const RootSystem& rs = cs_->root_system();
  const int d = rs.dim();
  const auto lam_scalars = weight_scalars<Cplx>(rs, lambda_);
  const int total =
      static_cast<int>(fit_quad_->samples.size() + holdout_quad_->samples.size());
  profiles_.assign(ops_.size(), std::vector<std::vector<Cplx>>(total));

  std::vector<PBWComplex> ops_c;
  ops_c.reserve(ops_.size());
  for (const auto& u : ops_) ops_c.push_back(complexify(rs, u));

  for (int j = 0; j < total; ++j) {
    const CompactGroupElement& k =
        j < static_cast<int>(fit_quad_->samples.size())
            ? fit_quad_->samples[j].k
            : holdout_quad_->samples[j - fit_quad_->samples.size()].k;
    Eigen::MatrixXcd adk = cs_->ad_chevalley(k.inverse());
    // letter images under Ad(k^{-1}), shared by every monomial at this sample
    std::vector<PBWComplex> lin(d);
    for (int col = 0; col < d; ++col) {
      PBWComplex acc(rs);
      for (int b = 0; b < d; ++b) {
        Cplx z = adk(b, col);
        if (std::abs(z) < 1e-14) continue;
        acc += PBWComplex::letter(rs, rs.basis_to_letter(b), z);
      }
      lin[col] = std::move(acc);
    }
    for (size_t i = 0; i < ops_.size(); ++i) {
      PBWComplex moved(rs);
      for (const auto& [word, c] : ops_c[i].terms()) {
        PBWComplex acc = PBWComplex::one(rs) * c;
        for (const Letter& l : word) acc = acc * lin[rs.letter_to_basis(l)];
        moved += acc;
      }
      profiles_[i][j] = hc_project(moved).homogeneous_values(lam_scalars);
    }
  }
}

StarLevel StarFamily::build_level(int n) const {
  const RootSystem& rs = cs_->root_system();
  const Weight symbol_weight = Rat(n) * lambda_;
  const Weight module_weight = rs.weyl_act_shifted(w_, symbol_weight);
  if (!module_weight.is_integral() || !module_weight.is_dominant())
    throw ConfigError("StarFamily: level " + std::to_string(n) + " module weight " +
                      module_weight.str() + " is not dominant integral");

  StarLevel lvl{n, module_weight, symbol_weight, Irrep::build(rs, module_weight),
                {},        {},            {},            {},
                0.0,       {},            {}};
  const int fit_count = static_cast<int>(fit_quad_->samples.size());
  const int holdout_count = static_cast<int>(holdout_quad_->samples.size());
  const int nops = op_count();

  lvl.op_mats.reserve(ops_.size());
  for (const auto& u : ops_) lvl.op_mats.push_back(lvl.rep.matrix_numeric(u));

  auto design_entry = [&](int i, int j) {
    Cplx acc = 0.0;
    double p = 1.0;
    for (const Cplx& v : profiles_[i][j]) {
      acc += p * v;
      p *= static_cast<double>(n);
    }
    return acc;
  };
  lvl.design.resize(fit_count, nops);
  lvl.holdout_design.resize(holdout_count, nops);
  for (int i = 0; i < nops; ++i) {
    for (int j = 0; j < fit_count; ++j) lvl.design(j, i) = design_entry(i, j);
    for (int j = 0; j < holdout_count; ++j)
      lvl.holdout_design(j, i) = design_entry(i, fit_count + j);
  }
  lvl.solver.compute(lvl.design);
  lvl.cond = condition_number(lvl.design);

  const int q = lvl.rep.dim();
  lvl.coherent_fit.resize(q, fit_count);
  for (int j = 0; j < fit_count; ++j)
    lvl.coherent_fit.col(j) = lvl.rep.coherent_state(fit_quad_->samples[j].k);
  lvl.coherent_holdout.resize(q, holdout_count);
  for (int j = 0; j < holdout_count; ++j)
    lvl.coherent_holdout.col(j) = lvl.rep.coherent_state(holdout_quad_->samples[j].k);
  return lvl;
}

const StarLevel& StarFamily::level(int n) {
  if (n < 1) throw ConfigError("StarFamily: level must be a positive integer");
  auto it = levels_.find(n);
  if (it != levels_.end()) return it->second;
  StarLevel lvl = build_level(n);
  if (lvl.cond > 1e6 && !redrawn_) {
    redrawn_ = true;
    levels_.clear();
    draw_samples(seed_ + 1);
    build_profiles();
    lvl = build_level(n);
  }
  return levels_.emplace(n, std::move(lvl)).first->second;
}

Eigen::VectorXcd StarFamily::restrict_fit(const SymPolynomial<Cplx>& f) const {
  if (&f.rs() != &cs_->root_system())
    throw ConfigError("StarFamily: polynomial lives on a different root system");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(fit_points_.size()));
  for (size_t j = 0; j < fit_points_.size(); ++j)
    v(static_cast<Eigen::Index>(j)) = eval_on_orbit(f, *cs_, fit_points_[j]);
  return v;
}

Eigen::VectorXcd StarFamily::restrict_holdout(const SymPolynomial<Cplx>& f) const {
  if (&f.rs() != &cs_->root_system())
    throw ConfigError("StarFamily: polynomial lives on a different root system");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(holdout_points_.size()));
  for (size_t j = 0; j < holdout_points_.size(); ++j)
    v(static_cast<Eigen::Index>(j)) = eval_on_orbit(f, *cs_, holdout_points_[j]);
  return v;
}

Quantized StarFamily::quantize(const SymPolynomial<Cplx>& f, int n) {
  const StarLevel& lvl = level(n);
  Eigen::VectorXcd target = restrict_fit(f);
  Quantized out;
  out.coeff = lvl.solver.solve(target);
  out.residual = (lvl.design * out.coeff - target).lpNorm<Eigen::Infinity>();
  const double scale = 1.0 + target.lpNorm<Eigen::Infinity>();
  if (out.residual > 1e-7 * scale)
    throw NotInAlgebraError(n, out.residual,
                            "quantize: function escapes the symbol algebra at level " +
                                std::to_string(n) + " (residual " +
                                std::to_string(out.residual) + ")");
  const int q = lvl.rep.dim();
  out.op = Eigen::MatrixXcd::Zero(q, q);
  for (int i = 0; i < op_count(); ++i) out.op.noalias() += out.coeff(i) * lvl.op_mats[i];
  return out;
}

Eigen::MatrixXcd StarFamily::requantize(const Eigen::VectorXcd& fit_values, int n) {
  const StarLevel& lvl = level(n);
  Eigen::VectorXcd c = lvl.solver.solve(fit_values);
  const int q = lvl.rep.dim();
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(q, q);
  for (int i = 0; i < op_count(); ++i) op.noalias() += c(i) * lvl.op_mats[i];
  return op;
}

Eigen::VectorXcd StarFamily::symbol_on_samples(const PBWComplex& u, const Weight& mu,
                                               const QuadratureSet& quad) const {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(quad.samples.size()));
  for (size_t j = 0; j < quad.samples.size(); ++j)
    v(static_cast<Eigen::Index>(j)) = symbol_value(*cs_, mu, u, quad.samples[j].k);
  return v;
}

StarResult StarFamily::star(const SymPolynomial<Cplx>& f1, const SymPolynomial<Cplx>& f2,
                            int n) {
  Quantized q1 = quantize(f1, n);
  Quantized q2 = quantize(f2, n);
  const StarLevel& lvl = level(n);
  StarResult out;
  out.op = q1.op * q2.op;
  out.on_fit.quad = fit_quad_;
  out.on_holdout.quad = holdout_quad_;
  out.on_fit.kind = out.on_holdout.kind = "star-product";

  if (w_ == cs_->root_system().weyl_identity()) {
    auto symbols_through = [&](const Eigen::MatrixXcd& coh) {
      Eigen::VectorXcd v(coh.cols());
      Eigen::MatrixXcd pc = out.op * coh;
      for (Eigen::Index j = 0; j < coh.cols(); ++j) v(j) = coh.col(j).dot(pc.col(j));
      return v;
    };
    out.on_fit.values = symbols_through(lvl.coherent_fit);
    out.on_holdout.values = symbols_through(lvl.coherent_holdout);
    return out;
  }

  // general frame: transport the enveloping product instead of the coherent
  // pairing; the fitted coefficients identify preimages of both factors
  const RootSystem& rs = cs_->root_system();
  const double scale = 1.0 + q1.coeff.norm() + q2.coeff.norm();
  PBWComplex u1(rs), u2(rs);
  for (int i = 0; i < op_count(); ++i) {
    if (std::abs(q1.coeff(i)) > 1e-13 * scale) u1 += complexify(rs, ops_[i]) * Cplx(q1.coeff(i));
    if (std::abs(q2.coeff(i)) > 1e-13 * scale) u2 += complexify(rs, ops_[i]) * Cplx(q2.coeff(i));
  }
  PBWComplex u12 = u1 * u2;
  out.on_fit.values = symbol_on_samples(u12, lvl.symbol_weight, *fit_quad_);
  out.on_holdout.values = symbol_on_samples(u12, lvl.symbol_weight, *holdout_quad_);
  return out;
}

DecayReport scaled_symbol_limit(const CompactStructure& cs, const PBWExact& u, const Weight& lam,
                                const CompactGroupElement& k, const std::vector<double>& tgrid) {
  if (u.is_zero()) throw ConfigError("scaled_symbol_limit: zero element has no degree");
  const RootSystem& rs = cs.root_system();
  DecayReport rep;
  rep.degree = u.degree();
  rep.grid = tgrid;

  auto profile = symbol_profile(cs, complexify(rs, u), k);
  std::vector<Cplx> hom = profile.homogeneous_values(weight_scalars<Cplx>(rs, lam));
  hom.resize(rep.degree + 1, Cplx(0.0));
  rep.top_value = hom[rep.degree];
  rep.subleading = rep.degree >= 1 ? std::abs(hom[rep.degree - 1]) : 0.0;
  rep.limit = i_pow(-rep.degree) * eval_on_orbit(principal_symbol(u), cs, cs.psi(lam, k));

  rep.error.reserve(tgrid.size());
  std::vector<std::pair<double, double>> rows;
  double floor_scale = 1e-12 * (1.0 + std::abs(rep.limit));
  bool flat = true;
  for (double t : tgrid) {
    Cplx val = 0.0;
    for (int m = 0; m <= rep.degree; ++m) val += hom[m] * std::pow(t, m - rep.degree);
    double err = std::abs(val - rep.limit);
    rep.error.push_back(err);
    rows.push_back({t, err});
    if (err > floor_scale) flat = false;
  }
  rep.flat = flat;
  rep.slope = flat ? 0.0 : fit_slope(rows);
  return rep;
}

RationalFit fit_rational(const std::vector<int>& n, const std::vector<Cplx>& v, int deg,
                         double tol) {
  if (n.size() != v.size() || n.empty())
    throw ConfigError("fit_rational: sample and value counts differ");
  const int cols = 2 * (deg + 1);
  const double nmax = static_cast<double>(*std::max_element(n.begin(), n.end()));
  Eigen::MatrixXcd sys(static_cast<Eigen::Index>(n.size()), cols);
  for (size_t j = 0; j < n.size(); ++j) {
    double x = n[j] / nmax;
    double p = 1.0;
    for (int m = 0; m <= deg; ++m) {
      sys(j, m) = p;
      sys(j, deg + 1 + m) = -v[j] * p;
      p *= x;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sys, Eigen::ComputeFullV);
  Eigen::VectorXcd null = svd.matrixV().col(cols - 1);
  RationalFit fit;
  fit.p = null.head(deg + 1);
  fit.q = null.tail(deg + 1);

  double vscale = 0.0;
  for (const Cplx& x : v) vscale = std::max(vscale, std::abs(x));
  fit.max_residual = 0.0;
  for (size_t j = 0; j < n.size(); ++j) {
    double x = n[j] / nmax;
    Cplx pv = 0.0, qv = 0.0;
    double p = 1.0;
    for (int m = 0; m <= deg; ++m) {
      pv += fit.p(m) * p;
      qv += fit.q(m) * p;
      p *= x;
    }
    double res = std::abs(qv) < 1e-12 * fit.q.norm()
                     ? std::numeric_limits<double>::infinity()
                     : std::abs(pv / qv - v[j]);
    fit.max_residual = std::max(fit.max_residual, res);
  }
  fit.certified = fit.max_residual < tol * (1.0 + vscale);
  fit.at_infinity = std::abs(fit.q(deg)) > 1e-9 * fit.q.norm()
                        ? fit.p(deg) / fit.q(deg)
                        : Cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  return fit;
}

ConvergenceReport correspondence_suite(StarFamily& fam, const SymPolynomial<Cplx>& f1,
                                       const SymPolynomial<Cplx>& f2, int n_min, int n_max,
                                       int threads) {
  if (n_min < 1 || n_max < n_min)
    throw ConfigError("correspondence_suite: bad level range [" + std::to_string(n_min) + ", " +
                      std::to_string(n_max) + "]");
  ConvergenceReport rep;
  Eigen::VectorXcd product_vals = fam.restrict_holdout(f1 * f2);
  Eigen::VectorXcd bracket_vals = fam.restrict_holdout(poisson_bracket(f1, f2));

  // a sample redraw while building level n evicts the earlier levels, so a
  // second pass is needed before the cache is stable and rows become
  // independent of each other
  for (int pass = 0; pass < 2; ++pass)
    for (int n = n_min; n <= n_max; ++n) fam.level(n);

  rep.rows.resize(n_max - n_min + 1);
  auto run_row = [&](int n) {
    ConvergenceRow& row = rep.rows[n - n_min];
    row.n = n;
    row.cond = fam.level(n).cond;
    try {
      StarResult s12 = fam.star(f1, f2, n);
      StarResult s21 = fam.star(f2, f1, n);
      row.in_algebra = true;
      Eigen::VectorXcd diff1 = s12.on_holdout.values - product_vals;
      Eigen::VectorXcd diff2 = static_cast<double>(n) *
                                   (s12.on_holdout.values - s21.on_holdout.values) -
                               Cplx(0.0, 1.0) * bracket_vals;
      row.e1 = diff1.lpNorm<Eigen::Infinity>();
      row.e2 = diff2.lpNorm<Eigen::Infinity>();
      row.probe = s12.on_holdout.values(0);
    } catch (const NotInAlgebraError&) {
      row.in_algebra = false;
    }
  };

  if (threads <= 1 || rep.rows.size() == 1) {
    for (int n = n_min; n <= n_max; ++n) run_row(n);
  } else {
    std::atomic<int> next(n_min);
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
      for (int n = next.fetch_add(1); n <= n_max; n = next.fetch_add(1)) {
        try {
          run_row(n);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    int pool = std::min<int>(threads, static_cast<int>(rep.rows.size()));
    std::vector<std::thread> crew;
    for (int t = 0; t < pool; ++t) crew.emplace_back(worker);
    for (auto& th : crew) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  bool had_success = false;
  for (const auto& row : rep.rows) {
    if (row.in_algebra) had_success = true;
    else if (had_success) rep.nesting_ok = false;
  }

  std::vector<ConvergenceRow*> ok;
  for (auto& r : rep.rows)
    if (r.in_algebra) ok.push_back(&r);
  if (!ok.empty()) {
    std::vector<std::pair<double, double>> top1, top2;
    double max1 = 0.0, max2 = 0.0;
    for (size_t i = ok.size() / 2; i < ok.size(); ++i) {
      top1.push_back({static_cast<double>(ok[i]->n), ok[i]->e1});
      top2.push_back({static_cast<double>(ok[i]->n), ok[i]->e2});
      max1 = std::max(max1, ok[i]->e1);
      max2 = std::max(max2, ok[i]->e2);
    }
    rep.exact1 = max1 < 1e-12;
    rep.exact2 = max2 < 1e-12;
    rep.slope1 = rep.exact1 ? 0.0 : fit_slope(top1);
    rep.slope2 = rep.exact2 ? 0.0 : fit_slope(top2);

    std::vector<int> ns;
    std::vector<Cplx> vs;
    for (const auto* r : ok) {
      ns.push_back(r->n);
      vs.push_back(r->probe);
    }
    int deg = f1.degree() + f2.degree() + fam.root_system().rank();
    rep.rational = fit_rational(ns, vs, deg);
    double nmax_d = static_cast<double>(*std::max_element(ns.begin(), ns.end()));
    for (auto* r : ok) {
      double x = r->n / nmax_d;
      Cplx pv = 0.0, qv = 0.0;
      double p = 1.0;
      for (int m = 0; m < rep.rational.p.size(); ++m) {
        pv += rep.rational.p(m) * p;
        qv += rep.rational.q(m) * p;
        p *= x;
      }
      r->rational_residual = std::abs(qv) < 1e-12 ? std::numeric_limits<double>::infinity()
                                                  : std::abs(pv / qv - r->probe);
    }
  }
  return rep;
}

FamilyReport quantization_family_demo(const CompactStructure& cs, const Weight& lambda, int w,
                                      int n_max, std::uint64_t seed) {
  const RootSystem& rs = cs.root_system();
  for (int n = 1; n <= n_max; ++n) {
    Weight mu = rs.weyl_act_shifted(w, Rat(n) * lambda);
    if (!mu.is_integral() || !mu.is_dominant())
      throw ConfigError("quantization family: module weight at level " + std::to_string(n) +
                        " is " + mu.str() + ", not dominant integral");
  }
  StarFamily fam(cs, lambda, w, 2, seed);

  SymPolynomial<Cplx> f1 =
      SymPolynomial<Cplx>::variable(rs, rs.letter_to_basis(rs.letter_H(0)));
  SymPolynomial<Cplx> lin_e =
      SymPolynomial<Cplx>::variable(rs, rs.letter_to_basis(rs.letter_E(0)));
  SymPolynomial<Cplx> f2 = lin_e * lin_e;

  FamilyReport rep;
  for (int n = 1; n <= n_max; ++n) rep.dims.push_back(fam.level(n).rep.dim());
  rep.conv = correspondence_suite(fam, f1, f2, 1, n_max);

  // round-trip closure is only well posed in the identity frame, on levels
  // where the operator basis spans the full matrix algebra; in twisted frames
  // the star symbol carries harmonics outside the degree-bounded design span
  for (int n = 1; w == rs.weyl_identity() && n <= n_max; ++n) {
    const StarLevel& lvl = fam.level(n);
    const int q = lvl.rep.dim();
    if (q * q > fam.op_count()) continue;
    Eigen::MatrixXcd stacked(q * q, fam.op_count());
    for (int i = 0; i < fam.op_count(); ++i)
      for (int c = 0; c < q; ++c)
        for (int r = 0; r < q; ++r) stacked(c * q + r, i) = lvl.op_mats[i](r, c);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(stacked);
    if (cod.rank() < q * q) continue;
    try {
      StarResult s = fam.star(f1, f2, n);
      Eigen::MatrixXcd back = fam.requantize(s.on_fit.values, n);
      double res = (back - s.op).norm() / (1.0 + s.op.norm());
      rep.closure_residual = std::max(rep.closure_residual, res);
    } catch (const NotInAlgebraError&) {
    }
  }
  return rep;
}

}  // namespace berezin
