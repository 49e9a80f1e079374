#include "berezin/symbols.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "berezin/errors.hpp"

namespace berezin {

using Cplx = std::complex<double>;

PBWComplex complexify(const RootSystem& rs, const PBWExact& u) {
  return u.map_scalars<Cplx>(rs, [](const GaussRat& c) { return c.to_complex(); });
}

PBWComplex adjoint_act(const RootSystem& rs, const Eigen::MatrixXcd& ad_chev,
                       const PBWComplex& u) {
  const int d = rs.dim();
  PBWComplex out(rs);
  for (const auto& [w, c] : u.terms()) {
    PBWComplex acc = PBWComplex::one(rs) * c;
    for (const Letter& l : w) {
      const int col = rs.letter_to_basis(l);
      PBWComplex lin(rs);
      for (int b = 0; b < d; ++b) {
        Cplx z = ad_chev(b, col);
        if (std::abs(z) < 1e-14) continue;
        lin += PBWComplex::letter(rs, rs.basis_to_letter(b), z);
      }
      acc = acc * lin;
    }
    out += acc;
  }
  return out;
}

PBWComplex adjoint_act(const CompactStructure& cs, const CompactGroupElement& k,
                       const PBWComplex& u) {
  return adjoint_act(cs.root_system(), cs.ad_chevalley(k), u);
}

HPolynomial<Cplx> symbol_profile(const CompactStructure& cs, const PBWComplex& u,
                                 const CompactGroupElement& k) {
  return hc_project(adjoint_act(cs, k.inverse(), u));
}

Cplx symbol_value(const CompactStructure& cs, const Weight& mu, const PBWComplex& u,
                  const CompactGroupElement& k) {
  return symbol_profile(cs, u, k).evaluate(weight_scalars<Cplx>(cs.root_system(), mu));
}

Cplx symbol_value(const CompactStructure& cs, const Weight& mu, const PBWExact& u,
                  const CompactGroupElement& k) {
  return symbol_value(cs, mu, complexify(cs.root_system(), u), k);
}

SampledFunction sample_s(const CompactStructure& cs, const Weight& mu, const PBWComplex& u,
                         std::shared_ptr<const QuadratureSet> quad, std::string kind) {
  SampledFunction f;
  f.quad = std::move(quad);
  f.kind = std::move(kind);
  const auto& samples = f.quad->samples;
  f.values.resize(static_cast<Eigen::Index>(samples.size()));
  for (size_t j = 0; j < samples.size(); ++j)
    f.values(static_cast<Eigen::Index>(j)) = symbol_value(cs, mu, u, samples[j].k);
  return f;
}

SampledFunction sample_on_orbit(const CompactStructure& cs, const Weight& lam,
                                const SymPolynomial<Cplx>& p,
                                std::shared_ptr<const QuadratureSet> quad) {
  SampledFunction f;
  f.quad = std::move(quad);
  f.kind = "polynomial-restriction";
  const auto& samples = f.quad->samples;
  f.values.resize(static_cast<Eigen::Index>(samples.size()));
  for (size_t j = 0; j < samples.size(); ++j)
    f.values(static_cast<Eigen::Index>(j)) = eval_on_orbit(p, cs, cs.psi(lam, samples[j].k));
  return f;
}

Cplx covariant_symbol(const Irrep& rep, const Eigen::MatrixXcd& a,
                      const CompactGroupElement& k) {
  Eigen::VectorXcd v = rep.coherent_state(k);
  return v.dot(a * v);
}

SampledFunction sample_covariant(const Irrep& rep, const Eigen::MatrixXcd& a,
                                 std::shared_ptr<const QuadratureSet> quad) {
  SampledFunction f;
  f.quad = std::move(quad);
  f.kind = "covariant";
  const auto& samples = f.quad->samples;
  f.values.resize(static_cast<Eigen::Index>(samples.size()));
  for (size_t j = 0; j < samples.size(); ++j)
    f.values(static_cast<Eigen::Index>(j)) = covariant_symbol(rep, a, samples[j].k);
  return f;
}

Eigen::MatrixXcd contravariant_reconstruct(const Irrep& rep, const SampledFunction& g,
                                           const CompactGroupElement& base) {
  const int q = rep.dim();
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(q, q);
  const auto& samples = g.quad->samples;
  for (size_t j = 0; j < samples.size(); ++j) {
    Eigen::VectorXcd v = rep.coherent_state(samples[j].k * base);
    b.noalias() += (static_cast<double>(q) * samples[j].weight *
                    g.values(static_cast<Eigen::Index>(j))) *
                   (v * v.adjoint());
  }
  return b;
}

Cplx trace_pairing(const SampledFunction& f, const SampledFunction& g, int dim) {
  if (!f.quad || f.quad != g.quad)
    throw ConfigError("trace_pairing: functions are sampled on different sets");
  Cplx acc = 0.0;
  const auto& samples = f.quad->samples;
  for (size_t j = 0; j < samples.size(); ++j)
    acc += samples[j].weight * f.values(static_cast<Eigen::Index>(j)) *
           g.values(static_cast<Eigen::Index>(j));
  return static_cast<double>(dim) * acc;
}

namespace {

void monomials_rec(const RootSystem& rs, int max_deg, int start, std::vector<Letter>& prefix,
                   std::vector<PBWExact>& out) {
  out.push_back(PBWExact::word(rs, prefix));
  if (static_cast<int>(prefix.size()) == max_deg) return;
  for (int b = start; b < rs.dim(); ++b) {
    prefix.push_back(rs.basis_to_letter(b));
    monomials_rec(rs, max_deg, b, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<PBWExact> pbw_monomials(const RootSystem& rs, int max_deg) {
  std::vector<PBWExact> out;
  std::vector<Letter> prefix;
  monomials_rec(rs, max_deg, 0, prefix, out);
  return out;
}

SampledFunction mixed_symbol(const Irrep& rep, const CompactStructure& cs,
                             const Eigen::MatrixXcd& a, int w,
                             std::shared_ptr<const QuadratureSet> quad, int max_deg) {
  const RootSystem& rs = rep.root_system();
  const int q = rep.dim();
  if (a.rows() != q || a.cols() != q)
    throw ConfigError("mixed_symbol: operator shape does not match the module dimension");
  if (w < 0 || w >= rs.weyl_order())
    throw ConfigError("mixed_symbol: Weyl element index out of range");
  if (max_deg < 0) {
    // depth of the module: lam - w0 lam lies in the root lattice
    Weight drop = rep.highest_weight() -
                  rs.weyl_act(rs.weyl_longest(), rep.highest_weight());
    Rat h(0);
    for (const Rat& x : rs.weight_to_root_coords(drop)) h += x;
    max_deg = static_cast<int>(h.get_d() + 0.5);
  }

  Eigen::VectorXcd va(q * q);
  for (int c = 0; c < q; ++c)
    for (int r = 0; r < q; ++r) va(c * q + r) = a(r, c);
  const double anorm = a.norm();

  std::vector<PBWExact> ops;
  Eigen::VectorXcd coeff;
  bool matched = false;
  for (int deg = 0; deg <= max_deg && !matched; ++deg) {
    ops = pbw_monomials(rs, deg);
    Eigen::MatrixXcd design(q * q, static_cast<Eigen::Index>(ops.size()));
    for (size_t i = 0; i < ops.size(); ++i) {
      Eigen::MatrixXcd m = rep.matrix_numeric(ops[i]);
      for (int c = 0; c < q; ++c)
        for (int r = 0; r < q; ++r) design(c * q + r, static_cast<Eigen::Index>(i)) = m(r, c);
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(design);
    coeff = cod.solve(va);
    matched = (design * coeff - va).norm() <= 1e-8 * (1.0 + anorm);
  }
  if (!matched)
    throw std::logic_error("mixed_symbol: no enveloping preimage within degree " +
                           std::to_string(max_deg));

  PBWComplex u(rs);
  for (size_t i = 0; i < ops.size(); ++i) {
    Cplx c = coeff(static_cast<Eigen::Index>(i));
    if (std::abs(c) < 1e-13 * (1.0 + anorm)) continue;
    u += complexify(rs, ops[i]) * c;
  }
  Weight mu = rs.weyl_act_shifted(w, rep.highest_weight());
  return sample_s(cs, mu, u, std::move(quad));
}

Cplx coxeter_twist_gap(const CompactStructure& cs, const Weight& lam, const PBWComplex& u,
                       const CompactGroupElement& k) {
  const RootSystem& rs = cs.root_system();
  const int w0 = rs.weyl_longest();
  const Weight mu_dual = rs.weyl_act_shifted(w0, rs.dual_weight(lam));
  const Weight mu = rs.weyl_act_shifted(w0, lam);
  const CompactGroupElement shifted = k * cs.coxeter_lift().inverse();
  return symbol_value(cs, mu_dual, u, k) - symbol_value(cs, mu, pbw_check(u), shifted);
}

}  // namespace berezin
