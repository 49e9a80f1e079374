#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "berezin/orbit.hpp"
#include "berezin/pbw.hpp"
#include "berezin/repr.hpp"

namespace berezin {

PBWComplex complexify(const RootSystem& rs, const PBWExact& u);

// Ad(k) u, extending the adjoint rotation of the Chevalley basis letter by
// letter and re-normal-ordering with floating coefficients. The matrix
// overload takes a precomputed Ad(k) on the Chevalley basis.
PBWComplex adjoint_act(const RootSystem& rs, const Eigen::MatrixXcd& ad_chev,
                       const PBWComplex& u);
PBWComplex adjoint_act(const CompactStructure& cs, const CompactGroupElement& k,
                       const PBWComplex& u);

// Cartan profile of Ad(k^{-1}) u in normal order. Evaluating it at a weight
// mu gives the symbol value s_mu u (k); homogeneous_values(lam) gives the
// coefficients of the polynomial t -> s_{t lam} u (k).
HPolynomial<std::complex<double>> symbol_profile(const CompactStructure& cs, const PBWComplex& u,
                                                 const CompactGroupElement& k);

// s_mu u (k): Cartan part of Ad(k^{-1}) u evaluated at mu. Any real weight
// is accepted; dominance and integrality play no role here.
std::complex<double> symbol_value(const CompactStructure& cs, const Weight& mu,
                                  const PBWComplex& u, const CompactGroupElement& k);
std::complex<double> symbol_value(const CompactStructure& cs, const Weight& mu,
                                  const PBWExact& u, const CompactGroupElement& k);

// Function sampled on a fixed quadrature set over the compact group. The
// kind tag records how the values were produced: covariant | s-map |
// polynomial-restriction | star-product.
struct SampledFunction {
  std::shared_ptr<const QuadratureSet> quad;
  Eigen::VectorXcd values;
  std::string kind;

  int size() const { return static_cast<int>(values.size()); }
};

SampledFunction sample_s(const CompactStructure& cs, const Weight& mu, const PBWComplex& u,
                         std::shared_ptr<const QuadratureSet> quad,
                         std::string kind = "s-map");

// restriction of a polynomial on the dual of the algebra to the orbit
// through iH^lam, pulled back to the group by the orbit map
SampledFunction sample_on_orbit(const CompactStructure& cs, const Weight& lam,
                                const SymPolynomial<std::complex<double>>& p,
                                std::shared_ptr<const QuadratureSet> quad);

// <A v_k, v_k> for v_k = U(k) v_0 in the orthonormal frame
std::complex<double> covariant_symbol(const Irrep& rep, const Eigen::MatrixXcd& a,
                                      const CompactGroupElement& k);
SampledFunction sample_covariant(const Irrep& rep, const Eigen::MatrixXcd& a,
                                 std::shared_ptr<const QuadratureSet> quad);

// dim * sum_j w_j g_j P_j with P_j the orthogonal projector onto the
// coherent vector at k_j * base. With base = e this inverts the covariant
// symbol up to quadrature error; a nontrivial base shifts the coherent
// system, e.g. to the lowest-weight one.
Eigen::MatrixXcd contravariant_reconstruct(
    const Irrep& rep, const SampledFunction& g,
    const CompactGroupElement& base = CompactGroupElement::identity());

// dim * sum_j w_j f_j g_j; the plain product, no conjugation
std::complex<double> trace_pairing(const SampledFunction& f, const SampledFunction& g, int dim);

// canonical PBW monomials of degree <= max_deg, including the unit
std::vector<PBWExact> pbw_monomials(const RootSystem& rs, int max_deg);

// Symbol of the operator a relative to the shifted coherent system indexed
// by the Weyl element w: solves a = sum_i c_i pi(u_i) over PBW monomials and
// returns sum_i c_i s_{w.lam}(u_i) on the given samples. The monomial degree
// grows until the solve residual vanishes, up to max_deg (default
// height(lam - w0 lam)). At w = identity the result does not depend on the
// preimage choice; at other w it may.
SampledFunction mixed_symbol(const Irrep& rep, const CompactStructure& cs,
                             const Eigen::MatrixXcd& a, int w,
                             std::shared_ptr<const QuadratureSet> quad, int max_deg = -1);

// s_{w0 . lam'}(u)(k) - s_{w0 . lam}(u-check)(k * lift(w0)^{-1}); vanishes
// identically, lam' the dual weight
std::complex<double> coxeter_twist_gap(const CompactStructure& cs, const Weight& lam,
                                       const PBWComplex& u, const CompactGroupElement& k);

}  // namespace berezin
