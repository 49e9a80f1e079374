#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "berezin/pbw.hpp"

namespace berezin {

// Point of the compact real form, as real coordinates over the compact
// basis {iH_j} u {E_p - F_p, i(E_p + F_p)}.
struct OrbitPoint {
  Eigen::VectorXd x;
};

// One factor exp(angle * Y) with Y given by real coefficients over the
// compact basis. Single-index generators are the common case; Haar samples
// drawn through the defining representation use general directions.
struct CompactLetter {
  Eigen::VectorXd coeffs;
  double angle = 0.0;
};

// Word of exponential factors; the group element is the left-to-right
// product. The empty word is the identity.
struct CompactGroupElement {
  std::vector<CompactLetter> word;

  static CompactGroupElement identity() { return {}; }
  static CompactGroupElement generator(int dim, int basis_index, double angle);

  CompactGroupElement operator*(const CompactGroupElement& o) const;
  CompactGroupElement inverse() const;
};

// Compact-form layer of a root system: the compact basis, its exact adjoint
// matrices, the Killing data needed for the orbit map and for evaluating
// polynomials on orbits.
class CompactStructure {
 public:
  explicit CompactStructure(const RootSystem& rs);

  const RootSystem& root_system() const { return *rs_; }
  int dim() const { return dim_; }
  int rank() const { return rs_->rank(); }

  int index_torus(int j) const { return j; }
  int index_re(int p) const { return rs_->rank() + 2 * p; }
  int index_im(int p) const { return rs_->rank() + 2 * p + 1; }
  std::string basis_name(int a) const;

  // column a = Y_a expanded over the Chevalley basis (exact)
  const ExactMat<GaussRat>& chevalley_of_compact() const { return chev_of_compact_; }
  const ExactMat<GaussRat>& compact_of_chevalley() const { return compact_of_chev_; }

  // ad(Y_a) in compact coordinates; entries are exact integers
  const Eigen::MatrixXd& ad(int a) const { return ad_[a]; }
  Eigen::MatrixXd ad_combo(const Eigen::VectorXd& coeffs) const;
  // Ad(k): product of exp(angle * ad) over the word
  Eigen::MatrixXd ad_matrix(const CompactGroupElement& k) const;
  // Ad(k) rewritten on the Chevalley basis (complex)
  Eigen::MatrixXcd ad_chevalley(const CompactGroupElement& k) const;

  // Killing form restricted to compact coordinates (negative definite)
  const Eigen::MatrixXd& killing_compact() const { return killing_compact_; }
  // cross pairings kappa(X_b, Y_a), Chevalley row, compact column
  const Eigen::MatrixXcd& killing_cross() const { return killing_cross_; }

  // iH^lam in compact coordinates
  Eigen::VectorXd ih_dual(const Weight& lam) const;
  // orbit map: Ad(k)(iH^lam); equivariant, psi(k*l) = Ad(k) psi(l)
  OrbitPoint psi(const Weight& lam, const CompactGroupElement& k) const;
  // values (X_b, x) for every Chevalley basis element X_b
  std::vector<std::complex<double>> chevalley_pairings(const OrbitPoint& x) const;

  // generators of the stabilizer algebra of iH^lam: the torus and the
  // pair (E-F, i(E+F)) for each positive root vanishing on lam.
  // Every returned direction satisfies [Y, iH^lam] = 0 exactly.
  std::vector<Eigen::VectorXd> stabilizer_basis(const Weight& lam) const;
  int orbit_dimension(const Weight& lam) const;

  // representative of the longest Weyl element: the product of
  // exp((pi/2)(E_a - F_a)) over a reduced word
  CompactGroupElement coxeter_lift() const;

 private:
  const RootSystem* rs_;
  int dim_;
  ExactMat<GaussRat> chev_of_compact_;
  ExactMat<GaussRat> compact_of_chev_;
  std::vector<Eigen::MatrixXd> ad_;
  Eigen::MatrixXd killing_compact_;
  Eigen::MatrixXcd killing_cross_;
};

// evaluates a polynomial on the dual of the algebra at an orbit point,
// substituting each Chevalley variable with its Killing pairing
template <class S>
std::complex<double> eval_on_orbit(const SymPolynomial<S>& p, const CompactStructure& cs,
                                   const OrbitPoint& x) {
  return p.evaluate(cs.chevalley_pairings(x));
}

struct WeightedSample {
  CompactGroupElement k;
  double weight;
};

struct QuadratureSet {
  std::vector<WeightedSample> samples;
  std::string mode;
  std::uint64_t seed = 0;
  // largest matrix-coefficient frequency integrated exactly (euler mode)
  int max_degree = 0;
};

// Euler-angle product quadrature for the rank-one compact group; exact for
// products of matrix coefficients with total frequency <= max_degree.
QuadratureSet haar_quadrature(const CompactStructure& cs, int max_degree);

// Haar sampling. Type A draws exactly via unitary QR of Gaussian matrices
// mapped through the defining representation; other types mix a random
// generator word (approximate, noted in the mode string).
QuadratureSet haar_monte_carlo(const CompactStructure& cs, int count, std::uint64_t seed);

// Group word for a unitary matrix given in the defining representation
// (type A only). The matrix is projected to unit determinant, logged through
// its Schur form with eigenvalue branches balanced to sum to zero, and the
// logarithm solved back to compact coordinates.
CompactGroupElement compact_from_unitary(const CompactStructure& cs, const Eigen::MatrixXcd& u);

struct IwasawaFactors {
  Eigen::MatrixXcd k;  // unitary
  Eigen::MatrixXcd a;  // positive diagonal
  Eigen::MatrixXcd n;  // upper unitriangular
};

// Iwasawa factorization of an invertible matrix in a weight-ordered basis
// (QR with positive diagonal). Throws on singular input.
IwasawaFactors iwasawa(const Eigen::MatrixXcd& g);

}  // namespace berezin
