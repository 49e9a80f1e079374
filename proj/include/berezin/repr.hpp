#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "berezin/orbit.hpp"
#include "berezin/pbw.hpp"

namespace berezin {

// Irreducible highest-weight module built as a Verma quotient with exact
// arithmetic. Basis vectors are lowering monomials applied to the highest
// vector, grouped by weight and ordered by descending weight height, so
// raising operators are strictly upper triangular. Index 0 is the highest
// vector, of norm 1.
//
// Two layers coexist: exact generator matrices over rationals with the
// contravariant Gram form, and a floating orthonormal frame for group
// exponentials (vectors u relate to exact coordinates x by u = L^T x with
// G = L L^T).
class Irrep {
 public:
  static constexpr long kDefaultDimCap = 200;

  static Irrep build(const RootSystem& rs, const Weight& lam, long dim_cap = kDefaultDimCap);

  const RootSystem& root_system() const { return *rs_; }
  const Weight& highest_weight() const { return lam_; }
  int dim() const { return dim_; }
  const Weight& basis_weight(int j) const { return weights_[j]; }
  // exponents of the lowering monomial over positive roots
  const std::vector<int>& basis_monomial(int j) const { return monomials_[j]; }
  int highest_index() const { return 0; }

  // --- exact layer --------------------------------------------------------
  using SparseCol = std::vector<std::pair<int, Rat>>;
  // column-major exact matrix of one Chevalley generator
  const std::vector<SparseCol>& generator(const Letter& l) const;
  const ExactMat<Rat>& gram() const { return gram_; }

  std::vector<GaussRat> apply_letter(const Letter& l, const std::vector<GaussRat>& x) const;
  std::vector<GaussRat> apply(const PBWExact& u, const std::vector<GaussRat>& x) const;
  ExactMat<GaussRat> matrix_of(const PBWExact& u) const;
  GaussRat trace_of(const PBWExact& u) const;
  // contravariant Hermitian pairing, antilinear in the second argument
  GaussRat inner(const std::vector<GaussRat>& x, const std::vector<GaussRat>& y) const;

  // --- numeric layer (orthonormal frame) -----------------------------------
  const Eigen::SparseMatrix<double>& generator_on(const Letter& l) const;
  // image of a compact-basis combination, anti-Hermitian
  Eigen::SparseMatrix<std::complex<double>> compact_on(const Eigen::VectorXd& coeffs) const;
  // U(k) x by exponential actions; x in orthonormal coordinates
  Eigen::VectorXcd group_apply(const CompactGroupElement& k, Eigen::VectorXcd x) const;
  Eigen::VectorXcd coherent_state(const CompactGroupElement& k) const;
  Eigen::MatrixXcd group_matrix(const CompactGroupElement& k) const;
  Eigen::VectorXcd apply_numeric(const PBWExact& u, const Eigen::VectorXcd& x) const;
  Eigen::MatrixXcd matrix_numeric(const PBWExact& u) const;

  // change of frame, block-triangular
  const Eigen::SparseMatrix<double>& on_from_exact() const { return lt_; }
  const Eigen::SparseMatrix<double>& exact_from_on() const { return lt_inv_; }

 private:
  Irrep() = default;

  const RootSystem* rs_ = nullptr;
  Weight lam_;
  int dim_ = 0;
  std::vector<Weight> weights_;
  std::vector<std::vector<int>> monomials_;
  std::vector<std::vector<SparseCol>> gen_;  // by basis letter index
  ExactMat<Rat> gram_;
  std::vector<Eigen::SparseMatrix<double>> gen_on_;
  Eigen::SparseMatrix<double> lt_, lt_inv_;  // L^T and L^{-T}
};

// applies exp(X) by a scaled Taylor series; intended for (anti-)Hermitian X
Eigen::VectorXcd expmv(const Eigen::SparseMatrix<std::complex<double>>& x_mat,
                       Eigen::VectorXcd v);

// Invariant pairing matrix M between E^{dual(lam)} and E^{lam}:
// pi'(X)^T M = -M pi(X) for all generators, normalized so that the
// first nonzero entry is 1. The solution space is one dimensional.
ExactMat<Rat> duality_pairing(const Irrep& dual_rep, const Irrep& rep);

}  // namespace berezin
