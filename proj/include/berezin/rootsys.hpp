#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "berezin/rational.hpp"

namespace berezin {

// Weight of the Cartan subalgebra in simple-coroot coordinates:
// c[i] = value on H_{alpha_i}. Rational coordinates throughout; integral
// dominant weights are the ones with nonnegative integer entries.
struct Weight {
  std::vector<Rat> c;

  Weight() = default;
  explicit Weight(int rank) : c(rank, Rat(0)) {}
  explicit Weight(std::vector<Rat> coords) : c(std::move(coords)) {}

  int rank() const { return static_cast<int>(c.size()); }

  bool is_integral() const {
    for (const auto& x : c)
      if (!is_integer(x)) return false;
    return true;
  }
  bool is_dominant() const {
    for (const auto& x : c)
      if (x < 0) return false;
    return true;
  }
  bool is_zero() const {
    for (const auto& x : c)
      if (x != 0) return false;
    return true;
  }

  Weight& operator+=(const Weight& o) {
    for (size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    return *this;
  }
  Weight& operator-=(const Weight& o) {
    for (size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
    return *this;
  }
  friend Weight operator+(Weight a, const Weight& b) { return a += b; }
  friend Weight operator-(Weight a, const Weight& b) { return a -= b; }
  friend Weight operator*(const Rat& s, Weight a) {
    for (auto& x : a.c) x *= s;
    return a;
  }
  Weight operator-() const {
    Weight r = *this;
    for (auto& x : r.c) x = -x;
    return r;
  }
  friend bool operator==(const Weight& a, const Weight& b) { return a.c == b.c; }
  friend bool operator!=(const Weight& a, const Weight& b) { return !(a == b); }

  std::string str() const;
};

// Element of the root lattice in simple-root coordinates.
struct RootVec {
  std::vector<int> m;

  int height() const {
    int h = 0;
    for (int x : m) h += x;
    return h;
  }
  bool is_zero() const {
    for (int x : m)
      if (x != 0) return false;
    return true;
  }
  RootVec operator-() const {
    RootVec r = *this;
    for (auto& x : r.m) x = -x;
    return r;
  }
  friend RootVec operator+(RootVec a, const RootVec& b) {
    for (size_t i = 0; i < a.m.size(); ++i) a.m[i] += b.m[i];
    return a;
  }
  friend RootVec operator-(RootVec a, const RootVec& b) {
    for (size_t i = 0; i < a.m.size(); ++i) a.m[i] -= b.m[i];
    return a;
  }
  friend auto operator<=>(const RootVec&, const RootVec&) = default;

  std::string str() const;  // e.g. "a1+2a2"
};

// Chevalley basis letter. The basis is ordered F-block, H-block, E-block;
// within the F/E blocks positive roots are ordered by height then
// lexicographically, which is also the canonical PBW letter order.
enum class LetterKind : uint8_t { F = 0, H = 1, E = 2 };

struct Letter {
  LetterKind kind;
  int16_t index;  // positive-root index for E/F, simple-root index for H

  friend auto operator<=>(const Letter&, const Letter&) = default;
};

struct BracketTerm {
  Letter x;
  long coeff;
};

// Weyl group element stored as a reduced word together with its matrix
// action on coroot coordinates.
struct WeylElement {
  std::vector<int> word;                  // product s_{word[0]} ... s_{word.back()}
  std::vector<std::vector<long>> mat;     // (w lam)_j = sum_i mat[j][i] lam_i
  int length() const { return static_cast<int>(word.size()); }
};

struct Regularity {
  bool relatively_regular = false;
  std::vector<int> delta_plus_lambda;  // positive-root indices p with lam(H_p) = 0
  std::vector<int> sigma;              // simple indices i with lam_i = 0
};

// Root datum plus Chevalley structure constants for one simple type of
// rank <= 3. All data is exact; the bracket table closes over integer
// coefficients and satisfies the Jacobi identity (asserted at build).
class RootSystem {
 public:
  static RootSystem build(const std::string& type_label);

  const std::string& label() const { return label_; }
  int rank() const { return rank_; }
  int num_positive() const { return static_cast<int>(positive_.size()); }
  int dim() const { return 2 * num_positive() + rank_; }

  const RootVec& positive_root(int p) const { return positive_[p]; }
  // index of a lattice vector among positive roots, or -1
  int positive_index(const RootVec& v) const;
  bool is_root(const RootVec& v) const;

  // cartan(i,j) = alpha_i(H_{alpha_j})
  int cartan(int i, int j) const { return cartan_[i][j]; }
  // value of a root-lattice vector on the simple coroot H_{alpha_j}
  int pairing(const RootVec& v, int j) const;
  // normalized invariant form on the root lattice ((long root)^2 is
  // type-dependent; only ratios are ever used)
  Rat form_roots(const RootVec& a, const RootVec& b) const;

  Weight root_as_weight(int p) const;
  Weight fundamental_weight(int i) const;
  Weight rho() const;
  Weight zero_weight() const { return Weight(rank_); }

  // coroot H_beta of positive root p over the simple coroots (integers)
  const std::vector<long>& coroot(int p) const { return coroot_[p]; }
  // lam(H_beta) for positive root p
  Rat pair_coroot(const Weight& lam, int p) const;

  // simple-root coordinates of a weight (rational; integral weights of the
  // root lattice give integers)
  std::vector<Rat> weight_to_root_coords(const Weight& lam) const;

  // Chevalley bracket of two basis letters, expanded over basis letters
  const std::vector<BracketTerm>& bracket(const Letter& a, const Letter& b) const;
  // N_{alpha,beta} for arbitrary roots (0 when alpha+beta is not a root)
  long structure_constant(const RootVec& a, const RootVec& b) const;

  Letter letter_F(int p) const { return Letter{LetterKind::F, static_cast<int16_t>(p)}; }
  Letter letter_H(int i) const { return Letter{LetterKind::H, static_cast<int16_t>(i)}; }
  Letter letter_E(int p) const { return Letter{LetterKind::E, static_cast<int16_t>(p)}; }
  int letter_to_basis(const Letter& l) const;
  Letter basis_to_letter(int b) const;

  // Killing form
  const std::vector<std::vector<long>>& killing_cartan() const { return killing_h_; }
  // full Killing Gram matrix on the Chevalley basis (integer entries)
  const std::vector<std::vector<long>>& killing_basis() const { return killing_; }
  // H^lam: Killing-dual of lam in the Cartan, coordinates over simple coroots
  std::vector<Rat> killing_dual(const Weight& lam) const;
  // induced Killing form on weights: (a,b) = b(H^a)
  Rat killing_form_weights(const Weight& a, const Weight& b) const;

  // Weyl group (index 0 is the identity)
  const std::vector<WeylElement>& weyl() const { return weyl_; }
  int weyl_order() const { return static_cast<int>(weyl_.size()); }
  int weyl_longest() const { return w0_; }
  int weyl_identity() const { return 0; }
  Weight weyl_act(int w, const Weight& lam) const;
  // shifted action w . lam = w(lam + rho) - rho
  Weight weyl_act_shifted(int w, const Weight& lam) const;
  RootVec weyl_act_root(int w, const RootVec& v) const;
  int weyl_compose(int w1, int w2) const;  // index of w1 w2
  int weyl_inverse(int w) const;
  int weyl_index(const std::vector<std::vector<long>>& mat) const;

  // dual highest weight: lam' = -w0 lam (the type of the dual module)
  Weight dual_weight(const Weight& lam) const;

  Regularity regularity(const Weight& lam) const;

  // Weyl dimension formula, exact; the value is asserted integral.
  long irrep_dimension(const Weight& lam) const;

 private:
  RootSystem() = default;
  void build_roots(const std::vector<std::vector<int>>& cartan);
  void build_structure_constants();
  void build_killing();
  void build_weyl();
  long n_general(const RootVec& a, const RootVec& b) const;

  std::string label_;
  int rank_ = 0;
  std::vector<std::vector<int>> cartan_;
  std::vector<int> sym_d_;   // symmetrizers: (alpha_i, alpha_i) = 2 d_i
  std::vector<RootVec> positive_;
  std::map<RootVec, int> positive_index_;
  std::vector<std::vector<long>> coroot_;
  std::vector<std::vector<long>> npos_;      // N over positive pairs
  std::vector<std::vector<std::vector<BracketTerm>>> table_;  // basis x basis
  std::vector<std::vector<long>> killing_h_;
  std::vector<std::vector<long>> killing_;
  std::vector<WeylElement> weyl_;
  std::map<std::vector<std::vector<long>>, int> weyl_lookup_;
  int w0_ = 0;
};

}  // namespace berezin
