#include "berezin/pbw.hpp"

#include <sstream>

namespace berezin {

int& pbw_degree_bound() {
  static int bound = 12;
  return bound;
}

namespace detail {

int pick_descent(const Word& w, RewriteStrategy strat, std::mt19937_64* rng) {
  std::vector<int> descents;
  for (size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i + 1] < w[i]) {
      if (strat == RewriteStrategy::FirstDescent) return static_cast<int>(i);
      descents.push_back(static_cast<int>(i));
    }
  }
  if (descents.empty()) return -1;
  if (strat == RewriteStrategy::LastDescent) return descents.back();
  assert(rng);
  return descents[(*rng)() % descents.size()];
}

}  // namespace detail

PBWExact casimir_element(const RootSystem& rs) {
  const int d = rs.dim();
  ExactMat<Rat> kappa(d, std::vector<Rat>(d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) kappa[a][b] = Rat(rs.killing_basis()[a][b]);
  auto inv = inverse(kappa);
  assert(inv && "Killing form must be nondegenerate");
  PBWExact c(rs);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      if ((*inv)[a][b] == 0) continue;
      c.add_word(Word{rs.basis_to_letter(a), rs.basis_to_letter(b)},
                 GaussRat((*inv)[a][b]));
    }
  return c;
}

SymPolynomial<GaussRat> casimir_polynomial(const RootSystem& rs) {
  const int d = rs.dim();
  ExactMat<Rat> kappa(d, std::vector<Rat>(d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) kappa[a][b] = Rat(rs.killing_basis()[a][b]);
  auto inv = inverse(kappa);
  assert(inv);
  SymPolynomial<GaussRat> p(rs);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      if ((*inv)[a][b] == 0) continue;
      SymPolynomial<GaussRat>::Mono m{static_cast<int16_t>(a), static_cast<int16_t>(b)};
      std::sort(m.begin(), m.end());
      p.add(std::move(m), GaussRat((*inv)[a][b]));
    }
  return p;
}

Rat casimir_eigenvalue(const RootSystem& rs, const Weight& lam) {
  Weight shifted = lam + rs.rho() + rs.rho();
  return rs.killing_form_weights(lam, shifted);
}

std::string gauss_rat_str(const GaussRat& c) {
  auto rat_str = [](const Rat& r) { return r.get_str(); };
  if (c.im == 0) return rat_str(c.re);
  std::string im_part;
  if (c.im == 1) im_part = "i";
  else if (c.im == -1)
    im_part = "-i";
  else
    im_part = rat_str(c.im) + "i";
  if (c.re == 0) return im_part;
  if (c.im > 0) return rat_str(c.re) + "+" + im_part;
  return rat_str(c.re) + im_part;
}

std::string letter_str(const RootSystem& rs, const Letter& l) {
  switch (l.kind) {
    case LetterKind::F:
      return "F[" + rs.positive_root(l.index).str() + "]";
    case LetterKind::H:
      return "H[a" + std::to_string(l.index + 1) + "]";
    case LetterKind::E:
      return "E[" + rs.positive_root(l.index).str() + "]";
  }
  return "?";
}

std::string pbw_str(const PBWExact& u) {
  if (u.is_zero()) return "0";
  std::string s;
  for (const auto& [w, c] : u.terms()) {
    if (!s.empty()) s += " + ";
    std::string cs = gauss_rat_str(c);
    // parenthesize mixed real+imaginary parts so terms stay unambiguous
    if (c.im != 0 && c.re != 0) cs = "(" + cs + ")";
    s += cs + " * " + monomial_str<GaussRat>(u.rs(), w);
  }
  return s;
}

}  // namespace berezin
