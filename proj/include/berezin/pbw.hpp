#pragma once

#include <algorithm>
#include <cassert>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "berezin/errors.hpp"
#include "berezin/exactla.hpp"
#include "berezin/rootsys.hpp"

namespace berezin {

// A word in Chevalley letters. Canonical (PBW) words are the nondecreasing
// ones under the letter order: lowering block, Cartan block, raising block,
// each block ordered by root height then lexicographic index.
using Word = std::vector<Letter>;

inline bool word_is_canonical(const Word& w) {
  return std::is_sorted(w.begin(), w.end());
}

// Resource guard for the rewrite engine; words longer than this abort the
// computation instead of feeding a runaway expansion.
int& pbw_degree_bound();

// Which descent the rewrite engine resolves first. All strategies reach the
// same normal form; the choice is exposed so tests can assert confluence.
enum class RewriteStrategy { FirstDescent, LastDescent, RandomDescent };

namespace detail {
int pick_descent(const Word& w, RewriteStrategy strat, std::mt19937_64* rng);
}

// Element of the universal enveloping algebra in the PBW basis, with exact
// (GaussRat) or floating (complex<double>) coefficients. The rewrite path is
// scalar-independent; only the arithmetic differs.
template <class S>
class PBWElement {
 public:
  using Terms = std::map<Word, S>;

  PBWElement() : rs_(nullptr) {}
  explicit PBWElement(const RootSystem& rs) : rs_(&rs) {}

  static PBWElement one(const RootSystem& rs) {
    PBWElement u(rs);
    u.terms_[Word{}] = scalar_traits<S>::one();
    return u;
  }
  static PBWElement letter(const RootSystem& rs, Letter l, S coeff = scalar_traits<S>::one()) {
    PBWElement u(rs);
    u.add_word(Word{l}, coeff);
    return u;
  }
  // normal-orders an arbitrary word
  static PBWElement word(const RootSystem& rs, const Word& w,
                         S coeff = scalar_traits<S>::one(),
                         RewriteStrategy strat = RewriteStrategy::FirstDescent,
                         std::mt19937_64* rng = nullptr) {
    PBWElement u(rs);
    u.add_word(w, coeff, strat, rng);
    return u;
  }

  const RootSystem& rs() const {
    assert(rs_);
    return *rs_;
  }
  bool is_zero() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }

  int degree() const {
    int d = 0;
    for (const auto& [w, c] : terms_) d = std::max<int>(d, static_cast<int>(w.size()));
    return d;
  }

  // worklist rewrite: swap the chosen descent and spawn the bracket terms
  void add_word(Word w, S coeff, RewriteStrategy strat = RewriteStrategy::FirstDescent,
                std::mt19937_64* rng = nullptr) {
    if (scalar_traits<S>::is_zero(coeff)) return;
    std::vector<std::pair<Word, S>> stack;
    stack.emplace_back(std::move(w), std::move(coeff));
    while (!stack.empty()) {
      auto [cur, c] = std::move(stack.back());
      stack.pop_back();
      if (static_cast<int>(cur.size()) > pbw_degree_bound())
        throw ResourceError("PBW degree bound exceeded (" + std::to_string(cur.size()) + " > " +
                            std::to_string(pbw_degree_bound()) + ")");
      int i = detail::pick_descent(cur, strat, rng);
      if (i < 0) {
        auto [it, fresh] = terms_.try_emplace(std::move(cur), c);
        if (!fresh) {
          it->second += c;
          if (scalar_traits<S>::is_zero(it->second)) terms_.erase(it);
        }
        continue;
      }
      const auto& br = rs_->bracket(cur[i], cur[i + 1]);
      for (const auto& t : br) {
        Word spawn;
        spawn.reserve(cur.size() - 1);
        spawn.insert(spawn.end(), cur.begin(), cur.begin() + i);
        spawn.push_back(t.x);
        spawn.insert(spawn.end(), cur.begin() + i + 2, cur.end());
        stack.emplace_back(std::move(spawn), c * scalar_traits<S>::from_int(t.coeff));
      }
      std::swap(cur[i], cur[i + 1]);
      stack.emplace_back(std::move(cur), std::move(c));
    }
  }

  void add_term(const Word& canonical, const S& c) {
    assert(word_is_canonical(canonical));
    auto [it, fresh] = terms_.try_emplace(canonical, c);
    if (!fresh) {
      it->second += c;
      if (scalar_traits<S>::is_zero(it->second)) terms_.erase(it);
    }
  }

  PBWElement& operator+=(const PBWElement& o) {
    merge_from(o);
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
  }
  PBWElement& operator-=(const PBWElement& o) {
    merge_from(o);
    for (const auto& [w, c] : o.terms_) add_term(w, -c);
    return *this;
  }
  friend PBWElement operator+(PBWElement a, const PBWElement& b) { return a += b; }
  friend PBWElement operator-(PBWElement a, const PBWElement& b) { return a -= b; }

  PBWElement operator*(const S& s) const {
    PBWElement out(*this);
    if (scalar_traits<S>::is_zero(s)) return PBWElement(rs());
    for (auto& [w, c] : out.terms_) c *= s;
    return out;
  }

  PBWElement operator*(const PBWElement& o) const {
    assert(rs_ == o.rs_ || is_zero() || o.is_zero());
    PBWElement out(rs());
    for (const auto& [w1, c1] : terms_)
      for (const auto& [w2, c2] : o.terms_) {
        Word w = w1;
        w.insert(w.end(), w2.begin(), w2.end());
        out.add_word(std::move(w), c1 * c2);
      }
    return out;
  }

  friend bool operator==(const PBWElement& a, const PBWElement& b) {
    return a.terms_ == b.terms_;
  }

  template <class T, class F>
  PBWElement<T> map_scalars(const RootSystem& rs, F&& f) const {
    PBWElement<T> out(rs);
    for (const auto& [w, c] : terms_) out.add_term(w, f(c));
    return out;
  }

 private:
  void merge_from(const PBWElement& o) {
    if (!rs_) rs_ = o.rs_;
    assert(!o.rs_ || rs_ == o.rs_);
  }
  const RootSystem* rs_;
  Terms terms_;
};

using PBWExact = PBWElement<GaussRat>;
using PBWComplex = PBWElement<std::complex<double>>;

// Polynomial in the rank commuting Cartan coordinates; the image of the
// Cartan projection. Keys are exponent vectors.
template <class S>
class HPolynomial {
 public:
  using Terms = std::map<std::vector<int>, S>;
  HPolynomial() = default;
  explicit HPolynomial(int rank) : rank_(rank) {}

  void add(const std::vector<int>& expo, const S& c) {
    auto [it, fresh] = terms_.try_emplace(expo, c);
    if (!fresh) {
      it->second += c;
      if (scalar_traits<S>::is_zero(it->second)) terms_.erase(it);
    }
  }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (int x : e) s += x;
      d = std::max(d, s);
    }
    return d;
  }

  S evaluate(const std::vector<S>& x) const {
    S acc = scalar_traits<S>::zero();
    for (const auto& [e, c] : terms_) {
      S t = c;
      for (size_t i = 0; i < e.size(); ++i)
        for (int k = 0; k < e[i]; ++k) t *= x[i];
      acc += t;
    }
    return acc;
  }

  // coefficient functions of u0(t*lam) as a polynomial in t: the degree-m
  // homogeneous part evaluated at lam
  std::vector<S> homogeneous_values(const std::vector<S>& lam) const {
    std::vector<S> vals;
    for (const auto& [e, c] : terms_) {
      int d = 0;
      for (int x : e) d += x;
      if (static_cast<int>(vals.size()) <= d) vals.resize(d + 1, scalar_traits<S>::zero());
      S t = c;
      for (size_t i = 0; i < e.size(); ++i)
        for (int k = 0; k < e[i]; ++k) t *= lam[i];
      vals[d] += t;
    }
    return vals;
  }

  friend bool operator==(const HPolynomial& a, const HPolynomial& b) {
    return a.terms_ == b.terms_;
  }

 private:
  int rank_ = 0;
  Terms terms_;
};

// Cartan projection along lowering*U + U*raising: in the PBW basis this
// keeps exactly the pure-Cartan monomials.
template <class S>
HPolynomial<S> hc_project(const PBWElement<S>& u) {
  HPolynomial<S> out(u.rs().rank());
  for (const auto& [w, c] : u.terms()) {
    bool cartan_only = true;
    for (const Letter& l : w)
      if (l.kind != LetterKind::H) {
        cartan_only = false;
        break;
      }
    if (!cartan_only) continue;
    std::vector<int> expo(u.rs().rank(), 0);
    for (const Letter& l : w) expo[l.index] += 1;
    out.add(expo, c);
  }
  return out;
}

template <class S>
std::vector<S> weight_scalars(const RootSystem& rs, const Weight& lam) {
  std::vector<S> x;
  x.reserve(rs.rank());
  for (const auto& c : lam.c) x.push_back(scalar_traits<S>::from_rat(c));
  return x;
}

// phi_lam(u): Cartan part of the normal-ordered form evaluated at lam.
template <class S>
S phi_lambda(const PBWElement<S>& u, const Weight& lam) {
  return hc_project(u).evaluate(weight_scalars<S>(u.rs(), lam));
}

// Antiautomorphism X -> -X (reverses every word and flips the sign per letter).
template <class S>
PBWElement<S> pbw_check(const PBWElement<S>& u) {
  PBWElement<S> out(u.rs());
  for (const auto& [w, c] : u.terms()) {
    Word rev(w.rbegin(), w.rend());
    S s = (w.size() % 2) ? -c : c;
    out.add_word(std::move(rev), s);
  }
  return out;
}

// Antilinear automorphism of the compact structure: E -> -F, F -> -E,
// H -> -H, coefficients conjugated.
template <class S>
PBWElement<S> pbw_theta(const PBWElement<S>& u) {
  PBWElement<S> out(u.rs());
  for (const auto& [w, c] : u.terms()) {
    Word img;
    img.reserve(w.size());
    for (const Letter& l : w) {
      Letter m = l;
      if (l.kind == LetterKind::E) m.kind = LetterKind::F;
      else if (l.kind == LetterKind::F)
        m.kind = LetterKind::E;
      img.push_back(m);
    }
    S s = scalar_traits<S>::conj(c);
    if (w.size() % 2) s = -s;
    out.add_word(std::move(img), s);
  }
  return out;
}

// Linear antiautomorphism swapping E and F and fixing the Cartan; the
// transpose that makes the highest-weight contravariant form contravariant.
template <class S>
PBWElement<S> pbw_transpose(const PBWElement<S>& u) {
  PBWElement<S> out(u.rs());
  for (const auto& [w, c] : u.terms()) {
    Word img;
    img.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      Letter m = *it;
      if (m.kind == LetterKind::E) m.kind = LetterKind::F;
      else if (m.kind == LetterKind::F)
        m.kind = LetterKind::E;
      img.push_back(m);
    }
    out.add_word(std::move(img), c);
  }
  return out;
}

// --- symmetric algebra ---------------------------------------------------

// Polynomial on the dual of the algebra: commuting variables indexed by the
// Chevalley basis. Monomial keys are sorted index multisets.
template <class S>
class SymPolynomial {
 public:
  using Mono = std::vector<int16_t>;  // sorted basis indices, repetition = power
  using Terms = std::map<Mono, S>;

  SymPolynomial() : rs_(nullptr) {}
  explicit SymPolynomial(const RootSystem& rs) : rs_(&rs) {}

  static SymPolynomial variable(const RootSystem& rs, int basis_index,
                                S coeff = scalar_traits<S>::one()) {
    SymPolynomial p(rs);
    p.add(Mono{static_cast<int16_t>(basis_index)}, coeff);
    return p;
  }
  static SymPolynomial constant(const RootSystem& rs, S c) {
    SymPolynomial p(rs);
    p.add(Mono{}, c);
    return p;
  }

  const RootSystem& rs() const {
    assert(rs_);
    return *rs_;
  }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max<int>(d, static_cast<int>(m.size()));
    return d;
  }

  void add(Mono m, const S& c) {
    assert(std::is_sorted(m.begin(), m.end()));
    auto [it, fresh] = terms_.try_emplace(std::move(m), c);
    if (!fresh) {
      it->second += c;
      if (scalar_traits<S>::is_zero(it->second)) terms_.erase(it);
    }
  }

  SymPolynomial& operator+=(const SymPolynomial& o) {
    if (!rs_) rs_ = o.rs_;
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  SymPolynomial& operator-=(const SymPolynomial& o) {
    if (!rs_) rs_ = o.rs_;
    for (const auto& [m, c] : o.terms_) add(m, -c);
    return *this;
  }
  friend SymPolynomial operator+(SymPolynomial a, const SymPolynomial& b) { return a += b; }
  friend SymPolynomial operator-(SymPolynomial a, const SymPolynomial& b) { return a -= b; }

  SymPolynomial operator*(const S& s) const {
    SymPolynomial out(rs());
    if (scalar_traits<S>::is_zero(s)) return out;
    for (const auto& [m, c] : terms_) out.terms_[m] = c * s;
    return out;
  }

  SymPolynomial operator*(const SymPolynomial& o) const {
    SymPolynomial out(rs());
    for (const auto& [m1, c1] : terms_)
      for (const auto& [m2, c2] : o.terms_) {
        Mono m;
        m.reserve(m1.size() + m2.size());
        std::merge(m1.begin(), m1.end(), m2.begin(), m2.end(), std::back_inserter(m));
        out.add(std::move(m), c1 * c2);
      }
    return out;
  }

  friend bool operator==(const SymPolynomial& a, const SymPolynomial& b) {
    return a.terms_ == b.terms_;
  }

  SymPolynomial derivative(int basis_index) const {
    SymPolynomial out(rs());
    for (const auto& [m, c] : terms_) {
      int mult = static_cast<int>(std::count(m.begin(), m.end(), basis_index));
      if (!mult) continue;
      Mono dm = m;
      dm.erase(std::find(dm.begin(), dm.end(), static_cast<int16_t>(basis_index)));
      out.add(std::move(dm), c * scalar_traits<S>::from_int(mult));
    }
    return out;
  }

  // substitute x_a -> sum_b M[b][a] x_b (linear change of variables)
  template <class T>
  SymPolynomial<T> linear_substitute(const std::vector<std::vector<T>>& m) const;

  // evaluate at a point given by the vector of variable values
  std::complex<double> evaluate(const std::vector<std::complex<double>>& x) const {
    std::complex<double> acc = 0.0;
    for (const auto& [mono, c] : terms_) {
      std::complex<double> prod = 1.0;
      for (int16_t v : mono) prod *= x[v];
      acc += scalar_traits<S>::to_complex(c) * prod;
    }
    return acc;
  }

 private:
  const RootSystem* rs_;
  Terms terms_;
};

template <class S>
template <class T>
SymPolynomial<T> SymPolynomial<S>::linear_substitute(const std::vector<std::vector<T>>& m) const {
  SymPolynomial<T> out(rs());
  const int d = rs().dim();
  for (const auto& [mono, c] : terms_) {
    SymPolynomial<T> term = SymPolynomial<T>::constant(
        rs(), [&] {
          if constexpr (std::is_same_v<T, std::complex<double>>)
            return scalar_traits<S>::to_complex(c);
          else
            return c;
        }());
    for (int16_t v : mono) {
      SymPolynomial<T> lin(rs());
      for (int b = 0; b < d; ++b)
        if (!scalar_traits<T>::is_zero(m[b][v]))
          lin += SymPolynomial<T>::variable(rs(), b, m[b][v]);
      term = term * lin;
    }
    out += term;
  }
  return out;
}

// Kirillov bracket on the symmetric algebra: {x_a, x_b} = [X_a, X_b]~,
// extended as a biderivation.
template <class S>
SymPolynomial<S> poisson_bracket(const SymPolynomial<S>& p, const SymPolynomial<S>& q) {
  const RootSystem& rs = p.rs();
  SymPolynomial<S> out(rs);
  std::vector<int> pvars, qvars;
  for (int v = 0; v < rs.dim(); ++v) {
    for (const auto& [m, c] : p.terms())
      if (std::binary_search(m.begin(), m.end(), v)) {
        pvars.push_back(v);
        break;
      }
    for (const auto& [m, c] : q.terms())
      if (std::binary_search(m.begin(), m.end(), v)) {
        qvars.push_back(v);
        break;
      }
  }
  for (int a : pvars)
    for (int b : qvars) {
      const auto& br = rs.bracket(rs.basis_to_letter(a), rs.basis_to_letter(b));
      if (br.empty()) continue;
      SymPolynomial<S> lin(rs);
      for (const auto& t : br)
        lin += SymPolynomial<S>::variable(rs, rs.letter_to_basis(t.x),
                                          scalar_traits<S>::from_int(t.coeff));
      out += p.derivative(a) * q.derivative(b) * lin;
    }
  return out;
}

// Commutative image of the degree-d part (PBW monomials of that exact degree).
template <class S>
SymPolynomial<S> commutative_image_at_degree(const PBWElement<S>& u, int d) {
  SymPolynomial<S> out(u.rs());
  for (const auto& [w, c] : u.terms()) {
    if (static_cast<int>(w.size()) != d) continue;
    typename SymPolynomial<S>::Mono m;
    m.reserve(w.size());
    for (const Letter& l : w) m.push_back(static_cast<int16_t>(u.rs().letter_to_basis(l)));
    std::sort(m.begin(), m.end());
    out.add(std::move(m), c);
  }
  return out;
}

template <class S>
SymPolynomial<S> principal_symbol(const PBWElement<S>& u) {
  return commutative_image_at_degree(u, u.degree());
}

// Symmetrization S(g) -> U(g): each monomial averages over all orderings of
// its letters. Right inverse of the principal symbol on homogeneous input.
template <class S>
PBWElement<S> symmetrize(const SymPolynomial<S>& p) {
  const RootSystem& rs = p.rs();
  PBWElement<S> out(rs);
  for (const auto& [mono, c] : p.terms()) {
    Word w;
    w.reserve(mono.size());
    for (int16_t v : mono) w.push_back(rs.basis_to_letter(v));
    std::sort(w.begin(), w.end());
    // (1/d!) * sum over all d! orderings = (prod mult!) / d! * sum over
    // distinct orderings
    Rat factor(1);
    {
      mpz_class num = 1, den = 1;
      size_t i = 0;
      while (i < w.size()) {
        size_t j = i;
        while (j < w.size() && w[j] == w[i]) ++j;
        for (size_t k = 2; k <= j - i; ++k) num *= static_cast<long>(k);
        i = j;
      }
      for (size_t k = 2; k <= w.size(); ++k) den *= static_cast<long>(k);
      factor = Rat(num) / Rat(den);
    }
    S scale = c * scalar_traits<S>::from_rat(factor);
    do {
      out.add_word(w, scale);
    } while (std::next_permutation(w.begin(), w.end()));
  }
  return out;
}

// Quadratic Casimir: sum over Killing-dual basis pairs.
PBWExact casimir_element(const RootSystem& rs);
SymPolynomial<GaussRat> casimir_polynomial(const RootSystem& rs);

// Exact Casimir eigenvalue (lam, lam + 2 rho) under the Killing-induced form.
Rat casimir_eigenvalue(const RootSystem& rs, const Weight& lam);

// --- printing ------------------------------------------------------------

std::string gauss_rat_str(const GaussRat& c);
std::string letter_str(const RootSystem& rs, const Letter& l);

template <class S>
std::string monomial_str(const RootSystem& rs, const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  size_t i = 0;
  while (i < w.size()) {
    size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    if (!s.empty()) s += " ";
    s += letter_str(rs, w[i]);
    if (j - i > 1) s += "^" + std::to_string(j - i);
    i = j;
  }
  return s;
}

std::string pbw_str(const PBWExact& u);

}  // namespace berezin
