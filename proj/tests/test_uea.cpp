#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "berezin/pbw.hpp"

using namespace berezin;

namespace {

Letter rand_letter(const RootSystem& rs, std::mt19937_64& rng) {
  int b = static_cast<int>(rng() % rs.dim());
  return rs.basis_to_letter(b);
}

PBWExact rand_element(const RootSystem& rs, std::mt19937_64& rng, int max_terms, int max_len) {
  PBWExact u(rs);
  int nterms = 1 + static_cast<int>(rng() % max_terms);
  for (int t = 0; t < nterms; ++t) {
    Word w;
    int len = static_cast<int>(rng() % (max_len + 1));
    for (int i = 0; i < len; ++i) w.push_back(rand_letter(rs, rng));
    long re = static_cast<long>(rng() % 7) - 3;
    long im = static_cast<long>(rng() % 3) - 1;
    GaussRat c{Rat(re), Rat(im)};
    if (c.is_zero()) c = GaussRat(1);
    u.add_word(std::move(w), c);
  }
  return u;
}

}  // namespace

TEST_CASE("sl2 reordering: EF = FE + H") {
  auto rs = RootSystem::build("A1");
  auto E = PBWExact::letter(rs, rs.letter_E(0));
  auto F = PBWExact::letter(rs, rs.letter_F(0));
  auto H = PBWExact::letter(rs, rs.letter_H(0));
  auto prod = E * F;
  auto expected = F * E + H;
  CHECK(prod == expected);
  CHECK(pbw_str(prod) == "1 * F[a1] E[a1] + 1 * H[a1]");
}

TEST_CASE("Cartan projection keeps the pure Cartan monomials") {
  auto rs = RootSystem::build("A1");
  auto E = PBWExact::letter(rs, rs.letter_E(0));
  auto F = PBWExact::letter(rs, rs.letter_F(0));
  auto H = PBWExact::letter(rs, rs.letter_H(0));

  // E_a F_a projects to H_a (the linear term of FE + H)
  auto hc1 = hc_project(E * F);
  CHECK(hc1.evaluate({GaussRat(5)}) == GaussRat(5));

  // H^2 + E F projects to H^2 + H
  auto hc2 = hc_project(H * H + E * F);
  for (long n : {0L, 1L, 2L, 7L, -3L}) {
    CHECK(hc2.evaluate({GaussRat(n)}) == GaussRat(n * n + n));
    Weight lam{{Rat(n)}};
    CHECK(phi_lambda(H * H + E * F, lam) == GaussRat(n * n + n));
  }
}

TEST_CASE("normal form is independent of the rewrite strategy") {
  std::mt19937_64 rng(20260814);
  for (const char* type : {"A2", "B2"}) {
    auto rs = RootSystem::build(type);
    for (int trial = 0; trial < 60; ++trial) {
      Word w;
      int len = 2 + static_cast<int>(rng() % 4);
      for (int i = 0; i < len; ++i) w.push_back(rand_letter(rs, rng));
      auto first = PBWExact::word(rs, w, GaussRat(1), RewriteStrategy::FirstDescent);
      auto last = PBWExact::word(rs, w, GaussRat(1), RewriteStrategy::LastDescent);
      auto random = PBWExact::word(rs, w, GaussRat(1), RewriteStrategy::RandomDescent, &rng);
      CHECK(first == last);
      CHECK(first == random);
    }
  }
}

TEST_CASE("product is associative") {
  std::mt19937_64 rng(7);
  auto rs = RootSystem::build("A2");
  for (int trial = 0; trial < 25; ++trial) {
    auto u = rand_element(rs, rng, 2, 2);
    auto v = rand_element(rs, rng, 2, 2);
    auto w = rand_element(rs, rng, 2, 1);
    CHECK((u * v) * w == u * (v * w));
  }
}

TEST_CASE("check involution is an involutive antiautomorphism") {
  std::mt19937_64 rng(11);
  auto rs = RootSystem::build("A2");
  for (int b = 0; b < rs.dim(); ++b) {
    auto x = PBWExact::letter(rs, rs.basis_to_letter(b));
    CHECK(pbw_check(x) == x * GaussRat(-1));
  }
  for (int trial = 0; trial < 20; ++trial) {
    auto u = rand_element(rs, rng, 2, 2);
    auto v = rand_element(rs, rng, 2, 2);
    CHECK(pbw_check(u * v) == pbw_check(v) * pbw_check(u));
    CHECK(pbw_check(pbw_check(u)) == u);
  }
}

TEST_CASE("theta is an antilinear involutive automorphism with theta(E) = -F") {
  std::mt19937_64 rng(13);
  auto rs = RootSystem::build("A2");
  for (int p = 0; p < rs.num_positive(); ++p) {
    auto E = PBWExact::letter(rs, rs.letter_E(p));
    auto F = PBWExact::letter(rs, rs.letter_F(p));
    CHECK(pbw_theta(E) == F * GaussRat(-1));
    CHECK(pbw_theta(F) == E * GaussRat(-1));
  }
  for (int i = 0; i < rs.rank(); ++i) {
    auto H = PBWExact::letter(rs, rs.letter_H(i));
    CHECK(pbw_theta(H) == H * GaussRat(-1));
  }
  for (int trial = 0; trial < 20; ++trial) {
    auto u = rand_element(rs, rng, 2, 2);
    auto v = rand_element(rs, rng, 2, 2);
    CHECK(pbw_theta(u * v) == pbw_theta(u) * pbw_theta(v));
    CHECK(pbw_theta(pbw_theta(u)) == u);
    GaussRat c{Rat(2), Rat(3)};
    CHECK(pbw_theta(u * c) == pbw_theta(u) * c.conj());
  }
}

TEST_CASE("transpose swaps raising and lowering and reverses products") {
  std::mt19937_64 rng(17);
  auto rs = RootSystem::build("B2");
  for (int p = 0; p < rs.num_positive(); ++p) {
    auto E = PBWExact::letter(rs, rs.letter_E(p));
    auto F = PBWExact::letter(rs, rs.letter_F(p));
    CHECK(pbw_transpose(E) == F);
    CHECK(pbw_transpose(F) == E);
  }
  for (int trial = 0; trial < 20; ++trial) {
    auto u = rand_element(rs, rng, 2, 2);
    auto v = rand_element(rs, rng, 2, 2);
    CHECK(pbw_transpose(u * v) == pbw_transpose(v) * pbw_transpose(u));
    CHECK(pbw_transpose(pbw_transpose(u)) == u);
  }
}

TEST_CASE("degree bound guards the rewrite engine") {
  auto rs = RootSystem::build("A2");
  int saved = pbw_degree_bound();
  pbw_degree_bound() = 3;
  auto E = PBWExact::letter(rs, rs.letter_E(0));
  auto F = PBWExact::letter(rs, rs.letter_F(0));
  CHECK_THROWS_AS((E * E) * (F * F), ResourceError);
  pbw_degree_bound() = saved;
}

TEST_CASE("symmetrization inverts the principal symbol") {
  auto rs = RootSystem::build("A1");
  int vF = rs.letter_to_basis(rs.letter_F(0));
  int vH = rs.letter_to_basis(rs.letter_H(0));
  int vE = rs.letter_to_basis(rs.letter_E(0));
  auto xE = SymPolynomial<GaussRat>::variable(rs, vE);
  auto xF = SymPolynomial<GaussRat>::variable(rs, vF);
  auto xH = SymPolynomial<GaussRat>::variable(rs, vH);

  // beta(x_E x_F) = (EF + FE)/2 = FE + H/2
  auto F = PBWExact::letter(rs, rs.letter_F(0));
  auto E = PBWExact::letter(rs, rs.letter_E(0));
  auto H = PBWExact::letter(rs, rs.letter_H(0));
  CHECK(symmetrize(xE * xF) == F * E + H * GaussRat(Rat(1, 2)));

  // a single repeated letter symmetrizes to the plain power
  CHECK(symmetrize(xE * xE * xE) == E * E * E);

  std::mt19937_64 rng(23);
  for (const char* type : {"A1", "A2"}) {
    auto rs2 = RootSystem::build(type);
    for (int trial = 0; trial < 15; ++trial) {
      // random homogeneous polynomial of degree 1..3
      SymPolynomial<GaussRat> p(rs2);
      int deg = 1 + static_cast<int>(rng() % 3);
      int nterms = 1 + static_cast<int>(rng() % 3);
      for (int t = 0; t < nterms; ++t) {
        SymPolynomial<GaussRat>::Mono m;
        for (int i = 0; i < deg; ++i) m.push_back(static_cast<int16_t>(rng() % rs2.dim()));
        std::sort(m.begin(), m.end());
        long c = static_cast<long>(rng() % 5) - 2;
        if (!c) c = 1;
        p.add(std::move(m), GaussRat(c));
      }
      CHECK(principal_symbol(symmetrize(p)) == p);
    }
  }
}

TEST_CASE("principal symbol is multiplicative") {
  std::mt19937_64 rng(29);
  auto rs = RootSystem::build("A2");
  for (int trial = 0; trial < 20; ++trial) {
    Word w1, w2;
    int l1 = 1 + static_cast<int>(rng() % 3), l2 = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < l1; ++i) w1.push_back(rand_letter(rs, rng));
    for (int i = 0; i < l2; ++i) w2.push_back(rand_letter(rs, rng));
    auto u = PBWExact::word(rs, w1);
    auto v = PBWExact::word(rs, w2);
    CHECK(principal_symbol(u * v) == principal_symbol(u) * principal_symbol(v));
  }
}

TEST_CASE("commutator drops one degree onto the Poisson bracket") {
  std::mt19937_64 rng(31);
  for (const char* type : {"A1", "A2", "B2"}) {
    auto rs = RootSystem::build(type);
    for (int trial = 0; trial < 20; ++trial) {
      Word w1, w2;
      int l1 = 1 + static_cast<int>(rng() % 3), l2 = 1 + static_cast<int>(rng() % 3);
      for (int i = 0; i < l1; ++i) w1.push_back(rand_letter(rs, rng));
      for (int i = 0; i < l2; ++i) w2.push_back(rand_letter(rs, rng));
      auto u = PBWExact::word(rs, w1);
      auto v = PBWExact::word(rs, w2);
      auto comm = u * v - v * u;
      auto lhs = commutative_image_at_degree(comm, l1 + l2 - 1);
      auto rhs = poisson_bracket(principal_symbol(u), principal_symbol(v));
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("Poisson bracket worked example on sl2") {
  auto rs = RootSystem::build("A1");
  int vF = rs.letter_to_basis(rs.letter_F(0));
  int vH = rs.letter_to_basis(rs.letter_H(0));
  int vE = rs.letter_to_basis(rs.letter_E(0));
  auto xE = SymPolynomial<GaussRat>::variable(rs, vE);
  auto xF = SymPolynomial<GaussRat>::variable(rs, vF);
  auto xH = SymPolynomial<GaussRat>::variable(rs, vH);
  // {E~, F~ H~} = H~^2 - 2 E~ F~
  auto lhs = poisson_bracket(xE, xF * xH);
  auto rhs = xH * xH - xE * xF * GaussRat(2);
  CHECK(lhs == rhs);
}

TEST_CASE("Poisson bracket is a biderivation and antisymmetric") {
  std::mt19937_64 rng(37);
  auto rs = RootSystem::build("B2");
  auto rand_poly = [&](int max_deg) {
    SymPolynomial<GaussRat> p(rs);
    int nterms = 1 + static_cast<int>(rng() % 3);
    for (int t = 0; t < nterms; ++t) {
      SymPolynomial<GaussRat>::Mono m;
      int deg = static_cast<int>(rng() % (max_deg + 1));
      for (int i = 0; i < deg; ++i) m.push_back(static_cast<int16_t>(rng() % rs.dim()));
      std::sort(m.begin(), m.end());
      long c = static_cast<long>(rng() % 5) - 2;
      if (!c) c = 1;
      p.add(std::move(m), GaussRat(c));
    }
    return p;
  };
  for (int trial = 0; trial < 15; ++trial) {
    auto p = rand_poly(2), q = rand_poly(2), r = rand_poly(2);
    CHECK(poisson_bracket(p, q) == poisson_bracket(q, p) * GaussRat(-1));
    CHECK(poisson_bracket(p, q * r) ==
          poisson_bracket(p, q) * r + q * poisson_bracket(p, r));
  }
}

TEST_CASE("Casimir element evaluates to (lam, lam + 2 rho)") {
  for (const char* type : {"A1", "A2", "B2"}) {
    auto rs = RootSystem::build(type);
    auto omega = casimir_element(rs);
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 6; ++trial) {
      Weight lam = rs.zero_weight();
      for (int i = 0; i < rs.rank(); ++i) lam.c[i] = Rat(static_cast<long>(rng() % 9) - 4);
      CHECK(phi_lambda(omega, lam) == GaussRat(casimir_eigenvalue(rs, lam)));
    }
  }
  // sl2 spot value: eigenvalue n(n+2)/8 on the (n+1)-dimensional module
  auto a1 = RootSystem::build("A1");
  CHECK(casimir_eigenvalue(a1, Weight{{Rat(3)}}) == Rat(15, 8));
}

TEST_CASE("Casimir polynomial is Poisson central") {
  for (const char* type : {"A1", "A2"}) {
    auto rs = RootSystem::build(type);
    auto c2 = casimir_polynomial(rs);
    for (int b = 0; b < rs.dim(); ++b) {
      auto x = SymPolynomial<GaussRat>::variable(rs, b);
      CHECK(poisson_bracket(c2, x).is_zero());
    }
  }
}

TEST_CASE("Casimir element is central") {
  auto rs = RootSystem::build("A2");
  auto omega = casimir_element(rs);
  for (int b = 0; b < rs.dim(); ++b) {
    auto x = PBWExact::letter(rs, rs.basis_to_letter(b));
    CHECK(omega * x == x * omega);
  }
}
