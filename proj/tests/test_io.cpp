#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "berezin/errors.hpp"
#include "berezin/io.hpp"
#include "berezin/orbit.hpp"

using namespace berezin;
using Cplx = std::complex<double>;

TEST_CASE("rational literals round-trip") {
  CHECK(parse_rat("3/4") == make_rat(3, 4));
  CHECK(parse_rat("-2") == Rat(-2));
  CHECK(parse_rat("+5") == Rat(5));
  CHECK(parse_rat("6/4") == make_rat(3, 2));
  CHECK(rat_str(parse_rat("6/4")) == "3/2");

  CHECK_THROWS_AS(parse_rat(""), ConfigError);
  CHECK_THROWS_AS(parse_rat("x"), ConfigError);
  CHECK_THROWS_AS(parse_rat("1/"), ConfigError);
  CHECK_THROWS_AS(parse_rat("1.5"), ConfigError);
  CHECK_THROWS_AS(parse_rat("1/2/3"), ConfigError);
}

TEST_CASE("weight text round-trips with and without the wrapper") {
  Weight lam(2);
  lam.c[0] = Rat(1);
  lam.c[1] = make_rat(-3, 2);
  std::string s = weight_text(lam);
  CHECK(s == "w[1,-3/2]");
  CHECK(parse_weight_text(s, 2) == lam);
  CHECK(parse_weight_text("1,-3/2", 2) == lam);
  CHECK(parse_weight_text("[1, -3/2]", 2) == lam);

  CHECK_THROWS_WITH_AS(parse_weight_text("1,2,3", 2), doctest::Contains("expected 2"),
                       ConfigError);
  CHECK_THROWS_AS(parse_weight_text("w[1,b]", 2), ConfigError);
}

TEST_CASE("element text matches the documented shape") {
  RootSystem rs = RootSystem::build("A2");
  RootVec a1, a2, a12;
  a1.m = {1, 0};
  a2.m = {0, 1};
  a12.m = {1, 1};
  Letter F1 = rs.letter_F(rs.positive_index(a1));
  Letter H1 = rs.letter_H(0);
  Letter H2 = rs.letter_H(1);
  Letter E12 = rs.letter_E(rs.positive_index(a12));

  PBWExact u = PBWExact::word(rs, {F1, F1, H1, E12},
                              GaussRat(make_rat(3, 2), make_rat(1, 2)));
  u += PBWExact::word(rs, {H2}, GaussRat(2));
  CHECK(pbw_text(u) == "3/2+1/2 i * F[a1]^2 H[a1] E[a1+a2] + 2 * H[a2]");
  CHECK(parse_pbw_text(rs, pbw_text(u)) == u);

  CHECK(pbw_text(PBWExact(rs)) == "0");
  CHECK(parse_pbw_text(rs, "0").is_zero());

  PBWExact c = PBWExact::one(rs) * GaussRat(make_rat(-1, 2), Rat(1));
  CHECK(pbw_text(c) == "-1/2-i");
  CHECK(parse_pbw_text(rs, "-1/2-i") == c);

  // constant terms print last so a trailing real part cannot be read as the
  // imaginary half of the preceding coefficient
  PBWExact mixed = PBWExact::word(rs, {H1}, GaussRat::unit_im()) + PBWExact::one(rs) * GaussRat(3);
  CHECK(pbw_text(mixed) == "i * H[a1] + 3");
  CHECK(parse_pbw_text(rs, pbw_text(mixed)) == mixed);
}

TEST_CASE("element text survives random round-trips") {
  for (const char* type : {"A1", "A2"}) {
    RootSystem rs = RootSystem::build(type);
    std::vector<Letter> alphabet;
    for (int p = 0; p < rs.num_positive(); ++p) {
      alphabet.push_back(rs.letter_F(p));
      alphabet.push_back(rs.letter_E(p));
    }
    for (int j = 0; j < rs.rank(); ++j) alphabet.push_back(rs.letter_H(j));

    std::mt19937_64 rng(20260814);
    std::uniform_int_distribution<int> len(0, 4), pick(0, static_cast<int>(alphabet.size()) - 1);
    std::uniform_int_distribution<int> num(-3, 3), den(1, 3);
    for (int it = 0; it < 40; ++it) {
      PBWExact u(rs);
      int terms = 1 + it % 3;
      for (int t = 0; t < terms; ++t) {
        Word w;
        int l = len(rng);
        for (int j = 0; j < l; ++j) w.push_back(alphabet[pick(rng)]);
        GaussRat c(make_rat(num(rng), den(rng)), make_rat(num(rng), den(rng)));
        if (c.is_zero()) c = GaussRat(1);
        u += PBWExact::word(rs, w, c);
      }
      CAPTURE(pbw_text(u));
      CHECK(parse_pbw_text(rs, pbw_text(u)) == u);
    }
  }
}

TEST_CASE("element parsing names bad input") {
  RootSystem rs1 = RootSystem::build("A1");
  CHECK_THROWS_WITH_AS(parse_pbw_text(rs1, "E[a2]"), doctest::Contains("bad root name"),
                       ConfigError);
  RootSystem rs2 = RootSystem::build("A2");
  CHECK_THROWS_WITH_AS(parse_pbw_text(rs2, "E[2a1]"), doctest::Contains("not a positive root"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_pbw_text(rs1, "H[a1+a2]"), doctest::Contains("simple root"),
                       ConfigError);
  CHECK_THROWS_AS(parse_pbw_text(rs1, "2 * * H[a1]"), ConfigError);
  CHECK_THROWS_AS(parse_pbw_text(rs1, "H[a1"), ConfigError);
  CHECK_THROWS_AS(parse_pbw_text(rs1, "H[a1]^0"), ConfigError);
  CHECK_THROWS_AS(parse_pbw_text(rs1, "H[a1] H"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_pbw_text(rs1, "3 % 4"), doctest::Contains("'%'"), ConfigError);
  CHECK_THROWS_AS(parse_pbw_text(rs1, "2 2"), ConfigError);
}

TEST_CASE("function expressions build the expected polynomials") {
  RootSystem rs = RootSystem::build("A1");
  int h = rs.letter_to_basis(rs.letter_H(0));
  int e = rs.letter_to_basis(rs.letter_E(0));
  int f = rs.letter_to_basis(rs.letter_F(0));

  auto X = [&](int b) { return SymPolynomial<Cplx>::variable(rs, b); };
  auto C = [&](Cplx c) { return SymPolynomial<Cplx>::constant(rs, c); };

  CHECK(parse_function(rs, "z") == X(h));
  CHECK(parse_function(rs, "h1") == X(h));
  CHECK(parse_function(rs, "z^2 - (1+i)*h1 + 2/3") ==
        X(h) * X(h) + X(h) * Cplx(-1.0, -1.0) + C(2.0 / 3.0));
  CHECK(parse_function(rs, "e1*f1 + 0.5") == X(e) * X(f) + C(0.5));
  CHECK(parse_function(rs, "-z") == X(h) * Cplx(-1.0));
  CHECK(parse_function(rs, "z^0") == C(1.0));
  CHECK(parse_function(rs, "2*i*z") == X(h) * Cplx(0.0, 2.0));

  RootSystem rs2 = RootSystem::build("A2");
  CHECK(parse_function(rs2, "e3*f3") ==
        SymPolynomial<Cplx>::variable(rs2, rs2.letter_to_basis(rs2.letter_E(2))) *
            SymPolynomial<Cplx>::variable(rs2, rs2.letter_to_basis(rs2.letter_F(2))));

  CHECK_THROWS_WITH_AS(parse_function(rs, "e2"), doctest::Contains("'e2'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_function(rs, "q + 1"), doctest::Contains("'q'"), ConfigError);
  CHECK_THROWS_AS(parse_function(rs, "z^-1"), ConfigError);
  CHECK_THROWS_AS(parse_function(rs, "(z"), ConfigError);
  CHECK_THROWS_AS(parse_function(rs, "z z"), ConfigError);
  CHECK_THROWS_AS(parse_function(rs, ""), ConfigError);
}

TEST_CASE("compact words print generator letters compactly") {
  CHECK(compact_word_text(CompactGroupElement::identity()) == "e");

  CompactGroupElement g = CompactGroupElement::generator(3, 1, 0.5);
  CHECK(compact_word_text(g) == "g1:0.5");

  CompactGroupElement two = g * CompactGroupElement::generator(3, 0, -0.25);
  CHECK(compact_word_text(two) == "g1:0.5;g0:-0.25");

  CompactLetter mix;
  mix.coeffs = Eigen::Vector3d(1.0, 2.0, 0.0);
  mix.angle = 1.0;
  CompactGroupElement v;
  v.word.push_back(mix);
  CHECK(compact_word_text(v) == "v1,2,0:1");
}

TEST_CASE("quadrature sets replay through json") {
  RootSystem rs = RootSystem::build("A2");
  CompactStructure cs(rs);
  QuadratureSet q = haar_monte_carlo(cs, 5, 99);

  nlohmann::json j = quadrature_to_json(q);
  QuadratureSet back = quadrature_from_json(j);
  CHECK(back.mode == q.mode);
  CHECK(back.seed == q.seed);
  CHECK(back.max_degree == q.max_degree);
  REQUIRE(back.samples.size() == q.samples.size());
  for (size_t s = 0; s < q.samples.size(); ++s) {
    CHECK(back.samples[s].weight == q.samples[s].weight);
    REQUIRE(back.samples[s].k.word.size() == q.samples[s].k.word.size());
    for (size_t l = 0; l < q.samples[s].k.word.size(); ++l) {
      CHECK(back.samples[s].k.word[l].angle == q.samples[s].k.word[l].angle);
      CHECK(back.samples[s].k.word[l].coeffs == q.samples[s].k.word[l].coeffs);
    }
  }

  // serialization through text must not perturb the points
  QuadratureSet text_back = quadrature_from_json(nlohmann::json::parse(j.dump()));
  for (size_t s = 0; s < q.samples.size(); ++s)
    CHECK(text_back.samples[s].k.word[0].angle == q.samples[s].k.word[0].angle);

  CHECK_THROWS_WITH_AS(quadrature_from_json(nlohmann::json{{"mode", "x"}}),
                       doctest::Contains("bad quadrature file"), ConfigError);
}

TEST_CASE("root datum json lists the classical data") {
  RootSystem rs = RootSystem::build("A2");
  nlohmann::json j = root_datum_json(rs);
  CHECK(j["type"] == "A2");
  CHECK(j["rank"] == 2);
  CHECK(j["dim"] == 8);
  CHECK(j["num_positive_roots"] == 3);
  CHECK(j["weyl_order"] == 6);
  CHECK(j["cartan_matrix"][0][0] == 2);
  CHECK(j["cartan_matrix"][0][1] == -1);
  std::vector<std::string> roots = j["positive_roots"].get<std::vector<std::string>>();
  CHECK(std::find(roots.begin(), roots.end(), "a1+a2") != roots.end());
  CHECK(j["rho"] == "w[1,1]");
}

TEST_CASE("matrices serialize with split parts") {
  Eigen::MatrixXcd m(1, 2);
  m(0, 0) = Cplx(1.0, -2.0);
  m(0, 1) = Cplx(0.0, 0.25);
  nlohmann::json j = matrix_to_json(m);
  CHECK(j["rows"] == 1);
  CHECK(j["cols"] == 2);
  CHECK(j["re"][0][0] == 1.0);
  CHECK(j["im"][0][0] == -2.0);
  CHECK(j["im"][0][1] == 0.25);
}
