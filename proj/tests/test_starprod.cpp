#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include <berezin/errors.hpp>
#include <berezin/orbit.hpp>
#include <berezin/pbw.hpp>
#include <berezin/starprod.hpp>
#include <berezin/symbols.hpp>

using namespace berezin;
using Cplx = std::complex<double>;
using Poly = SymPolynomial<Cplx>;

namespace {

Weight make_weight(const RootSystem& rs, std::vector<long> m) {
  Weight lam(rs.rank());
  for (size_t i = 0; i < m.size(); ++i) lam.c[i] = Rat(m[i]);
  return lam;
}

Poly var_of(const RootSystem& rs, Letter l) {
  return Poly::variable(rs, rs.letter_to_basis(l));
}

CompactGroupElement random_element(int dim, std::mt19937_64& rng, int len = 5) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  CompactGroupElement k;
  for (int l = 0; l < len; ++l)
    k = k * CompactGroupElement::generator(dim, static_cast<int>(rng() % dim), angle(rng));
  return k;
}

}  // namespace

TEST_CASE("constant functions quantize to the identity") {
  RootSystem rs = RootSystem::build("A1");
  CompactStructure cs(rs);
  StarFamily fam(cs, make_weight(rs, {1}), rs.weyl_identity(), 2, 7);
  Poly one = Poly::constant(rs, 1.0);
  for (int n : {1, 2, 5}) {
    Quantized q = fam.quantize(one, n);
    CHECK(q.residual < 1e-12);
    CHECK((q.op - Eigen::MatrixXcd::Identity(n + 1, n + 1)).norm() < 1e-10);
  }

  RootSystem rs2 = RootSystem::build("A2");
  CompactStructure cs2(rs2);
  StarFamily fam2(cs2, make_weight(rs2, {1, 0}), rs2.weyl_identity(), 2, 7);
  Quantized q2 = fam2.quantize(Poly::constant(rs2, 1.0), 2);
  CHECK((q2.op - Eigen::MatrixXcd::Identity(6, 6)).norm() < 1e-9);
}

TEST_CASE("linear functions quantize to the scaled generator action") {
  RootSystem rs = RootSystem::build("A1");
  CompactStructure cs(rs);
  Weight om = make_weight(rs, {1});
  StarFamily fam(cs, om, rs.weyl_identity(), 2, 11);
  const Cplx iunit(0.0, 1.0);

  for (int n : {1, 2, 3, 6}) {
    const StarLevel& lvl = fam.level(n);
    for (Letter l : {rs.letter_H(0), rs.letter_E(0), rs.letter_F(0)}) {
      Quantized q = fam.quantize(var_of(rs, l), n);
      Eigen::MatrixXcd expect =
          (iunit / static_cast<double>(n)) * lvl.rep.matrix_numeric(PBWExact::letter(rs, l));
      CHECK(q.residual < 1e-10);
      CHECK((q.op - expect).norm() < 1e-9);
    }
    // weights of the module read off the rescaled Cartan action
    Quantized qh = fam.quantize(var_of(rs, rs.letter_H(0)), n);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(
        (static_cast<double>(n) / iunit) * qh.op);
    std::vector<double> ev;
    for (int j = 0; j <= n; ++j) ev.push_back(eig.eigenvalues()(j).real());
    std::sort(ev.begin(), ev.end());
    for (int j = 0; j <= n; ++j) CHECK(std::abs(ev[j] - (-n + 2 * j)) < 1e-8);
  }
}

TEST_CASE("the casimir polynomial restricts to the orbit radius") {
  RootSystem rs = RootSystem::build("A1");
  CompactStructure cs(rs);
  StarFamily fam(cs, make_weight(rs, {1}), rs.weyl_identity(), 2, 3);
  Poly xh = var_of(rs, rs.letter_H(0));
  Poly xe = var_of(rs, rs.letter_E(0));
  Poly xf = var_of(rs, rs.letter_F(0));
  Poly casimir = xh * xh * Poly::constant(rs, 0.125) + xe * xf * Poly::constant(rs, 0.5);

  Eigen::VectorXcd vals = fam.restrict_holdout(casimir);
  for (int j = 0; j < vals.size(); ++j) CHECK(std::abs(vals(j) - Cplx(-0.125)) < 1e-10);

  for (int n : {1, 3}) {
    Quantized q = fam.quantize(casimir, n);
    CHECK((q.op + 0.125 * Eigen::MatrixXcd::Identity(n + 1, n + 1)).norm() < 1e-8);
    // functions with equal restrictions quantize identically
    StarResult s1 = fam.star(casimir, xh, n);
    StarResult s2 = fam.star(Poly::constant(rs, -0.125), xh, n);
    CHECK((s1.on_holdout.values - s2.on_holdout.values).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("the lowest rank-one star product matches its closed form") {
  RootSystem rs = RootSystem::build("A1");
  CompactStructure cs(rs);
  StarFamily fam(cs, make_weight(rs, {1}), rs.weyl_identity(), 2, 5);
  Poly xh = var_of(rs, rs.letter_H(0));
  Eigen::VectorXcd x = fam.restrict_holdout(xh);

  for (int n : {1, 2, 3, 5, 8, 13}) {
    StarResult s = fam.star(xh, xh, n);
    for (int j = 0; j < x.size(); ++j) {
      Cplx expect = x(j) * x(j) - (1.0 + x(j) * x(j)) / static_cast<double>(n);
      CHECK(std::abs(s.on_holdout.values(j) - expect) < 1e-9);
    }
  }
}

TEST_CASE("unity is the star identity") {
  RootSystem rs = RootSystem::build("A1");
  CompactStructure cs(rs);
  StarFamily fam(cs, make_weight(rs, {1}), rs.weyl_identity(), 2, 19);
  Poly one = Poly::constant(rs, 1.0);
  Poly f = var_of(rs, rs.letter_E(0)) * var_of(rs, rs.letter_F(0));
  Eigen::VectorXcd fv = fam.restrict_holdout(f);
  for (int n : {2, 4}) {
    CHECK((fam.star(one, f, n).on_holdout.values - fv).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK((fam.star(f, one, n).on_holdout.values - fv).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("commutators of linear functions are exact at every level") {
  RootSystem rs = RootSystem::build("A1");
  CompactStructure cs(rs);
  StarFamily fam(cs, make_weight(rs, {1}), rs.weyl_identity(), 2, 23);
  Poly xh = var_of(rs, rs.letter_H(0));
  Poly xe = var_of(rs, rs.letter_E(0));
  Eigen::VectorXcd bracket = fam.restrict_holdout(poisson_bracket(xh, xe));

  for (int n = 1; n <= 6; ++n) {
    StarResult s12 = fam.star(xh, xe, n);
    StarResult s21 = fam.star(xe, xh, n);
    Eigen::VectorXcd lhs =
        static_cast<double>(n) * (s12.on_holdout.values - s21.on_holdout.values);
    CHECK((lhs - Cplx(0.0, 1.0) * bracket).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("scaled weights at halved levels give the same calculus") {
  RootSystem rs = RootSystem::build("A1");
  CompactStructure cs(rs);
  StarFamily fam1(cs, make_weight(rs, {1}), rs.weyl_identity(), 2, 31);
  StarFamily fam2(cs, make_weight(rs, {2}), rs.weyl_identity(), 2, 31);

  CHECK((fam1.level(4).design - fam2.level(2).design).norm() < 1e-10);

  Poly xh = var_of(rs, rs.letter_H(0));
  Poly half = xh * Poly::constant(rs, 0.5);
  Eigen::MatrixXcd a = fam1.quantize(xh, 4).op;
  Eigen::MatrixXcd b = fam2.quantize(half, 2).op;
  CHECK((a - b).norm() < 1e-10);
}

TEST_CASE("scaling limits recover the principal symbol") {
  std::mt19937_64 rng(404);
  std::vector<double> grid{4.0, 8.0, 16.0, 32.0, 64.0};

  SUBCASE("cartan powers at torus points have no lower terms") {
    RootSystem rs = RootSystem::build("A1");
    CompactStructure cs(rs);
    PBWExact h = PBWExact::letter(rs, rs.letter_H(0));
    Weight om = make_weight(rs, {1});
    for (const CompactGroupElement& k :
         {CompactGroupElement::identity(),
          CompactGroupElement::generator(cs.dim(), cs.index_torus(0), 0.8)}) {
      DecayReport rep = scaled_symbol_limit(cs, h * h, om, k, grid);
      CHECK(rep.flat);
      CHECK(std::abs(rep.limit - rep.top_value) < 1e-12);
      CHECK(std::abs(rep.limit - Cplx(1.0)) < 1e-12);
    }
  }

  SUBCASE("a lowering-raising pair decays at first order") {
    RootSystem rs = RootSystem::build("A1");
    CompactStructure cs(rs);
    PBWExact ef = PBWExact::letter(rs, rs.letter_E(0)) * PBWExact::letter(rs, rs.letter_F(0));
    DecayReport rep = scaled_symbol_limit(cs, ef, make_weight(rs, {1}),
                                          CompactGroupElement::identity(), grid);
    CHECK(!rep.flat);
    CHECK(std::abs(rep.limit) < 1e-12);
    CHECK(std::abs(rep.top_value) < 1e-12);
    for (size_t j = 0; j < grid.size(); ++j)
      CHECK(rep.error[j] == doctest::Approx(1.0 / grid[j]).epsilon(1e-10));
    CHECK(rep.slope == doctest::Approx(-1.0).epsilon(1e-6));
  }

  SUBCASE("generic quadratics on the rank-two orbit decay at first order") {
    RootSystem rs = RootSystem::build("A2");
    CompactStructure cs(rs);
    PBWExact u = PBWExact::letter(rs, rs.letter_E(0)) * PBWExact::letter(rs, rs.letter_F(0)) +
                 PBWExact::letter(rs, rs.letter_H(1));
    CompactGroupElement k = random_element(cs.dim(), rng);
    DecayReport rep = scaled_symbol_limit(cs, u, make_weight(rs, {1, 1}), k, grid);
    CHECK(std::abs(rep.limit - rep.top_value) < 1e-9 * (1.0 + std::abs(rep.limit)));
    CHECK(rep.subleading > 1e-4);
    CHECK(rep.slope > -1.2);
    CHECK(rep.slope < -0.8);

    // non-integral scaling grids are allowed
    DecayReport rep2 = scaled_symbol_limit(cs, u, make_weight(rs, {1, 1}), k,
                                           {1.5, 2.7, 5.3, 9.9, 19.1});
    CHECK(std::abs(rep2.limit - rep.limit) < 1e-12 * (1.0 + std::abs(rep.limit)));
    CHECK(rep2.slope > -1.4);
    CHECK(rep2.slope < -0.6);
  }

  SUBCASE("a vanishing subleading value steepens the decay") {
    RootSystem rs = RootSystem::build("A1");
    CompactStructure cs(rs);
    PBWExact h = PBWExact::letter(rs, rs.letter_H(0));
    PBWExact u = h * h + PBWExact::one(rs);
    DecayReport rep = scaled_symbol_limit(cs, u, make_weight(rs, {1}),
                                          CompactGroupElement::identity(), grid);
    CHECK(std::abs(rep.limit - rep.top_value) < 1e-12);
    CHECK(rep.subleading < 1e-14);
    CHECK(!rep.flat);
    for (size_t j = 0; j < grid.size(); ++j)
      CHECK(rep.error[j] == doctest::Approx(1.0 / (grid[j] * grid[j])).epsilon(1e-10));
    CHECK(rep.slope == doctest::Approx(-2.0).epsilon(1e-6));
  }
}

TEST_CASE("rational fits certify exact level dependence") {
  SUBCASE("a synthetic first-order family is recovered") {
    std::vector<int> ns;
    std::vector<Cplx> vs;
    for (int n = 3; n <= 20; ++n) {
      ns.push_back(n);
      vs.push_back((2.0 + 3.0 / n) / (1.0 - 0.5 / n));
    }
    RationalFit fit = fit_rational(ns, vs, 1);
    CHECK(fit.certified);
    CHECK(fit.max_residual < 1e-10);
    CHECK(std::abs(fit.at_infinity - Cplx(2.0)) < 1e-8);
  }

  SUBCASE("constant sequences fit at degree zero") {
    std::vector<int> ns{1, 2, 3, 4, 5, 6};
    std::vector<Cplx> vs(6, Cplx(0.25, -1.0));
    RationalFit fit = fit_rational(ns, vs, 0);
    CHECK(fit.certified);
    CHECK(std::abs(fit.at_infinity - Cplx(0.25, -1.0)) < 1e-10);
  }

  SUBCASE("the closed star form is rational of first degree") {
    RootSystem rs = RootSystem::build("A1");
    CompactStructure cs(rs);
    StarFamily fam(cs, make_weight(rs, {1}), rs.weyl_identity(), 2, 5);
    Poly xh = var_of(rs, rs.letter_H(0));
    std::vector<int> ns;
    std::vector<Cplx> vs;
    for (int n = 4; n <= 24; n += 2) {
      ns.push_back(n);
      vs.push_back(fam.star(xh, xh, n).on_holdout.values(0));
    }
    RationalFit fit = fit_rational(ns, vs, 1);
    CHECK(fit.certified);
    CHECK(fit.max_residual < 1e-9);
    Cplx x0 = fam.restrict_holdout(xh)(0);
    CHECK(std::abs(fit.at_infinity - x0 * x0) < 1e-7);
  }

  SUBCASE("mismatched inputs are rejected") {
    CHECK_THROWS_AS(fit_rational({1, 2}, {Cplx(1.0)}, 1), ConfigError);
  }
}

TEST_CASE("membership is monotone across levels") {
  RootSystem rs = RootSystem::build("A1");
  CompactStructure cs(rs);
  StarFamily fam(cs, make_weight(rs, {1}), rs.weyl_identity(), 3, 41);
  Poly xe = var_of(rs, rs.letter_E(0));
  Poly cube = xe * xe * xe;

  for (int n : {1, 2}) {
    try {
      fam.quantize(cube, n);
      CHECK(false);
    } catch (const NotInAlgebraError& err) {
      CHECK(err.level == n);
      CHECK(err.residual > 1e-7);
    }
  }
  for (int n : {3, 4, 5}) {
    Quantized q = fam.quantize(cube, n);
    CHECK(q.residual < 1e-8);
  }

  ConvergenceReport rep = correspondence_suite(fam, cube, var_of(rs, rs.letter_H(0)), 1, 6);
  CHECK(rep.nesting_ok);
  CHECK(!rep.rows[0].in_algebra);
  CHECK(!rep.rows[1].in_algebra);
  for (int j = 2; j < 6; ++j) CHECK(rep.rows[j].in_algebra);
}

TEST_CASE("the convergence suite measures first-order deformation") {
  RootSystem rs = RootSystem::build("A1");
  CompactStructure cs(rs);
  StarFamily fam(cs, make_weight(rs, {1}), rs.weyl_identity(), 2, 43);
  Poly xh = var_of(rs, rs.letter_H(0));
  Poly xe2 = var_of(rs, rs.letter_E(0)) * var_of(rs, rs.letter_E(0));
  Poly xf2 = var_of(rs, rs.letter_F(0)) * var_of(rs, rs.letter_F(0));

  ConvergenceReport rep = correspondence_suite(fam, xe2, xf2, 2, 20);
  CHECK(rep.nesting_ok);
  for (const auto& row : rep.rows) {
    CHECK(row.in_algebra);
    CHECK(row.cond > 1.0);
    CHECK(row.cond < 1e8);
  }
  CHECK(rep.slope1 > -1.3);
  CHECK(rep.slope1 < -0.8);
  CHECK(rep.slope2 > -1.3);
  CHECK(rep.slope2 < -0.8);
  CHECK(rep.rational.certified);
  for (const auto& row : rep.rows) CHECK(row.rational_residual < 1e-7);

  // the threaded scan reproduces the sequential report bit for bit
  ConvergenceReport par = correspondence_suite(fam, xe2, xf2, 2, 20, 4);
  REQUIRE(par.rows.size() == rep.rows.size());
  for (size_t j = 0; j < rep.rows.size(); ++j) {
    CHECK(par.rows[j].n == rep.rows[j].n);
    CHECK(par.rows[j].e1 == rep.rows[j].e1);
    CHECK(par.rows[j].e2 == rep.rows[j].e2);
    CHECK(par.rows[j].probe == rep.rows[j].probe);
  }
  CHECK(par.slope1 == rep.slope1);

  // identical factors commute, so the bracket deficit sits at the floor
  ConvergenceReport same = correspondence_suite(fam, xh, xh, 2, 8);
  CHECK(same.exact2);
}

TEST_CASE("family demos assemble dimensions and closure") {
  RootSystem rs = RootSystem::build("A1");
  CompactStructure cs(rs);

  SUBCASE("the identity frame gives the standard tower") {
    FamilyReport rep = quantization_family_demo(cs, make_weight(rs, {1}), rs.weyl_identity(), 4, 2);
    CHECK(rep.dims == std::vector<long>{2, 3, 4, 5});
    CHECK(rep.conv.rows.size() == 4);
    CHECK(!rep.conv.rows[0].in_algebra);  // quadratics need level two
    CHECK(rep.conv.rows[1].in_algebra);
    CHECK(rep.conv.nesting_ok);
    CHECK(rep.closure_residual < 1e-9);
    CHECK(rep.closure_residual > 0.0);
  }

  SUBCASE("a twisted frame quantizes non-dominant weights") {
    FamilyReport rep = quantization_family_demo(cs, make_weight(rs, {-2}), 1, 4, 2);
    CHECK(rep.dims == std::vector<long>{1, 3, 5, 7});
    bool some = false;
    for (const auto& row : rep.conv.rows) some = some || row.in_algebra;
    CHECK(some);
    CHECK(rep.conv.nesting_ok);
  }

  SUBCASE("the rank-two projective tower has triangular dimensions") {
    RootSystem rs2 = RootSystem::build("A2");
    CompactStructure cs2(rs2);
    FamilyReport rep =
        quantization_family_demo(cs2, make_weight(rs2, {1, 0}), rs2.weyl_identity(), 3, 2);
    CHECK(rep.dims == std::vector<long>{3, 6, 10});
  }

  SUBCASE("invalid weight and frame pairs fail naming the level") {
    try {
      quantization_family_demo(cs, make_weight(rs, {-1}), rs.weyl_identity(), 3, 2);
      CHECK(false);
    } catch (const ConfigError& err) {
      CHECK(std::string(err.what()).find("level 1") != std::string::npos);
    }
  }
}

TEST_CASE("usage errors name the failing input") {
  RootSystem rs = RootSystem::build("A1");
  CompactStructure cs(rs);
  CHECK_THROWS_AS(StarFamily(cs, make_weight(rs, {1}), 5, 2, 1), ConfigError);
  CHECK_THROWS_AS(StarFamily(cs, make_weight(rs, {1}), 0, 0, 1), ConfigError);

  StarFamily fam(cs, make_weight(rs, {1}), 0, 2, 1);
  CHECK_THROWS_AS(fam.level(0), ConfigError);
  CHECK_THROWS_AS(fam.level(-3), ConfigError);

  RootSystem rs2 = RootSystem::build("A2");
  Poly wrong = Poly::variable(rs2, 0);
  CHECK_THROWS_AS(fam.quantize(wrong, 2), ConfigError);

  // scaled limits reject the zero element
  CHECK_THROWS_AS(
      scaled_symbol_limit(cs, PBWExact(rs), make_weight(rs, {1}),
                          CompactGroupElement::identity(), {2.0, 4.0}),
      ConfigError);
}
