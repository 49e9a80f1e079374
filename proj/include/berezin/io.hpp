#pragma once

#include <complex>
#include <string>

#include <json.hpp>

#include "berezin/orbit.hpp"
#include "berezin/pbw.hpp"
#include "berezin/rootsys.hpp"

namespace berezin {

// inverse of rat_str, accepting "p", "-p" and "p/q"
Rat parse_rat(const std::string& s);

// weights as rational coordinate tuples over the fundamental weights,
// "w[1,-1]"; the parser also accepts the bare tuple "1,-1"
std::string weight_text(const Weight& lam);
Weight parse_weight_text(const std::string& s, int rank);

// text form of enveloping elements, one normal-ordered monomial per term:
//   3/2+1/2 i * F[a1]^2 H[a1] E[a1+a2] + 2 * H[a2]
// A coefficient of the form p/q(+|-)r/s i binds through the following '*';
// the writer keeps the constant term last so the form round-trips.
std::string pbw_text(const PBWExact& u);
PBWExact parse_pbw_text(const RootSystem& rs, const std::string& s);

// polynomial expressions for star-product inputs: variables h1..hr, e1..ep,
// f1..fp (1-based, positive roots in the library order), alias z = h1,
// imaginary unit i, operators + - * ^, integer/decimal/rational literals,
// parentheses
SymPolynomial<std::complex<double>> parse_function(const RootSystem& rs, const std::string& s);

// compact group words for CSV rows: generator letters print as
// "g<index>:<angle>", general directions as "v<c0,c1,...>:<angle>",
// factors joined by ';' and the empty word as "e"
std::string compact_word_text(const CompactGroupElement& k);

// quadrature replay. Samples, weights, mode, seed and the exact-degree
// label all round-trip.
nlohmann::json quadrature_to_json(const QuadratureSet& q);
QuadratureSet quadrature_from_json(const nlohmann::json& j);

// root datum summary: Cartan matrix, positive roots, Weyl order, dimensions
nlohmann::json root_datum_json(const RootSystem& rs);

// dense complex matrix as {"rows", "cols", "re", "im"}
nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m);

}  // namespace berezin
