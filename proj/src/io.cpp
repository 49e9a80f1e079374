#include "berezin/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "berezin/errors.hpp"

namespace berezin {

using Cplx = std::complex<double>;


Rat parse_rat(const std::string& s) {
  if (s.empty()) throw ConfigError("empty rational literal");
  size_t pos = s[0] == '-' || s[0] == '+' ? 1 : 0;
  bool slash = false;
  for (size_t j = pos; j < s.size(); ++j) {
    if (s[j] == '/' && !slash && j > pos && j + 1 < s.size()) {
      slash = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(s[j])))
      throw ConfigError("bad rational literal '" + s + "'");
  }
  if (pos == s.size()) throw ConfigError("bad rational literal '" + s + "'");
  Rat r(s[0] == '+' ? s.substr(1) : s);
  r.canonicalize();
  return r;
}

std::string weight_text(const Weight& lam) {
  std::string out = "w[";
  for (int i = 0; i < lam.rank(); ++i) {
    if (i) out += ',';
    out += rat_str(lam.c[i]);
  }
  return out + "]";
}

Weight parse_weight_text(const std::string& s, int rank) {
  std::string body = s;
  if (body.rfind("w[", 0) == 0) body = body.substr(2);
  else if (!body.empty() && body[0] == '[') body = body.substr(1);
  if (!body.empty() && body.back() == ']') body.pop_back();

  std::vector<std::string> parts;
  std::string cur;
  for (char ch : body) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (static_cast<int>(parts.size()) != rank)
    throw ConfigError("weight '" + s + "' has " + std::to_string(parts.size()) +
                      " coordinates, expected " + std::to_string(rank));
  Weight lam(rank);
  for (int i = 0; i < rank; ++i) lam.c[i] = parse_rat(parts[i]);
  return lam;
}

namespace {

std::string root_name(const RootSystem& rs, const Letter& l) {
  if (l.kind == LetterKind::H) return "a" + std::to_string(l.index + 1);
  return rs.positive_root(l.index).str();
}

char kind_char(LetterKind k) {
  return k == LetterKind::F ? 'F' : k == LetterKind::H ? 'H' : 'E';
}

// coefficient display with the sign already made positive on the leading
// nonzero component
std::string gauss_body(const GaussRat& c) {
  if (c.im == 0) return rat_str(c.re);
  std::string imag = c.im == 1 ? "i" : c.im == -1 ? "-i" : rat_str(c.im) + " i";
  if (c.re == 0) return imag;
  if (c.im > 0) return rat_str(c.re) + "+" + (c.im == 1 ? "i" : rat_str(c.im) + " i");
  Rat a = -c.im;
  return rat_str(c.re) + "-" + (a == 1 ? "i" : rat_str(a) + " i");
}

std::string word_body(const RootSystem& rs, const Word& w) {
  std::string out;
  for (size_t j = 0; j < w.size();) {
    size_t k = j;
    while (k < w.size() && w[k] == w[j]) ++k;
    if (!out.empty()) out += ' ';
    out += kind_char(w[j].kind);
    out += '[' + root_name(rs, w[j]) + ']';
    if (k - j > 1) out += '^' + std::to_string(k - j);
    j = k;
  }
  return out;
}

}  // namespace

std::string pbw_text(const PBWExact& u) {
  if (u.is_zero()) return "0";
  const RootSystem& rs = u.rs();
  std::vector<std::pair<Word, GaussRat>> terms;
  std::pair<Word, GaussRat> constant;
  bool have_constant = false;
  for (const auto& [w, c] : u.terms()) {
    if (w.empty()) {
      constant = {w, c};
      have_constant = true;
    } else {
      terms.push_back({w, c});
    }
  }
  if (have_constant) terms.push_back(constant);

  std::string out;
  for (size_t t = 0; t < terms.size(); ++t) {
    const GaussRat& c = terms[t].second;
    bool neg = c.re != 0 ? c.re < 0 : c.im < 0;
    GaussRat shown = neg ? -c : c;
    if (t == 0) {
      if (neg) out += '-';
    } else {
      out += neg ? " - " : " + ";
    }
    out += gauss_body(shown);
    if (!terms[t].first.empty()) out += " * " + word_body(rs, terms[t].first);
  }
  return out;
}

namespace {

struct PbwToken {
  enum Kind { Num, Imag, Star, Plus, Minus, Caret, Ref, End } kind;
  Rat num;
  char letter = 0;       // F, H or E for Ref
  std::string ref_name;  // bracket contents for Ref
};

std::vector<PbwToken> pbw_tokenize(const std::string& s) {
  std::vector<PbwToken> toks;
  size_t j = 0;
  while (j < s.size()) {
    char ch = s[j];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      size_t k = j;
      while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
      if (k < s.size() && s[k] == '/' && k + 1 < s.size() &&
          std::isdigit(static_cast<unsigned char>(s[k + 1]))) {
        ++k;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
      }
      toks.push_back({PbwToken::Num, parse_rat(s.substr(j, k - j)), 0, ""});
      j = k;
      continue;
    }
    if (ch == 'i') {
      toks.push_back({PbwToken::Imag, Rat(0), 0, ""});
      ++j;
      continue;
    }
    if (ch == '*') { toks.push_back({PbwToken::Star, Rat(0), 0, ""}); ++j; continue; }
    if (ch == '+') { toks.push_back({PbwToken::Plus, Rat(0), 0, ""}); ++j; continue; }
    if (ch == '-') { toks.push_back({PbwToken::Minus, Rat(0), 0, ""}); ++j; continue; }
    if (ch == '^') { toks.push_back({PbwToken::Caret, Rat(0), 0, ""}); ++j; continue; }
    if (ch == 'F' || ch == 'H' || ch == 'E') {
      if (j + 1 >= s.size() || s[j + 1] != '[')
        throw ConfigError(std::string("expected '[' after '") + ch + "' in element text");
      size_t close = s.find(']', j + 2);
      if (close == std::string::npos)
        throw ConfigError("unclosed '[' in element text");
      toks.push_back({PbwToken::Ref, Rat(0), ch, s.substr(j + 2, close - j - 2)});
      j = close + 1;
      continue;
    }
    throw ConfigError(std::string("unexpected character '") + ch + "' in element text");
  }
  toks.push_back({PbwToken::End, Rat(0), 0, ""});
  return toks;
}

Letter parse_letter_ref(const RootSystem& rs, const PbwToken& tok) {
  const std::string& name = tok.ref_name;
  if (tok.letter == 'H') {
    if (name.size() < 2 || name[0] != 'a')
      throw ConfigError("Cartan letters take a simple root name, got '" + name + "'");
    int idx = 0;
    for (size_t j = 1; j < name.size(); ++j) {
      if (!std::isdigit(static_cast<unsigned char>(name[j])))
        throw ConfigError("Cartan letters take a simple root name, got '" + name + "'");
      idx = idx * 10 + (name[j] - '0');
    }
    if (idx < 1 || idx > rs.rank())
      throw ConfigError("simple root index out of range in '" + name + "'");
    return rs.letter_H(idx - 1);
  }
  // positive root combination, e.g. "a1+2a2"
  RootVec v;
  v.m.assign(rs.rank(), 0);
  size_t j = 0;
  while (j < name.size()) {
    int coef = 0;
    bool saw_digit = false;
    while (j < name.size() && std::isdigit(static_cast<unsigned char>(name[j]))) {
      coef = coef * 10 + (name[j] - '0');
      saw_digit = true;
      ++j;
    }
    if (!saw_digit) coef = 1;
    if (j >= name.size() || name[j] != 'a')
      throw ConfigError("bad root name '" + name + "'");
    ++j;
    int idx = 0;
    saw_digit = false;
    while (j < name.size() && std::isdigit(static_cast<unsigned char>(name[j]))) {
      idx = idx * 10 + (name[j] - '0');
      saw_digit = true;
      ++j;
    }
    if (!saw_digit || idx < 1 || idx > rs.rank())
      throw ConfigError("bad root name '" + name + "'");
    v.m[idx - 1] += coef;
    if (j < name.size()) {
      if (name[j] != '+') throw ConfigError("bad root name '" + name + "'");
      ++j;
    }
  }
  int p = rs.positive_index(v);
  if (p < 0) throw ConfigError("'" + name + "' is not a positive root of " + rs.label());
  return tok.letter == 'F' ? rs.letter_F(p) : rs.letter_E(p);
}

}  // namespace

PBWExact parse_pbw_text(const RootSystem& rs, const std::string& s) {
  std::vector<PbwToken> toks = pbw_tokenize(s);
  size_t pos = 0;
  auto peek = [&](size_t ahead = 0) -> const PbwToken& {
    return toks[std::min(pos + ahead, toks.size() - 1)];
  };

  PBWExact out(rs);
  bool first = true;
  while (peek().kind != PbwToken::End) {
    GaussRat sign(1);
    if (peek().kind == PbwToken::Plus || peek().kind == PbwToken::Minus) {
      if (peek().kind == PbwToken::Minus) sign = GaussRat(-1);
      ++pos;
    } else if (!first) {
      throw ConfigError("expected '+' or '-' between terms in element text");
    }
    first = false;

    GaussRat coeff(1);
    bool have_coeff = false;
    if (peek().kind == PbwToken::Num) {
      Rat r1 = peek().num;
      ++pos;
      have_coeff = true;
      if (peek().kind == PbwToken::Imag) {
        coeff = GaussRat(Rat(0), r1);
        ++pos;
      } else if ((peek().kind == PbwToken::Plus || peek().kind == PbwToken::Minus) &&
                 peek(1).kind == PbwToken::Num && peek(2).kind == PbwToken::Imag) {
        Rat r2 = peek().kind == PbwToken::Minus ? Rat(-peek(1).num) : peek(1).num;
        coeff = GaussRat(r1, r2);
        pos += 3;
      } else if ((peek().kind == PbwToken::Plus || peek().kind == PbwToken::Minus) &&
                 peek(1).kind == PbwToken::Imag) {
        coeff = GaussRat(r1, peek().kind == PbwToken::Minus ? Rat(-1) : Rat(1));
        pos += 2;
      } else {
        coeff = GaussRat(r1);
      }
    } else if (peek().kind == PbwToken::Imag) {
      coeff = GaussRat::unit_im();
      ++pos;
      have_coeff = true;
    }

    if (peek().kind == PbwToken::Star) {
      if (!have_coeff) throw ConfigError("'*' without a coefficient in element text");
      ++pos;
      if (peek().kind != PbwToken::Ref)
        throw ConfigError("expected a basis letter after '*' in element text");
    }

    Word w;
    while (peek().kind == PbwToken::Ref) {
      Letter l = parse_letter_ref(rs, peek());
      ++pos;
      long power = 1;
      if (peek().kind == PbwToken::Caret) {
        ++pos;
        if (peek().kind != PbwToken::Num || !is_integer(peek().num) || peek().num <= 0 ||
            peek().num > 64)
          throw ConfigError("exponents must be small positive integers");
        power = peek().num.get_num().get_si();
        ++pos;
      }
      for (long j = 0; j < power; ++j) w.push_back(l);
    }
    if (!have_coeff && w.empty())
      throw ConfigError("empty term in element text");
    out += PBWExact::word(rs, w, sign * coeff);
  }
  return out;
}

namespace {

struct FnToken {
  enum Kind { Num, Imag, Var, Plus, Minus, Star, Caret, LParen, RParen, End } kind;
  double value = 0.0;
  Letter var{};
};

std::vector<FnToken> fn_tokenize(const RootSystem& rs, const std::string& s) {
  std::vector<FnToken> toks;
  size_t j = 0;
  while (j < s.size()) {
    char ch = s[j];
    if (std::isspace(static_cast<unsigned char>(ch))) { ++j; continue; }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      size_t k = j;
      while (k < s.size() && (std::isdigit(static_cast<unsigned char>(s[k])) || s[k] == '.')) ++k;
      double v = std::stod(s.substr(j, k - j));
      if (k < s.size() && s[k] == '/' && k + 1 < s.size() &&
          std::isdigit(static_cast<unsigned char>(s[k + 1]))) {
        size_t m = ++k;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
        v /= std::stod(s.substr(m, k - m));
      }
      toks.push_back({FnToken::Num, v, {}});
      j = k;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      size_t k = j;
      while (k < s.size() && std::isalnum(static_cast<unsigned char>(s[k]))) ++k;
      std::string word = s.substr(j, k - j);
      j = k;
      if (word == "i") {
        toks.push_back({FnToken::Imag, 0.0, {}});
        continue;
      }
      if (word == "z") {
        toks.push_back({FnToken::Var, 0.0, rs.letter_H(0)});
        continue;
      }
      if (word.size() >= 2 && (word[0] == 'h' || word[0] == 'e' || word[0] == 'f')) {
        int idx = 0;
        bool ok = true;
        for (size_t m = 1; m < word.size(); ++m) {
          if (!std::isdigit(static_cast<unsigned char>(word[m]))) { ok = false; break; }
          idx = idx * 10 + (word[m] - '0');
        }
        if (ok && idx >= 1) {
          if (word[0] == 'h' && idx <= rs.rank()) {
            toks.push_back({FnToken::Var, 0.0, rs.letter_H(idx - 1)});
            continue;
          }
          if (word[0] != 'h' && idx <= rs.num_positive()) {
            toks.push_back({FnToken::Var, 0.0,
                            word[0] == 'e' ? rs.letter_E(idx - 1) : rs.letter_F(idx - 1)});
            continue;
          }
        }
      }
      throw ConfigError("unknown variable '" + word + "' for type " + rs.label() +
                        " (use z, h1..h" + std::to_string(rs.rank()) + ", e1..e" +
                        std::to_string(rs.num_positive()) + ", f1..f" +
                        std::to_string(rs.num_positive()) + ")");
    }
    switch (ch) {
      case '+': toks.push_back({FnToken::Plus, 0.0, {}}); break;
      case '-': toks.push_back({FnToken::Minus, 0.0, {}}); break;
      case '*': toks.push_back({FnToken::Star, 0.0, {}}); break;
      case '^': toks.push_back({FnToken::Caret, 0.0, {}}); break;
      case '(': toks.push_back({FnToken::LParen, 0.0, {}}); break;
      case ')': toks.push_back({FnToken::RParen, 0.0, {}}); break;
      default:
        throw ConfigError(std::string("unexpected character '") + ch + "' in expression");
    }
    ++j;
  }
  toks.push_back({FnToken::End, 0.0, {}});
  return toks;
}

class FnParser {
 public:
  FnParser(const RootSystem& rs, std::vector<FnToken> toks)
      : rs_(rs), toks_(std::move(toks)) {}

  SymPolynomial<Cplx> parse() {
    SymPolynomial<Cplx> p = expr();
    if (peek().kind != FnToken::End) throw ConfigError("trailing input in expression");
    return p;
  }

 private:
  const FnToken& peek() const { return toks_[pos_]; }
  void advance() { ++pos_; }

  SymPolynomial<Cplx> expr() {
    SymPolynomial<Cplx> acc = term();
    while (peek().kind == FnToken::Plus || peek().kind == FnToken::Minus) {
      bool minus = peek().kind == FnToken::Minus;
      advance();
      SymPolynomial<Cplx> rhs = term();
      acc += minus ? rhs * Cplx(-1.0) : rhs;
    }
    return acc;
  }

  SymPolynomial<Cplx> term() {
    SymPolynomial<Cplx> acc = factor();
    while (peek().kind == FnToken::Star) {
      advance();
      acc = acc * factor();
    }
    return acc;
  }

  SymPolynomial<Cplx> factor() {
    bool minus = false;
    while (peek().kind == FnToken::Minus) {
      minus = !minus;
      advance();
    }
    SymPolynomial<Cplx> base = atom();
    if (peek().kind == FnToken::Caret) {
      advance();
      if (peek().kind != FnToken::Num || peek().value != std::floor(peek().value) ||
          peek().value < 0 || peek().value > 16)
        throw ConfigError("exponents must be integers in 0..16");
      int e = static_cast<int>(peek().value);
      advance();
      SymPolynomial<Cplx> p = SymPolynomial<Cplx>::constant(rs_, 1.0);
      for (int j = 0; j < e; ++j) p = p * base;
      base = p;
    }
    return minus ? base * Cplx(-1.0) : base;
  }

  SymPolynomial<Cplx> atom() {
    switch (peek().kind) {
      case FnToken::Num: {
        double v = peek().value;
        advance();
        return SymPolynomial<Cplx>::constant(rs_, v);
      }
      case FnToken::Imag:
        advance();
        return SymPolynomial<Cplx>::constant(rs_, Cplx(0.0, 1.0));
      case FnToken::Var: {
        Letter l = peek().var;
        advance();
        return SymPolynomial<Cplx>::variable(rs_, rs_.letter_to_basis(l));
      }
      case FnToken::LParen: {
        advance();
        SymPolynomial<Cplx> p = expr();
        if (peek().kind != FnToken::RParen) throw ConfigError("missing ')' in expression");
        advance();
        return p;
      }
      default:
        throw ConfigError("expected a value in expression");
    }
  }

  const RootSystem& rs_;
  std::vector<FnToken> toks_;
  size_t pos_ = 0;
};

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

SymPolynomial<Cplx> parse_function(const RootSystem& rs, const std::string& s) {
  return FnParser(rs, fn_tokenize(rs, s)).parse();
}

std::string compact_word_text(const CompactGroupElement& k) {
  if (k.word.empty()) return "e";
  std::string out;
  for (const CompactLetter& l : k.word) {
    if (!out.empty()) out += ';';
    int nonzero = -1;
    bool unit = true;
    for (int b = 0; b < l.coeffs.size(); ++b) {
      if (l.coeffs(b) == 0.0) continue;
      if (nonzero >= 0 || l.coeffs(b) != 1.0) { unit = false; }
      if (nonzero < 0) nonzero = b;
    }
    if (unit && nonzero >= 0) {
      out += 'g' + std::to_string(nonzero) + ':' + num17(l.angle);
    } else {
      out += 'v';
      for (int b = 0; b < l.coeffs.size(); ++b) {
        if (b) out += ',';
        out += num17(l.coeffs(b));
      }
      out += ':' + num17(l.angle);
    }
  }
  return out;
}

nlohmann::json quadrature_to_json(const QuadratureSet& q) {
  nlohmann::json samples = nlohmann::json::array();
  for (const WeightedSample& s : q.samples) {
    nlohmann::json word = nlohmann::json::array();
    for (const CompactLetter& l : s.k.word) {
      std::vector<double> coeffs(l.coeffs.data(), l.coeffs.data() + l.coeffs.size());
      word.push_back({{"coeffs", coeffs}, {"angle", l.angle}});
    }
    samples.push_back({{"weight", s.weight}, {"word", word}});
  }
  return {{"mode", q.mode}, {"seed", q.seed}, {"max_degree", q.max_degree}, {"samples", samples}};
}

QuadratureSet quadrature_from_json(const nlohmann::json& j) {
  QuadratureSet q;
  try {
    q.mode = j.at("mode").get<std::string>();
    q.seed = j.at("seed").get<std::uint64_t>();
    q.max_degree = j.at("max_degree").get<int>();
    for (const auto& s : j.at("samples")) {
      WeightedSample ws;
      ws.weight = s.at("weight").get<double>();
      for (const auto& lj : s.at("word")) {
        CompactLetter l;
        std::vector<double> coeffs = lj.at("coeffs").get<std::vector<double>>();
        l.coeffs = Eigen::Map<const Eigen::VectorXd>(coeffs.data(),
                                                     static_cast<Eigen::Index>(coeffs.size()));
        l.angle = lj.at("angle").get<double>();
        ws.k.word.push_back(std::move(l));
      }
      q.samples.push_back(std::move(ws));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad quadrature file: ") + e.what());
  }
  return q;
}

nlohmann::json root_datum_json(const RootSystem& rs) {
  nlohmann::json cartan = nlohmann::json::array();
  for (int i = 0; i < rs.rank(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < rs.rank(); ++j) row.push_back(rs.cartan(i, j));
    cartan.push_back(row);
  }
  nlohmann::json roots = nlohmann::json::array();
  for (int p = 0; p < rs.num_positive(); ++p) roots.push_back(rs.positive_root(p).str());
  nlohmann::json fw = nlohmann::json::array();
  for (int i = 0; i < rs.rank(); ++i) fw.push_back(weight_text(rs.fundamental_weight(i)));
  return {{"type", rs.label()},
          {"rank", rs.rank()},
          {"dim", rs.dim()},
          {"num_positive_roots", rs.num_positive()},
          {"weyl_order", rs.weyl_order()},
          {"cartan_matrix", cartan},
          {"positive_roots", roots},
          {"fundamental_weights", fw},
          {"rho", weight_text(rs.rho())}};
}

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json rre = nlohmann::json::array(), rim = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rre.push_back(m(r, c).real());
      rim.push_back(m(r, c).imag());
    }
    re.push_back(rre);
    im.push_back(rim);
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

}  // namespace berezin
