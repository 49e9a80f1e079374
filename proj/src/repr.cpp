#include "berezin/repr.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>
#include <unsupported/Eigen/MatrixFunctions>

#include "berezin/errors.hpp"

namespace berezin {

namespace {

// temporarily widens the rewrite bound for deep lowering words
struct DegreeBoundGuard {
  int saved;
  explicit DegreeBoundGuard(int need) : saved(pbw_degree_bound()) {
    if (need > pbw_degree_bound()) pbw_degree_bound() = need;
  }
  ~DegreeBoundGuard() { pbw_degree_bound() = saved; }
};

// Verma-module calculus on canonical lowering words: raise() pushes one
// raising generator through a word, form() is the contravariant form with
// form(v, v) = 1. Both memoize; the recursion only ever shortens words.
struct VermaEngine {
  const RootSystem& rs;
  Weight lam;
  std::map<std::pair<int, Word>, std::map<Word, Rat>> raise_memo;
  std::map<std::pair<Word, Word>, Rat> form_memo;

  RootVec content(const Word& w) const {
    RootVec m;
    m.m.assign(rs.rank(), 0);
    for (const Letter& l : w) m = m + rs.positive_root(l.index);
    return m;
  }

  // F_q * w * v over canonical lowering monomials (stays in the lowering span)
  std::map<Word, Rat> lower(int q, const Word& w, const Rat& scale) const {
    Word full;
    full.reserve(w.size() + 1);
    full.push_back(rs.letter_F(q));
    full.insert(full.end(), w.begin(), w.end());
    const PBWElement<Rat> normal = PBWElement<Rat>::word(rs, full, scale);
    std::map<Word, Rat> out;
    for (const auto& [w2, c] : normal.terms()) out.emplace(w2, c);
    return out;
  }

  const std::map<Word, Rat>& raise(int gamma, const Word& w) {
    auto key = std::make_pair(gamma, w);
    auto found = raise_memo.find(key);
    if (found != raise_memo.end()) return found->second;
    std::map<Word, Rat> out;
    auto accumulate = [&out](const Word& w2, const Rat& c) {
      auto [it, fresh] = out.try_emplace(w2, c);
      if (!fresh) it->second += c;
    };
    if (!w.empty()) {
      const Letter head = w.front();
      const Word rest(w.begin() + 1, w.end());
      for (const auto& [w2, c] : raise(gamma, rest))
        for (const auto& [w3, c3] : lower(head.index, w2, c)) accumulate(w3, c3);
      for (const auto& t : rs.bracket(rs.letter_E(gamma), head)) {
        if (t.x.kind == LetterKind::H) {
          Rat val = (lam.c[t.x.index] - rs.pairing(content(rest), t.x.index)) * t.coeff;
          accumulate(rest, val);
        } else if (t.x.kind == LetterKind::E) {
          for (const auto& [w2, c] : raise(t.x.index, rest)) accumulate(w2, c * t.coeff);
        } else {
          for (const auto& [w2, c] : lower(t.x.index, rest, Rat(t.coeff))) accumulate(w2, c);
        }
      }
      for (auto it = out.begin(); it != out.end();)
        it = (it->second == 0) ? out.erase(it) : std::next(it);
    }
    return raise_memo.emplace(std::move(key), std::move(out)).first->second;
  }

  Rat form(const Word& a, const Word& b) {
    if (a.empty()) return b.empty() ? Rat(1) : Rat(0);
    auto key = std::make_pair(a, b);
    auto found = form_memo.find(key);
    if (found != form_memo.end()) return found->second;
    const Word rest(a.begin() + 1, a.end());
    Rat acc(0);
    for (const auto& [w2, c] : raise(a.front().index, b)) acc += c * form(rest, w2);
    form_memo.emplace(std::move(key), acc);
    return acc;
  }
};

}  // namespace

Irrep Irrep::build(const RootSystem& rs, const Weight& lam, long dim_cap) {
  if (!lam.is_integral() || !lam.is_dominant())
    throw ConfigError("highest weight must be dominant integral, got " + lam.str());
  const long wdim = rs.irrep_dimension(lam);
  if (wdim > dim_cap)
    throw ResourceError("module dimension " + std::to_string(wdim) + " exceeds the cap " +
                        std::to_string(dim_cap));

  Irrep rep;
  rep.rs_ = &rs;
  rep.lam_ = lam;
  rep.dim_ = static_cast<int>(wdim);
  const int pos = rs.num_positive();
  const int rank = rs.rank();

  // module weights lie between w0(lam) and lam, so only lowering monomials
  // whose content fits in that box can survive the quotient
  const Weight drop = lam - rs.weyl_act(rs.weyl_longest(), lam);
  std::vector<int> box;
  for (const Rat& c : rs.weight_to_root_coords(drop)) {
    assert(is_integer(c));
    box.push_back(static_cast<int>(c.get_num().get_si()));
  }
  int guard_len = 2;
  for (int b : box) guard_len += b;
  DegreeBoundGuard guard(guard_len);

  std::map<std::pair<int, std::vector<int>>, std::vector<Word>> blocks;
  Word cur;
  std::vector<int> sum(rank, 0);
  std::function<void(int)> enumerate = [&](int p) {
    if (p == pos) {
      blocks[{std::accumulate(sum.begin(), sum.end(), 0), sum}].push_back(cur);
      return;
    }
    const RootVec& beta = rs.positive_root(p);
    enumerate(p + 1);
    int added = 0;
    while (true) {
      bool fits = true;
      for (int i = 0; i < rank; ++i)
        if (sum[i] + beta.m[i] > box[i]) {
          fits = false;
          break;
        }
      if (!fits) break;
      for (int i = 0; i < rank; ++i) sum[i] += beta.m[i];
      cur.push_back(rs.letter_F(p));
      ++added;
      enumerate(p + 1);
    }
    for (; added > 0; --added) {
      cur.pop_back();
      for (int i = 0; i < rank; ++i) sum[i] -= beta.m[i];
    }
  };
  enumerate(0);

  VermaEngine engine{rs, lam, {}, {}};

  struct BlockBuild {
    std::vector<Word> words;
    std::vector<int> piv;     // surviving columns, local
    std::vector<int> global;  // basis index per surviving column
    ExactMat<Rat> proj;       // piv x words: quotient coordinates of every monomial
    ExactMat<Rat> gram;       // piv x piv
  };
  std::vector<BlockBuild> built;
  std::map<Word, std::pair<int, int>> col_of_word;

  for (auto& [key, words] : blocks) {
    std::sort(words.begin(), words.end());
    BlockBuild bb;
    bb.words = words;
    const int s = static_cast<int>(words.size());
    ExactMat<Rat> g(s, std::vector<Rat>(s));
    for (int i = 0; i < s; ++i)
      for (int j = i; j < s; ++j) g[i][j] = g[j][i] = engine.form(words[i], words[j]);
    bb.piv = pivot_columns(g);
    const int rnk = static_cast<int>(bb.piv.size());
    ExactMat<Rat> gpp(rnk, std::vector<Rat>(rnk));
    for (int i = 0; i < rnk; ++i)
      for (int j = 0; j < rnk; ++j) gpp[i][j] = g[bb.piv[i]][bb.piv[j]];
    auto ginv = inverse(gpp);
    assert(ginv && "pivot Gram block must be invertible");
    bb.gram = std::move(gpp);
    bb.proj.assign(rnk, std::vector<Rat>(s, Rat(0)));
    for (int j = 0; j < s; ++j)
      for (int t = 0; t < rnk; ++t) {
        Rat acc(0);
        for (int u = 0; u < rnk; ++u) acc += (*ginv)[t][u] * g[bb.piv[u]][j];
        bb.proj[t][j] = acc;
      }
    for (int t = 0; t < rnk; ++t) {
      bb.global.push_back(static_cast<int>(rep.weights_.size()));
      const Word& w = words[bb.piv[t]];
      RootVec m = engine.content(w);
      Weight mu(rank);
      for (int i = 0; i < rank; ++i) mu.c[i] = lam.c[i] - rs.pairing(m, i);
      rep.weights_.push_back(std::move(mu));
      std::vector<int> expo(pos, 0);
      for (const Letter& l : w) expo[l.index] += 1;
      rep.monomials_.push_back(std::move(expo));
    }
    const int bi = static_cast<int>(built.size());
    for (int j = 0; j < s; ++j) col_of_word[words[j]] = {bi, j};
    built.push_back(std::move(bb));
  }
  if (static_cast<int>(rep.weights_.size()) != rep.dim_)
    throw std::logic_error("assembled " + std::to_string(rep.weights_.size()) +
                           " basis vectors for a module of dimension " +
                           std::to_string(rep.dim_));

  rep.gram_.assign(rep.dim_, std::vector<Rat>(rep.dim_, Rat(0)));
  for (const auto& bb : built)
    for (size_t t = 0; t < bb.global.size(); ++t)
      for (size_t u = 0; u < bb.global.size(); ++u)
        rep.gram_[bb.global[t]][bb.global[u]] = bb.gram[t][u];

  // exact generator columns
  rep.gen_.assign(rs.dim(), std::vector<SparseCol>(rep.dim_));
  for (int i = 0; i < rank; ++i) {
    auto& cols = rep.gen_[rs.letter_to_basis(rs.letter_H(i))];
    for (int j = 0; j < rep.dim_; ++j) {
      const Rat& v = rep.weights_[j].c[i];
      if (v != 0) cols[j].push_back({j, v});
    }
  }
  auto project_into = [&](const std::map<Word, Rat>& expansion, SparseCol& col) {
    std::map<int, Rat> acc;
    for (const auto& [w2, c] : expansion) {
      auto at = col_of_word.find(w2);
      if (at == col_of_word.end()) continue;  // weight left the box: zero in the quotient
      const BlockBuild& tb = built[at->second.first];
      for (size_t t = 0; t < tb.global.size(); ++t) {
        Rat v = tb.proj[t][at->second.second] * c;
        if (v != 0) acc[tb.global[t]] += v;
      }
    }
    for (const auto& [row, v] : acc)
      if (v != 0) col.push_back({row, v});
  };
  for (int p = 0; p < pos; ++p) {
    auto& ecols = rep.gen_[rs.letter_to_basis(rs.letter_E(p))];
    auto& fcols = rep.gen_[rs.letter_to_basis(rs.letter_F(p))];
    for (const auto& bb : built)
      for (size_t t = 0; t < bb.global.size(); ++t) {
        const Word& w = bb.words[bb.piv[t]];
        const int j = bb.global[t];
        project_into(engine.lower(p, w, Rat(1)), fcols[j]);
        project_into(engine.raise(p, w), ecols[j]);
      }
  }

  // orthonormal frame: per-block Cholesky of the Gram
  std::vector<Eigen::Triplet<double>> t_lt, t_lti;
  for (const auto& bb : built) {
    const int rnk = static_cast<int>(bb.global.size());
    if (rnk == 0) continue;
    Eigen::MatrixXd gd(rnk, rnk);
    for (int t = 0; t < rnk; ++t)
      for (int u = 0; u < rnk; ++u) gd(t, u) = to_double(bb.gram[t][u]);
    Eigen::LLT<Eigen::MatrixXd> llt(gd);
    if (llt.info() != Eigen::Success)
      throw std::logic_error("Gram block is not positive definite");
    Eigen::MatrixXd ltm = llt.matrixU();
    Eigen::MatrixXd ltinv =
        ltm.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(rnk, rnk));
    for (int t = 0; t < rnk; ++t)
      for (int u = t; u < rnk; ++u) {
        if (ltm(t, u) != 0.0) t_lt.emplace_back(bb.global[t], bb.global[u], ltm(t, u));
        if (ltinv(t, u) != 0.0) t_lti.emplace_back(bb.global[t], bb.global[u], ltinv(t, u));
      }
  }
  rep.lt_.resize(rep.dim_, rep.dim_);
  rep.lt_.setFromTriplets(t_lt.begin(), t_lt.end());
  rep.lt_inv_.resize(rep.dim_, rep.dim_);
  rep.lt_inv_.setFromTriplets(t_lti.begin(), t_lti.end());

  rep.gen_on_.resize(rs.dim());
  for (int b = 0; b < rs.dim(); ++b) {
    std::vector<Eigen::Triplet<double>> tr;
    for (int j = 0; j < rep.dim_; ++j)
      for (const auto& [i, v] : rep.gen_[b][j]) tr.emplace_back(i, j, to_double(v));
    Eigen::SparseMatrix<double> a(rep.dim_, rep.dim_);
    a.setFromTriplets(tr.begin(), tr.end());
    rep.gen_on_[b] = rep.lt_ * a * rep.lt_inv_;
  }
  return rep;
}

const std::vector<Irrep::SparseCol>& Irrep::generator(const Letter& l) const {
  return gen_[rs_->letter_to_basis(l)];
}

std::vector<GaussRat> Irrep::apply_letter(const Letter& l, const std::vector<GaussRat>& x) const {
  const auto& cols = gen_[rs_->letter_to_basis(l)];
  std::vector<GaussRat> y(dim_, GaussRat());
  for (int j = 0; j < dim_; ++j) {
    if (x[j].is_zero()) continue;
    for (const auto& [i, v] : cols[j]) y[i] += x[j] * GaussRat(v);
  }
  return y;
}

std::vector<GaussRat> Irrep::apply(const PBWExact& u, const std::vector<GaussRat>& x) const {
  std::vector<GaussRat> acc(dim_, GaussRat());
  for (const auto& [w, c] : u.terms()) {
    std::vector<GaussRat> y = x;
    for (auto it = w.rbegin(); it != w.rend(); ++it) y = apply_letter(*it, y);
    for (int i = 0; i < dim_; ++i)
      if (!y[i].is_zero()) acc[i] += c * y[i];
  }
  return acc;
}

ExactMat<GaussRat> Irrep::matrix_of(const PBWExact& u) const {
  ExactMat<GaussRat> m(dim_, std::vector<GaussRat>(dim_));
  for (int j = 0; j < dim_; ++j) {
    std::vector<GaussRat> e(dim_);
    e[j] = GaussRat(1);
    auto col = apply(u, e);
    for (int i = 0; i < dim_; ++i) m[i][j] = std::move(col[i]);
  }
  return m;
}

GaussRat Irrep::trace_of(const PBWExact& u) const {
  GaussRat tr;
  for (int j = 0; j < dim_; ++j) {
    std::vector<GaussRat> e(dim_);
    e[j] = GaussRat(1);
    tr += apply(u, e)[j];
  }
  return tr;
}

GaussRat Irrep::inner(const std::vector<GaussRat>& x, const std::vector<GaussRat>& y) const {
  GaussRat acc;
  for (int j = 0; j < dim_; ++j) {
    if (x[j].is_zero()) continue;
    for (int k = 0; k < dim_; ++k) {
      if (y[k].is_zero() || gram_[j][k] == 0) continue;
      acc += x[j] * GaussRat(gram_[j][k]) * y[k].conj();
    }
  }
  return acc;
}

const Eigen::SparseMatrix<double>& Irrep::generator_on(const Letter& l) const {
  return gen_on_[rs_->letter_to_basis(l)];
}

Eigen::SparseMatrix<std::complex<double>> Irrep::compact_on(const Eigen::VectorXd& coeffs) const {
  const std::complex<double> im(0.0, 1.0);
  std::vector<Eigen::Triplet<std::complex<double>>> tr;
  const int r = rs_->rank();
  auto push = [&tr](const Eigen::SparseMatrix<double>& m, std::complex<double> f) {
    for (int k = 0; k < m.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
        tr.emplace_back(it.row(), it.col(), f * it.value());
  };
  for (int j = 0; j < r; ++j)
    if (coeffs[j] != 0.0) push(gen_on_[rs_->letter_to_basis(rs_->letter_H(j))], im * coeffs[j]);
  for (int p = 0; p < rs_->num_positive(); ++p) {
    const double cre = coeffs[r + 2 * p], cim = coeffs[r + 2 * p + 1];
    if (cre == 0.0 && cim == 0.0) continue;
    // cre (E - F) + cim i (E + F)
    push(gen_on_[rs_->letter_to_basis(rs_->letter_E(p))], std::complex<double>(cre, cim));
    push(gen_on_[rs_->letter_to_basis(rs_->letter_F(p))], std::complex<double>(-cre, cim));
  }
  Eigen::SparseMatrix<std::complex<double>> out(dim_, dim_);
  out.setFromTriplets(tr.begin(), tr.end());
  return out;
}

Eigen::VectorXcd Irrep::group_apply(const CompactGroupElement& k, Eigen::VectorXcd x) const {
  for (auto it = k.word.rbegin(); it != k.word.rend(); ++it) {
    if (it->angle == 0.0) continue;
    x = expmv(compact_on(it->angle * it->coeffs), std::move(x));
  }
  return x;
}

Eigen::VectorXcd Irrep::coherent_state(const CompactGroupElement& k) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim_);
  v[0] = 1.0;
  return group_apply(k, std::move(v));
}

Eigen::MatrixXcd Irrep::group_matrix(const CompactGroupElement& k) const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim_, dim_);
  for (const auto& l : k.word) {
    if (l.angle == 0.0) continue;
    Eigen::MatrixXcd x = Eigen::MatrixXcd(compact_on(l.angle * l.coeffs));
    m *= x.exp();
  }
  return m;
}

Eigen::VectorXcd Irrep::apply_numeric(const PBWExact& u, const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(dim_);
  const std::complex<double> im(0.0, 1.0);
  for (const auto& [w, c] : u.terms()) {
    Eigen::VectorXcd y = x;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      const auto& a = gen_on_[rs_->letter_to_basis(*it)];
      Eigen::VectorXd re = a * y.real(), imag = a * y.imag();
      y = re.cast<std::complex<double>>() + im * imag.cast<std::complex<double>>();
    }
    acc += c.to_complex() * y;
  }
  return acc;
}

Eigen::MatrixXcd Irrep::matrix_numeric(const PBWExact& u) const {
  Eigen::MatrixXcd m(dim_, dim_);
  for (int j = 0; j < dim_; ++j) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim_);
    e[j] = 1.0;
    m.col(j) = apply_numeric(u, e);
  }
  return m;
}

Eigen::VectorXcd expmv(const Eigen::SparseMatrix<std::complex<double>>& x_mat,
                       Eigen::VectorXcd v) {
  std::vector<double> rowsum(x_mat.rows(), 0.0);
  for (int k = 0; k < x_mat.outerSize(); ++k)
    for (Eigen::SparseMatrix<std::complex<double>>::InnerIterator it(x_mat, k); it; ++it)
      rowsum[it.row()] += std::abs(it.value());
  double nrm = 0.0;
  for (double s : rowsum) nrm = std::max(nrm, s);
  const int steps = std::max(1, static_cast<int>(std::ceil(nrm)));
  const double inv = 1.0 / steps;
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXcd term = v, acc = v;
    for (int j = 1; j <= 80; ++j) {
      term = (x_mat * term) * (inv / j);
      acc += term;
      if (term.norm() <= 1e-17 * acc.norm()) break;
    }
    v = std::move(acc);
  }
  return v;
}

ExactMat<Rat> duality_pairing(const Irrep& dual_rep, const Irrep& rep) {
  const RootSystem& rs = rep.root_system();
  const int n = rep.dim();
  if (dual_rep.dim() != n)
    throw ConfigError("pairing requires modules of equal dimension");

  // entries couple opposite weights; everything else vanishes
  std::vector<std::pair<int, int>> unk;
  std::map<std::pair<int, int>, int> unk_id;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (dual_rep.basis_weight(i) == -rep.basis_weight(k)) {
        unk_id[{i, k}] = static_cast<int>(unk.size());
        unk.emplace_back(i, k);
      }

  ExactMat<Rat> rows;
  auto add_rows_for = [&](const Letter& l) {
    const auto& pd = dual_rep.generator(l);
    const auto& pr = rep.generator(l);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::map<int, Rat> row;
        for (const auto& [k, v] : pd[i]) {
          auto f = unk_id.find({k, j});
          if (f != unk_id.end()) row[f->second] += v;
        }
        for (const auto& [k, v] : pr[j]) {
          auto f = unk_id.find({i, k});
          if (f != unk_id.end()) row[f->second] += v;
        }
        bool nz = false;
        for (const auto& [id, v] : row)
          if (v != 0) nz = true;
        if (!nz) continue;
        std::vector<Rat> dense(unk.size(), Rat(0));
        for (const auto& [id, v] : row) dense[id] = v;
        rows.push_back(std::move(dense));
      }
  };
  for (int p = 0; p < rs.num_positive(); ++p) {
    add_rows_for(rs.letter_E(p));
    add_rows_for(rs.letter_F(p));
  }

  auto piv = echelon(rows);
  std::vector<bool> is_piv(unk.size(), false);
  for (int c : piv) is_piv[c] = true;
  std::vector<int> free_cols;
  for (int c = 0; c < static_cast<int>(unk.size()); ++c)
    if (!is_piv[c]) free_cols.push_back(c);
  if (free_cols.size() != 1)
    throw ConfigError("expected a one dimensional space of invariant pairings, found " +
                      std::to_string(free_cols.size()));
  const int f = free_cols[0];
  std::vector<Rat> x(unk.size(), Rat(0));
  x[f] = 1;
  for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = -rows[r][f];

  ExactMat<Rat> m(n, std::vector<Rat>(n, Rat(0)));
  for (size_t t = 0; t < unk.size(); ++t) m[unk[t].first][unk[t].second] = x[t];
  Rat lead(0);
  for (int i = 0; i < n && lead == 0; ++i)
    for (int j = 0; j < n && lead == 0; ++j) lead = m[i][j];
  assert(lead != 0);
  for (auto& rrow : m)
    for (auto& v : rrow) v /= lead;
  return m;
}

}  // namespace berezin
