#include "berezin/rootsys.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <set>
#include <sstream>

#include "berezin/errors.hpp"
#include "berezin/exactla.hpp"

namespace berezin {

std::string Weight::str() const {
  std::string s = "w[";
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += c[i].get_str();
  }
  return s + "]";
}

std::string RootVec::str() const {
  std::string s;
  for (size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) continue;
    if (!s.empty()) s += (m[i] > 0 ? "+" : "-");
    else if (m[i] < 0)
      s += "-";
    int a = std::abs(m[i]);
    if (a != 1) s += std::to_string(a);
    s += "a" + std::to_string(i + 1);
  }
  return s.empty() ? "0" : s;
}

namespace {

std::vector<std::vector<int>> cartan_for_label(const std::string& label) {
  // Entry (i,j) is alpha_i(H_{alpha_j}).
  if (label == "A1") return {{2}};
  if (label == "A2") return {{2, -1}, {-1, 2}};
  if (label == "A3") return {{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}};
  if (label == "B2") return {{2, -2}, {-1, 2}};
  if (label == "B3") return {{2, -1, 0}, {-1, 2, -2}, {0, -1, 2}};
  if (label == "C2") return {{2, -1}, {-2, 2}};
  if (label == "C3") return {{2, -1, 0}, {-1, 2, -1}, {0, -2, 2}};
  throw ConfigError("unsupported type label '" + label +
                    "' (supported: A1, A2, A3, B2, B3, C2, C3)");
}

}  // namespace

RootSystem RootSystem::build(const std::string& type_label) {
  RootSystem rs;
  rs.label_ = type_label;
  auto cartan = cartan_for_label(type_label);
  rs.rank_ = static_cast<int>(cartan.size());
  rs.cartan_ = cartan;
  rs.build_roots(cartan);
  rs.build_structure_constants();
  rs.build_killing();
  rs.build_weyl();
  return rs;
}

int RootSystem::pairing(const RootVec& v, int j) const {
  int s = 0;
  for (int k = 0; k < rank_; ++k) s += v.m[k] * cartan_[k][j];
  return s;
}

void RootSystem::build_roots(const std::vector<std::vector<int>>& cartan) {
  (void)cartan;
  std::set<RootVec> found;
  std::vector<RootVec> frontier;
  for (int i = 0; i < rank_; ++i) {
    RootVec a;
    a.m.assign(rank_, 0);
    a.m[i] = 1;
    found.insert(a);
    frontier.push_back(a);
  }
  // Close upwards height by height: gamma + alpha_i is a root iff the
  // alpha_i-string through gamma continues, i.e. p - gamma(H_i) > 0 with
  // p the depth of the string below gamma.
  while (!frontier.empty()) {
    std::vector<RootVec> next;
    for (const auto& g : frontier) {
      for (int i = 0; i < rank_; ++i) {
        RootVec step;
        step.m.assign(rank_, 0);
        step.m[i] = 1;
        int p = 0;
        RootVec down = g - step;
        while (!down.is_zero() && found.count(down)) {
          ++p;
          down = down - step;
        }
        int q = p - pairing(g, i);
        if (q > 0) {
          RootVec up = g + step;
          if (!found.count(up)) {
            found.insert(up);
            next.push_back(up);
          }
        }
      }
    }
    frontier = std::move(next);
  }
  positive_.assign(found.begin(), found.end());
  std::sort(positive_.begin(), positive_.end(), [](const RootVec& a, const RootVec& b) {
    if (a.height() != b.height()) return a.height() < b.height();
    return a.m < b.m;
  });
  for (size_t p = 0; p < positive_.size(); ++p) positive_index_[positive_[p]] = static_cast<int>(p);

  // Symmetrizers d_i with d_j * cartan(i,j) = d_i * cartan(j,i); the
  // normalized form on the root lattice is B_ij = d_j * cartan(i,j).
  std::vector<Rat> d(rank_, Rat(0));
  d[0] = 1;
  std::deque<int> queue{0};
  std::vector<bool> seen(rank_, false);
  seen[0] = true;
  while (!queue.empty()) {
    int i = queue.front();
    queue.pop_front();
    for (int j = 0; j < rank_; ++j) {
      if (i == j || cartan_[i][j] == 0 || seen[j]) continue;
      d[j] = d[i] * Rat(cartan_[j][i]) / Rat(cartan_[i][j]);
      seen[j] = true;
      queue.push_back(j);
    }
  }
  mpz_class lcm_den = 1;
  for (const auto& x : d) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), x.get_den().get_mpz_t());
  sym_d_.resize(rank_);
  for (int i = 0; i < rank_; ++i) {
    Rat scaled = d[i] * Rat(lcm_den);
    assert(is_integer(scaled));
    sym_d_[i] = static_cast<int>(scaled.get_num().get_si());
  }
  for (int i = 0; i < rank_; ++i)
    for (int j = 0; j < rank_; ++j) assert(sym_d_[j] * cartan_[i][j] == sym_d_[i] * cartan_[j][i]);

  // Coroot of gamma = sum m_i alpha_i: H_gamma = sum m_i (alpha_i,alpha_i)/(gamma,gamma) H_i.
  coroot_.resize(positive_.size());
  for (size_t p = 0; p < positive_.size(); ++p) {
    const auto& g = positive_[p];
    Rat norm = form_roots(g, g);
    coroot_[p].resize(rank_);
    for (int i = 0; i < rank_; ++i) {
      Rat ci = Rat(g.m[i]) * Rat(2 * sym_d_[i]) / norm;
      if (!is_integer(ci)) throw std::logic_error("non-integral coroot coefficient");
      coroot_[p][i] = ci.get_num().get_si();
    }
  }
}

Rat RootSystem::form_roots(const RootVec& a, const RootVec& b) const {
  long s = 0;
  for (int i = 0; i < rank_; ++i)
    for (int j = 0; j < rank_; ++j) s += static_cast<long>(a.m[i]) * sym_d_[j] * cartan_[i][j] * b.m[j];
  return Rat(s);
}

int RootSystem::positive_index(const RootVec& v) const {
  auto it = positive_index_.find(v);
  return it == positive_index_.end() ? -1 : it->second;
}

bool RootSystem::is_root(const RootVec& v) const {
  if (positive_index(v) >= 0) return true;
  return positive_index(-v) >= 0;
}

namespace {
// Down-string depth p = max{k : b - k a is a root}.
int string_depth(const RootSystem& rs, const RootVec& a, const RootVec& b) {
  int p = 0;
  RootVec cur = b - a;
  while (!cur.is_zero() && rs.is_root(cur)) {
    ++p;
    cur = cur - a;
  }
  return p;
}
}  // namespace

long RootSystem::n_general(const RootVec& a, const RootVec& b) const {
  RootVec s = a + b;
  if (s.is_zero() || !is_root(s)) return 0;
  bool apos = positive_index(a) >= 0;
  bool bpos = positive_index(b) >= 0;
  if (apos && bpos) return npos_[positive_index(a)][positive_index(b)];
  if (!apos && !bpos) return -n_general(-a, -b);
  if (!apos) return -n_general(b, a);
  // a positive, b negative
  if (positive_index(s) >= 0) {
    // triple (a, b, -s): N_{a,b}/(s,s) = N_{b,-s}/(a,a)
    Rat val = form_roots(s, s) / form_roots(a, a) * Rat(n_general(b, -s));
    assert(is_integer(val));
    return val.get_num().get_si();
  }
  // negative sum: N_{a,b} = -N_{-a,-b} = N_{-b,-a} with -b positive
  return n_general(-b, -a);
}

long RootSystem::structure_constant(const RootVec& a, const RootVec& b) const {
  return n_general(a, b);
}

void RootSystem::build_structure_constants() {
  const int P = num_positive();
  npos_.assign(P, std::vector<long>(P, 0));

  // Signs fixed on extraspecial pairs: for each non-simple positive root g
  // the pair (a, b), a + b = g, with minimal a in the root order gets a
  // positive constant; all other pairs follow from the Jacobi identity.
  for (int gi = 0; gi < P; ++gi) {
    const RootVec& g = positive_[gi];
    if (g.height() < 2) continue;
    int xi = -1, eta = -1;
    for (int a = 0; a < P; ++a) {
      RootVec b = g - positive_[a];
      int bi = positive_index(b);
      if (bi >= 0 && a < bi) {
        xi = a;
        eta = bi;
        break;  // positive_ is sorted by the root order, so first hit is minimal
      }
    }
    if (xi < 0) throw std::logic_error("no special pair for non-simple root");
    npos_[xi][eta] = string_depth(*this, positive_[xi], positive_[eta]) + 1;
    npos_[eta][xi] = -npos_[xi][eta];

    for (int a = 0; a < P; ++a) {
      RootVec bv = g - positive_[a];
      int bi = positive_index(bv);
      if (bi < 0 || a >= bi || a == xi) continue;
      const RootVec& av = positive_[a];
      const RootVec& xiv = positive_[xi];
      const RootVec& etav = positive_[eta];
      // Jacobi on the quadruple (xi, eta, -a, -b) with xi + eta = a + b = g.
      Rat acc(0);
      RootVec d1 = etav - av;
      if (!d1.is_zero() && is_root(d1)) {
        acc += Rat(n_general(etav, -av)) * Rat(n_general(xiv, -bv)) / form_roots(d1, d1);
      }
      RootVec d2 = xiv - av;
      if (!d2.is_zero() && is_root(d2)) {
        acc += Rat(n_general(-av, xiv)) * Rat(n_general(etav, -bv)) / form_roots(d2, d2);
      }
      Rat val = form_roots(g, g) * acc / Rat(npos_[xi][eta]);
      if (!is_integer(val)) throw std::logic_error("non-integral structure constant");
      long n = val.get_num().get_si();
      long expected = string_depth(*this, av, positive_[bi]) + 1;
      if (std::abs(n) != expected) throw std::logic_error("structure constant magnitude mismatch");
      npos_[a][bi] = n;
      npos_[bi][a] = -n;
    }
  }

  // Full bracket table over basis letters.
  const int D = dim();
  table_.assign(D, std::vector<std::vector<BracketTerm>>(D));
  auto set_pair = [&](const Letter& a, const Letter& b, std::vector<BracketTerm> terms) {
    int ia = letter_to_basis(a), ib = letter_to_basis(b);
    std::vector<BracketTerm> neg;
    for (const auto& t : terms) neg.push_back({t.x, -t.coeff});
    table_[ia][ib] = std::move(terms);
    table_[ib][ia] = std::move(neg);
  };

  for (int i = 0; i < rank_; ++i) {
    for (int p = 0; p < P; ++p) {
      // [H_i, E_p] = beta_p(H_i) E_p, [H_i, F_p] = -beta_p(H_i) F_p.
      // pairing(beta, i) is beta evaluated on H_i via the Cartan matrix.
      long v = 0;
      for (int k = 0; k < rank_; ++k) v += positive_[p].m[k] * cartan_[k][i];
      std::vector<BracketTerm> te, tf;
      if (v != 0) {
        te.push_back({letter_E(p), v});
        tf.push_back({letter_F(p), -v});
      }
      set_pair(letter_H(i), letter_E(p), std::move(te));
      set_pair(letter_H(i), letter_F(p), std::move(tf));
    }
  }
  for (int p = 0; p < P; ++p) {
    std::vector<BracketTerm> h;
    for (int i = 0; i < rank_; ++i)
      if (coroot_[p][i] != 0) h.push_back({letter_H(i), coroot_[p][i]});
    set_pair(letter_E(p), letter_F(p), std::move(h));
  }
  for (int p = 0; p < P; ++p) {
    for (int q = p + 1; q < P; ++q) {
      RootVec s = positive_[p] + positive_[q];
      int si = positive_index(s);
      std::vector<BracketTerm> ee, ff;
      if (si >= 0) {
        long n = npos_[p][q];
        if (n != 0) {
          ee.push_back({letter_E(si), n});
          ff.push_back({letter_F(si), -n});  // N_{-a,-b} = -N_{a,b}
        }
      }
      set_pair(letter_E(p), letter_E(q), std::move(ee));
      set_pair(letter_F(p), letter_F(q), std::move(ff));

      // mixed [E_p, F_q], p != q
      for (auto [ep, fq] : {std::pair{p, q}, std::pair{q, p}}) {
        RootVec dvec = positive_[ep] - positive_[fq];
        std::vector<BracketTerm> t;
        long n = n_general(positive_[ep], -positive_[fq]);
        if (n != 0) {
          int dp = positive_index(dvec);
          if (dp >= 0) t.push_back({letter_E(dp), n});
          else
            t.push_back({letter_F(positive_index(-dvec)), n});
        }
        set_pair(letter_E(ep), letter_F(fq), std::move(t));
      }
    }
  }
  for (int i = 0; i < rank_; ++i)
    for (int j = 0; j < rank_; ++j) table_[P + i][P + j].clear();
}

int RootSystem::letter_to_basis(const Letter& l) const {
  const int P = num_positive();
  switch (l.kind) {
    case LetterKind::F: return l.index;
    case LetterKind::H: return P + l.index;
    case LetterKind::E: return P + rank_ + l.index;
  }
  return -1;
}

Letter RootSystem::basis_to_letter(int b) const {
  const int P = num_positive();
  if (b < P) return letter_F(b);
  if (b < P + rank_) return letter_H(b - P);
  return letter_E(b - P - rank_);
}

const std::vector<BracketTerm>& RootSystem::bracket(const Letter& a, const Letter& b) const {
  return table_[letter_to_basis(a)][letter_to_basis(b)];
}

void RootSystem::build_killing() {
  const int D = dim();
  // ad matrices from the bracket table, then kappa(a,b) = tr(ad a ad b)
  std::vector<std::vector<std::vector<long>>> ad(D, std::vector<std::vector<long>>(D, std::vector<long>(D, 0)));
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b)
      for (const auto& t : table_[a][b]) ad[a][letter_to_basis(t.x)][b] += t.coeff;
  killing_.assign(D, std::vector<long>(D, 0));
  for (int a = 0; a < D; ++a)
    for (int b = a; b < D; ++b) {
      long s = 0;
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) s += ad[a][i][j] * ad[b][j][i];
      killing_[a][b] = killing_[b][a] = s;
    }
  const int P = num_positive();
  killing_h_.assign(rank_, std::vector<long>(rank_, 0));
  for (int i = 0; i < rank_; ++i)
    for (int j = 0; j < rank_; ++j) {
      killing_h_[i][j] = killing_[P + i][P + j];
      // cross-check against the root-sum formula for the Cartan block
      long s = 0;
      for (int p = 0; p < P; ++p) {
        long vi = 0, vj = 0;
        for (int k = 0; k < rank_; ++k) {
          vi += positive_[p].m[k] * cartan_[k][i];
          vj += positive_[p].m[k] * cartan_[k][j];
        }
        s += 2 * vi * vj;
      }
      if (s != killing_h_[i][j]) throw std::logic_error("Killing form Cartan block mismatch");
    }
}

Weight RootSystem::root_as_weight(int p) const {
  Weight w(rank_);
  for (int j = 0; j < rank_; ++j) w.c[j] = Rat(pairing(positive_[p], j));
  return w;
}

Weight RootSystem::fundamental_weight(int i) const {
  Weight w(rank_);
  w.c[i] = 1;
  return w;
}

Weight RootSystem::rho() const {
  Weight w(rank_);
  for (auto& x : w.c) x = 1;
  return w;
}

Rat RootSystem::pair_coroot(const Weight& lam, int p) const {
  Rat s(0);
  for (int i = 0; i < rank_; ++i) s += Rat(coroot_[p][i]) * lam.c[i];
  return s;
}

std::vector<Rat> RootSystem::weight_to_root_coords(const Weight& lam) const {
  // lam = sum_k m_k alpha_k with lam_j = sum_k m_k cartan(k,j)
  ExactMat<Rat> a(rank_, std::vector<Rat>(rank_));
  for (int j = 0; j < rank_; ++j)
    for (int k = 0; k < rank_; ++k) a[j][k] = Rat(cartan_[k][j]);
  auto sol = solve(a, lam.c);
  if (!sol) throw std::logic_error("Cartan matrix singular");
  return *sol;
}

std::vector<Rat> RootSystem::killing_dual(const Weight& lam) const {
  ExactMat<Rat> g(rank_, std::vector<Rat>(rank_));
  for (int i = 0; i < rank_; ++i)
    for (int j = 0; j < rank_; ++j) g[i][j] = Rat(killing_h_[i][j]);
  auto sol = solve(g, lam.c);
  if (!sol) throw std::logic_error("Killing Cartan block singular");
  return *sol;
}

Rat RootSystem::killing_form_weights(const Weight& a, const Weight& b) const {
  auto ha = killing_dual(a);
  Rat s(0);
  for (int i = 0; i < rank_; ++i) s += b.c[i] * ha[i];
  return s;
}

void RootSystem::build_weyl() {
  auto identity = [&] {
    std::vector<std::vector<long>> m(rank_, std::vector<long>(rank_, 0));
    for (int i = 0; i < rank_; ++i) m[i][i] = 1;
    return m;
  }();
  // matrix of s_k on coroot coordinates
  auto refl = [&](int k) {
    std::vector<std::vector<long>> m(rank_, std::vector<long>(rank_, 0));
    for (int j = 0; j < rank_; ++j) {
      m[j][j] = 1;
      m[j][k] -= cartan_[k][j];
    }
    return m;
  };
  auto mul = [&](const std::vector<std::vector<long>>& a, const std::vector<std::vector<long>>& b) {
    std::vector<std::vector<long>> c(rank_, std::vector<long>(rank_, 0));
    for (int i = 0; i < rank_; ++i)
      for (int k = 0; k < rank_; ++k)
        for (int j = 0; j < rank_; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
  };

  weyl_.clear();
  weyl_lookup_.clear();
  weyl_.push_back(WeylElement{{}, identity});
  weyl_lookup_[identity] = 0;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int w = queue.front();
    queue.pop_front();
    for (int k = 0; k < rank_; ++k) {
      auto m = mul(refl(k), weyl_[w].mat);
      if (weyl_lookup_.count(m)) continue;
      WeylElement e;
      e.word = weyl_[w].word;
      e.word.insert(e.word.begin(), k);
      e.mat = m;
      weyl_lookup_[m] = static_cast<int>(weyl_.size());
      queue.push_back(static_cast<int>(weyl_.size()));
      weyl_.push_back(std::move(e));
    }
  }

  // longest element: sends every positive root to a negative one
  w0_ = -1;
  size_t maxlen = 0;
  for (size_t w = 0; w < weyl_.size(); ++w) maxlen = std::max(maxlen, weyl_[w].word.size());
  for (size_t w = 0; w < weyl_.size(); ++w) {
    if (weyl_[w].word.size() != maxlen) continue;
    bool all_neg = true;
    for (int p = 0; p < num_positive() && all_neg; ++p) {
      RootVec img = weyl_act_root(static_cast<int>(w), positive_[p]);
      all_neg = positive_index(-img) >= 0;
    }
    if (all_neg) {
      w0_ = static_cast<int>(w);
      break;
    }
  }
  if (w0_ < 0) throw std::logic_error("longest Weyl element not found");
}

Weight RootSystem::weyl_act(int w, const Weight& lam) const {
  const auto& m = weyl_[w].mat;
  Weight out(rank_);
  for (int j = 0; j < rank_; ++j) {
    Rat s(0);
    for (int i = 0; i < rank_; ++i) s += Rat(m[j][i]) * lam.c[i];
    out.c[j] = s;
  }
  return out;
}

Weight RootSystem::weyl_act_shifted(int w, const Weight& lam) const {
  return weyl_act(w, lam + rho()) - rho();
}

RootVec RootSystem::weyl_act_root(int w, const RootVec& v) const {
  RootVec cur = v;
  const auto& word = weyl_[w].word;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    int k = *it;
    int val = pairing(cur, k);
    cur.m[k] -= val;
  }
  return cur;
}

int RootSystem::weyl_compose(int w1, int w2) const {
  std::vector<std::vector<long>> c(rank_, std::vector<long>(rank_, 0));
  const auto& a = weyl_[w1].mat;
  const auto& b = weyl_[w2].mat;
  for (int i = 0; i < rank_; ++i)
    for (int k = 0; k < rank_; ++k)
      for (int j = 0; j < rank_; ++j) c[i][j] += a[i][k] * b[k][j];
  auto it = weyl_lookup_.find(c);
  assert(it != weyl_lookup_.end());
  return it->second;
}

int RootSystem::weyl_inverse(int w) const {
  for (int v = 0; v < weyl_order(); ++v)
    if (weyl_compose(w, v) == 0) return v;
  throw std::logic_error("Weyl inverse not found");
}

int RootSystem::weyl_index(const std::vector<std::vector<long>>& mat) const {
  auto it = weyl_lookup_.find(mat);
  return it == weyl_lookup_.end() ? -1 : it->second;
}

Weight RootSystem::dual_weight(const Weight& lam) const {
  return -weyl_act(w0_, lam);
}

Regularity RootSystem::regularity(const Weight& lam) const {
  Regularity r;
  for (int p = 0; p < num_positive(); ++p)
    if (pair_coroot(lam, p) == 0) r.delta_plus_lambda.push_back(p);
  for (int i = 0; i < rank_; ++i)
    if (lam.c[i] == 0) r.sigma.push_back(i);
  // closure test: every decomposition of a pairing-zero root into two
  // positive roots must consist of pairing-zero roots
  std::set<int> zero(r.delta_plus_lambda.begin(), r.delta_plus_lambda.end());
  r.relatively_regular = true;
  for (int p : r.delta_plus_lambda) {
    for (int a = 0; a < num_positive() && r.relatively_regular; ++a) {
      RootVec b = positive_[p] - positive_[a];
      int bi = positive_index(b);
      if (bi < 0) continue;
      if (!zero.count(a) || !zero.count(bi)) r.relatively_regular = false;
    }
  }
  return r;
}

long RootSystem::irrep_dimension(const Weight& lam) const {
  if (!lam.is_dominant() || !lam.is_integral())
    throw ConfigError("irrep dimension requires a dominant integral weight, got " + lam.str());
  Weight lr = lam + rho();
  Rat prod(1);
  for (int p = 0; p < num_positive(); ++p) prod *= pair_coroot(lr, p) / pair_coroot(rho(), p);
  if (!is_integer(prod)) throw std::logic_error("Weyl dimension not integral");
  return prod.get_num().get_si();
}

}  // namespace berezin
