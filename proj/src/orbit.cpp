#include "berezin/orbit.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "berezin/errors.hpp"
#include "berezin/repr.hpp"

namespace berezin {

CompactGroupElement CompactGroupElement::generator(int dim, int basis_index, double angle) {
  CompactGroupElement k;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
  c[basis_index] = 1.0;
  k.word.push_back({std::move(c), angle});
  return k;
}

CompactGroupElement CompactGroupElement::operator*(const CompactGroupElement& o) const {
  CompactGroupElement out = *this;
  out.word.insert(out.word.end(), o.word.begin(), o.word.end());
  return out;
}

CompactGroupElement CompactGroupElement::inverse() const {
  CompactGroupElement out;
  out.word.reserve(word.size());
  for (auto it = word.rbegin(); it != word.rend(); ++it)
    out.word.push_back({it->coeffs, -it->angle});
  return out;
}

CompactStructure::CompactStructure(const RootSystem& rs) : rs_(&rs), dim_(rs.dim()) {
  const int r = rs.rank(), pos = rs.num_positive(), d = dim_;
  const GaussRat im = GaussRat::unit_im();

  // compact basis over the Chevalley basis: column a holds Y_a
  chev_of_compact_.assign(d, std::vector<GaussRat>(d, GaussRat()));
  for (int j = 0; j < r; ++j)
    chev_of_compact_[rs.letter_to_basis(rs.letter_H(j))][index_torus(j)] = im;
  for (int p = 0; p < pos; ++p) {
    int be = rs.letter_to_basis(rs.letter_E(p));
    int bf = rs.letter_to_basis(rs.letter_F(p));
    chev_of_compact_[be][index_re(p)] = GaussRat(1);
    chev_of_compact_[bf][index_re(p)] = GaussRat(-1);
    chev_of_compact_[be][index_im(p)] = im;
    chev_of_compact_[bf][index_im(p)] = im;
  }
  auto inv = inverse(chev_of_compact_);
  assert(inv && "compact basis change must be invertible");
  compact_of_chev_ = std::move(*inv);

  // exact adjoint matrices in compact coordinates; entries close over the
  // integers because the real form is defined over the Chevalley lattice
  ad_.assign(d, Eigen::MatrixXd::Zero(d, d));
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      // [Y_a, Y_b] expanded over the Chevalley basis
      std::vector<GaussRat> res(d, GaussRat());
      for (int b1 = 0; b1 < d; ++b1) {
        const GaussRat& ca = chev_of_compact_[b1][a];
        if (ca.is_zero()) continue;
        for (int b2 = 0; b2 < d; ++b2) {
          const GaussRat& cb = chev_of_compact_[b2][b];
          if (cb.is_zero()) continue;
          for (const auto& t : rs.bracket(rs.basis_to_letter(b1), rs.basis_to_letter(b2)))
            res[rs.letter_to_basis(t.x)] += ca * cb * GaussRat(t.coeff);
        }
      }
      for (int c = 0; c < d; ++c) {
        GaussRat v;
        for (int b1 = 0; b1 < d; ++b1) {
          if (compact_of_chev_[c][b1].is_zero() || res[b1].is_zero()) continue;
          v += compact_of_chev_[c][b1] * res[b1];
        }
        assert(v.im == 0 && is_integer(v.re) && "compact form closes over the integers");
        ad_[a](c, b) = v.re.get_d();
      }
    }
  }

  // Killing data: kappa(X_b, Y_a) and kappa(Y_a, Y_b)
  killing_cross_ = Eigen::MatrixXcd::Zero(d, d);
  for (int b = 0; b < d; ++b)
    for (int a = 0; a < d; ++a) {
      GaussRat v;
      for (int b2 = 0; b2 < d; ++b2) {
        const GaussRat& c = chev_of_compact_[b2][a];
        if (!c.is_zero()) v += c * GaussRat(rs.killing_basis()[b][b2]);
      }
      killing_cross_(b, a) = v.to_complex();
    }
  killing_compact_ = Eigen::MatrixXd::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      GaussRat v;
      for (int b1 = 0; b1 < d; ++b1) {
        const GaussRat& c = chev_of_compact_[b1][a];
        if (c.is_zero()) continue;
        for (int b2 = 0; b2 < d; ++b2) {
          const GaussRat& e = chev_of_compact_[b2][b];
          if (!e.is_zero()) v += c * e * GaussRat(rs.killing_basis()[b1][b2]);
        }
      }
      assert(v.im == 0);
      killing_compact_(a, b) = v.re.get_d();
    }
}

std::string CompactStructure::basis_name(int a) const {
  const int r = rs_->rank();
  if (a < r) return "iH[a" + std::to_string(a + 1) + "]";
  int p = (a - r) / 2;
  std::string root = rs_->positive_root(p).str();
  if ((a - r) % 2 == 0) return "E[" + root + "]-F[" + root + "]";
  return "i(E[" + root + "]+F[" + root + "])";
}

Eigen::MatrixXd CompactStructure::ad_combo(const Eigen::VectorXd& coeffs) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int a = 0; a < dim_; ++a)
    if (coeffs[a] != 0.0) m += coeffs[a] * ad_[a];
  return m;
}

Eigen::MatrixXd CompactStructure::ad_matrix(const CompactGroupElement& k) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim_, dim_);
  for (const auto& l : k.word) m = m * (l.angle * ad_combo(l.coeffs)).exp();
  return m;
}

Eigen::MatrixXcd CompactStructure::ad_chevalley(const CompactGroupElement& k) const {
  Eigen::MatrixXcd t(dim_, dim_), tinv(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) {
      t(i, j) = chev_of_compact_[i][j].to_complex();
      tinv(i, j) = compact_of_chev_[i][j].to_complex();
    }
  return t * ad_matrix(k).cast<std::complex<double>>() * tinv;
}

Eigen::VectorXd CompactStructure::ih_dual(const Weight& lam) const {
  // the Killing dual of lam lies in the Cartan, so iH^lam is a torus vector
  auto c = rs_->killing_dual(lam);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  for (int j = 0; j < rs_->rank(); ++j) v[index_torus(j)] = c[j].get_d();
  return v;
}

OrbitPoint CompactStructure::psi(const Weight& lam, const CompactGroupElement& k) const {
  return {ad_matrix(k) * ih_dual(lam)};
}

std::vector<std::complex<double>> CompactStructure::chevalley_pairings(
    const OrbitPoint& x) const {
  Eigen::VectorXcd v = killing_cross_ * x.x.cast<std::complex<double>>();
  return {v.data(), v.data() + dim_};
}

std::vector<Eigen::VectorXd> CompactStructure::stabilizer_basis(const Weight& lam) const {
  std::vector<Eigen::VectorXd> out;
  for (int j = 0; j < rs_->rank(); ++j) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
    v[index_torus(j)] = 1.0;
    out.push_back(std::move(v));
  }
  for (int p = 0; p < rs_->num_positive(); ++p) {
    if (rs_->pair_coroot(lam, p) != 0) continue;
    for (int which : {0, 1}) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
      v[which ? index_im(p) : index_re(p)] = 1.0;
      out.push_back(std::move(v));
    }
  }
  return out;
}

int CompactStructure::orbit_dimension(const Weight& lam) const {
  return dim_ - static_cast<int>(stabilizer_basis(lam).size());
}

CompactGroupElement CompactStructure::coxeter_lift() const {
  const auto& w0 = rs_->weyl()[rs_->weyl_longest()];
  CompactGroupElement k;
  for (int s : w0.word) {
    RootVec simple;
    simple.m.assign(rs_->rank(), 0);
    simple.m[s] = 1;
    int p = rs_->positive_index(simple);
    k = k * CompactGroupElement::generator(dim_, index_re(p), M_PI / 2);
  }
  return k;
}

QuadratureSet haar_quadrature(const CompactStructure& cs, int max_degree) {
  if (cs.root_system().label() != "A1")
    throw ConfigError("exact quadrature is implemented for A1 only");
  const int d = cs.dim();
  const int m_phi = max_degree + 1;
  const int m_leg = max_degree / 2 + 2;

  // Gauss-Legendre nodes on [-1, 1] by Newton iteration
  std::vector<double> u(m_leg), wu(m_leg);
  for (int i = 0; i < m_leg; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (m_leg + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= m_leg; ++j) {
        double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double dp = m_leg * (x * p1 - p0) / (x * x - 1.0);
      double x1 = x - p1 / dp;
      bool done = std::abs(x1 - x) < 1e-15;
      x = x1;
      if (done) break;
    }
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= m_leg; ++j) {
      double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    double dp = m_leg * (x * p1 - p0) / (x * x - 1.0);
    u[i] = x;
    wu[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }

  // Euler angles k = exp(phi iH) exp(theta (E-F)) exp(psi iH). Integrands
  // that kill the center are pi-periodic in phi and psi with even
  // frequencies, and their exact angle average is an even polynomial in
  // cos 2theta; uniform grids cover frequencies up to 2*max_degree and the
  // Legendre rule the matching cos degree.
  QuadratureSet q;
  q.mode = "euler-product";
  q.max_degree = max_degree;
  const int it = cs.index_torus(0), ir = cs.index_re(0);
  for (int i = 0; i < m_phi; ++i) {
    double phi = M_PI * i / m_phi;
    for (int j = 0; j < m_leg; ++j) {
      double theta = 0.5 * std::acos(u[j]);
      for (int l = 0; l < m_phi; ++l) {
        double psi = M_PI * l / m_phi;
        CompactGroupElement k = CompactGroupElement::generator(d, it, phi) *
                                CompactGroupElement::generator(d, ir, theta) *
                                CompactGroupElement::generator(d, it, psi);
        q.samples.push_back({std::move(k), wu[j] / (2.0 * m_phi * m_phi)});
      }
    }
  }
  return q;
}

namespace {

// defining-representation data used to draw exact Haar samples for type A
struct DefiningRepData {
  std::unique_ptr<Irrep> rep;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> solver;  // vec(X) -> coefficients
};

const DefiningRepData& defining_rep(const CompactStructure& cs) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<DefiningRepData>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[cs.root_system().label()];
  if (!slot) {
    const RootSystem& rs = cs.root_system();
    auto data = std::make_unique<DefiningRepData>();
    data->rep = std::make_unique<Irrep>(Irrep::build(rs, rs.fundamental_weight(0)));
    const int q = data->rep->dim(), d = cs.dim();
    Eigen::MatrixXd basis_flat(2 * q * q, d);
    for (int a = 0; a < d; ++a) {
      Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(d);
      coeffs[a] = 1.0;
      Eigen::MatrixXcd m = Eigen::MatrixXcd(data->rep->compact_on(coeffs));
      for (int c = 0; c < q; ++c)
        for (int r2 = 0; r2 < q; ++r2) {
          basis_flat(c * q + r2, a) = m(r2, c).real();
          basis_flat(q * q + c * q + r2, a) = m(r2, c).imag();
        }
    }
    data->solver.compute(basis_flat);
    slot = std::move(data);
  }
  return *slot;
}

CompactGroupElement haar_sample_type_a(const CompactStructure& cs, std::mt19937_64& rng) {
  const int q = cs.rank() + 1;
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXcd g(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) g(i, j) = std::complex<double>(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd qmat = qr.householderQ();
  Eigen::MatrixXcd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < q; ++j) qmat.col(j) *= rmat(j, j) / std::abs(rmat(j, j));
  return compact_from_unitary(cs, qmat);
}

}  // namespace

CompactGroupElement compact_from_unitary(const CompactStructure& cs, const Eigen::MatrixXcd& u) {
  if (cs.root_system().label()[0] != 'A')
    throw ConfigError("compact_from_unitary: defining matrix coordinates exist for type A only");
  const auto& def = defining_rep(cs);
  const int q = def.rep->dim();
  if (u.rows() != q || u.cols() != q)
    throw ConfigError("compact_from_unitary: matrix size does not match the defining module");

  // restrict from the unitary group to its special subgroup
  Eigen::MatrixXcd qmat = u;
  std::complex<double> det = qmat.determinant();
  qmat *= std::exp(std::complex<double>(0.0, -std::arg(det) / q));

  // logarithm through the Schur form (the matrix is normal, T is diagonal);
  // branches are shifted so the eigenvalue angles sum to zero exactly
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(qmat);
  std::vector<double> args(q);
  double total = 0.0;
  for (int i = 0; i < q; ++i) {
    args[i] = std::arg(schur.matrixT()(i, i));
    total += args[i];
  }
  int wraps = static_cast<int>(std::lround(total / (2.0 * M_PI)));
  while (wraps > 0) {
    int j = static_cast<int>(std::max_element(args.begin(), args.end()) - args.begin());
    args[j] -= 2.0 * M_PI;
    --wraps;
  }
  while (wraps < 0) {
    int j = static_cast<int>(std::min_element(args.begin(), args.end()) - args.begin());
    args[j] += 2.0 * M_PI;
    ++wraps;
  }
  Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(q, q);
  for (int i = 0; i < q; ++i) diag(i, i) = std::complex<double>(0.0, args[i]);
  Eigen::MatrixXcd x = schur.matrixU() * diag * schur.matrixU().adjoint();

  Eigen::VectorXd flat(2 * q * q);
  for (int c = 0; c < q; ++c)
    for (int r2 = 0; r2 < q; ++r2) {
      flat(c * q + r2) = x(r2, c).real();
      flat(q * q + c * q + r2) = x(r2, c).imag();
    }
  CompactGroupElement k;
  k.word.push_back({def.solver.solve(flat), 1.0});
  return k;
}

QuadratureSet haar_monte_carlo(const CompactStructure& cs, int count, std::uint64_t seed) {
  QuadratureSet q;
  q.seed = seed;
  std::mt19937_64 rng(seed);
  const bool exact = cs.root_system().label()[0] == 'A';
  q.mode = exact ? "haar-qr" : "word-mixing";
  const double w = 1.0 / count;
  if (exact) {
    for (int i = 0; i < count; ++i) q.samples.push_back({haar_sample_type_a(cs, rng), w});
    return q;
  }
  // fallback without an exactness guarantee: long words of generator rotations
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  const int d = cs.dim();
  const int len = 6 * d;
  for (int i = 0; i < count; ++i) {
    CompactGroupElement k;
    for (int l = 0; l < len; ++l) {
      int a = static_cast<int>(rng() % d);
      k = k * CompactGroupElement::generator(d, a, angle(rng));
    }
    q.samples.push_back({std::move(k), w});
  }
  return q;
}

IwasawaFactors iwasawa(const Eigen::MatrixXcd& g) {
  const int n = static_cast<int>(g.rows());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd qmat = qr.householderQ();
  Eigen::MatrixXcd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  IwasawaFactors f;
  f.a = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double m = std::abs(rmat(j, j));
    if (m < 1e-13 * g.norm()) throw std::invalid_argument("iwasawa: singular input");
    std::complex<double> phase = rmat(j, j) / m;
    qmat.col(j) *= phase;
    rmat.row(j) /= phase;
    f.a(j, j) = m;
  }
  f.k = qmat;
  f.n = f.a.inverse() * rmat;
  return f;
}

}  // namespace berezin
