#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "berezin/orbit.hpp"
#include "berezin/pbw.hpp"
#include "berezin/repr.hpp"
#include "berezin/symbols.hpp"

namespace berezin {

// One member of a quantization family: the module at level n, the matrices
// of the operator basis, and the fit/holdout design matrices of symbol
// values. Symbols are evaluated at n*lambda; operators live in the module
// of highest weight w.(n*lambda), which coincides with n*lambda for the
// identity frame.
struct StarLevel {
  int n = 0;
  Weight module_weight;
  Weight symbol_weight;
  Irrep rep;
  std::vector<Eigen::MatrixXcd> op_mats;
  Eigen::MatrixXcd design;
  Eigen::MatrixXcd holdout_design;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> solver;
  double cond = 0.0;
  // coherent states at the sample points, one column per sample
  Eigen::MatrixXcd coherent_fit;
  Eigen::MatrixXcd coherent_holdout;
};

struct Quantized {
  Eigen::VectorXcd coeff;
  Eigen::MatrixXcd op;
  double residual = 0.0;
};

struct StarResult {
  Eigen::MatrixXcd op;
  SampledFunction on_fit;
  SampledFunction on_holdout;
};

// Family of symbol algebras over one orbit, indexed by the level n. The
// operator basis is the PBW monomials of degree <= max_deg; sample sets are
// drawn once per family (fit and holdout separately) and shared by all
// levels, so the per-sample Cartan profiles are computed once and evaluated
// at every level as polynomials in n. The design matrix is checked for
// conditioning; the family redraws its samples once if a level exceeds 1e6.
class StarFamily {
 public:
  StarFamily(const CompactStructure& cs, Weight lambda, int w, int max_deg, std::uint64_t seed);

  const CompactStructure& compact() const { return *cs_; }
  const RootSystem& root_system() const { return cs_->root_system(); }
  const Weight& base_weight() const { return lambda_; }
  int frame() const { return w_; }
  int op_count() const { return static_cast<int>(ops_.size()); }
  std::uint64_t seed() const { return seed_; }

  const std::shared_ptr<const QuadratureSet>& fit_samples() const { return fit_quad_; }
  const std::shared_ptr<const QuadratureSet>& holdout_samples() const { return holdout_quad_; }
  const std::vector<OrbitPoint>& fit_points() const { return fit_points_; }
  const std::vector<OrbitPoint>& holdout_points() const { return holdout_points_; }

  const StarLevel& level(int n);

  // values of a polynomial at the cached orbit points
  Eigen::VectorXcd restrict_fit(const SymPolynomial<std::complex<double>>& f) const;
  Eigen::VectorXcd restrict_holdout(const SymPolynomial<std::complex<double>>& f) const;

  // least-squares fit of f against the level's symbol basis; throws
  // NotInAlgebraError when the fit residual certifies non-membership
  Quantized quantize(const SymPolynomial<std::complex<double>>& f, int n);

  // symbol of the operator product quantize(f1) * quantize(f2), sampled on
  // both sample sets
  StarResult star(const SymPolynomial<std::complex<double>>& f1,
                  const SymPolynomial<std::complex<double>>& f2, int n);

  // operator recovered from sampled fit values; used for closure checks
  Eigen::MatrixXcd requantize(const Eigen::VectorXcd& fit_values, int n);

 private:
  void draw_samples(std::uint64_t seed);
  void build_profiles();
  StarLevel build_level(int n) const;
  Eigen::VectorXcd symbol_on_samples(const PBWComplex& u, const Weight& mu,
                                     const QuadratureSet& quad) const;

  const CompactStructure* cs_;
  Weight lambda_;
  int w_;
  int max_deg_;
  std::uint64_t seed_;
  bool redrawn_ = false;

  std::vector<PBWExact> ops_;
  std::shared_ptr<const QuadratureSet> fit_quad_, holdout_quad_;
  std::vector<OrbitPoint> fit_points_, holdout_points_;
  // profiles_[i][j]: homogeneous symbol values of op i at sample j (fit
  // samples first, then holdout), evaluated at lambda; the level-n design
  // entry is sum_d n^d * profiles_[i][j][d]
  std::vector<std::vector<std::vector<std::complex<double>>>> profiles_;
  std::map<int, StarLevel> levels_;
};

// Scaling limit of symbols along t*lambda. The top homogeneous value is
// compared with the principal symbol at the orbit point; the remaining
// terms decay like 1/t and the report carries the fitted log-log slope.
struct DecayReport {
  int degree = 0;
  std::complex<double> limit;
  std::complex<double> top_value;
  std::vector<double> grid;
  std::vector<double> error;
  double slope = 0.0;
  // magnitude of the next-to-top homogeneous value; the first-order decay
  // rate is only visible when this is away from zero
  double subleading = 0.0;
  bool flat = false;  // error at floating floor on the whole grid
};

DecayReport scaled_symbol_limit(const CompactStructure& cs, const PBWExact& u, const Weight& lam,
                                const CompactGroupElement& k, const std::vector<double>& tgrid);

// Rational fit p(x)/q(x) with x = n/max(n), both degrees <= deg, by the
// singular vector of the homogeneous system p(x_j) - v_j q(x_j) = 0.
struct RationalFit {
  Eigen::VectorXcd p, q;
  double max_residual = 0.0;
  bool certified = false;
  std::complex<double> at_infinity;
};

RationalFit fit_rational(const std::vector<int>& n, const std::vector<std::complex<double>>& v,
                         int deg, double tol = 1e-6);

struct ConvergenceRow {
  int n = 0;
  bool in_algebra = false;
  double e1 = 0.0;  // sup |f1*f2 - f1 f2| over holdout
  double e2 = 0.0;  // sup |n(f1*f2 - f2*f1) - i {f1,f2}| over holdout
  double rational_residual = 0.0;
  double cond = 0.0;
  std::complex<double> probe;  // star value at the first holdout sample
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double slope1 = 0.0, slope2 = 0.0;
  bool exact1 = false, exact2 = false;  // errors at floating floor, no slope fitted
  bool nesting_ok = true;               // membership never fails above a success
  RationalFit rational;
};

// Runs star at n = n_min..n_max, measuring the product deficit and the
// commutator-to-bracket deficit on held-out samples; slopes are fitted on
// the largest-n half of the in-algebra rows. Levels are prebuilt up front,
// after which rows are independent; threads > 1 evaluates them in parallel
// with the report identical to the sequential one.
ConvergenceReport correspondence_suite(StarFamily& fam,
                                       const SymPolynomial<std::complex<double>>& f1,
                                       const SymPolynomial<std::complex<double>>& f2, int n_min,
                                       int n_max, int threads = 1);

// Full demonstration bundle for one (lambda, w) family: module dimensions,
// convergence report for a default function pair, and the worst level
// round-trip residual of re-quantizing star values (identity frame only,
// on levels whose operator basis spans the full matrix algebra).
struct FamilyReport {
  std::vector<long> dims;
  ConvergenceReport conv;
  double closure_residual = 0.0;
};

FamilyReport quantization_family_demo(const CompactStructure& cs, const Weight& lambda, int w,
                                      int n_max, std::uint64_t seed);

}  // namespace berezin
