#pragma once

#include <complex>
#include <memory>

#include "core/lie_algebra.hpp"

namespace plgl {

// ---------------------------------------------------------------------------
/// Realification of a complex matrix, block convention [[Re, -Im], [Im, Re]].
Mat realify(const CMat& a);
CMat complexify(const Mat& a);

// ---------------------------------------------------------------------------
/// Matrix representation of the double d: one real N x N matrix per basis
/// element, basis order [g | h]. Immutable after construction.
class MatrixRep {
 public:
  MatrixRep() = default;
  MatrixRep(std::vector<Mat> basis, bool complex_picture);

  int N() const { return N_; }
  int dim() const { return static_cast<int>(rho_.size()); }
  const Mat& rho(int i) const { return rho_[i]; }
  bool complex_picture() const { return complex_; }

  Mat from_coords(const Vec& x) const;
  /// Coordinates of m in span{rho_i}; optionally reports the off-span residual.
  Vec coords(const Mat& m, double* residual = nullptr) const;

  /// Max over basis pairs of |[rho_i, rho_j] - rho([e_i,e_j])|.
  double homomorphism_residual(const StructureConstants& f) const;
  /// Rank of the coordinate map (faithful iff == dim()).
  int rank() const { return rank_; }

 private:
  int N_ = 0;
  bool complex_ = false;
  std::vector<Mat> rho_;
  Mat vec_basis_;  // N^2 x dim, columns vec(rho_i)
  Eigen::ColPivHouseholderQR<Mat> solver_;
  int rank_ = 0;
};

struct GroupElement {
  enum class Tag { D, G, H };
  Mat m;
  Tag tag = Tag::D;
};

// ---------------------------------------------------------------------------
struct FactorizeOptions {
  double tol = 1e-12;
  int max_iter = 50;
};

// ---------------------------------------------------------------------------
/// Everything needed to compute on one Manin triple of matrix groups:
/// the abstract bialgebra, the double's structure constants, the rep,
/// and the chart conventions on G* = H.
///
/// d-coordinates are 2n-vectors in the basis order [g | h]; points of g* are
/// n-vectors in the basis dual to the g-basis (mu-coordinates).
class TripleContext {
 public:
  TripleContext(LieBialgebra bialg, ManinTriple triple, MatrixRep rep,
                std::string name, double chart_radius = 0.3);

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  const LieBialgebra& bialg() const { return bialg_; }
  const ManinTriple& triple() const { return triple_; }
  const MatrixRep& rep() const { return rep_; }
  const StructureConstants& df() const { return triple_.d.f; }
  double chart_radius() const { return chart_radius_; }

  // -- linear algebra on d-coordinates
  double pair(const Vec& x, const Vec& y) const { return x.dot(metric_ * y); }
  Vec bracket(const Vec& x, const Vec& y) const { return triple_.d.f.bracket(x, y); }
  Mat ad_matrix(const Vec& x) const { return triple_.d.f.ad(x); }

  Vec embed_g(const Vec& xi) const;
  Vec embed_h(const Vec& hcoords) const;
  Vec g_part(const Vec& x) const { return x.head(n_); }
  Vec h_part(const Vec& x) const { return x.tail(n_); }

  /// h-coordinates <-> mu-coordinates through the pairing P(i,a) = <h_i, X_a>.
  Vec mu_from_h(const Vec& h) const { return pairing_.transpose() * h; }
  Vec h_from_mu(const Vec& mu) const { return pairing_inv_T_ * mu; }

  /// j(mu) = mu - r#(mu) as d-coordinates.
  Vec j_of(const Vec& mu) const;

  // -- exponential map machinery
  Mat mexp(const Vec& x) const;
  /// Principal log expressed in the d basis. Throws DomainError outside the
  /// principal-branch domain or when the log leaves the rep span.
  Vec mlog(const Mat& g, double* span_residual = nullptr) const;

  /// T(x) = (1 - e^{-ad_x})/ad_x as a 2n x 2n matrix (left dexp transport:
  /// d/dt exp(c) = exp(c) rho(T(c) cdot)).
  Mat dexp_left(const Vec& x) const;
  Mat dexp_left_from_ad(const Mat& adx) const;

  /// Ad_g zeta in coordinates; hard error if the rep is not Ad-closed here.
  Vec adjoint(const Mat& g, const Vec& zeta) const;
  Mat adjoint_matrix(const Mat& g) const;

  // -- factorization D -> H x G near the identity
  /// d = h * g with h in exp(h-chart), g in exp(g-chart).
  std::pair<Mat, Mat> factorize(const Mat& d, const FactorizeOptions& opt = {}) const;
  Mat pr_Gstar(const Mat& d) const { return factorize(d).first; }
  Mat pr_G(const Mat& d) const { return factorize(d).second; }

  // -- chart on G* (mu-coordinates)
  Vec chart(const Mat& u) const;
  Mat chart_inv(const Vec& mu) const;

  /// g-coordinates of log of a G-element (error if off G).
  Vec log_G(const Mat& g) const;

  const Mat& metric() const { return metric_; }
  const Mat& pairing() const { return pairing_; }

 private:
  LieBialgebra bialg_;
  ManinTriple triple_;
  MatrixRep rep_;
  std::string name_;
  double chart_radius_;
  int n_;
  Mat metric_;
  Mat pairing_;
  Mat pairing_inv_T_;

  std::pair<Mat, Mat> factorize_qr(const Mat& d) const;
  std::pair<Mat, Mat> factorize_newton(const Mat& d, const FactorizeOptions& opt,
                                       const Vec& eta0, const Vec& xi0) const;
};

using ContextPtr = std::shared_ptr<const TripleContext>;

// ---------------------------------------------------------------------------
// Dressing machinery (free functions over a context).

/// Left-trivialized dressing generator value -pr_h(Ad_{u^{-1}} xi), converted
/// to a chart tangent (mu-coordinates) at u. With the action-sign convention
/// in use it is the t-derivative at 0 of t -> exp(-t xi) . u.
Vec dressing_generator(const TripleContext& ctx, const Vec& xi, const Mat& u);

/// factorize(g u) = (g . u, u^{-1} * g).
std::pair<Mat, Mat> dressing_flow(const TripleContext& ctx, const Mat& g, const Mat& u);

/// Ad*(g) mu = (Ad(g^{-1}))* mu for g in G, computed on the double.
Vec coadjoint(const TripleContext& ctx, const Mat& g, const Vec& mu);

/// H-coadjoint of u in H acting on xi in g: pr_g(Ad_{u} xi) style; the
/// convention Ad*(u) = (Ad(u^{-1}))* is used, so coadjoint_H(u, xi) feeds
/// Ad_u into the projection.
Vec coadjoint_H(const TripleContext& ctx, const Mat& u, const Vec& xi);

/// Covector frame of the right Maurer-Cartan pairing: row a, column i holds
/// <theta^R(d/dy_i), xi_a> at u = chart_inv(mu), in chart coordinates.
Mat theta_R_frame(const TripleContext& ctx, const Vec& mu);

// ---------------------------------------------------------------------------
/// Derivative bundle of the factorized exponential at mu: for a chart tangent
/// X, with exp(j(mu)) = h(mu) g(mu),
///   w      = T_{j(mu)}(j(X))            (left-trivialized d(exp o j))
///   h^-1 dh = pr_h(Ad_g w),   dg g^-1 = pr_g(Ad_g w).
/// Used by the sigma evaluator and the analytic dExp.
struct SplitDifferential {
  Mat h, g;        // factorization at the base point
  Mat T;           // dexp_left at j(mu)
  Mat Adg;         // adjoint_matrix(g)
  Vec jmu;

  /// left-trivialized velocities for chart tangent X (mu-coordinates)
  Vec w(const TripleContext& ctx, const Vec& X) const;
  Vec h_vel(const TripleContext& ctx, const Vec& X) const;  // h^{-1} dh, d-coords
  Vec g_vel(const TripleContext& ctx, const Vec& X) const;  // dg g^{-1}, d-coords
};

SplitDifferential split_differential(const TripleContext& ctx, const Vec& mu);

}  // namespace plgl
