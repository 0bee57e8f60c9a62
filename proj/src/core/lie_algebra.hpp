#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace plgl {

// Tolerance for exact algebraic identities polluted only by float rounding,
// on unit-normalized bases.
constexpr double kAlgebraTol = 1e-10;

// ---------------------------------------------------------------------------
/// Rank-3 structure constant tensor, f[a][b][c] meaning [e_a,e_b] = sum_c f_{ab}^c e_c.
/// Dense; dimensions stay small at desk scale.
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(int n) : n_(n), f_(static_cast<size_t>(n) * n * n, 0.0) {}

  int dim() const { return n_; }
  double operator()(int a, int b, int c) const { return f_[idx(a, b, c)]; }
  double& at(int a, int b, int c) { return f_[idx(a, b, c)]; }

  /// Sets f_{ab}^c = v and f_{ba}^c = -v.
  void set_bracket(int a, int b, int c, double v) {
    f_[idx(a, b, c)] = v;
    f_[idx(b, a, c)] = -v;
  }

  Vec bracket(const Vec& x, const Vec& y) const;

  /// Matrix of ad_x acting on coordinates: (ad_x)_{cb} = sum_a x_a f_{ab}^c.
  Mat ad(const Vec& x) const;

  double antisymmetry_violation() const;

 private:
  size_t idx(int a, int b, int c) const {
    return (static_cast<size_t>(a) * n_ + b) * n_ + c;
  }
  int n_ = 0;
  std::vector<double> f_;
};

/// Max over (a,b,c,e) of the cyclic Jacobi sum; 0 iff f defines a Lie algebra.
double jacobiator_algebra(const StructureConstants& f);

// ---------------------------------------------------------------------------
struct LieAlgebra {
  int dim = 0;
  StructureConstants f;
  std::vector<std::string> labels;

  /// Throws InputError naming the violated condition.
  void validate(double tol = kAlgebraTol) const;
};

struct BilinearForm {
  Mat matrix;

  void validate(const LieAlgebra& g, double tol = kAlgebraTol) const;
  double invariance_residual(const StructureConstants& f) const;
};

/// r = sum r^{ab} e_a (x) e_b over a basis of g. Realified coefficients only.
struct RMatrix {
  Mat r;

  Mat symmetric_part() const { return 0.5 * (r + r.transpose()); }
  /// Max |ad_{e_s} T| over basis s for the rank-2 tensor T.
  static double ad_invariance_residual(const StructureConstants& f, const Mat& T);
  /// YB(r) = [r12,r13]+[r12,r23]+[r13,r23] as a rank-3 tensor.
  std::vector<double> yang_baxter(const StructureConstants& f) const;
  double yang_baxter_ad_invariance_residual(const StructureConstants& f) const;
};

// ---------------------------------------------------------------------------
/// Coboundary Lie bialgebra: lambda(e_a) = ad_{e_a} r, with the dual bracket
/// read off the cobracket tensor.
struct LieBialgebra {
  LieAlgebra g;
  RMatrix r;
  /// lambda[a](b,c) = (ad_{e_a} r)^{bc}
  std::vector<Mat> lambda;
  /// Bracket on g*: [mu_b, mu_c]* = sum_a lambda[a]^{bc} mu_a.
  StructureConstants dual_f;

  int dim() const { return g.dim; }

  /// ad*_xi mu = -(ad_xi)^T mu (coadjoint representation of g on g*).
  Vec coad(const Vec& xi, const Vec& mu) const;

  double cocycle_residual() const;
};

/// Builds the bialgebra from (g, r); rejects with the failing coboundary
/// condition named when the invariants are violated.
LieBialgebra cobracket_from_r(const LieAlgebra& g, const RMatrix& r,
                              double tol = kAlgebraTol);

/// j(mu) = mu - r#(mu) in the abstract double coordinates [g | g*].
/// r#(mu)_b = sum_a r^{ab} mu_a.
Vec splitting_j(const LieBialgebra& b, const Vec& mu);

// ---------------------------------------------------------------------------
/// Manin triple data for the (abstract or represented) double. Basis order is
/// canonical: g spans indices [0,n), h spans [n,2n).
struct ManinTriple {
  LieAlgebra d;
  BilinearForm metric;
  std::vector<int> g_indices;
  std::vector<int> h_indices;
  double t = 1.0;

  int half_dim() const { return static_cast<int>(g_indices.size()); }

  struct Residuals {
    double jacobi;
    double metric_invariance;
    double g_closure;
    double h_closure;
    double g_isotropy;
    double h_isotropy;
    double pairing_det;
  };
  Residuals residuals() const;
  void validate(double tol = kAlgebraTol) const;
};

/// The deformed double d_t = g (+) g* with
///   [xi1,xi2]_t = [xi1,xi2],  [mu1,mu2]_t = t [mu1,mu2]_{g*},
///   [xi,mu]_t   = ad*_xi mu - t r#(ad*_xi mu) + t ad_xi r#(mu),
/// and metric = canonical pairing. The g-part signs are the ones forced by
/// equivariance of the splitting j(mu) = mu - r#(mu).
ManinTriple build_double(const LieBialgebra& b, double t);

/// Max over basis pairs (xi, mu) of |[xi, j(mu)]_d - j(ad*_xi mu)|.
double check_equivariance_j(const LieBialgebra& b, const ManinTriple& triple);

}  // namespace plgl
