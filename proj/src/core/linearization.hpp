#pragma once

#include "core/fields.hpp"

namespace plgl {

// ---------------------------------------------------------------------------
// Bi-invariant geometry of the double.

/// Cartan 3-form on left-invariant arguments: eta(x,y,z) = 1/2 <x,[y,z]>.
/// The constant is pinned by iota(zeta_D) eta = -1/2 d<theta^L+theta^R, zeta>,
/// which the tests fit numerically.
double cartan_eta(const TripleContext& ctx, const Vec& x, const Vec& y, const Vec& z);

/// varpi_x(X,Y) = int_0^1 t^2 (exp* eta)_{tx}(x, X, Y) dt, with
/// (exp* eta)_z(a,b,c) = 1/2 < T_z a, [T_z b, T_z c] > and T_z the left dexp
/// transport. Quadrature on [0,1].
double varpi(const TripleContext& ctx, const Vec& x, const Vec& X, const Vec& Y,
             int quad_nodes = 16);

/// epsilon = 1/2 <theta^L_H, theta^L_G> on D* = H x G, evaluated on matrix
/// tangents (dh_i, dg_i) at (h, g).
double epsilon_form(const TripleContext& ctx, const Mat& h, const Mat& g,
                    const Mat& dh1, const Mat& dg1, const Mat& dh2, const Mat& dg2);

// ---------------------------------------------------------------------------
/// Analytic evaluator of the twist sigma = j*varpi - Lambda*epsilon, where
/// Lambda(mu) = (h(mu), g(mu)^{-1}) and exp(j(mu)) = h(mu) g(mu).
/// All quadratures along the ray through j(mu) share the ad-powers.
class SigmaPipeline {
 public:
  SigmaPipeline(ContextPtr ctx, int quad_nodes = 16);

  /// sigma matrix at mu (n x n skew, mu-coordinates).
  Mat operator()(const Vec& mu) const;

  /// Returns sigma(mu) and the ray average  A(mu) = int_0^1 u sigma(u mu) du
  /// in one pass; the pair feeds the Moser 1-form.
  std::pair<Mat, Mat> with_ray_average(const Vec& mu) const;

  ContextPtr context() const { return ctx_; }
  int quad_nodes() const { return nodes_; }

 private:
  struct RayData;  // shared ad-powers along {tau j(mu)}
  void ray_data(const Vec& mu, RayData* rd) const;
  Mat sigma_scaled(const RayData& rd, double s) const;

  ContextPtr ctx_;
  int nodes_;
  Mat jmat_;  // column a = j(e_a)
};

// ---------------------------------------------------------------------------
/// The modified exponential map bundled with its twist on a stated domain.
struct ModifiedExpOptions {
  double radius = 0.2;
  int quad_nodes = 16;
  double fd_step = 1e-5;
  int cert_samples = 20;
  std::uint64_t seed = 7;
  bool certify = true;
};

struct CertCheck {
  std::string id;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

class ModifiedExp {
 public:
  ModifiedExp(ContextPtr ctx, const ModifiedExpOptions& opt);

  ContextPtr context() const { return ctx_; }
  double radius() const { return radius_; }
  const SigmaPipeline& sigma_pipeline() const { return sigma_; }
  TwoFormField sigma_field() const;

  /// Exp(mu) as a group element of H.
  Mat exp_matrix(const Vec& mu) const;
  /// chart(Exp(mu)).
  Vec exp_chart(const Vec& mu) const;
  /// Analytic Jacobian of exp_chart.
  Mat exp_jacobian(const Vec& mu) const;
  /// Newton inverse of exp_chart. Throws DomainError on failure.
  Vec exp_inverse_chart(const Vec& target) const;
  Vec exp_inverse(const Mat& u) const { return exp_inverse_chart(ctx_->chart(u)); }

  const std::vector<CertCheck>& certification() const { return cert_; }
  int radius_shrinks() const { return shrinks_; }

 private:
  void certify(const ModifiedExpOptions& opt);

  ContextPtr ctx_;
  double radius_;
  SigmaPipeline sigma_;
  std::vector<CertCheck> cert_;
  int shrinks_ = 0;
};

/// Residual of the contraction identity
///   iota(xi_{g*}) sigma - <dmu, xi> + Exp* <theta^R_{G*}, xi>  =  0
/// at (xi, mu), as the sup-norm of the covector over basis tangents.
double check_contraction(const ModifiedExp& me, const Vec& xi, const Vec& mu);

// ---------------------------------------------------------------------------
// Moser flow with the scaling family sigma_t = t^{-1} s_t^* sigma.

struct MoserOptions {
  int rk4_steps = 200;
  int quad_nodes = 16;
  double t_floor = 1e-7;
  bool with_bisection = true;
  std::uint64_t probe_seed = 11;
};

/// Group data for the bisection: one factor per g*-block of the base space.
struct GroupPack {
  std::vector<ContextPtr> factors;

  int total_dim() const;
  std::vector<Mat> identity() const;
  /// Blockwise Ad*_{gamma} mu.
  Vec coad(const std::vector<Mat>& gamma, const Vec& mu) const;
  /// Blockwise matrix of the algebra element b (g-coordinates per factor).
  std::vector<Mat> algebra(const Vec& b) const;
};

/// 2-form data the flow consumes. `with_ray` is optional; the default
/// computes the ray average by quadrature on `sigma`.
struct SigmaProvider {
  int dim = 0;
  std::function<Mat(const Vec&)> sigma;
  std::function<std::pair<Mat, Mat>(const Vec&)> with_ray;  // (sigma(y), A(y))

  static SigmaProvider from_function(int dim, std::function<Mat(const Vec&)> f,
                                     int quad_nodes);
  static SigmaProvider from_pipeline(const SigmaPipeline& sp);
};

/// The time-one Moser machinery for pi with the scaling family of sigma.
/// forward() realizes A(psi); backward() its inverse F1 = A(psi)^{-1}, the
/// map with pushforward(F1, pi) = pi^sigma. psi() integrates the bisection
/// alongside with the orientation locked in by the conservation probe
/// Ad*_{gamma_t} x_t = mu.
class MoserFlow {
 public:
  MoserFlow(BivectorField pi, SigmaProvider sigma, GroupPack pack, MoserOptions opt);

  Vec forward(const Vec& mu, int steps = 0) const;
  Vec backward(const Vec& mu, int steps = 0) const;
  std::vector<Mat> psi(const Vec& mu, int steps = 0) const;

  /// The Moser 1-form a_1 (time-1 member of the scaling family).
  Vec a1(const Vec& y) const;
  /// a_t via the exact scaling law a_t = t^{-2} s_t^* a_1.
  Vec a_t(double t, const Vec& x) const;
  /// sigma_t = t^{-1} s_t^* sigma.
  Mat sigma_t(double t, const Vec& x) const;
  Vec velocity(double t, const Vec& x) const;

  const MoserOptions& options() const { return opt_; }
  const GroupPack& pack() const { return pack_; }
  const BivectorField& pi() const { return pi_; }
  int orientation() const { return orientation_; }
  bool orientation_left() const { return orient_left_; }

 private:
  Vec b_cov(double t, const Vec& x) const;
  struct State {
    Vec x;
    std::vector<Mat> g;
  };
  void rk4(State& s, double t0, double t1, int steps, int orientation,
           bool left, bool with_gamma) const;
  void probe();

  BivectorField pi_;
  SigmaProvider sigma_;
  GroupPack pack_;
  MoserOptions opt_;
  int orientation_ = 1;
  bool orient_left_ = true;
};

/// sigma_psi = d<mu, psi* theta^L> at y, by central differences over the
/// bisection evaluator.
Mat sigma_psi_at(const MoserFlow& flow, const Vec& y, double fd_step = 1e-5);

/// Reference Moser 1-form per the homotopy-operator route with a central
/// t-difference of the scaling family (step 1e-4); used as an oracle for a1.
Vec moser_one_form_reference(const SigmaProvider& sigma, const Vec& y,
                             int quad_nodes, double t_step = 1e-4);

// ---------------------------------------------------------------------------
/// Bisection over a product chart: group value per factor.
struct Bisection {
  int dim = 0;
  GroupPack pack;
  std::function<std::vector<Mat>(const Vec&)> eval;

  /// A(phi)(mu) = Ad*_{phi(mu)} mu.
  Vec act(const Vec& mu) const { return pack.coad(eval(mu), mu); }
};

/// Product of bisections: (a b)(mu) = a(A(b) mu) * b(mu).
Bisection compose(const Bisection& a, const Bisection& b);

/// Pull-back of a bisection along a Poisson map tau: dual of an algebra
/// morphism. psi2''(mu2) = N(psi1(tau mu2)) with N the per-factor group map.
Bisection pullback_bisection(
    const Mat& tau, const Bisection& psi1, GroupPack dst_pack,
    const std::function<std::vector<Mat>(const std::vector<Mat>&)>& group_map);

}  // namespace plgl
