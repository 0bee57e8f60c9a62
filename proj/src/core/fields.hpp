#pragma once

#include "core/matrix_group.hpp"

namespace plgl {

/// Shared numerical knobs, surfaced through the CLI config.
struct Numerics {
  double fd_step = 1e-5;
  int rk4_steps = 200;
  int quad_nodes = 16;
  double newton_tol = 1e-12;
};

// ---------------------------------------------------------------------------
// Chart-based tensor fields. Values are produced by evaluators, never by
// coefficient interpolation.

struct BivectorField {
  int dim = 0;
  double radius = 1e300;
  std::function<Mat(const Vec&)> eval;  // skew dim x dim

  /// pi#(alpha) = pi(alpha, .) contracts the first slot.
  static Vec sharp(const Mat& pi, const Vec& alpha) { return pi.transpose() * alpha; }
};

struct TwoFormField {
  int dim = 0;
  double radius = 1e300;
  std::function<Mat(const Vec&)> eval;  // skew dim x dim

  static Vec flat(const Mat& om, const Vec& v) { return om.transpose() * v; }
};

struct OneFormField {
  int dim = 0;
  std::function<Vec(const Vec&)> eval;  // covector components
};

/// Map between charts with a Jacobian service (central differences unless an
/// analytic Jacobian is supplied).
struct MapField {
  int dim_in = 0;
  int dim_out = 0;
  std::function<Vec(const Vec&)> eval;
  std::function<Mat(const Vec&)> jac;  // optional; FD fallback
  double fd_step = 1e-5;

  Mat jacobian(const Vec& x) const {
    if (jac) return jac(x);
    return fd_jacobian(eval, x, fd_step * std::max(1.0, x.norm()));
  }
};

/// Degree-q form given by a value evaluator alpha(x; v_1..v_q).
struct FormField {
  int dim = 0;
  int degree = 0;
  std::function<double(const Vec&, const std::vector<Vec>&)> eval;
};

FormField as_form(const TwoFormField& s);
FormField as_form(const OneFormField& a);

// ---------------------------------------------------------------------------
// Operations.

/// Lie-Poisson structure: pi(mu)_{ab} = -sum_c f_{ab}^c mu_c.
BivectorField lie_poisson(const LieAlgebra& g);

/// Generators of the coadjoint action, xi_{g*} = -pi# <dmu, xi>; with the
/// conventions here this is the t-derivative at 0 of Ad*(exp(-t xi)).
Vec coadjoint_generator(const BivectorField& lp, const Vec& xi, const Vec& mu);

/// Pointwise gauge transform pi^sigma = (I + pi sigma)^{-1} pi. Throws
/// DomainError where I + sigma^flat pi^sharp is singular; asserts skewness of
/// the result instead of symmetrizing.
BivectorField gauge_transform(const BivectorField& pi, const TwoFormField& sigma);
Mat gauge_transform_at(const Mat& pi, const Mat& sigma);

/// Max component of the Schouten bracket [pi,pi] at mu, by central differences.
double jacobiator(const BivectorField& pi, const Vec& mu, double fd_step = 1e-5);

/// (F_* pi) at F(mu): J pi(mu) J^T.
Mat pushforward(const MapField& F, const BivectorField& pi, const Vec& mu);

/// Numerical exterior derivative with constant-frame central differences.
FormField exterior_derivative(const FormField& alpha, double fd_step = 1e-5);

/// Standard homotopy operator for the linear retraction onto the origin:
/// (h alpha)_mu(v_1..v_{q-1}) = int_0^1 t^{q-1} alpha_{t mu}(mu, v_1..) dt.
FormField homotopy_operator(const FormField& alpha, int quad_nodes = 16);

/// The Poisson structure of G* in chart coordinates, assembled from the
/// dressing generators and the right Maurer-Cartan frame.
BivectorField pi_gstar(ContextPtr ctx);

// ---------------------------------------------------------------------------
/// Data of a Hamiltonian target space: generator fields and the moment
/// covectors whose graph sections are e(xi) = (gen(xi), -cov(xi)).
struct HamiltonianTarget {
  int dim = 0;
  std::function<Vec(const Vec& xi, const Vec& pt)> generator;
  std::function<Vec(const Vec& xi, const Vec& pt)> covector;
};

HamiltonianTarget lie_poisson_target(const LieAlgebra& g);
HamiltonianTarget gstar_target(ContextPtr ctx);

/// Residual of e_M(xi) ~ _{(Phi, sigma)} e_target(xi) at pt:
/// | J_Phi v - gen(xi, Phi(pt)) | with v = -(pi^sigma)# Phi^* cov(xi).
/// sigma may be null (untwisted).
double moment_residual(const MapField& Phi, const BivectorField& pi,
                       const TwoFormField* sigma, const HamiltonianTarget& target,
                       const Vec& xi, const Vec& pt);

/// Product helpers (g* x g* pipelines).
BivectorField product_bivector(const BivectorField& a, const BivectorField& b);

}  // namespace plgl
