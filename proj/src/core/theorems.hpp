#pragma once

#include "core/builtins.hpp"

namespace plgl {

// ---------------------------------------------------------------------------
struct CheckResult {
  std::string id;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  std::string name;
  std::string algebra;
  std::uint64_t seed = 0;
  int samples = 0;
  double radius = 0.0;
  Numerics numerics;
  std::vector<CheckResult> checks;

  void add(const std::string& id, double max_r, double mean_r, double tol);
  bool pass() const;
};

struct ExperimentParams {
  int points = 50;
  double radius = 0.2;
  std::uint64_t seed = 42;
  Numerics numerics;
  int threads = 0;
};

// ---------------------------------------------------------------------------
// lie_core invariant suite (acceptance criterion 1 per builtin).
ExperimentReport check_algebra_suite(ContextPtr ctx, const ExperimentParams& p);

// Theorem A: Exp o F1 is a Poisson linearization.
ExperimentReport verify_linearization(const PipelineBundle& pb, const ExperimentParams& p,
                                      double poisson_tol = 1e-5);

// ---------------------------------------------------------------------------
// lambda and chi (addition-vs-multiplication machinery).

/// lambda(u) = u^{-1} exp(j(mu)) for u = Exp(mu); lies in G.
Mat lambda_map(const ModifiedExp& me, const Mat& u);
/// Same through the chart: lambda(Exp(mu)) = pr_G(exp(j(mu))).
Mat lambda_of_exp(const TripleContext& ctx, const Vec& mu);

/// Residual of lambda(g . u) = (u^{-1} * g) lambda(u) g^{-1}.
double lambda_equivariance_residual(const ModifiedExp& me, const Mat& g, const Mat& u);

/// (xi, Ad*_{u1^{-1}} xi) with the H-coadjoint on g.
std::pair<Vec, Vec> twisted_diagonal_generators(const TripleContext& ctx, const Vec& xi,
                                                const Mat& u1);
/// Residual of the (Mult,0)-relation for the twisted pair at (u1, u2).
double twisted_diagonal_relation_residual(const TripleContext& ctx, const Vec& xi,
                                          const Vec& mu1, const Vec& mu2,
                                          double fd_step);

/// The chi bisection over G* x G*, chart-level: A(chi)(mu1, mu2) =
/// (mu1, Exp^{-1}(lambda(Exp mu1) . Exp mu2)).
struct ChiBisection {
  std::shared_ptr<const ModifiedExp> me;

  Vec act(const Vec& z) const;
  Vec act_inverse(const Vec& z) const;
  /// residual of intertwining diagonal -> twisted diagonal generators.
  double intertwining_residual(const Vec& z, const Vec& xi, double fd_step) const;
  /// residual of Ad(chi) taking (xi,xi) to (xi, Ad*_{u1^{-1}} xi).
  double algebroid_residual(const Vec& z, const Vec& xi, double fd_step) const;
};

// ---------------------------------------------------------------------------
// Theorem B (functoriality) and Theorem addmult.

ExperimentReport verify_functoriality(const MorphismBundle& mb, const ExperimentParams& p,
                                      double diagram_tol = 1e-5);

ExperimentReport verify_addmult(const PipelineBundle& pb, const ExperimentParams& p,
                                double diagram_tol = 1e-4);

// Orbit products Exp(O1 + O2) = D1 D2 on su(2).
ExperimentReport orbit_product_check(const PipelineBundle& pb, double r1, double r2,
                                     const ExperimentParams& p, double tol = 1e-6);

// Scaling laws of the deformation family (pi, sigma, a, psi).
ExperimentReport scaling_laws_check(const std::string& lw_type,
                                    const std::vector<double>& ts,
                                    const ExperimentParams& p, double tol = 1e-5);

// ---------------------------------------------------------------------------
/// max over selected index pairs of |sigma_phi(i,j) - target(i,j)| at y, where
/// sigma_phi = d<mu, phi* theta^L> is evaluated by central differences over
/// the bisection. Pairs with all i<j when `pairs` is empty.
double bisection_sigma_residual(const Bisection& phi,
                                const std::function<Mat(const Vec&)>& target,
                                const Vec& y, double fd_step,
                                const std::vector<std::pair<int, int>>& pairs = {});

}  // namespace plgl
