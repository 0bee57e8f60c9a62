#pragma once

#include "core/linearization.hpp"

namespace plgl {

/// Lu-Weinstein Manin triple for a compact type: d = realified g^C with
/// metric Im B^C, h = a (+) n, r assembled from root vectors normalized so
/// that B(e_alpha, e_{-alpha}) = 2. Types: "su2", "su3", "u1", "u2", or
/// generally "suN"/"uN". The deformation parameter scales the cobracket.
ContextPtr make_lu_weinstein(const std::string& type, double t = 1.0,
                             double chart_radius = 0.3);

/// Algebra-level view (the spec'd lu_weinstein_data operation).
std::pair<LieBialgebra, ManinTriple> lu_weinstein_data(const std::string& type);

/// Abelian R^3 with r = 0; the double is represented by nilpotent blocks.
ContextPtr make_trivial3d(double chart_radius = 0.3);

/// Semidirect double g (x) g* for r = 0 over an arbitrary bialgebra seed;
/// used as the Exp = id control case.
ContextPtr make_semidirect(const LieAlgebra& g, double chart_radius = 0.3,
                           const std::string& name = "semidirect");

/// Builtin registry: "trivial-3d", "su2-lu-weinstein", "su3-lu-weinstein",
/// "u2-lu-weinstein", "u1-lu-weinstein". Throws InputError for unknown names.
ContextPtr builtin_context(const std::string& name, double t = 1.0,
                           double chart_radius = 0.3);
std::vector<std::string> builtin_names();
bool is_builtin(const std::string& name);

// ---------------------------------------------------------------------------
/// A bialgebra morphism nu: g1 -> g2 with its group-level integration and the
/// dual Poisson-Lie morphism T: G2* -> G1* realized on charts.
struct MorphismBundle {
  ContextPtr src;  // g1
  ContextPtr dst;  // g2
  Mat nu;          // n2 x n1, coordinates of nu on the g-bases
  std::function<Mat(const Mat&)> group_map;  // G1 -> G2 (rep matrices)

  Mat tau() const { return nu.transpose(); }  // g2* -> g1*
  /// max | lambda2(nu xi) - (nu (x) nu) lambda1(xi) | over the g1 basis.
  double cobracket_compatibility() const;
};

/// The shipped morphism example: u(1) into u(2) by the upper-left block.
MorphismBundle u1_into_u2();
/// Identity morphism on a context (control case).
MorphismBundle identity_morphism(ContextPtr ctx);

// ---------------------------------------------------------------------------
/// A fully built pipeline: context, Poisson structures, the modified
/// exponential with its twist, and the Moser machinery.
struct PipelineBundle {
  ContextPtr ctx;
  BivectorField pi_lp;
  BivectorField pi_star;
  std::shared_ptr<const ModifiedExp> me;
  std::shared_ptr<const MoserFlow> flow;
};

PipelineBundle build_pipeline(ContextPtr ctx, const Numerics& num,
                              double radius = 0.2, std::uint64_t seed = 7);

}  // namespace plgl
