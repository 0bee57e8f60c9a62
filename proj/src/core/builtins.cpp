#include "core/builtins.hpp"

#include <cmath>
#include <complex>

namespace plgl {

namespace {

using Cplx = std::complex<double>;

// Basis of the compact form: A_ij = E_ij - E_ji, S_ij = i(E_ij + E_ji) for
// i < j, then the torus directions D_k = i(E_kk - E_{k+1,k+1}) and, for u(n),
// the center i I.
struct CompactBasis {
  int n = 0;
  bool unitary = false;
  std::vector<CMat> g;
  std::vector<std::pair<int, int>> roots;
  std::vector<int> root_A, root_S;
};

CompactBasis compact_basis(int n, bool unitary) {
  CompactBasis cb;
  cb.n = n;
  cb.unitary = unitary;
  const Cplx I(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      CMat A = CMat::Zero(n, n), S = CMat::Zero(n, n);
      A(i, j) = 1.0;
      A(j, i) = -1.0;
      S(i, j) = I;
      S(j, i) = I;
      cb.root_A.push_back(static_cast<int>(cb.g.size()));
      cb.g.push_back(A);
      cb.root_S.push_back(static_cast<int>(cb.g.size()));
      cb.g.push_back(S);
      cb.roots.push_back({i, j});
    }
  for (int k = 0; k + 1 < n; ++k) {
    CMat D = CMat::Zero(n, n);
    D(k, k) = I;
    D(k + 1, k + 1) = -I;
    cb.g.push_back(D);
  }
  if (unitary) {
    CMat C = CMat::Zero(n, n);
    for (int k = 0; k < n; ++k) C(k, k) = I;
    cb.g.push_back(C);
  }
  return cb;
}

// Span of h = a (+) n: real diagonal (traceless for su) plus strictly upper.
std::vector<CMat> borel_span(int n, bool unitary) {
  std::vector<CMat> out;
  const Cplx I(0.0, 1.0);
  if (unitary) {
    for (int k = 0; k < n; ++k) {
      CMat D = CMat::Zero(n, n);
      D(k, k) = 1.0;
      out.push_back(D);
    }
  } else {
    for (int k = 0; k + 1 < n; ++k) {
      CMat D = CMat::Zero(n, n);
      D(k, k) = 1.0;
      D(k + 1, k + 1) = -1.0;
      out.push_back(D);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      CMat N1 = CMat::Zero(n, n), N2 = CMat::Zero(n, n);
      N1(i, j) = 1.0;
      N2(i, j) = I;
      out.push_back(N1);
      out.push_back(N2);
    }
  return out;
}

// Metric <x,y> = Im(2 tr(xy)), the paper normalization B(e_a, e_{-a}) = 2.
double lw_metric(const CMat& x, const CMat& y) { return 2.0 * (x * y).trace().imag(); }

StructureConstants constants_from_rep(const MatrixRep& rep) {
  const int d = rep.dim();
  StructureConstants f(d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Mat br = rep.rho(i) * rep.rho(j) - rep.rho(j) * rep.rho(i);
      double res = 0.0;
      Vec c = rep.coords(br, &res);
      if (res > 1e-10 * std::max(1.0, br.norm()))
        throw InputError("builtin: bracket left the basis span");
      for (int k = 0; k < d; ++k)
        if (std::abs(c[k]) > 1e-13) f.set_bracket(i, j, k, c[k]);
    }
  return f;
}

// Builds a context over a rep whose h-basis is metric-dual to the g-basis,
// so the metric is the canonical pairing in coordinates.
ContextPtr assemble_context(const std::vector<Mat>& rho_g, const std::vector<Mat>& rho_h,
                            const RMatrix& r, bool complex_picture,
                            const std::string& name, double chart_radius) {
  const int n = static_cast<int>(rho_g.size());
  std::vector<Mat> basis;
  basis.reserve(2 * n);
  for (const auto& m : rho_g) basis.push_back(m);
  for (const auto& m : rho_h) basis.push_back(m);
  MatrixRep rep(std::move(basis), complex_picture);

  StructureConstants df = constants_from_rep(rep);

  LieAlgebra g;
  g.dim = n;
  g.f = StructureConstants(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      for (int c = 0; c < n; ++c)
        if (df(a, b, c) != 0.0) g.f.set_bracket(a, b, c, df(a, b, c));
      for (int c = n; c < 2 * n; ++c)
        if (std::abs(df(a, b, c)) > 1e-12)
          throw InputError("builtin: g span is not closed");
    }

  LieBialgebra bialg = cobracket_from_r(g, r);

  // The dual bracket induced by r must reproduce the h-block of the double.
  double mismatch = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        mismatch = std::max(mismatch,
                            std::abs(df(n + a, n + b, n + c) - bialg.dual_f(a, b, c)));
  if (mismatch > 1e-9)
    throw InputError("builtin: r-matrix cobracket disagrees with the h-bracket (residual " +
                     std::to_string(mismatch) + ")");

  ManinTriple triple;
  triple.d.dim = 2 * n;
  triple.d.f = df;
  triple.metric.matrix = Mat::Zero(2 * n, 2 * n);
  triple.metric.matrix.block(0, n, n, n) = Mat::Identity(n, n);
  triple.metric.matrix.block(n, 0, n, n) = Mat::Identity(n, n);
  triple.g_indices.resize(n);
  triple.h_indices.resize(n);
  for (int i = 0; i < n; ++i) {
    triple.g_indices[i] = i;
    triple.h_indices[i] = n + i;
  }
  triple.validate();

  auto ctx = std::make_shared<TripleContext>(std::move(bialg), std::move(triple),
                                             std::move(rep), name, chart_radius);
  double eq = check_equivariance_j(ctx->bialg(), ctx->triple());
  if (eq > 1e-9)
    throw InputError("builtin: splitting j is not equivariant for this triple (residual " +
                     std::to_string(eq) + ")");
  return ctx;
}

}  // namespace

ContextPtr make_lu_weinstein(const std::string& type, double t, double chart_radius) {
  int n = 0;
  bool unitary = false;
  if (type.size() >= 3 && type.substr(0, 2) == "su")
    n = std::stoi(type.substr(2));
  else if (type.size() >= 2 && type[0] == 'u') {
    unitary = true;
    n = std::stoi(type.substr(1));
  } else {
    throw InputError("lu_weinstein: unsupported type '" + type + "'");
  }
  if (n < 1 || (!unitary && n < 2) || n > 6)
    throw InputError("lu_weinstein: unsupported rank for type '" + type + "'");
  if (t == 0.0)
    throw InputError("lu_weinstein: t = 0 is the semidirect double; use trivial builtins");

  CompactBasis cb = compact_basis(n, unitary);
  const int dim = static_cast<int>(cb.g.size());

  // Dual basis of h inside the Borel span: <h^a, X_b> = delta_ab.
  std::vector<CMat> span = borel_span(n, unitary);
  if (static_cast<int>(span.size()) != dim)
    throw InputError("lu_weinstein: Borel span dimension mismatch");
  Mat Q(dim, dim);
  for (int k = 0; k < dim; ++k)
    for (int b = 0; b < dim; ++b) Q(k, b) = lw_metric(span[k], cb.g[b]);
  Mat coef = Q.transpose().fullPivLu().solve(Mat::Identity(dim, dim));
  std::vector<CMat> h(dim, CMat::Zero(n, n));
  for (int a = 0; a < dim; ++a)
    for (int k = 0; k < dim; ++k) h[a] += coef(k, a) * span[k];

  // r = sum over positive roots of -(1/4)(A (x) S - S (x) A); the deformed
  // structure scales r and moves the h-basis to t h^a, for which the metric
  // t^{-1} s_t^* <.,.> is the canonical pairing again.
  RMatrix r;
  r.r = Mat::Zero(dim, dim);
  for (size_t root = 0; root < cb.roots.size(); ++root) {
    int a = cb.root_A[root], s = cb.root_S[root];
    r.r(a, s) = -0.25 * t;
    r.r(s, a) = 0.25 * t;
  }

  std::vector<Mat> rho_g, rho_h;
  for (int a = 0; a < dim; ++a) rho_g.push_back(realify(cb.g[a]));
  for (int a = 0; a < dim; ++a) rho_h.push_back(realify(t * h[a]));

  std::string name = type + "-lu-weinstein";
  if (t != 1.0) name += "@t=" + std::to_string(t);
  return assemble_context(rho_g, rho_h, r, true, name, chart_radius);
}

std::pair<LieBialgebra, ManinTriple> lu_weinstein_data(const std::string& type) {
  ContextPtr ctx = make_lu_weinstein(type);
  return {ctx->bialg(), ctx->triple()};
}

ContextPtr make_trivial3d(double chart_radius) {
  LieAlgebra g;
  g.dim = 3;
  g.f = StructureConstants(3);
  return make_semidirect(g, chart_radius, "trivial-3d");
}

ContextPtr make_semidirect(const LieAlgebra& g, double chart_radius,
                           const std::string& name) {
  g.validate();
  const int n = g.dim;
  std::vector<Mat> rho_g, rho_h;
  bool abelian = true;
  for (int a = 0; a < n && abelian; ++a)
    if (g.f.ad(Vec::Unit(n, a)).norm() != 0.0) abelian = false;

  if (abelian) {
    // nilpotent block picture: rho(xi, mu) = [[0, D(xi,mu)], [0, 0]] with
    // D carrying xi and mu in separate rows; faithful, exp = I + rho.
    auto block = [n](const Vec& xi, const Vec& mu) {
      Mat m = Mat::Zero(2 * n, 2 * n);
      m.block(0, n, 1, n) = xi.transpose();
      m.block(1, n, 1, n) = mu.transpose();
      return m;
    };
    for (int a = 0; a < n; ++a) {
      Vec e = Vec::Unit(n, a);
      rho_g.push_back(block(e, Vec::Zero(n)));
      rho_h.push_back(block(Vec::Zero(n), e));
    }
  } else {
    // rep on g* (+) R: rho(xi, mu)(nu, s) = (ad*(xi) nu + s mu, 0); faithful
    // whenever the coadjoint representation is.
    auto block = [n](const Mat& ad_star, const Vec& mu) {
      Mat m = Mat::Zero(n + 1, n + 1);
      m.topLeftCorner(n, n) = ad_star;
      m.topRightCorner(n, 1) = mu;
      return m;
    };
    for (int a = 0; a < n; ++a) {
      Vec e = Vec::Unit(n, a);
      rho_g.push_back(block(-g.f.ad(e).transpose(), Vec::Zero(n)));
      rho_h.push_back(block(Mat::Zero(n, n), e));
    }
  }
  RMatrix r;
  r.r = Mat::Zero(n, n);
  return assemble_context(rho_g, rho_h, r, false, name, chart_radius);
}

ContextPtr builtin_context(const std::string& name, double t, double chart_radius) {
  if (name == "trivial-3d") return make_trivial3d(chart_radius);
  if (name == "su2-lu-weinstein") return make_lu_weinstein("su2", t, chart_radius);
  if (name == "su3-lu-weinstein") return make_lu_weinstein("su3", t, chart_radius);
  if (name == "u2-lu-weinstein") return make_lu_weinstein("u2", t, chart_radius);
  if (name == "u1-lu-weinstein") return make_lu_weinstein("u1", t, chart_radius);
  throw InputError("unknown builtin algebra '" + name + "'");
}

std::vector<std::string> builtin_names() {
  return {"trivial-3d", "su2-lu-weinstein", "su3-lu-weinstein", "u2-lu-weinstein",
          "u1-lu-weinstein"};
}

bool is_builtin(const std::string& name) {
  for (const auto& b : builtin_names())
    if (b == name) return true;
  return false;
}

double MorphismBundle::cobracket_compatibility() const {
  const int n1 = src->n();
  double worst = 0.0;
  for (int a = 0; a < n1; ++a) {
    Vec xi = Vec::Unit(n1, a);
    Vec nxi = nu * xi;
    const auto& b2 = dst->bialg();
    Mat l2 = Mat::Zero(dst->n(), dst->n());
    for (int s = 0; s < dst->n(); ++s) l2 += nxi[s] * b2.lambda[s];
    const auto& b1 = src->bialg();
    Mat l1 = Mat::Zero(n1, n1);
    for (int s = 0; s < n1; ++s) l1 += xi[s] * b1.lambda[s];
    worst = std::max(worst, (l2 - nu * l1 * nu.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

MorphismBundle u1_into_u2() {
  MorphismBundle mb;
  mb.src = make_lu_weinstein("u1");
  mb.dst = make_lu_weinstein("u2");
  // u(1) basis {i} -> diag(i, 0) = (D1 + iI)/2 in the u(2) basis
  // ordering [A01, S01, D1, iI].
  mb.nu = Mat::Zero(4, 1);
  mb.nu(2, 0) = 0.5;
  mb.nu(3, 0) = 0.5;
  mb.group_map = [](const Mat& g1) {
    CMat z = complexify(g1);  // 1 x 1
    CMat g2 = CMat::Identity(2, 2);
    g2(0, 0) = z(0, 0);
    return realify(g2);
  };
  return mb;
}

MorphismBundle identity_morphism(ContextPtr ctx) {
  MorphismBundle mb;
  mb.src = ctx;
  mb.dst = ctx;
  mb.nu = Mat::Identity(ctx->n(), ctx->n());
  mb.group_map = [](const Mat& g) { return g; };
  return mb;
}

PipelineBundle build_pipeline(ContextPtr ctx, const Numerics& num, double radius,
                              std::uint64_t seed) {
  PipelineBundle pb;
  pb.ctx = ctx;
  pb.pi_lp = lie_poisson(ctx->bialg().g);
  pb.pi_lp.radius = ctx->chart_radius();
  pb.pi_star = pi_gstar(ctx);

  ModifiedExpOptions meo;
  meo.radius = radius;
  meo.quad_nodes = num.quad_nodes;
  meo.fd_step = num.fd_step;
  meo.seed = seed;
  pb.me = std::make_shared<const ModifiedExp>(ctx, meo);

  MoserOptions mo;
  mo.rk4_steps = num.rk4_steps;
  mo.quad_nodes = num.quad_nodes;
  GroupPack pack;
  pack.factors = {ctx};
  pb.flow = std::make_shared<const MoserFlow>(
      pb.pi_lp, SigmaProvider::from_pipeline(pb.me->sigma_pipeline()), pack, mo);
  return pb;
}

}  // namespace plgl
