#include "core/lie_algebra.hpp"

#include <cmath>
#include <sstream>

namespace plgl {

Vec StructureConstants::bracket(const Vec& x, const Vec& y) const {
  Vec out = Vec::Zero(n_);
  for (int a = 0; a < n_; ++a) {
    const double xa = x[a];
    if (xa == 0.0) continue;
    for (int b = 0; b < n_; ++b) {
      const double s = xa * y[b];
      if (s == 0.0) continue;
      for (int c = 0; c < n_; ++c) out[c] += s * f_[idx(a, b, c)];
    }
  }
  return out;
}

Mat StructureConstants::ad(const Vec& x) const {
  Mat m = Mat::Zero(n_, n_);
  for (int a = 0; a < n_; ++a) {
    const double xa = x[a];
    if (xa == 0.0) continue;
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c) m(c, b) += xa * f_[idx(a, b, c)];
  }
  return m;
}

double StructureConstants::antisymmetry_violation() const {
  double worst = 0.0;
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c)
        worst = std::max(worst, std::abs(f_[idx(a, b, c)] + f_[idx(b, a, c)]));
  return worst;
}

double jacobiator_algebra(const StructureConstants& f) {
  const int n = f.dim();
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          double s = 0.0;
          for (int d = 0; d < n; ++d)
            s += f(a, b, d) * f(d, c, e) + f(b, c, d) * f(d, a, e) +
                 f(c, a, d) * f(d, b, e);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

void LieAlgebra::validate(double tol) const {
  if (dim <= 0 || f.dim() != dim) throw InputError("LieAlgebra: dimension mismatch");
  if (f.antisymmetry_violation() != 0.0)
    throw InputError("LieAlgebra: structure constants not antisymmetric");
  double jac = jacobiator_algebra(f);
  if (jac > tol) {
    std::ostringstream os;
    os << "LieAlgebra: Jacobi identity violated, max residual " << jac;
    throw InputError(os.str());
  }
}

void BilinearForm::validate(const LieAlgebra& g, double tol) const {
  if (matrix.rows() != g.dim || matrix.cols() != g.dim)
    throw InputError("BilinearForm: dimension mismatch");
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw InputError("BilinearForm: not symmetric");
  if (std::abs(matrix.determinant()) <= 1e-12)
    throw InputError("BilinearForm: degenerate");
  double inv = invariance_residual(g.f);
  if (inv > tol) {
    std::ostringstream os;
    os << "BilinearForm: not invariant, residual " << inv;
    throw InputError(os.str());
  }
}

double BilinearForm::invariance_residual(const StructureConstants& f) const {
  // <[x,y],z> + <y,[x,z]> on all basis triples.
  const int n = f.dim();
  double worst = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        double s = 0.0;
        for (int c = 0; c < n; ++c)
          s += f(x, y, c) * matrix(c, z) + f(x, z, c) * matrix(y, c);
        worst = std::max(worst, std::abs(s));
      }
  return worst;
}

double RMatrix::ad_invariance_residual(const StructureConstants& f, const Mat& T) {
  // (ad_s T)^{bc} = sum_d f_{sd}^b T^{dc} + f_{sd}^c T^{bd}
  const int n = f.dim();
  double worst = 0.0;
  for (int s = 0; s < n; ++s)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double v = 0.0;
        for (int d = 0; d < n; ++d)
          v += f(s, d, b) * T(d, c) + f(s, d, c) * T(b, d);
        worst = std::max(worst, std::abs(v));
      }
  return worst;
}

std::vector<double> RMatrix::yang_baxter(const StructureConstants& f) const {
  const int n = f.dim();
  std::vector<double> yb(static_cast<size_t>(n) * n * n, 0.0);
  auto I = [n](int a, int b, int c) {
    return (static_cast<size_t>(a) * n + b) * n + c;
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q)
            s += r(p, b) * r(q, c) * f(p, q, a)    // [r12, r13]
               + r(a, p) * r(q, c) * f(p, q, b)    // [r12, r23]
               + r(a, p) * r(b, q) * f(p, q, c);   // [r13, r23]
        yb[I(a, b, c)] = s;
      }
  return yb;
}

double RMatrix::yang_baxter_ad_invariance_residual(const StructureConstants& f) const {
  const int n = f.dim();
  auto yb = yang_baxter(f);
  auto T = [&](int a, int b, int c) {
    return yb[(static_cast<size_t>(a) * n + b) * n + c];
  };
  double worst = 0.0;
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double v = 0.0;
          for (int d = 0; d < n; ++d)
            v += f(s, d, a) * T(d, b, c) + f(s, d, b) * T(a, d, c) +
                 f(s, d, c) * T(a, b, d);
          worst = std::max(worst, std::abs(v));
        }
  return worst;
}

Vec LieBialgebra::coad(const Vec& xi, const Vec& mu) const {
  // ad*(xi) = -(ad xi)^T
  return -(g.f.ad(xi).transpose() * mu);
}

double LieBialgebra::cocycle_residual() const {
  // lambda([xi,eta]) = ad_xi lambda(eta) - ad_eta lambda(xi) on basis pairs,
  // where ad acts on g (x) g componentwise.
  const int n = g.dim;
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Mat lhs = Mat::Zero(n, n);
      for (int c = 0; c < n; ++c) lhs += g.f(a, b, c) * lambda[c];
      Vec ea = Vec::Unit(n, a), eb = Vec::Unit(n, b);
      Mat ada = g.f.ad(ea), adb = g.f.ad(eb);
      Mat rhs = ada * lambda[b] + lambda[b] * ada.transpose() -
                adb * lambda[a] - lambda[a] * adb.transpose();
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  return worst;
}

LieBialgebra cobracket_from_r(const LieAlgebra& g, const RMatrix& r, double tol) {
  g.validate(tol);
  if (r.r.rows() != g.dim || r.r.cols() != g.dim)
    throw InputError("RMatrix: dimension mismatch");

  double sym_res = RMatrix::ad_invariance_residual(g.f, r.symmetric_part());
  if (sym_res > tol) {
    std::ostringstream os;
    os << "coboundary condition violated: symmetric part of r is not "
          "ad-invariant (residual "
       << sym_res << ")";
    throw InputError(os.str());
  }
  double yb_res = r.yang_baxter_ad_invariance_residual(g.f);
  if (yb_res > tol) {
    std::ostringstream os;
    os << "coboundary condition violated: YB(r) is not ad-invariant (residual "
       << yb_res << ")";
    throw InputError(os.str());
  }

  LieBialgebra b;
  b.g = g;
  b.r = r;
  const int n = g.dim;
  b.lambda.resize(n);
  for (int a = 0; a < n; ++a) {
    Vec ea = Vec::Unit(n, a);
    Mat ad = g.f.ad(ea);
    // lambda(e_a) = ad_{e_a} r acting on both legs.
    b.lambda[a] = ad * r.r + r.r * ad.transpose();
  }
  // Dual structure constants: [mu_b, mu_c]*(e_a) = lambda(e_a)^{bc}.
  b.dual_f = StructureConstants(n);
  for (int a = 0; a < n; ++a)
    for (int bb = 0; bb < n; ++bb)
      for (int cc = 0; cc < n; ++cc) b.dual_f.at(bb, cc, a) = b.lambda[a](bb, cc);

  double anti = b.dual_f.antisymmetry_violation();
  if (anti > tol) {
    std::ostringstream os;
    os << "coboundary condition violated: dual bracket not antisymmetric "
          "(residual "
       << anti << ")";
    throw InputError(os.str());
  }
  double jac = jacobiator_algebra(b.dual_f);
  if (jac > tol) {
    std::ostringstream os;
    os << "coboundary condition violated: dual bracket fails Jacobi (residual "
       << jac << ")";
    throw InputError(os.str());
  }
  return b;
}

Vec splitting_j(const LieBialgebra& b, const Vec& mu) {
  const int n = b.dim();
  Vec out = Vec::Zero(2 * n);
  // g-part = -r#(mu), r#(mu)_b = sum_a r^{ab} mu_a; h-part = mu.
  out.head(n) = -(b.r.r.transpose() * mu);
  out.tail(n) = mu;
  return out;
}

ManinTriple::Residuals ManinTriple::residuals() const {
  const int n = half_dim();
  const int N = d.dim;
  Residuals res{};
  res.jacobi = jacobiator_algebra(d.f);
  res.metric_invariance = metric.invariance_residual(d.f);

  auto closure = [&](const std::vector<int>& span, const std::vector<int>& comp) {
    double worst = 0.0;
    for (int i : span)
      for (int j : span) {
        Vec bk = d.f.bracket(Vec::Unit(N, i), Vec::Unit(N, j));
        for (int k : comp) worst = std::max(worst, std::abs(bk[k]));
      }
    return worst;
  };
  res.g_closure = closure(g_indices, h_indices);
  res.h_closure = closure(h_indices, g_indices);

  auto isotropy = [&](const std::vector<int>& span) {
    double worst = 0.0;
    for (int i : span)
      for (int j : span) worst = std::max(worst, std::abs(metric.matrix(i, j)));
    return worst;
  };
  res.g_isotropy = isotropy(g_indices);
  res.h_isotropy = isotropy(h_indices);

  Mat pairing(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pairing(i, j) = metric.matrix(h_indices[i], g_indices[j]);
  res.pairing_det = std::abs(pairing.determinant());
  return res;
}

void ManinTriple::validate(double tol) const {
  const int n = half_dim();
  if (d.dim != 2 * n || static_cast<int>(h_indices.size()) != n)
    throw InputError("ManinTriple: index sets must split the double evenly");
  auto res = residuals();
  auto fail = [](const std::string& what, double v) {
    std::ostringstream os;
    os << "ManinTriple: " << what << " (residual " << v << ")";
    throw InputError(os.str());
  };
  if (res.jacobi > tol) fail("double fails Jacobi", res.jacobi);
  if (res.metric_invariance > tol) fail("metric not invariant", res.metric_invariance);
  if (res.g_closure > tol) fail("g span not closed under bracket", res.g_closure);
  if (res.h_closure > tol) fail("h span not closed under bracket", res.h_closure);
  if (res.g_isotropy > tol) fail("g span not isotropic", res.g_isotropy);
  if (res.h_isotropy > tol) fail("h span not isotropic", res.h_isotropy);
  if (res.pairing_det <= 1e-12) fail("g-h pairing degenerate", res.pairing_det);
}

ManinTriple build_double(const LieBialgebra& b, double t) {
  const int n = b.dim();
  ManinTriple mt;
  mt.t = t;
  mt.d.dim = 2 * n;
  mt.d.f = StructureConstants(2 * n);

  // [xi_a, xi_b] = g-bracket.
  for (int a = 0; a < n; ++a)
    for (int bb = 0; bb < n; ++bb)
      for (int c = 0; c < n; ++c)
        if (b.g.f(a, bb, c) != 0.0) mt.d.f.at(a, bb, c) = b.g.f(a, bb, c);

  // [mu_a, mu_b] = t * dual bracket.
  for (int a = 0; a < n; ++a)
    for (int bb = 0; bb < n; ++bb)
      for (int c = 0; c < n; ++c)
        if (b.dual_f(a, bb, c) != 0.0)
          mt.d.f.at(n + a, n + bb, n + c) = t * b.dual_f(a, bb, c);

  // [xi, mu]_t = ad*_xi mu - t r#(ad*_xi mu) + t ad_xi r#(mu): the g-part is
  // forced by equivariance of the splitting j(mu) = mu - r#(mu),
  //   [xi, j_t(mu)] = j_t(ad*_xi mu).
  for (int a = 0; a < n; ++a) {
    Vec xi = Vec::Unit(n, a);
    Mat ad_xi = b.g.f.ad(xi);
    for (int i = 0; i < n; ++i) {
      Vec mu = Vec::Unit(n, i);
      Vec co = b.coad(xi, mu);
      Vec gpart = -t * (b.r.r.transpose() * co) + t * (ad_xi * (b.r.r.transpose() * mu));
      for (int c = 0; c < n; ++c) {
        if (gpart[c] != 0.0) {
          mt.d.f.at(a, n + i, c) = gpart[c];
          mt.d.f.at(n + i, a, c) = -gpart[c];
        }
        if (co[c] != 0.0) {
          mt.d.f.at(a, n + i, n + c) = co[c];
          mt.d.f.at(n + i, a, n + c) = -co[c];
        }
      }
    }
  }

  // Canonical pairing between g and g*.
  mt.metric.matrix = Mat::Zero(2 * n, 2 * n);
  mt.metric.matrix.block(0, n, n, n) = Mat::Identity(n, n);
  mt.metric.matrix.block(n, 0, n, n) = Mat::Identity(n, n);

  mt.g_indices.resize(n);
  mt.h_indices.resize(n);
  for (int i = 0; i < n; ++i) {
    mt.g_indices[i] = i;
    mt.h_indices[i] = n + i;
  }

  double jac = jacobiator_algebra(mt.d.f);
  if (jac > kAlgebraTol) {
    std::ostringstream os;
    os << "build_double: assembled bracket fails Jacobi (residual " << jac
       << "); bialgebra data is inconsistent";
    throw InputError(os.str());
  }
  return mt;
}

double check_equivariance_j(const LieBialgebra& b, const ManinTriple& triple) {
  const int n = b.dim();
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    Vec xi = Vec::Zero(2 * n);
    xi[a] = 1.0;
    for (int i = 0; i < n; ++i) {
      Vec mu = Vec::Unit(n, i);
      Vec jmu = splitting_j(b, mu);
      Vec lhs = triple.d.f.bracket(xi, jmu);
      Vec rhs = splitting_j(b, b.coad(Vec::Unit(n, a), mu));
      worst = std::max(worst, (lhs - rhs).norm());
    }
  }
  return worst;
}

}  // namespace plgl
