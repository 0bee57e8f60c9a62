#include "core/fields.hpp"

#include <cmath>

namespace plgl {

FormField as_form(const TwoFormField& s) {
  FormField f;
  f.dim = s.dim;
  f.degree = 2;
  f.eval = [s](const Vec& x, const std::vector<Vec>& v) {
    return v[0].dot(s.eval(x) * v[1]);
  };
  return f;
}

FormField as_form(const OneFormField& a) {
  FormField f;
  f.dim = a.dim;
  f.degree = 1;
  f.eval = [a](const Vec& x, const std::vector<Vec>& v) { return a.eval(x).dot(v[0]); };
  return f;
}

BivectorField lie_poisson(const LieAlgebra& g) {
  BivectorField pi;
  pi.dim = g.dim;
  StructureConstants f = g.f;
  int n = g.dim;
  pi.eval = [f, n](const Vec& mu) {
    Mat out = Mat::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) s += f(a, b, c) * mu[c];
        out(a, b) = -s;
      }
    return out;
  };
  return pi;
}

Vec coadjoint_generator(const BivectorField& lp, const Vec& xi, const Vec& mu) {
  return -BivectorField::sharp(lp.eval(mu), xi);
}

Mat gauge_transform_at(const Mat& pi, const Mat& sigma) {
  const int n = static_cast<int>(pi.rows());
  Mat A = Mat::Identity(n, n) + pi * sigma;
  Eigen::FullPivLU<Mat> lu(A);
  if (!lu.isInvertible())
    throw DomainError("gauge transform undefined here (I + sigma^flat pi^sharp singular)");
  Mat out = lu.solve(pi);
  double skew = (out + out.transpose()).cwiseAbs().maxCoeff();
  if (skew > 1e-12 * std::max(1.0, out.cwiseAbs().maxCoeff()))
    throw DomainError("gauge transform produced a non-skew bivector");
  return out;
}

BivectorField gauge_transform(const BivectorField& pi, const TwoFormField& sigma) {
  BivectorField out;
  out.dim = pi.dim;
  out.radius = std::min(pi.radius, sigma.radius);
  auto pe = pi.eval;
  auto se = sigma.eval;
  out.eval = [pe, se](const Vec& mu) { return gauge_transform_at(pe(mu), se(mu)); };
  return out;
}

double jacobiator(const BivectorField& pi, const Vec& mu, double fd_step) {
  const int n = pi.dim;
  const double h = fd_step * std::max(1.0, mu.norm());
  // d_l pi^{jk} for all l by central differences
  std::vector<Mat> dpi(n);
  for (int l = 0; l < n; ++l) {
    Vec e = Vec::Unit(n, l);
    dpi[l] = (pi.eval(mu + h * e) - pi.eval(mu - h * e)) / (2.0 * h);
  }
  Mat p = pi.eval(mu);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += p(i, l) * dpi[l](j, k) + p(j, l) * dpi[l](k, i) + p(k, l) * dpi[l](i, j);
        worst = std::max(worst, std::abs(s));
      }
  return worst;
}

Mat pushforward(const MapField& F, const BivectorField& pi, const Vec& mu) {
  Mat J = F.jacobian(mu);
  return J * pi.eval(mu) * J.transpose();
}

FormField exterior_derivative(const FormField& alpha, double fd_step) {
  FormField d;
  d.dim = alpha.dim;
  d.degree = alpha.degree + 1;
  d.eval = [alpha, fd_step](const Vec& x, const std::vector<Vec>& v) {
    const double h = fd_step * std::max(1.0, x.norm());
    double sum = 0.0;
    std::vector<Vec> rest(v.size() - 1);
    for (size_t i = 0; i < v.size(); ++i) {
      for (size_t k = 0, j = 0; k < v.size(); ++k)
        if (k != i) rest[j++] = v[k];
      double plus = alpha.eval(x + h * v[i], rest);
      double minus = alpha.eval(x - h * v[i], rest);
      double term = (plus - minus) / (2.0 * h);
      sum += (i % 2 == 0) ? term : -term;
    }
    return sum;
  };
  return d;
}

FormField homotopy_operator(const FormField& alpha, int quad_nodes) {
  FormField h;
  h.dim = alpha.dim;
  h.degree = alpha.degree - 1;
  const int q = alpha.degree;
  h.eval = [alpha, quad_nodes, q](const Vec& x, const std::vector<Vec>& v) {
    const auto& quad = gauss_legendre(quad_nodes);
    std::vector<Vec> args(v.size() + 1);
    args[0] = x;
    for (size_t i = 0; i < v.size(); ++i) args[i + 1] = v[i];
    double sum = 0.0;
    for (int k = 0; k < quad_nodes; ++k) {
      double t = quad.nodes[k];
      sum += quad.weights[k] * std::pow(t, q - 1) * alpha.eval(t * x, args);
    }
    return sum;
  };
  return h;
}

BivectorField pi_gstar(ContextPtr ctx) {
  BivectorField pi;
  const int n = ctx->n();
  pi.dim = n;
  pi.radius = ctx->chart_radius();
  pi.eval = [ctx, n](const Vec& mu) {
    Mat u = ctx->chart_inv(mu);
    Mat V(n, n);
    for (int a = 0; a < n; ++a) V.col(a) = dressing_generator(*ctx, Vec::Unit(n, a), u);
    Mat C = theta_R_frame(*ctx, mu);  // C(a,i) = <theta^R(d_i), xi_a>
    Eigen::FullPivLU<Mat> lu(C);
    if (!lu.isInvertible())
      throw DomainError("pi_gstar: covector frame singular (outside chart domain)");
    // pi# c_a = -v_a  ->  pi = -C^{-1} V^T
    Mat out = -lu.solve(V.transpose());
    double skew = (out + out.transpose()).cwiseAbs().maxCoeff();
    if (skew > 1e-9 * std::max(1.0, out.cwiseAbs().maxCoeff()))
      throw DomainError("pi_gstar: assembled bivector is not skew");
    return out;
  };
  return pi;
}

HamiltonianTarget lie_poisson_target(const LieAlgebra& g) {
  HamiltonianTarget t;
  t.dim = g.dim;
  BivectorField lp = lie_poisson(g);
  t.generator = [lp](const Vec& xi, const Vec& pt) {
    return coadjoint_generator(lp, xi, pt);
  };
  t.covector = [](const Vec& xi, const Vec&) { return xi; };
  return t;
}

HamiltonianTarget gstar_target(ContextPtr ctx) {
  HamiltonianTarget t;
  t.dim = ctx->n();
  t.generator = [ctx](const Vec& xi, const Vec& pt) {
    return dressing_generator(*ctx, xi, ctx->chart_inv(pt));
  };
  t.covector = [ctx](const Vec& xi, const Vec& pt) {
    return theta_R_frame(*ctx, pt).transpose() * xi;
  };
  return t;
}

double moment_residual(const MapField& Phi, const BivectorField& pi,
                       const TwoFormField* sigma, const HamiltonianTarget& target,
                       const Vec& xi, const Vec& pt) {
  Mat J = Phi.jacobian(pt);
  Vec img = Phi.eval(pt);
  Vec cov = J.transpose() * target.covector(xi, img);
  Mat p = pi.eval(pt);
  if (sigma) p = gauge_transform_at(p, sigma->eval(pt));
  Vec v = -BivectorField::sharp(p, cov);
  return (J * v - target.generator(xi, img)).norm();
}

BivectorField product_bivector(const BivectorField& a, const BivectorField& b) {
  BivectorField out;
  out.dim = a.dim + b.dim;
  out.radius = std::min(a.radius, b.radius);
  int na = a.dim, nb = b.dim;
  auto ea = a.eval, eb = b.eval;
  out.eval = [ea, eb, na, nb](const Vec& mu) {
    Mat m = Mat::Zero(na + nb, na + nb);
    m.topLeftCorner(na, na) = ea(mu.head(na));
    m.bottomRightCorner(nb, nb) = eb(mu.tail(nb));
    return m;
  };
  return out;
}

}  // namespace plgl
