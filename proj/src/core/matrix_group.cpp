#include "core/matrix_group.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

namespace plgl {

Mat realify(const CMat& a) {
  const int n = static_cast<int>(a.rows());
  Mat out(2 * n, 2 * n);
  out.block(0, 0, n, n) = a.real();
  out.block(0, n, n, n) = -a.imag();
  out.block(n, 0, n, n) = a.imag();
  out.block(n, n, n, n) = a.real();
  return out;
}

CMat complexify(const Mat& a) {
  const int n = static_cast<int>(a.rows()) / 2;
  CMat out(n, n);
  out.real() = a.block(0, 0, n, n);
  out.imag() = a.block(n, 0, n, n);
  return out;
}

MatrixRep::MatrixRep(std::vector<Mat> basis, bool complex_picture)
    : complex_(complex_picture), rho_(std::move(basis)) {
  if (rho_.empty()) throw InputError("MatrixRep: empty basis");
  N_ = static_cast<int>(rho_[0].rows());
  for (const auto& m : rho_)
    if (m.rows() != N_ || m.cols() != N_)
      throw InputError("MatrixRep: inconsistent matrix sizes");
  vec_basis_.resize(N_ * N_, dim());
  for (int i = 0; i < dim(); ++i)
    vec_basis_.col(i) = Eigen::Map<const Vec>(rho_[i].data(), N_ * N_);
  solver_.compute(vec_basis_);
  rank_ = static_cast<int>(solver_.rank());
}

Mat MatrixRep::from_coords(const Vec& x) const {
  Vec v = vec_basis_ * x;
  return Eigen::Map<const Mat>(v.data(), N_, N_);
}

Vec MatrixRep::coords(const Mat& m, double* residual) const {
  Vec rhs = Eigen::Map<const Vec>(m.data(), N_ * N_);
  Vec x = solver_.solve(rhs);
  if (residual) *residual = (vec_basis_ * x - rhs).norm();
  return x;
}

double MatrixRep::homomorphism_residual(const StructureConstants& f) const {
  double worst = 0.0;
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) {
      Mat lhs = rho_[i] * rho_[j] - rho_[j] * rho_[i];
      Mat rhs = Mat::Zero(N_, N_);
      for (int c = 0; c < dim(); ++c)
        if (f(i, j, c) != 0.0) rhs += f(i, j, c) * rho_[c];
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  return worst;
}

// ---------------------------------------------------------------------------

TripleContext::TripleContext(LieBialgebra bialg, ManinTriple triple, MatrixRep rep,
                             std::string name, double chart_radius)
    : bialg_(std::move(bialg)),
      triple_(std::move(triple)),
      rep_(std::move(rep)),
      name_(std::move(name)),
      chart_radius_(chart_radius) {
  n_ = bialg_.dim();
  if (triple_.d.dim != 2 * n_ || rep_.dim() != 2 * n_)
    throw InputError("TripleContext: dimensions of bialgebra, triple and rep disagree");
  metric_ = triple_.metric.matrix;
  pairing_.resize(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int a = 0; a < n_; ++a) pairing_(i, a) = metric_(n_ + i, a);
  pairing_inv_T_ = pairing_.transpose().inverse();
  if (rep_.rank() != 2 * n_)
    throw InputError("TripleContext: representation is not faithful");
}

Vec TripleContext::embed_g(const Vec& xi) const {
  Vec out = Vec::Zero(2 * n_);
  out.head(n_) = xi;
  return out;
}

Vec TripleContext::embed_h(const Vec& h) const {
  Vec out = Vec::Zero(2 * n_);
  out.tail(n_) = h;
  return out;
}

Vec TripleContext::j_of(const Vec& mu) const {
  Vec out(2 * n_);
  out.head(n_) = -(bialg_.r.r.transpose() * mu);
  out.tail(n_) = h_from_mu(mu);
  return out;
}

Mat TripleContext::mexp(const Vec& x) const { return rep_.from_coords(x).exp(); }

Vec TripleContext::mlog(const Mat& g, double* span_residual) const {
  const int N = rep_.N();
  double dist = (g - Mat::Identity(N, N)).norm();
  if (dist >= 1.0 + 1e-12)
    throw DomainError("mlog: outside principal-branch domain (|g - I| >= 1)");
  Mat lg = g.log();
  double res = 0.0;
  Vec x = rep_.coords(lg, &res);
  if (span_residual) {
    *span_residual = res;
  } else if (res > 1e-8 * std::max(1.0, lg.norm())) {
    std::ostringstream os;
    os << "mlog: log not in the span of the representation (residual " << res
       << "); element left the subgroup";
    throw DomainError(os.str());
  }
  return x;
}

Mat TripleContext::dexp_left_from_ad(const Mat& adx) const {
  const int d = 2 * n_;
  Mat term = Mat::Identity(d, d);
  Mat sum = Mat::Identity(d, d);
  double scale = std::max(1.0, adx.norm());
  for (int k = 1; k < 60; ++k) {
    term = (term * adx) * (-1.0 / (k + 1.0));
    sum += term;
    if (term.norm() < 1e-16 * scale) break;
  }
  return sum;
}

Mat TripleContext::dexp_left(const Vec& x) const {
  return dexp_left_from_ad(ad_matrix(x));
}

Vec TripleContext::adjoint(const Mat& g, const Vec& zeta) const {
  Mat m = g * rep_.from_coords(zeta) * g.inverse();
  double res = 0.0;
  Vec out = rep_.coords(m, &res);
  if (res > 1e-8 * std::max(1.0, m.norm()))
    throw DomainError("adjoint: result left the span of the representation");
  return out;
}

Mat TripleContext::adjoint_matrix(const Mat& g) const {
  const int d = 2 * n_;
  Mat ginv = g.inverse();
  Mat out(d, d);
  for (int i = 0; i < d; ++i) {
    Mat m = g * rep_.rho(i) * ginv;
    double res = 0.0;
    out.col(i) = rep_.coords(m, &res);
    if (res > 1e-8 * std::max(1.0, m.norm()))
      throw DomainError("adjoint: representation is not Ad-closed here");
  }
  return out;
}

// -- factorization ----------------------------------------------------------

std::pair<Mat, Mat> TripleContext::factorize_qr(const Mat& d) const {
  // Iwasawa via QR of d^{-1}: d^{-1} = Q R with R positive-diagonal upper
  // triangular gives d = R^{-1} Q^dagger = h g.
  CMat dc = complexify(d);
  const int m = static_cast<int>(dc.rows());
  Eigen::HouseholderQR<CMat> qr(dc.inverse());
  CMat Q = qr.householderQ();
  CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
  // normalize to positive real diagonal
  for (int i = 0; i < m; ++i) {
    std::complex<double> rii = R(i, i);
    double a = std::abs(rii);
    if (a < 1e-300) throw DomainError("factorize: singular triangular factor");
    std::complex<double> phase = rii / a;
    R.row(i) *= std::conj(phase);
    Q.col(i) *= phase;
  }
  CMat h = R.inverse();
  CMat g = Q.adjoint();
  return {realify(h), realify(g)};
}

std::pair<Mat, Mat> TripleContext::factorize_newton(const Mat& d, const FactorizeOptions& opt,
                                                    const Vec& eta0, const Vec& xi0) const {
  const int N = rep_.N();
  Vec eta = eta0, xi = xi0;
  double scale = std::max(1.0, d.norm());
  Mat dinv = d.inverse();

  auto resid = [&](const Vec& e, const Vec& x) -> Vec {
    Mat r = mexp(embed_h(e)) * mexp(embed_g(x)) * dinv - Mat::Identity(N, N);
    return Eigen::Map<const Vec>(r.data(), N * N);
  };

  Vec r = resid(eta, xi);
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    if (r.norm() <= opt.tol * scale)
      return {mexp(embed_h(eta)), mexp(embed_g(xi))};
    // Gauss-Newton step with a central-difference Jacobian; dims stay tiny.
    const double h = 1e-6;
    Mat J(N * N, 2 * n_);
    for (int i = 0; i < n_; ++i) {
      Vec ep = eta, em = eta;
      ep[i] += h;
      em[i] -= h;
      J.col(i) = (resid(ep, xi) - resid(em, xi)) / (2 * h);
    }
    for (int i = 0; i < n_; ++i) {
      Vec xp = xi, xm = xi;
      xp[i] += h;
      xm[i] -= h;
      J.col(n_ + i) = (resid(eta, xp) - resid(eta, xm)) / (2 * h);
    }
    Vec step = J.colPivHouseholderQr().solve(-r);
    eta += step.head(n_);
    xi += step.tail(n_);
    r = resid(eta, xi);
  }
  throw DomainError("factorize: outside germ domain (Newton did not converge)");
}

std::pair<Mat, Mat> TripleContext::factorize(const Mat& d, const FactorizeOptions& opt) const {
  double scale = std::max(1.0, d.norm());
  if (rep_.complex_picture()) {
    auto [h, g] = factorize_qr(d);
    double res = (h * g - d).norm();
    if (res <= opt.tol * scale) return {h, g};
    // fall through to a Newton polish seeded by the QR answer
    double sres = 0.0;
    Vec eta = h_part(mlog(h, &sres));
    Vec xi = g_part(mlog(g, &sres));
    return factorize_newton(d, opt, eta, xi);
  }
  Vec z;
  try {
    z = mlog(d);
  } catch (const DomainError&) {
    throw DomainError("factorize: outside germ domain (no principal log)");
  }
  return factorize_newton(d, opt, h_part(z), g_part(z));
}

// -- chart -------------------------------------------------------------------

Vec TripleContext::chart(const Mat& u) const {
  double res = 0.0;
  Vec z = mlog(u, &res);
  if (res > 1e-8 * std::max(1.0, z.norm()))
    throw DomainError("chart: point is not in the represented group");
  double goff = g_part(z).norm();
  if (goff > 1e-8 * std::max(1.0, z.norm()))
    throw DomainError("chart: point is not in H (g-components present)");
  return mu_from_h(h_part(z));
}

Mat TripleContext::chart_inv(const Vec& mu) const { return mexp(embed_h(h_from_mu(mu))); }

Vec TripleContext::log_G(const Mat& g) const {
  double res = 0.0;
  Vec z = mlog(g, &res);
  if (res > 1e-8 * std::max(1.0, z.norm()))
    throw DomainError("log_G: point is not in the represented group");
  if (h_part(z).norm() > 1e-8 * std::max(1.0, z.norm()))
    throw DomainError("log_G: point is not in G (h-components present)");
  return g_part(z);
}

// -- dressing ----------------------------------------------------------------

Vec dressing_generator(const TripleContext& ctx, const Vec& xi, const Mat& u) {
  Vec w = ctx.adjoint(u.inverse(), ctx.embed_g(xi));
  Vec gen = -w.tail(ctx.n());  // -pr_h(Ad_{u^{-1}} xi), h-coordinates
  // left-trivialized value -> chart velocity through the dexp transport
  Vec m = ctx.mlog(u);
  Mat T = ctx.dexp_left(m);
  Vec ydot = T.partialPivLu().solve(ctx.embed_h(gen)).tail(ctx.n());
  return ctx.mu_from_h(ydot);
}

std::pair<Mat, Mat> dressing_flow(const TripleContext& ctx, const Mat& g, const Mat& u) {
  return ctx.factorize(g * u);
}

Vec coadjoint(const TripleContext& ctx, const Mat& g, const Vec& mu) {
  Vec full = ctx.adjoint(g, ctx.embed_h(ctx.h_from_mu(mu)));
  return ctx.mu_from_h(full.tail(ctx.n()));
}

Vec coadjoint_H(const TripleContext& ctx, const Mat& u, const Vec& xi) {
  Vec full = ctx.adjoint(u, ctx.embed_g(xi));
  return full.head(ctx.n());
}

Mat theta_R_frame(const TripleContext& ctx, const Vec& mu) {
  const int n = ctx.n();
  Mat u = ctx.chart_inv(mu);
  Mat T = ctx.dexp_left(ctx.embed_h(ctx.h_from_mu(mu)));
  Mat Adu = ctx.adjoint_matrix(u);
  Mat Pinv = ctx.pairing().transpose().inverse();
  Mat frame(n, n);
  for (int i = 0; i < n; ++i) {
    // chart direction e_i in mu-coordinates -> h-coordinates -> theta^R value
    Vec hdir = ctx.h_from_mu(Vec::Unit(n, i));
    Vec right = Adu * (T * ctx.embed_h(hdir));
    for (int a = 0; a < n; ++a)
      frame(a, i) = ctx.pair(right, Vec::Unit(2 * n, a));
  }
  return frame;  // frame(a, i) = <theta^R(d/dmu_i), xi_a>
}

SplitDifferential split_differential(const TripleContext& ctx, const Vec& mu) {
  SplitDifferential sd;
  sd.jmu = ctx.j_of(mu);
  auto hg = ctx.factorize(ctx.mexp(sd.jmu));
  sd.h = hg.first;
  sd.g = hg.second;
  sd.T = ctx.dexp_left(sd.jmu);
  sd.Adg = ctx.adjoint_matrix(sd.g);
  return sd;
}

Vec SplitDifferential::w(const TripleContext& ctx, const Vec& X) const {
  return T * ctx.j_of(X);
}

Vec SplitDifferential::h_vel(const TripleContext& ctx, const Vec& X) const {
  Vec a = Adg * w(ctx, X);
  return ctx.embed_h(a.tail(ctx.n()));
}

Vec SplitDifferential::g_vel(const TripleContext& ctx, const Vec& X) const {
  Vec a = Adg * w(ctx, X);
  return ctx.embed_g(a.head(ctx.n()));
}

}  // namespace plgl
