#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/builtins.hpp"
#include "core/matrix_group.hpp"

using namespace plgl;

namespace {

LieAlgebra so3() {
  LieAlgebra g;
  g.dim = 3;
  g.f = StructureConstants(3);
  g.f.set_bracket(0, 1, 2, 1.0);
  g.f.set_bracket(1, 2, 0, 1.0);
  g.f.set_bracket(2, 0, 1, 1.0);
  return g;
}

// 30-term Taylor series, independent of the Pade path
Mat exp_series(const Mat& x) {
  Mat term = Mat::Identity(x.rows(), x.cols());
  Mat sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = (term * x) / k;
    sum += term;
  }
  return sum;
}

// classical Gram-Schmidt QR of a complex matrix, for the Iwasawa oracle
void gram_schmidt(const CMat& A, CMat* Q, CMat* R) {
  const int n = static_cast<int>(A.cols());
  *Q = A;
  *R = CMat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      std::complex<double> r = Q->col(i).adjoint() * A.col(j);
      (*R)(i, j) = r;
      Q->col(j) -= r * Q->col(i);
    }
    double nn = Q->col(j).norm();
    (*R)(j, j) = nn;
    Q->col(j) /= nn;
  }
}

}  // namespace

TEST_CASE("rep invariants for the builtins") {
  for (const auto& name : {"su2-lu-weinstein", "u2-lu-weinstein", "trivial-3d"}) {
    ContextPtr ctx = builtin_context(name);
    CHECK(ctx->rep().homomorphism_residual(ctx->df()) < 1e-10);
    CHECK(ctx->rep().rank() == 2 * ctx->n());
  }
}

TEST_CASE("mexp: identity, nilpotent truncation, series oracle") {
  ContextPtr triv = make_trivial3d();
  const int N = triv->rep().N();
  CHECK((triv->mexp(Vec::Zero(6)) - Mat::Identity(N, N)).norm() == 0.0);

  // nilpotent: x^2 = 0 so exp = I + rho(x)
  Vec x(6);
  x << 0.3, -0.2, 0.1, 0.05, 0.4, -0.3;
  Mat rho = triv->rep().from_coords(x);
  CHECK((rho * rho).norm() == 0.0);
  CHECK((triv->mexp(x) - (Mat::Identity(N, N) + rho)).norm() < 1e-15);

  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  Rng rng(2);
  Vec y = rng.unit_vector(6);
  Mat got = su2->mexp(y);
  Mat want = exp_series(su2->rep().from_coords(y));
  CHECK((got - want).norm() < 1e-13);
  CHECK((got * su2->mexp(-y) - Mat::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("mlog: round trip and subgroup detection") {
  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  CHECK(su2->mlog(Mat::Identity(4, 4)).norm() == 0.0);

  Rng rng(3);
  Vec x = 0.3 * rng.unit_vector(6);
  Vec back = su2->mlog(su2->mexp(x));
  CHECK((back - x).norm() < 1e-11);

  // upper-triangular element: h-coordinates only
  Vec h = 0.25 * rng.unit_vector(3);
  Mat u = su2->mexp(su2->embed_h(h));
  Vec z = su2->mlog(u);
  CHECK(su2->g_part(z).norm() < 1e-10);
  CHECK((su2->h_part(z) - h).norm() < 1e-11);
}

TEST_CASE("adjoint: identity, derivative oracle, metric invariance, cocycle") {
  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  Rng rng(4);
  Vec zeta = rng.unit_vector(6);
  CHECK((su2->adjoint(Mat::Identity(4, 4), zeta) - zeta).norm() < 1e-14);

  // d/dt Ad_{exp(t xi)} zeta |_0 = ad_xi zeta by central differences
  Vec xi = rng.unit_vector(6);
  const double h = 1e-5;
  Vec fd = (su2->adjoint(su2->mexp(h * xi), zeta) -
            su2->adjoint(su2->mexp(-h * xi), zeta)) /
           (2 * h);
  CHECK((fd - su2->bracket(xi, zeta)).norm() < 1e-6);

  Vec a = rng.unit_vector(6), b = rng.unit_vector(6);
  Mat g1 = su2->mexp(0.4 * rng.unit_vector(6));
  Mat g2 = su2->mexp(0.4 * rng.unit_vector(6));
  CHECK(std::abs(su2->pair(su2->adjoint(g1, a), su2->adjoint(g1, b)) - su2->pair(a, b)) <
        1e-12);
  // exact Ad-cocycle
  Vec lhs = su2->adjoint(g1 * g2, zeta);
  Vec rhs = su2->adjoint(g1, su2->adjoint(g2, zeta));
  CHECK((lhs - rhs).norm() < 1e-10);
}

TEST_CASE("factorize: identity, round trip, Gram-Schmidt oracle") {
  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  auto [h0, g0] = su2->factorize(Mat::Identity(4, 4));
  CHECK((h0 - Mat::Identity(4, 4)).norm() < 1e-13);
  CHECK((g0 - Mat::Identity(4, 4)).norm() < 1e-13);

  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    Vec eta = 0.2 * rng.unit_vector(3), xi = 0.2 * rng.unit_vector(3);
    Mat h = su2->mexp(su2->embed_h(eta));
    Mat g = su2->mexp(su2->embed_g(xi));
    auto [hh, gg] = su2->factorize(h * g);
    CHECK((hh - h).norm() < 1e-10);
    CHECK((gg - g).norm() < 1e-10);
    CHECK((hh * gg - h * g).norm() < 1e-12);
  }

  // random d in SL(2,C) near I: h upper triangular positive diagonal,
  // g unitary, cross-checked against a Gram-Schmidt Iwasawa oracle
  for (int trial = 0; trial < 5; ++trial) {
    Vec z = 0.3 * rng.unit_vector(6);
    Mat d = su2->mexp(z);
    auto [h, g] = su2->factorize(d);
    CMat hc = complexify(h), gc = complexify(g);
    CHECK(std::abs(hc(1, 0)) < 1e-12);
    CHECK(hc(0, 0).real() > 0.0);
    CHECK(std::abs(hc(0, 0).imag()) < 1e-12);
    CHECK((gc * gc.adjoint() - CMat::Identity(2, 2)).norm() < 1e-12);
    CHECK((h * g - d).norm() < 1e-12);

    // oracle: QR of d^{-1} by classical Gram-Schmidt
    CMat Q, R;
    gram_schmidt(complexify(d).inverse(), &Q, &R);
    CHECK((hc - R.inverse()).norm() < 1e-10);
    CHECK((gc - Q.adjoint()).norm() < 1e-10);
  }
}

TEST_CASE("factorize: generic Newton path on a non-complex rep") {
  ContextPtr sd = make_semidirect(so3());
  Rng rng(9);
  Vec eta = 0.2 * rng.unit_vector(3), xi = 0.2 * rng.unit_vector(3);
  Mat dd = sd->mexp(sd->embed_h(eta)) * sd->mexp(sd->embed_g(xi));
  auto [hh, gg] = sd->factorize(dd);
  CHECK((hh * gg - dd).norm() < 1e-12);
  CHECK((sd->mlog(hh) - sd->embed_h(eta)).norm() < 1e-10);
  CHECK((sd->mlog(gg) - sd->embed_g(xi)).norm() < 1e-10);
}

TEST_CASE("factorize: outside the germ domain fails loudly") {
  ContextPtr sd = make_semidirect(so3());
  Mat d = -Mat::Identity(4, 4);  // far outside the principal-branch ball
  CHECK_THROWS_AS(sd->factorize(d), DomainError);
}

TEST_CASE("chart: round trip on the chart ball") {
  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    Vec mu = rng.ball_point(3, su2->chart_radius());
    Vec back = su2->chart(su2->chart_inv(mu));
    CHECK((back - mu).norm() < 1e-10);
  }
  // a G-element is rejected
  Mat g = su2->mexp(su2->embed_g(Vec::Unit(3, 0) * 0.2));
  CHECK_THROWS_AS(su2->chart(g), DomainError);
}

TEST_CASE("dressing_generator: unit is fixed; semidirect case is coadjoint") {
  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  Vec xi = Vec::Unit(3, 1);
  CHECK(dressing_generator(*su2, xi, Mat::Identity(4, 4)).norm() < 1e-13);

  // r = 0: dressing generator equals the coadjoint generator on g*
  ContextPtr sd = make_semidirect(so3());
  Rng rng(7);
  Vec mu = rng.ball_point(3, 0.25);
  Mat u = sd->chart_inv(mu);
  Vec gen = dressing_generator(*sd, xi, u);
  // paper convention: xi_{g*} = d/dt Ad*(exp(-t xi)) mu |_0 = +(ad_xi)* mu
  Vec expect = sd->bialg().g.f.ad(xi).transpose() * mu;
  CHECK((gen - expect).norm() < 1e-12);
}

TEST_CASE("dressing_generator is the flow derivative") {
  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  Rng rng(8);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Vec xi = rng.unit_vector(3);
    Vec mu = rng.ball_point(3, 0.2);
    Mat u = su2->chart_inv(mu);
    Vec gen = dressing_generator(*su2, xi, u);
    const double h = 1e-5;
    // generator convention exp(-t xi): central difference of the flow
    auto flow = [&](double t) {
      Mat g = su2->mexp(su2->embed_g(-t * xi));
      return su2->chart(dressing_flow(*su2, g, u).first);
    };
    Vec fd = (flow(h) - flow(-h)) / (2 * h);
    worst = std::max(worst, (fd - gen).norm() / std::max(1.0, gen.norm()));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("dressing generator is linear in xi") {
  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  Rng rng(9);
  Vec mu = rng.ball_point(3, 0.2);
  Mat u = su2->chart_inv(mu);
  Vec a = rng.unit_vector(3), b = rng.unit_vector(3);
  Vec lhs = dressing_generator(*su2, 2.0 * a + 0.5 * b, u);
  Vec rhs = 2.0 * dressing_generator(*su2, a, u) + 0.5 * dressing_generator(*su2, b, u);
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("dressing_flow: units and the action law") {
  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  Rng rng(10);
  Vec mu = rng.ball_point(3, 0.15);
  Mat u = su2->chart_inv(mu);
  Mat e = Mat::Identity(4, 4);

  auto [u1, g1] = dressing_flow(*su2, e, u);
  CHECK((u1 - u).norm() < 1e-12);
  CHECK((g1 - e).norm() < 1e-12);

  Mat g = su2->mexp(su2->embed_g(0.15 * rng.unit_vector(3)));
  auto [ge, gg] = dressing_flow(*su2, g, e);
  CHECK((ge - e).norm() < 1e-12);
  CHECK((gg - g).norm() < 1e-12);

  // (g1 g2) . u = g1 . (g2 . u)
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Mat ga = su2->mexp(su2->embed_g(0.12 * rng.unit_vector(3)));
    Mat gb = su2->mexp(su2->embed_g(0.12 * rng.unit_vector(3)));
    Vec m2 = rng.ball_point(3, 0.15);
    Mat uu = su2->chart_inv(m2);
    Mat lhs = dressing_flow(*su2, ga * gb, uu).first;
    Mat rhs = dressing_flow(*su2, ga, dressing_flow(*su2, gb, uu).first).first;
    worst = std::max(worst, (lhs - rhs).norm());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("coadjoint: identity, orbit norms, generator convention") {
  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  Rng rng(11);
  Vec mu = rng.ball_point(3, 0.3);
  CHECK((coadjoint(*su2, Mat::Identity(4, 4), mu) - mu).norm() < 1e-14);

  for (int trial = 0; trial < 10; ++trial) {
    Mat g = su2->mexp(su2->embed_g(rng.unit_vector(3)));
    CHECK(std::abs(coadjoint(*su2, g, mu).norm() - mu.norm()) < 1e-12);
  }

  // d/dt Ad*_{exp(-t xi)} mu |_0 = -ad*(xi) mu = +(ad_xi)* mu
  Vec xi = rng.unit_vector(3);
  const double h = 1e-5;
  auto co = [&](double t) {
    return coadjoint(*su2, su2->mexp(su2->embed_g(-t * xi)), mu);
  };
  Vec fd = (co(h) - co(-h)) / (2 * h);
  Vec expect = su2->bialg().g.f.ad(xi).transpose() * mu;
  CHECK((fd - expect).norm() < 1e-6);
}

TEST_CASE("split differential matches finite differences") {
  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  Rng rng(12);
  Vec mu = rng.ball_point(3, 0.2);
  SplitDifferential sd = split_differential(*su2, mu);
  const double h = 1e-6;
  for (int a = 0; a < 3; ++a) {
    Vec e = Vec::Unit(3, a);
    auto hg_p = su2->factorize(su2->mexp(su2->j_of(mu + h * e)));
    auto hg_m = su2->factorize(su2->mexp(su2->j_of(mu - h * e)));
    // h^{-1} dh
    Mat dh = (hg_p.first - hg_m.first) / (2 * h);
    Vec hv_fd = su2->rep().coords(sd.h.inverse() * dh);
    CHECK((hv_fd - sd.h_vel(*su2, e)).norm() < 1e-6);
    // dg g^{-1}
    Mat dg = (hg_p.second - hg_m.second) / (2 * h);
    Vec gv_fd = su2->rep().coords(dg * sd.g.inverse());
    CHECK((gv_fd - sd.g_vel(*su2, e)).norm() < 1e-6);
  }
}

TEST_CASE("theta_R frame is the identity at the unit") {
  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  Mat frame = theta_R_frame(*su2, Vec::Zero(3));
  CHECK((frame - Mat::Identity(3, 3)).norm() < 1e-12);
}
