#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/builtins.hpp"
#include "core/fields.hpp"

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

LieAlgebra abelian(int n) {
  LieAlgebra g;
  g.dim = n;
  g.f = StructureConstants(n);
  return g;
}

}  // namespace

TEST_CASE("lie_poisson: abelian, origin, so(3) contraction") {
  BivectorField pi0 = lie_poisson(abelian(4));
  CHECK(pi0.eval(Vec::Random(4)).norm() == 0.0);

  BivectorField pi = lie_poisson(so3());
  CHECK(pi.eval(Vec::Zero(3)).norm() == 0.0);
  Vec mu(3);
  mu << 0, 0, 1;
  Mat p = pi.eval(mu);
  // pi_{ab} = -f_{ab}^c mu_c with f = epsilon: pi_12 = -1 at mu = e3
  CHECK(p(0, 1) == doctest::Approx(-1.0));
  CHECK(p(0, 2) == doctest::Approx(0.0));
  CHECK(p(1, 2) == doctest::Approx(0.0));
  CHECK((p + p.transpose()).norm() == 0.0);
}

TEST_CASE("lie_poisson generator orientation pins the sign convention") {
  // xi_{g*} = -pi# <dmu, xi> must generate Ad*(exp(-t xi));
  // its value is (ad xi)^T mu.
  BivectorField pi = lie_poisson(so3());
  Rng rng(1);
  Vec mu = rng.ball_point(3, 1.0);
  Vec xi = rng.unit_vector(3);
  Vec gen = coadjoint_generator(pi, xi, mu);
  Vec expect = so3().f.ad(xi).transpose() * mu;
  CHECK((gen - expect).norm() < 1e-14);
}

TEST_CASE("gauge_transform: zero form, involution, symplectic oracle") {
  BivectorField pi = lie_poisson(so3());
  TwoFormField zero;
  zero.dim = 3;
  zero.eval = [](const Vec&) { return Mat::Zero(3, 3); };
  Rng rng(2);
  Vec mu = rng.ball_point(3, 1.0);
  CHECK((gauge_transform(pi, zero).eval(mu) - pi.eval(mu)).norm() == 0.0);

  // involution (pi^sigma)^{-sigma} = pi at 100 random points
  TwoFormField sig;
  sig.dim = 3;
  sig.eval = [](const Vec& m) {
    Mat s = Mat::Zero(3, 3);
    s(0, 1) = 0.3 + m[2];
    s(1, 0) = -s(0, 1);
    s(0, 2) = -0.2 * m[0];
    s(2, 0) = -s(0, 2);
    return s;
  };
  TwoFormField msig;
  msig.dim = 3;
  msig.eval = [sig](const Vec& m) { return (-sig.eval(m)).eval(); };
  BivectorField once = gauge_transform(pi, sig);
  BivectorField twice = gauge_transform(once, msig);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    Vec m = rng.ball_point(3, 1.0);
    worst = std::max(worst, (twice.eval(m) - pi.eval(m)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-11);

  // invertible pi: pi^sigma = (pi^{-1} + sigma)^{-1}
  BivectorField symp;
  symp.dim = 2;
  symp.eval = [](const Vec&) {
    Mat p(2, 2);
    p << 0, 1, -1, 0;
    return p;
  };
  TwoFormField small;
  small.dim = 2;
  small.eval = [](const Vec& m) {
    Mat s(2, 2);
    double a = 0.1 + 0.05 * m[0];
    s << 0, a, -a, 0;
    return s;
  };
  Vec pt(2);
  pt << 0.3, -0.4;
  Mat direct = (symp.eval(pt).inverse() + small.eval(pt)).inverse();
  CHECK((gauge_transform(symp, small).eval(pt) - direct).norm() < 1e-10);
}

TEST_CASE("gauge_transform reports the domain boundary") {
  BivectorField symp;
  symp.dim = 2;
  symp.eval = [](const Vec&) {
    Mat p(2, 2);
    p << 0, 1, -1, 0;
    return p;
  };
  TwoFormField minus_inv;
  minus_inv.dim = 2;
  minus_inv.eval = [](const Vec&) {
    Mat s(2, 2);
    s << 0, 1, -1, 0;  // sigma = -pi^{-1} makes I + pi sigma singular
    return s;
  };
  CHECK_THROWS_AS(gauge_transform(symp, minus_inv).eval(Vec::Zero(2)), DomainError);
}

TEST_CASE("jacobiator: constant, Lie-Poisson, broken quadratic") {
  BivectorField cst;
  cst.dim = 4;
  cst.eval = [](const Vec&) {
    Mat p = Mat::Zero(4, 4);
    p(0, 1) = 1;
    p(1, 0) = -1;
    p(2, 3) = 2;
    p(3, 2) = -2;
    return p;
  };
  Rng rng0(42);
  CHECK(jacobiator(cst, rng0.ball_point(4, 1.0)) < 1e-14);

  BivectorField pi = lie_poisson(so3());
  Rng rng(3);
  CHECK(jacobiator(pi, rng.ball_point(3, 1.0)) < 1e-9);

  // quadratic perturbation pi_12 += mu_1^2; symbolic expansion of the new
  // jacobiator component [pi,pi]^{012}:
  //   sum_l pi^{0l} d_l pi^{12} + pi^{1l} d_l pi^{20} + pi^{2l} d_l pi^{01}
  // gains 2 mu_0 pi^{20} from the d_0 pi^{01}-term (indices 0-based).
  BivectorField bad;
  bad.dim = 3;
  bad.eval = [pi](const Vec& m) {
    Mat p = pi.eval(m);
    p(0, 1) += m[0] * m[0];
    p(1, 0) -= m[0] * m[0];
    return p;
  };
  Vec mu(3);
  mu << 0.7, 0.4, -0.3;
  double extra = std::abs(2.0 * mu[0] * pi.eval(mu)(2, 0));
  double got = jacobiator(bad, mu);
  CHECK(got == doctest::Approx(extra).epsilon(1e-4));
}

TEST_CASE("pushforward: identity, linear map, coadjoint equivariance") {
  BivectorField pi = lie_poisson(so3());
  Rng rng(4);
  Vec mu = rng.ball_point(3, 1.0);

  MapField id;
  id.dim_in = id.dim_out = 3;
  id.eval = [](const Vec& m) { return m; };
  CHECK((pushforward(id, pi, mu) - pi.eval(mu)).norm() < 1e-8);

  Mat A(3, 3);
  A << 2, 1, 0, 0, 1, -1, 1, 0, 3;
  MapField lin;
  lin.dim_in = lin.dim_out = 3;
  lin.eval = [A](const Vec& m) { return (A * m).eval(); };
  CHECK((pushforward(lin, pi, mu) - A * pi.eval(mu) * A.transpose()).norm() < 1e-8);

  // coadjoint maps are Poisson for lie_poisson
  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  BivectorField lp = lie_poisson(su2->bialg().g);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    Vec m = rng.ball_point(3, 0.5);
    Mat g = su2->mexp(su2->embed_g(0.3 * rng.unit_vector(3)));
    MapField co;
    co.dim_in = co.dim_out = 3;
    co.eval = [&](const Vec& x) { return coadjoint(*su2, g, x); };
    Mat push = pushforward(co, lp, m);
    worst = std::max(worst, (push - lp.eval(co.eval(m))).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("homotopy operator: constant 1-form and exact forms") {
  // constant 1-form c dmu_1 -> c mu_1
  FormField a;
  a.dim = 3;
  a.degree = 1;
  a.eval = [](const Vec&, const std::vector<Vec>& v) { return 2.5 * v[0][0]; };
  FormField ha = homotopy_operator(a, 16);
  Vec mu(3);
  mu << 0.4, -0.2, 0.7;
  CHECK(ha.eval(mu, {}) == doctest::Approx(2.5 * mu[0]).epsilon(1e-12));

  // exact 2-form alpha = d(mu_0^2 dmu_1) = 2 mu_0 dmu_0 ^ dmu_1:
  // d(h alpha) = alpha
  FormField alpha;
  alpha.dim = 3;
  alpha.degree = 2;
  alpha.eval = [](const Vec& x, const std::vector<Vec>& v) {
    return 2.0 * x[0] * (v[0][0] * v[1][1] - v[0][1] * v[1][0]);
  };
  FormField halpha = homotopy_operator(alpha, 16);
  FormField dh = exterior_derivative(halpha, 1e-5);
  Rng rng(5);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    Vec x = rng.ball_point(3, 1.0);
    Vec v1 = rng.unit_vector(3), v2 = rng.unit_vector(3);
    worst = std::max(worst, std::abs(dh.eval(x, {v1, v2}) - alpha.eval(x, {v1, v2})));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("homotopy identity d h + h d = id on polynomial forms") {
  Rng rng(6);
  auto check_form = [&](const FormField& f, double tol) {
    FormField hf = homotopy_operator(f, 16);
    FormField dhf = exterior_derivative(hf, 1e-5);
    FormField df = exterior_derivative(f, 1e-5);
    FormField hdf = homotopy_operator(df, 16);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      Vec x = rng.ball_point(f.dim, 1.0);
      std::vector<Vec> vs;
      for (int q = 0; q < f.degree; ++q) vs.push_back(rng.unit_vector(f.dim));
      double lhs = dhf.eval(x, vs) + hdf.eval(x, vs);
      worst = std::max(worst, std::abs(lhs - f.eval(x, vs)));
    }
    CHECK(worst < tol);
  };

  FormField f1;  // polynomial 1-form
  f1.dim = 3;
  f1.degree = 1;
  f1.eval = [](const Vec& x, const std::vector<Vec>& v) {
    return (x[1] * x[1]) * v[0][0] - x[0] * x[2] * v[0][2];
  };
  check_form(f1, 1e-7);

  FormField f2;  // 2-form with polynomial coefficients
  f2.dim = 3;
  f2.degree = 2;
  f2.eval = [](const Vec& x, const std::vector<Vec>& v) {
    Mat s = Mat::Zero(3, 3);
    s(0, 1) = 1.0 + x[2];
    s(1, 0) = -s(0, 1);
    s(1, 2) = x[0] * x[1];
    s(2, 1) = -s(1, 2);
    return v[0].dot(s * v[1]);
  };
  check_form(f2, 1e-7);
}

TEST_CASE("pi_gstar: semidirect case reduces to lie_poisson; zero at unit") {
  ContextPtr sd = make_semidirect(so3());
  BivectorField pg = pi_gstar(sd);
  BivectorField lp = lie_poisson(so3());
  Rng rng(7);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    Vec mu = rng.ball_point(3, 0.25);
    worst = std::max(worst, (pg.eval(mu) - lp.eval(mu)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-10);

  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  CHECK(pi_gstar(su2).eval(Vec::Zero(3)).norm() < 1e-12);
}

TEST_CASE("pi_gstar: Poisson property and leaf containment for su(2)") {
  ContextPtr su2 = builtin_context("su2-lu-weinstein");
  BivectorField pg = pi_gstar(su2);
  Rng rng(8);
  double worst_jac = 0.0, worst_leaf = 0.0;
  for (int k = 0; k < 10; ++k) {
    Vec mu = rng.ball_point(3, 0.2);
    worst_jac = std::max(worst_jac, jacobiator(pg, mu));
    // pi# image inside the span of dressing generators
    Mat p = pg.eval(mu);
    Mat u = su2->chart_inv(mu);
    Mat V(3, 3);
    for (int a = 0; a < 3; ++a) V.col(a) = dressing_generator(*su2, Vec::Unit(3, a), u);
    for (int a = 0; a < 3; ++a) {
      Vec img = BivectorField::sharp(p, Vec::Unit(3, a));
      Vec resid = img - V * (V.colPivHouseholderQr().solve(img));
      worst_leaf = std::max(worst_leaf, resid.norm());
    }
  }
  CHECK(worst_jac < 1e-6);
  CHECK(worst_leaf < 1e-8);
}

TEST_CASE("moment_residual: identity and Add moment maps") {
  BivectorField pi = lie_poisson(so3());
  HamiltonianTarget tgt = lie_poisson_target(so3());
  Rng rng(9);
  Vec mu = rng.ball_point(3, 1.0);
  Vec xi = rng.unit_vector(3);

  MapField id;
  id.dim_in = id.dim_out = 3;
  id.eval = [](const Vec& m) { return m; };
  CHECK(moment_residual(id, pi, nullptr, tgt, xi, mu) < 1e-8);

  BivectorField pi2 = product_bivector(pi, pi);
  MapField add;
  add.dim_in = 6;
  add.dim_out = 3;
  add.eval = [](const Vec& z) { return (z.head(3) + z.tail(3)).eval(); };
  Vec z(6);
  z << mu, 0.5 * rng.ball_point(3, 1.0);
  CHECK(moment_residual(add, pi2, nullptr, tgt, xi, z) < 1e-8);
}

TEST_CASE("gauge transform preserves the jacobiator for closed sigma") {
  BivectorField pi = lie_poisson(so3());
  Rng rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    Mat C = Mat::Zero(3, 3);
    C(0, 1) = rng.uniform(-0.5, 0.5);
    C(1, 0) = -C(0, 1);
    C(1, 2) = rng.uniform(-0.5, 0.5);
    C(2, 1) = -C(1, 2);
    double a = rng.uniform(-0.3, 0.3);
    TwoFormField sig;
    sig.dim = 3;
    sig.eval = [C, a](const Vec& m) {
      Mat s = C;
      // d(a mu0^2 dmu1) = 2 a mu0 dmu0 ^ dmu1 is exact, hence closed
      s(0, 1) += 2 * a * m[0];
      s(1, 0) -= 2 * a * m[0];
      return s;
    };
    BivectorField gp = gauge_transform(pi, sig);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k)
      worst = std::max(worst, jacobiator(gp, rng.ball_point(3, 0.6)));
    CHECK(worst < 1e-8);
  }
}
