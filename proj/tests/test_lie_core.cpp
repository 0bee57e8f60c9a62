#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/builtins.hpp"
#include "core/lie_algebra.hpp"

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

// brute-force cyclic Jacobi sum, independent of the library path
double jacobi_oracle(const StructureConstants& f) {
  int n = f.dim();
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          double s = 0;
          for (int d = 0; d < n; ++d) {
            s += f(a, b, d) * f(d, c, e);
            s += f(b, c, d) * f(d, a, e);
            s += f(c, a, d) * f(d, b, e);
          }
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

}  // namespace

TEST_CASE("jacobiator: abelian and so(3) vanish") {
  StructureConstants zero(4);
  CHECK(jacobiator_algebra(zero) == 0.0);
  CHECK(jacobiator_algebra(so3().f) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("jacobiator: perturbed so(3) matches the summation oracle") {
  LieAlgebra g = so3();
  g.f.at(0, 1, 2) += 0.1;  // breaks antisymmetry on purpose; raw tensor input
  double got = jacobiator_algebra(g.f);
  double expect = jacobi_oracle(g.f);
  CHECK(got == doctest::Approx(expect).epsilon(1e-14));
  CHECK(got >= 0.1 - 1e-12);
}

TEST_CASE("bilinear form invariance flags non-invariant metrics") {
  LieAlgebra g = so3();
  BilinearForm b;
  b.matrix = Mat::Identity(3, 3);
  CHECK(b.invariance_residual(g.f) == doctest::Approx(0.0));
  b.matrix(0, 0) = 2.0;
  CHECK(b.invariance_residual(g.f) > 0.5);
}

TEST_CASE("cobracket_from_r: r = 0 gives the abelian dual") {
  LieAlgebra g = so3();
  RMatrix r;
  r.r = Mat::Zero(3, 3);
  LieBialgebra b = cobracket_from_r(g, r);
  CHECK(jacobiator_algebra(b.dual_f) == 0.0);
  for (int a = 0; a < 3; ++a) CHECK(b.lambda[a].norm() == 0.0);
}

TEST_CASE("cobracket_from_r: su(2) Lu-Weinstein r gives a solvable dual") {
  auto [bialg, triple] = lu_weinstein_data("su2");
  CHECK(bialg.dim() == 3);
  // non-abelian dual
  double sz = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) sz = std::max(sz, std::abs(bialg.dual_f(a, b, c)));
  CHECK(sz > 0.1);
  CHECK(jacobiator_algebra(bialg.dual_f) < 1e-10);
  CHECK(bialg.cocycle_residual() < 1e-12);
  // solvable of dim 3: [h, [h, h]] must drop dimension; derived algebra of
  // the dual is spanned by the two root directions here
  Vec v1 = bialg.dual_f.bracket(Vec::Unit(3, 2), Vec::Unit(3, 0));
  Vec v2 = bialg.dual_f.bracket(Vec::Unit(3, 2), Vec::Unit(3, 1));
  Vec w = bialg.dual_f.bracket(v1, v2);
  CHECK(w.norm() < 1e-12);  // derived algebra is abelian -> solvable
}

TEST_CASE("cobracket_from_r rejects r with non-invariant symmetric part") {
  auto [bialg, triple] = lu_weinstein_data("su2");
  RMatrix bad = bialg.r;
  bad.r(0, 1) += 0.05;  // breaks skewness into a non-invariant symmetric part
  // oracle: the symmetric part is now not ad-invariant
  CHECK(RMatrix::ad_invariance_residual(bialg.g.f, bad.symmetric_part()) > 1e-3);
  CHECK_THROWS_AS(cobracket_from_r(bialg.g, bad), InputError);
}

TEST_CASE("splitting j: linearity and the r-contraction") {
  auto [bialg, triple] = lu_weinstein_data("su2");
  const int n = 3;
  Rng rng(5);
  Vec mu(n);
  for (int i = 0; i < n; ++i) mu[i] = rng.uniform(-1, 1);

  Vec j1 = splitting_j(bialg, mu);
  CHECK((splitting_j(bialg, 2.0 * mu) - 2.0 * j1).norm() == doctest::Approx(0.0));
  // h-part is mu itself
  CHECK((j1.tail(n) - mu).norm() == doctest::Approx(0.0));
  // g-part equals -r#(mu) by direct contraction
  Vec rsharp = Vec::Zero(n);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) rsharp[b] += bialg.r.r(a, b) * mu[a];
  CHECK((j1.head(n) + rsharp).norm() == doctest::Approx(0.0));

  // r = 0: pure h-part
  RMatrix r0;
  r0.r = Mat::Zero(n, n);
  LieBialgebra triv = cobracket_from_r(bialg.g, r0);
  CHECK(splitting_j(triv, mu).head(n).norm() == 0.0);
}

TEST_CASE("check_equivariance_j on the shipped examples") {
  // r = 0 semidirect double
  {
    LieAlgebra g = so3();
    RMatrix r0;
    r0.r = Mat::Zero(3, 3);
    LieBialgebra b = cobracket_from_r(g, r0);
    ManinTriple mt = build_double(b, 0.0);
    CHECK(check_equivariance_j(b, mt) < 1e-14);
  }
  // su(2) Lu-Weinstein
  {
    auto [bialg, triple] = lu_weinstein_data("su2");
    CHECK(check_equivariance_j(bialg, triple) < 1e-10);
    // deliberately wrong r
    LieBialgebra broken = bialg;
    broken.r.r(0, 1) += 0.05;
    CHECK(check_equivariance_j(broken, triple) > 1e-3);
  }
}

TEST_CASE("build_double: t = 0 is the semidirect product") {
  auto [bialg, triple] = lu_weinstein_data("su2");
  ManinTriple d0 = build_double(bialg, 0.0);
  d0.validate();
  const int n = 3;
  // [mu, mu]_0 = 0
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Vec br = d0.d.f.bracket(Vec::Unit(2 * n, n + a), Vec::Unit(2 * n, n + b));
      CHECK(br.norm() == 0.0);
    }
  // [xi, mu]_0 = ad*_xi mu
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i) {
      Vec br = d0.d.f.bracket(Vec::Unit(2 * n, a), Vec::Unit(2 * n, n + i));
      Vec co = bialg.coad(Vec::Unit(n, a), Vec::Unit(n, i));
      CHECK((br.head(n)).norm() == 0.0);
      CHECK((br.tail(n) - co).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("build_double: su(2) at t = 1 validates and matches the matrix triple") {
  auto [bialg, triple] = lu_weinstein_data("su2");
  ManinTriple d1 = build_double(bialg, 1.0);
  d1.validate();
  CHECK(jacobiator_algebra(d1.d.f) < 1e-12);
  // structure constants agree with the realified sl(2,C) triple
  double worst = 0.0;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      for (int c = 0; c < 6; ++c)
        worst = std::max(worst, std::abs(d1.d.f(a, b, c) - triple.d.f(a, b, c)));
  CHECK(worst < 1e-12);
}

TEST_CASE("build_double: scaling morphism s_t intertwines brackets") {
  auto [bialg, triple] = lu_weinstein_data("su2");
  const double t = 0.5;
  ManinTriple dt = build_double(bialg, t);
  ManinTriple d1 = build_double(bialg, 1.0);
  const int n = 3;
  auto s_t = [&](const Vec& x) {
    Vec out = x;
    out.tail(n) *= t;
    return out;
  };
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Vec x(2 * n), y(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
      x[i] = rng.uniform(-1, 1);
      y[i] = rng.uniform(-1, 1);
    }
    Vec lhs = d1.d.f.bracket(s_t(x), s_t(y));
    Vec rhs = s_t(dt.d.f.bracket(x, y));
    CHECK((lhs - rhs).norm() < 1e-12);
  }
}

TEST_CASE("build_double: Manin triple invariants at random t") {
  auto [bialg, triple] = lu_weinstein_data("su2");
  Rng rng(11);
  for (int k = 0; k < 10; ++k) {
    double t = rng.uniform(-1.0, 1.0);
    ManinTriple mt = build_double(bialg, t);
    auto r = mt.residuals();
    CHECK(r.jacobi < 1e-10);
    CHECK(r.metric_invariance < 1e-10);
    CHECK(r.g_isotropy < 1e-10);
    CHECK(r.h_isotropy < 1e-10);
  }
}

TEST_CASE("lu_weinstein_data: u(1) is abelian with r = 0") {
  auto [bialg, triple] = lu_weinstein_data("u1");
  CHECK(bialg.dim() == 1);
  CHECK(bialg.r.r.norm() == 0.0);
  CHECK(jacobiator_algebra(bialg.g.f) == 0.0);
}

TEST_CASE("lu_weinstein_data: su(2) dims and invariants; skew r") {
  auto [bialg, triple] = lu_weinstein_data("su2");
  CHECK(triple.d.dim == 6);
  CHECK(triple.half_dim() == 3);
  triple.validate();
  CHECK((bialg.r.r + bialg.r.r.transpose()).norm() == 0.0);
}

TEST_CASE("coboundary affine space: adding an invariant symmetric tensor") {
  auto [bialg, triple] = lu_weinstein_data("su2");
  // the invariant inner product on su(2) in this basis is a multiple of I
  RMatrix r2 = bialg.r;
  r2.r += 0.3 * Mat::Identity(3, 3);
  LieBialgebra b2 = cobracket_from_r(bialg.g, r2);
  double worst = 0.0;
  for (int a = 0; a < 3; ++a)
    worst = std::max(worst, (b2.lambda[a] - bialg.lambda[a]).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-12);  // identical cobrackets: r - r' is ad-invariant
}

TEST_CASE("skew r: j(g*) is an isotropic (Lagrangian) complement") {
  auto [bialg, triple] = lu_weinstein_data("su2");
  // metric in canonical coordinates is the block pairing
  Mat M = triple.metric.matrix;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Vec ja = splitting_j(bialg, Vec::Unit(3, a));
      Vec jb = splitting_j(bialg, Vec::Unit(3, b));
      CHECK(std::abs(ja.dot(M * jb)) < 1e-13);
    }
}
