#include "qil/elementary.hpp"
#include "qil/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace qil;

namespace {
CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}
const CMatrix kJordan = mat2(1, 1, 0, 1);       // strict 3-isometry
const CMatrix kNil = mat2(0, 1, 0, 0);          // strict 3-selfadjoint (nilpotent)
const CMatrix kEye2 = CMatrix::Identity(2, 2);
}  // namespace

TEST_CASE("d_apply matches the defining formulas") {
  Rng rng(3);
  const CMatrix s = rng.gaussian(3, 3);
  // left-inverse case: Delta_{S^{-1},S}(I) = 0
  OperatorPair inv(s.inverse(), s, DKind::Delta);
  CHECK(fro(d_apply(inv, CMatrix::Identity(3, 3))) < 1e-10);
  // delta_{S,S}(I) = 0
  OperatorPair same(s, s, DKind::SmallDelta);
  CHECK(fro(d_apply(same, CMatrix::Identity(3, 3))) < 1e-12);
  // explicit 2x2 product
  OperatorPair p(mat2(1, 0, 1, 1), kJordan, DKind::Delta);
  CHECK(fro(d_apply(p, kEye2) - mat2(0, 1, 1, 1)) < 1e-14);
  // dimension mismatch
  CHECK_THROWS_AS(d_apply(p, CMatrix::Identity(3, 3)), DimensionError);
}

TEST_CASE("d_power fixtures for the strict 3-isometry") {
  OperatorPair p(kJordan.adjoint(), kJordan, DKind::Delta);
  CHECK(fro(d_power(p, kEye2, 2) - mat2(0, 0, 0, 2)) < 1e-12);
  CHECK(fro(d_power(p, kEye2, 3)) < 1e-12);
  CHECK(fro(d_power(p, kEye2, 0) - kEye2) == 0.0);
  CHECK_THROWS_AS(d_power(p, kEye2, -1), DomainError);
  // 1x1 unimodular case vanishes for every m >= 1
  CMatrix one(1, 1);
  one << 1.0;
  OperatorPair q(one, one, DKind::Delta);
  for (int m = 1; m <= 5; ++m) CHECK(fro(d_power(q, CMatrix::Identity(1, 1), m)) < 1e-14);
}

TEST_CASE("d_power_closed fixtures for the nilpotent pair") {
  OperatorPair p(kNil.adjoint(), kNil, DKind::SmallDelta);
  CHECK(fro(d_power_closed(p, kEye2, 3)) < 1e-14);
  CHECK(fro(d_power_closed(p, kEye2, 2) - mat2(0, 0, 0, -2)) < 1e-14);
  CHECK_THROWS_AS(d_power_closed(p, kEye2, 63), DomainError);
}

TEST_CASE("closed form agrees with the recursive oracle") {
  Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 4;
    const CMatrix t = rng.gaussian(n, n), s = rng.gaussian(n, n), x = rng.gaussian(n, n);
    const int m = rng.uniform_int(1, 6);
    for (DKind kind : {DKind::Delta, DKind::SmallDelta}) {
      OperatorPair p(t, s, kind);
      const CMatrix rec = d_power(p, x, m);
      const ClosedPower cp = d_power_closed_scaled(p, x, m);
      CHECK(fro(rec - cp.value) <= 1e-10 * std::max(1.0, cp.scale));
    }
  }
}

TEST_CASE("cmc fixtures and involution") {
  const Conjugation c_id = Conjugation::identity(2);
  const CMatrix real = mat2(1, 2, 3, 4);
  CHECK(fro(cmc(c_id, real) - real) < 1e-14);

  const Conjugation c_swap(mat2(0, 1, 1, 0));
  const CMatrix m = mat2(Complex(0, 1), 0, 0, 0);
  CHECK(fro(cmc(c_swap, m) - mat2(0, 0, 0, Complex(0, -1))) < 1e-14);

  Rng rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const CMatrix w = rng.unitary(3);
    const Conjugation c(w * w.transpose());
    const CMatrix x = rng.gaussian(3, 3);
    CHECK(fro(cmc(c, cmc(c, x)) - x) <= 1e-10 * std::max(1.0, fro(x)));
    CHECK(c.involution_residual() <= 1e-10);
  }
}

TEST_CASE("conjugation invariants are validated") {
  CHECK_THROWS_AS(Conjugation(mat2(1, 1, 0, 1)), InvalidInputError);  // not unitary
  CHECK_THROWS_AS(Conjugation(mat2(0, 1, -1, 0)), InvalidInputError); // unitary, not symmetric
}

TEST_CASE("quasi_residual fixtures") {
  const CMatrix s = mat2(1, 1, 0, 0);
  OperatorPair p(s.adjoint(), s, DKind::Delta);
  const QuasiResidual r = quasi_residual(p, 1, 1);
  CHECK(r.norm < 1e-12);

  // unitary S: every (m, n) residual vanishes
  Rng rng(15);
  const CMatrix u = rng.unitary(3);
  OperatorPair pu(u.adjoint(), u, DKind::Delta);
  for (int m = 1; m <= 3; ++m)
    for (int n = 0; n <= 2; ++n) CHECK(quasi_residual(pu, m, n).norm < 1e-10);

  // the strict 3-isometry is not 1-quasi 2-isometric
  OperatorPair pj(kJordan.adjoint(), kJordan, DKind::Delta);
  CHECK(quasi_residual(pj, 2, 1).norm > 0.5);
  CHECK(quasi_residual(pj, 3, 1).norm < 1e-12);
}

TEST_CASE("order and quasi monotonicity") {
  // once d^m(I) = 0, every higher order vanishes too (and stays vanished
  // under the quasi sandwich at fixed n)
  OperatorPair pj(kJordan.adjoint(), kJordan, DKind::Delta);
  for (int t = 3; t <= 5; ++t) CHECK(quasi_residual(pj, t, 0).scaled().within({}));
  OperatorPair pn(kNil.adjoint(), kNil, DKind::SmallDelta);
  for (int t = 3; t <= 5; ++t) CHECK(quasi_residual(pn, t, 0).scaled().within({}));
  const CMatrix s = mat2(1, 1, 0, 0);
  OperatorPair pq(s.adjoint(), s, DKind::Delta);
  for (int t = 1; t <= 3; ++t) CHECK(quasi_residual(pq, t, 1).scaled().within({}));
}

TEST_CASE("power stability of the quasi residual") {
  // S^{*n} d^m_{T^p,S^p}(I) S^n = 0 for p = 2, 3 when [S,T*] = 0
  const CMatrix s = mat2(1, 1, 0, 0);  // 1-quasi isometry, T = S*
  for (int p = 2; p <= 3; ++p) {
    const CMatrix sp = matrix_power(s, p);
    const ScaledResidual r =
        sandwiched_residual(sp.adjoint(), sp, DKind::Delta, 1, s, 1);
    CHECK(r.within({}));
  }
  OperatorPair pj(kJordan.adjoint(), kJordan, DKind::Delta);
  for (int p = 2; p <= 3; ++p) {
    const CMatrix sp = matrix_power(kJordan, p);
    const ScaledResidual r =
        sandwiched_residual(sp.adjoint(), sp, DKind::Delta, 3, kJordan, 0);
    CHECK(r.within({}));
  }
}

TEST_CASE("adjoint duality: d^m_{T,S}(I) = 0 iff d^m_{S*,T*}(I) = 0") {
  // the two residuals are adjoints up to the sign (-1)^m in the SmallDelta
  // case, so the vanishing statements are equivalent
  Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const CMatrix t = rng.gaussian(3, 3), s = rng.gaussian(3, 3);
    const int m = rng.uniform_int(1, 4);
    for (DKind kind : {DKind::Delta, DKind::SmallDelta}) {
      const CMatrix lhs = d_power_closed(OperatorPair(t, s, kind), CMatrix::Identity(3, 3), m);
      const CMatrix rhs = d_power_closed(OperatorPair(s.adjoint(), t.adjoint(), kind),
                                         CMatrix::Identity(3, 3), m);
      const double sign = (kind == DKind::SmallDelta && m % 2 == 1) ? -1.0 : 1.0;
      CHECK(fro(sign * CMatrix(lhs.adjoint()) - rhs) <= 1e-9 * std::max(1.0, fro(lhs)));
    }
  }
}

TEST_CASE("product expansion fixtures") {
  // identity quadruple: both sides vanish
  const ExpansionCheck trivial =
      product_expansion(DKind::Delta, kEye2, kEye2, kEye2, kEye2, 3);
  CHECK(trivial.residual < 1e-12);
  CHECK(fro(trivial.lhs) < 1e-12);

  // commuting unitaries with adjoint partners at order 1
  Rng rng(25);
  const CMatrix u = rng.unitary(2);
  const Complex phase = rng.unit();
  const CMatrix v = phase * CMatrix::Identity(2, 2);
  const ExpansionCheck iso = product_expansion(DKind::Delta, CMatrix(u.adjoint()), u,
                                               CMatrix(v.adjoint()), v, 1);
  CHECK(iso.residual < 1e-10);
  CHECK(fro(iso.lhs) < 1e-10);
  CHECK(iso.hypothesis_violations.empty());
}

TEST_CASE("product expansion on random commuting quadruples") {
  Rng rng(27);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = rng.uniform_int(2, 4);
    CMatrix z = rng.gaussian(n, n);
    z /= std::max(fro(z), 1e-12);
    auto poly = [&]() {
      return CMatrix(rng.cgauss() * CMatrix::Identity(n, n) + rng.cgauss() * z +
                     rng.cgauss() * z * z);
    };
    const CMatrix t1 = poly(), s1 = poly(), t2 = poly(), s2 = poly();
    const int p = rng.uniform_int(1, 4);
    for (DKind kind : {DKind::Delta, DKind::SmallDelta}) {
      const ExpansionCheck ec = product_expansion(kind, t1, s1, t2, s2, p);
      CHECK(ec.hypothesis_violations.empty());
      CHECK(ec.residual <= 1e-10);
    }
  }
}

TEST_CASE("product expansion reports broken commutation") {
  Rng rng(29);
  const CMatrix a = rng.gaussian(3, 3), b = rng.gaussian(3, 3);
  const ExpansionCheck ec = product_expansion(DKind::Delta, a, b, b, a, 2);
  CHECK_FALSE(ec.hypothesis_violations.empty());
}

TEST_CASE("perturbation expansion fixtures") {
  // N = 0 collapses the sum to the unperturbed power
  Rng rng(31);
  const CMatrix t = rng.gaussian(2, 2), s = rng.gaussian(2, 2);
  const ExpansionCheck flat =
      perturbation_expansion(DKind::Delta, t, s, CMatrix::Zero(2, 2), 3);
  CHECK(flat.residual < 1e-12);

  // I + N is a 3-isometry: lhs and rhs both vanish at p = 3
  const CMatrix n = kNil;
  const ExpansionCheck iso = perturbation_expansion(DKind::Delta, kEye2, kEye2, n, 3);
  CHECK(iso.residual < 1e-12);
  CHECK(fro(iso.lhs) < 1e-12);
}

TEST_CASE("perturbation expansion on random commuting nilpotents") {
  Rng rng(33);
  for (int rep = 0; rep < 100; ++rep) {
    const int dim = rng.uniform_int(2, 5);
    CMatrix n = CMatrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) n(i, j) = rng.cgauss();
    const CMatrix s = rng.cgauss() * CMatrix::Identity(dim, dim) + rng.cgauss() * n +
                      rng.cgauss() * n * n;
    const CMatrix t = rng.gaussian(dim, dim);
    const int p = rng.uniform_int(1, 4);
    for (DKind kind : {DKind::Delta, DKind::SmallDelta}) {
      const ExpansionCheck ec = perturbation_expansion(kind, t, s, n, p);
      CHECK(ec.hypothesis_violations.empty());
      CHECK(ec.residual <= 1e-10);
    }
  }
}
