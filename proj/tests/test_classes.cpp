#include "qil/classes.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace qil;

namespace {
CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}
}  // namespace

TEST_CASE("classify the strict 3-isometry") {
  const CMatrix s = mat2(1, 1, 0, 1);
  const ClassifyOutcome out = classify(OperatorPair(s.adjoint(), s, DKind::Delta), 0, 5);
  REQUIRE(out.minimal_m.has_value());
  CHECK(*out.minimal_m == 3);
  CHECK(out.strict);
}

TEST_CASE("classify a unitary as a 1-isometry") {
  Rng rng(41);
  const CMatrix u = rng.unitary(3);
  const ClassifyOutcome out = classify(OperatorPair(u.adjoint(), u, DKind::Delta), 0, 4);
  REQUIRE(out.minimal_m.has_value());
  CHECK(*out.minimal_m == 1);
  CHECK(out.strict);
}

TEST_CASE("classify the strict 3-selfadjoint nilpotent") {
  const CMatrix n = mat2(0, 1, 0, 0);
  const ClassifyOutcome out = classify(OperatorPair(n.adjoint(), n, DKind::SmallDelta), 0, 5);
  REQUIRE(out.minimal_m.has_value());
  CHECK(*out.minimal_m == 3);
  CHECK(out.strict);
}

TEST_CASE("classify can come back empty") {
  Rng rng(43);
  const CMatrix g = 3.0 * rng.gaussian(3, 3);
  const ClassifyOutcome out = classify(OperatorPair(g.adjoint(), g, DKind::Delta), 0, 4);
  CHECK_FALSE(out.minimal_m.has_value());
  CHECK_THROWS_AS(classify(OperatorPair(g.adjoint(), g, DKind::Delta), 0, 13), DomainError);
}

TEST_CASE("is_power_bounded fixtures") {
  CMatrix d = mat2(Complex(0, 1), 0, 0, 0.5);
  CHECK(is_power_bounded(d));
  CHECK_FALSE(is_power_bounded(mat2(1, 1, 0, 1)));
  CHECK(is_power_bounded(mat2(0, 1, 0, 0)));
}

TEST_CASE("power boundedness agrees with the empirical sup test") {
  Rng rng(47);
  for (int rep = 0; rep < 100; ++rep) {
    const int dim = rng.uniform_int(2, 5);
    CMatrix s;
    switch (rep % 3) {
      case 0: s = rng.unitary(dim); break;
      case 1: s = 1.25 * rng.unitary(dim); break;
      default: s = jordan_nilpotent(dim, std::min(2, dim)); break;
    }
    double sup = 0.0;
    CMatrix p = CMatrix::Identity(dim, dim);
    for (int k = 1; k <= 200; ++k) {
      p = p * s;
      sup = std::max(sup, fro(p));
    }
    const bool empirical = sup < 10.0 * std::max(fro(s), 1.0) * dim;
    CHECK(is_power_bounded(s) == empirical);
  }
}

TEST_CASE("gen_conjugation invariants") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Conjugation c = gen_conjugation(4, seed);
    CHECK(c.unitary_residual() <= 1e-10);
    CHECK(c.symmetric_residual() <= 1e-10);
    CHECK(c.involution_residual() <= 1e-10);
  }
  const Conjugation blocked = gen_conjugation(5, 7, std::make_pair(3, 2));
  CHECK(fro(blocked.J.topRightCorner(3, 2)) < 1e-14);
  CHECK(fro(blocked.J.bottomLeftCorner(2, 3)) < 1e-14);
  CHECK_THROWS_AS(gen_conjugation(5, 7, std::make_pair(3, 3)), DimensionError);

  // W W^T collapses to the identity for W = I and for the swap permutation
  CMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(fro(CMatrix(swap * swap.transpose()) - CMatrix::Identity(2, 2)) == 0.0);
}

TEST_CASE("generator fixture: the 2x2 Jordan-style 3-isometry certifies") {
  // recipe (a) with k = 2 reproduces the hand fixture's class
  const GeneratedInstance inst = gen_instance({ClassFamily::MIsometry, 3, 0}, 2, 1234);
  CHECK(inst.certificate.passed);
  const ClassifyOutcome out = classify(OperatorPair(inst.T, inst.S, DKind::Delta), 0, 4);
  REQUIRE(out.minimal_m.has_value());
  CHECK(*out.minimal_m == 3);
  CHECK(out.strict);
}

TEST_CASE("generated instances certify and classify at the advertised order") {
  std::uint64_t seed = 100;
  for (const ClassFamily family :
       {ClassFamily::MIsometry, ClassFamily::MSelfadjoint, ClassFamily::MCIsometry,
        ClassFamily::MCSymmetry}) {
    for (int k = 1; k <= 3; ++k) {
      for (int n = 0; n <= 2; ++n) {
        const int m = 2 * k - 1;
        const int dim = k + std::max(n, 1) + 1;
        const GeneratedInstance inst = gen_instance({family, m, n}, dim, seed++);
        INFO(to_string(family) << " m=" << m << " n=" << n);
        CHECK(inst.certificate.passed);
        CHECK(family_uses_conjugation(family) == inst.C.has_value());
        OperatorPair pair(inst.T, inst.S, family_kind(family));
        const ClassifyOutcome out = classify(pair, n, std::max(m, 2), inst.C);
        REQUIRE(out.minimal_m.has_value());
        CHECK(*out.minimal_m <= m);
        if (n == 0 && k <= 3) CHECK(*out.minimal_m == m);  // strict order 2k-1
      }
    }
  }
}

TEST_CASE("monotonicity on generated instances") {
  // the residual stays zero above the minimal order, flat and sandwiched
  std::uint64_t seed = 4000;
  for (const ClassFamily family : {ClassFamily::MIsometry, ClassFamily::MSelfadjoint}) {
    for (int n = 0; n <= 2; ++n) {
      const int m = 3;
      const GeneratedInstance inst = gen_instance({family, m, n}, 5, seed++);
      OperatorPair pair(inst.T, inst.S, family_kind(family));
      for (int t = m; t <= m + 2; ++t) {
        INFO(to_string(family) << " n=" << n << " t=" << t);
        CHECK(quasi_residual(pair, t, n).scaled().within({}));
      }
    }
  }
}

TEST_CASE("left-invertible pair generation") {
  const GeneratedInstance inst = gen_instance({ClassFamily::LeftMInvertiblePair, 1, 0}, 4, 9);
  CHECK(inst.certificate.passed);
  CHECK(fro(inst.T * inst.S - CMatrix::Identity(4, 4)) <= 1e-8 * fro(inst.S));
}

TEST_CASE("quasi lifts are strictly larger than the flat class") {
  // hand fixture: S = [[1,1],[0,0]] is 1-quasi isometric but not isometric
  const CMatrix s = mat2(1, 1, 0, 0);
  OperatorPair pair(s.adjoint(), s, DKind::Delta);
  CHECK(quasi_residual(pair, 1, 1).norm < 1e-12);
  CHECK(quasi_residual(pair, 1, 0).norm > 0.5);

  const GeneratedInstance inst = gen_instance({ClassFamily::MIsometry, 3, 1}, 4, 77);
  OperatorPair gp(inst.T, inst.S, DKind::Delta);
  CHECK(quasi_residual(gp, 3, 1).scaled().within({}));
  const QuasiResidual flat = quasi_residual(gp, 3, 0);
  CHECK(flat.norm > 1e3 * (1e-12 + 1e-8 * flat.scale));
}

TEST_CASE("generation errors on infeasible specs") {
  CHECK_THROWS_AS(gen_instance({ClassFamily::MIsometry, 5, 2}, 3, 1), GenerationError);
  CHECK_THROWS_AS(gen_instance({ClassFamily::MIsometry, 0, 0}, 3, 1), InvalidInputError);
}
