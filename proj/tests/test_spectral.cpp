#include "qil/rng.hpp"
#include "qil/spectral.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace qil;

namespace {
CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}
}  // namespace

TEST_CASE("eigen_data fixtures") {
  const auto ed = eigen_data(mat2(1, 1, 0, 0));
  REQUIRE(ed.size() == 2);
  CHECK(std::abs(ed[0].value - Complex(0.0)) < 1e-10);
  CHECK(std::abs(ed[1].value - Complex(1.0)) < 1e-10);

  const auto ei = eigen_data(CMatrix::Identity(3, 3));
  REQUIRE(ei.size() == 1);
  CHECK(ei[0].algebraic == 3);

  const auto en = eigen_data(mat2(0, 1, 0, 0));
  REQUIRE(en.size() == 1);
  CHECK(std::abs(en[0].value) < 1e-10);
  CHECK(en[0].algebraic == 2);
}

TEST_CASE("ascent, descent and pole order") {
  const auto nil = ascent_descent(mat2(0, 1, 0, 0), 0.0);
  CHECK(nil.ascent == 2);
  CHECK(nil.descent == 2);
  CHECK(nil.pole_order == 2);

  const auto diag = ascent_descent(mat2(1, 0, 0, 2), 1.0);
  CHECK(diag.ascent == 1);

  const auto proj = ascent_descent(mat2(1, 1, 0, 0), 0.0);
  CHECK(proj.ascent == 1);

  CHECK_THROWS_AS(ascent_descent(mat2(1, 0, 0, 2), 5.0), DomainError);
}

TEST_CASE("riesz projection fixtures") {
  const CMatrix s = mat2(1, 1, 0, 0);
  const RieszProjection p0 = riesz_projection(s, 0.0);
  CHECK(fro(p0.P - mat2(0, -1, 0, 1)) < 1e-10);
  CHECK_FALSE(p0.ill_conditioned);

  const RieszProjection p1 = riesz_projection(mat2(1, 0, 0, 2), 1.0);
  CHECK(fro(p1.P - mat2(1, 0, 0, 0)) < 1e-10);
}

TEST_CASE("normal matrices have Hermitian Riesz projections") {
  Rng rng(53);
  const CMatrix u = rng.unitary(4);
  CMatrix d = CMatrix::Zero(4, 4);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  d(2, 2) = Complex(0, 1);
  d(3, 3) = -3.0;
  const CMatrix a = u * d * u.adjoint();
  for (const auto& g : eigen_data(a)) {
    const RieszProjection rp = riesz_projection(a, g.value);
    CHECK(fro(rp.P - CMatrix(rp.P.adjoint())) <= 1e-9);
  }
}

TEST_CASE("spectral report satisfies the resolution of the identity") {
  Rng rng(55);
  for (int rep = 0; rep < 20; ++rep) {
    const int dim = rng.uniform_int(2, 5);
    std::vector<Complex> lambdas;
    while (static_cast<int>(lambdas.size()) < dim) {
      const Complex cand(rng.uniform(-2, 2), rng.uniform(-2, 2));
      bool ok = true;
      for (const Complex& l : lambdas)
        if (std::abs(l - cand) < 0.5) ok = false;
      if (ok) lambdas.push_back(cand);
    }
    CMatrix d = CMatrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) d(i, i) = lambdas[i];
    CMatrix g = rng.gaussian(dim, dim);
    g *= 0.1 / std::max(op_norm(g), 1e-12);
    const CMatrix v = rng.unitary(dim) * (CMatrix::Identity(dim, dim) + g);
    const CMatrix a = v * d * v.inverse();
    const SpectralReport rep_out = spectral_report(a);
    CHECK(rep_out.resolution_residual <= 1e-8 * dim);
    CHECK(rep_out.idempotent_residual <= 1e-8 * dim);
    CHECK(rep_out.cross_residual <= 1e-8 * dim);
    CHECK(rep_out.commutation_residual <= 1e-8 * dim * std::max(1.0, fro(a)));
    int total = 0;
    for (const auto& e : rep_out.eigenvalues) {
      total += e.algebraic;
      CHECK(e.ascent == e.descent);  // finite dimension: always equal
      CHECK(e.pole_order == e.ascent);
    }
    CHECK(total == dim);
  }
}

TEST_CASE("riesz projection restricted to its range sees one eigenvalue") {
  Rng rng(57);
  CMatrix d = CMatrix::Zero(4, 4);
  d(0, 0) = 2.0;
  d(0, 1) = 1.0;
  d(1, 1) = 2.0;  // Jordan block at 2
  d(2, 2) = -1.0;
  d(3, 3) = Complex(0, 1);
  CMatrix g = rng.gaussian(4, 4);
  g *= 0.1 / std::max(op_norm(g), 1e-12);
  const CMatrix v = rng.unitary(4) * (CMatrix::Identity(4, 4) + g);
  const CMatrix a = v * d * v.inverse();
  const RieszProjection rp = riesz_projection(a, 2.0);
  CHECK(rp.pole_order == 2);
  const RankBases rb = rank_and_bases(rp.P);
  REQUIRE(rb.rank == 2);
  const CMatrix restricted = rb.range_basis.adjoint() * a * rb.range_basis;
  for (const auto& g : eigen_data(restricted)) CHECK(std::abs(g.value - Complex(2.0)) < 1e-6);
}

TEST_CASE("unimodular semisimple surrogate") {
  Rng rng(59);
  const CMatrix u = rng.unitary(3);
  const CheckReport pass = unimodular_semisimple_check(u, CMatrix(u.adjoint()), 1);
  CHECK(pass.passed());

  // non-power-bounded Jordan 3-isometry: hypothesis failure, not a conclusion
  const CMatrix j = mat2(1, 1, 0, 1);
  const CheckReport vac = unimodular_semisimple_check(j, CMatrix(j.adjoint()), 3);
  CHECK(vac.vacuous());
  CHECK_FALSE(vac.passed());

  CMatrix d = mat2(Complex(0, 1), 0, 0, -1);
  const CheckReport diag_pass = unimodular_semisimple_check(d, CMatrix(d.adjoint()), 1);
  CHECK(diag_pass.passed());
}

TEST_CASE("point spectrum circle check") {
  Rng rng(61);
  const CMatrix u = rng.unitary(3);
  const CheckReport pass = point_spectrum_circle_check(u, CMatrix::Identity(3, 3), 1);
  CHECK(pass.passed());

  // singular Q: vacuous, nothing asserted
  const CMatrix a = mat2(1, 1, 0, 0);
  const CMatrix q = mat2(1, 1, 1, 1);
  const CheckReport vac = point_spectrum_circle_check(a, q, 1);
  CHECK(vac.vacuous());

  CMatrix diag = mat2(1, 0, 0, std::polar(1.0, 0.7));
  for (int m = 1; m <= 3; ++m)
    CHECK(point_spectrum_circle_check(diag, CMatrix::Identity(2, 2), m).passed());
}
