// Acceptance suite: runs every verification criterion at its pinned tolerance
// and prints one pass/fail line per criterion. Exit code = number of failures.

#include "qil/json_io.hpp"
#include "qil/suite.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace qil;

namespace {

CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

struct Context {
  std::string why;
  bool ok = true;
  void require(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      why = msg;
    }
  }
};

bool run_suite_trials(const std::string& suite, int trials, std::uint64_t seed,
                      const ToleranceConfig& tol, Context& ctx) {
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t sub = derive_seed(seed, suite, t);
    const TrialOutcome out = suites::run_trial(suite, sub, 2, 6, tol, false);
    std::ostringstream msg;
    msg << suite << " trial " << t << " (seed " << sub << "): "
        << (out.detail.empty() ? "hypothesis unexpectedly vacuous" : out.detail);
    ctx.require(out.status == TrialStatus::Passed, msg.str());
    if (!ctx.ok) return false;
  }
  return true;
}

// 1. calculus oracle at 1e-10 * scale, both kinds, m <= 6, dims 2..6
bool criterion_calculus(Context& ctx) {
  Rng rng(derive_seed(42, "acceptance-calculus", 0));
  for (int rep = 0; rep < 100; ++rep) {
    const int dim = rng.uniform_int(2, 6);
    const CMatrix t = rng.gaussian(dim, dim), s = rng.gaussian(dim, dim),
                  x = rng.gaussian(dim, dim);
    const int m = rng.uniform_int(1, 6);
    for (DKind kind : {DKind::Delta, DKind::SmallDelta}) {
      OperatorPair pair(t, s, kind);
      const CMatrix rec = d_power(pair, x, m);
      const ClosedPower cp = d_power_closed_scaled(pair, x, m);
      ctx.require(fro(rec - cp.value) <= 1e-10 * cp.scale,
                  "oracle disagreement at rep " + std::to_string(rep));
    }
  }
  return ctx.ok;
}

// 2. hand fixtures, exact to 1e-12
bool criterion_fixtures(Context& ctx) {
  const CMatrix s = mat2(1, 1, 0, 1);
  OperatorPair ps(s.adjoint(), s, DKind::Delta);
  ctx.require(fro(d_power_closed(ps, CMatrix::Identity(2, 2), 3)) <= 1e-12, "Delta^3 != 0");
  ctx.require(fro(d_power_closed(ps, CMatrix::Identity(2, 2), 2) - mat2(0, 0, 0, 2)) <= 1e-12,
              "Delta^2 mismatch");
  const CMatrix n = mat2(0, 1, 0, 0);
  OperatorPair pn(n.adjoint(), n, DKind::SmallDelta);
  ctx.require(fro(d_power_closed(pn, CMatrix::Identity(2, 2), 3)) <= 1e-12, "delta^3 != 0");
  ctx.require(fro(d_power_closed(pn, CMatrix::Identity(2, 2), 2) - mat2(0, 0, 0, -2)) <= 1e-12,
              "delta^2 mismatch");
  return ctx.ok;
}

// 3. pro00 constructions at 1e-8 * scale with spectra agreement at 1e-6
bool criterion_pro00(Context& ctx) { return run_suite_trials("pro00", 100, 42, {}, ctx); }

// 4. pro110 with block conjugations, [C,M] = 0 generators and CQC = Q at 1e-8
bool criterion_pro110(Context& ctx) { return run_suite_trials("pro110", 100, 42, {}, ctx); }

// 5. thm10 constructive core: C_p S^p = I, hand fixture, norm bound
bool criterion_thm10(Context& ctx) {
  const CMatrix s = mat2(1, 1, 0, 1);
  const ConstructionCertificate fixture = left_inverse_cp(s.adjoint(), s, 3, 1);
  ctx.require(fixture.passed && fro(fixture.payload.at("C_p") - mat2(1, -1, 0, 1)) <= 1e-12,
              "C_1 fixture mismatch");
  return run_suite_trials("thm10", 100, 42, {}, ctx);
}

// 6. power-bounded pairs land on the unit circle with simple poles
bool criterion_surrogate(Context& ctx) {
  Rng rng(derive_seed(42, "acceptance-surrogate", 0));
  for (int rep = 0; rep < 50; ++rep) {
    const int dim = rng.uniform_int(2, 6);
    // flat power-bounded pair
    const CMatrix u = rng.unit() * rng.unitary(dim);
    const CheckReport flat = unimodular_semisimple_check(u, CMatrix(u.adjoint()),
                                                         rng.uniform_int(1, 3));
    ctx.require(flat.passed(), "flat surrogate failed at rep " + std::to_string(rep));
    // quasi pair checked through the block S1
    const GeneratedInstance inst = gen_instance({ClassFamily::MIsometry, 1, rng.uniform_int(1, 2)},
                                                std::max(3, dim), derive_seed(42, "sur", rep));
    const QuasiBlocks qb = quasi_block_decompose(inst.S, inst.T, inst.certificate.spec.n);
    if (qb.d1 > 0) {
      const CheckReport block = unimodular_semisimple_check(qb.S1, qb.T1, 1);
      ctx.require(block.passed(), "block surrogate failed at rep " + std::to_string(rep));
    }
  }
  return ctx.ok;
}

// 7. pro10: criterion verdict and Hermitian verdict agree, fixtures included
bool criterion_pro10(Context& ctx) {
  const CMatrix s = mat2(1, 1, 0, 0);
  const ConstructionCertificate zero = riesz_selfadjoint_criterion(s, s.adjoint(), 1, 0.0);
  ctx.require(zero.passed, "hand fixture at lambda = 0 disagrees");
  const ConstructionCertificate one = riesz_selfadjoint_criterion(s, s.adjoint(), 1, 1.0);
  ctx.require(one.passed, "hand fixture at lambda = 1 disagrees");
  return run_suite_trials("pro10", 100, 42, {}, ctx);
}

// 8. thm01 and its corollaries, plus the vacuous sabotage path
bool criterion_thm01(Context& ctx) {
  if (!run_suite_trials("thm01", 100, 42, {}, ctx)) return false;
  for (int t = 0; t < 10; ++t) {
    const TrialOutcome out =
        suites::run_trial("thm01", derive_seed(42, "thm01-sabotage", t), 2, 6, {}, true);
    ctx.require(out.status == TrialStatus::Vacuous,
                "sabotaged thm01 trial was not classified vacuous");
  }
  return ctx.ok;
}

// 9. thm30/thm301 and corollaries with the exact flat fixture
bool criterion_thm30(Context& ctx) {
  const CMatrix n = mat2(0, 1, 0, 0);
  const CMatrix eye = CMatrix::Identity(2, 2);
  const ConstructionCertificate flat =
      verify_perturbation_flat(DKind::Delta, eye, eye, n, n, 1, 2, 2);
  ctx.require(flat.passed && flat.residuals.at("conclusion") <= 1e-12,
              "flat 3-isometry fixture not exact");
  if (!run_suite_trials("thm30", 100, 42, {}, ctx)) return false;
  for (int t = 0; t < 10; ++t) {
    const TrialOutcome out =
        suites::run_trial("thm30", derive_seed(42, "thm30-sabotage", t), 2, 6, {}, true);
    ctx.require(out.status == TrialStatus::Vacuous,
                "sabotaged thm30 trial was not classified vacuous");
  }
  return ctx.ok;
}

// 10. spectral sanity on well-separated random matrices
bool criterion_spectral(Context& ctx) { return run_suite_trials("spectral", 100, 42, {}, ctx); }

// 11. CLI determinism: two identical runs, byte-identical reports, exit 0
bool criterion_determinism(Context& ctx) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path("acceptance_tmp");
  fs::create_directories(dir);
  const fs::path r1 = dir / "report1.json", r2 = dir / "report2.json";
  auto run = [&](const fs::path& report) -> int {
    const std::string cmd = std::string(QIL_CLI_PATH) + " verify --suite all --seed 42 --report " +
                            report.string() + " > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const int e1 = run(r1);
  const int e2 = run(r2);
  ctx.require(e1 == 0 && e2 == 0,
              "verify exit codes " + std::to_string(e1) + ", " + std::to_string(e2));
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string b1 = slurp(r1), b2 = slurp(r2);
  ctx.require(!b1.empty() && b1 == b2, "reports differ between runs");
  return ctx.ok;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    std::function<bool(Context&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "calculus oracle (1e-10 scale)", criterion_calculus},
      {2, "fixture exactness (1e-12)", criterion_fixtures},
      {3, "pro00 constructions (1e-8 scale, spectra 1e-6)", criterion_pro00},
      {4, "pro110 conjugated constructions (1e-8)", criterion_pro110},
      {5, "thm10 left inverse C_p and norm bound", criterion_thm10},
      {6, "thm10/thm11 unimodular-semisimple surrogate (1e-6)", criterion_surrogate},
      {7, "pro10 Riesz selfadjointness criterion", criterion_pro10},
      {8, "thm01 product theorem and corollaries (1e-8 scale)", criterion_thm01},
      {9, "thm30 perturbation theorem and corollaries (1e-8 scale)", criterion_thm30},
      {10, "spectral sanity (1e-8 dim)", criterion_spectral},
      {11, "report determinism (byte-identical)", criterion_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Context ctx;
    bool ok = false;
    try {
      ok = c.run(ctx);
    } catch (const std::exception& e) {
      ctx.ok = false;
      ctx.why = std::string("exception: ") + e.what();
    }
    ok = ok && ctx.ok;
    std::printf("criterion %2d  %s  %s%s%s\n", c.id, ok ? "PASS" : "FAIL", c.label,
                ok ? "" : " -- ", ok ? "" : ctx.why.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures == 0)
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  else
    std::printf("acceptance: %d criteria FAILED\n", failures);
  return failures;
}
