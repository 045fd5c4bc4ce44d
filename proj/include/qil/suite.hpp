#pragma once

#include "qil/classes.hpp"
#include "qil/elementary.hpp"
#include "qil/spectral.hpp"
#include "qil/structure.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace qil {

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"calculus", "classes", "spectral",
                                                 "pro00",    "pro110",  "thm10",
                                                 "pro10",    "thm01",   "thm30"};
  return names;
}

struct SuiteConfig {
  std::vector<std::string> suites{"all"};
  int trials = 100;
  int dim_min = 2, dim_max = 6;
  std::uint64_t seed = 0;
  ToleranceConfig tol;
  std::string report_path;
  bool sabotage = false;  // deliberately break one hypothesis per trial

  void validate() const {
    tol.validate();
    if (trials < 1) throw InvalidInputError("SuiteConfig: trials must be >= 1");
    if (dim_min < 1 || dim_max > 16 || dim_min > dim_max)
      throw InvalidInputError("SuiteConfig: dims must satisfy 1 <= min <= max <= 16");
    for (const auto& s : config_suites()) {
      if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
        throw InvalidInputError("SuiteConfig: unknown suite " + s);
    }
  }
  std::vector<std::string> config_suites() const {
    for (const auto& s : suites)
      if (s == "all") return suite_names();
    return suites;
  }
};

enum class TrialStatus { Passed, Vacuous, Failed };

struct TrialOutcome {
  TrialStatus status = TrialStatus::Passed;
  double worst_residual = 0.0;
  std::string detail;
};

struct TrialFailure {
  int trial = 0;
  std::uint64_t sub_seed = 0;
  std::string detail;
};

struct SuiteResult {
  std::string name;
  int trials = 0, passed = 0, vacuous = 0, failed = 0;
  double worst_residual = 0.0;
  std::vector<TrialFailure> failures;
};

struct SuiteReport {
  std::vector<SuiteResult> suites;
  bool overall = true;
  SuiteConfig config;
};

namespace suites {

/// Accumulates certificate outcomes within one trial: any failure fails the
/// trial; hypothesis-violated parts make it vacuous, never failed.
struct TrialAccumulator {
  TrialOutcome out;
  bool saw_vacuous = false;

  void cert(const ConstructionCertificate& c) {
    out.worst_residual = std::max(out.worst_residual, c.worst_conclusion);
    if (c.vacuous) {
      saw_vacuous = true;
    } else if (!c.passed) {
      std::string detail = c.name;
      double worst = 0.0;
      for (const auto& [name, value] : c.residuals)
        if (name.rfind("hyp:", 0) != 0 && value > worst) {
          worst = value;
          detail = c.name + ": " + name + " = " + std::to_string(value);
        }
      fail(detail);
    }
  }
  void require(bool ok, const std::string& what, double residual = 1.0) {
    if (!ok) {
      out.worst_residual = std::max(out.worst_residual, residual);
      fail(what);
    }
  }
  void residual(double rel, const ToleranceConfig& tol, const std::string& what) {
    out.worst_residual = std::max(out.worst_residual, rel);
    if (rel > tol.zero_rel && rel > tol.abs_floor) fail(what);
  }
  void expect_vacuous(bool was_vacuous, const std::string& what) {
    if (was_vacuous)
      saw_vacuous = true;
    else
      fail(what + ": sabotage did not trip the hypothesis check");
  }
  void fail(const std::string& what) {
    if (out.status != TrialStatus::Failed) out.detail = what;
    out.status = TrialStatus::Failed;
  }
  TrialOutcome finish() {
    if (out.status == TrialStatus::Passed && saw_vacuous) out.status = TrialStatus::Vacuous;
    return out;
  }
};

namespace detail {

inline CMatrix two_block(const CMatrix& a, const CMatrix& b) {
  CMatrix out = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

inline CMatrix rot(const CMatrix& v, const CMatrix& m) { return v * m * v.adjoint(); }

/// Max distance between lexicographically sorted eigenvalue lists.
inline double eigenvalue_agreement(const CMatrix& a, const CMatrix& b) {
  auto eigs = [](const CMatrix& m) {
    Eigen::ComplexEigenSolver<CMatrix> es(m, false);
    std::vector<Complex> v(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
    std::sort(v.begin(), v.end(), [](const Complex& x, const Complex& y) {
      return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return v;
  };
  const auto ea = eigs(a), eb = eigs(b);
  if (ea.size() != eb.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (size_t i = 0; i < ea.size(); ++i) worst = std::max(worst, std::abs(ea[i] - eb[i]));
  return worst;
}

/// Commuting direct-sum scenario: everything is a polynomial in one nilpotent
/// per block, rotated by a common unitary, so every commutation hypothesis of
/// the product and perturbation theorems holds exactly.
struct CommutingScenario {
  CMatrix V;          // ambient rotation
  CMatrix napow_1;    // rotated nilpotent generator, block 1 padded with zeros
  CMatrix nbpow_1;    // rotated nilpotent generator, block 2 padded with zeros
  int d1 = 0, d2 = 0;
  int ka = 1;  // nilpotency index of the block-1 generator

  CMatrix assemble(const CMatrix& top, const CMatrix& bottom) const {
    return rot(V, two_block(top, bottom));
  }
};

inline CommutingScenario make_scenario(Rng& rng, int d1, int d2, bool real_only = false) {
  CommutingScenario sc;
  sc.d1 = d1;
  sc.d2 = d2;
  sc.ka = rng.uniform_int(1, std::min(2, d1));
  if (real_only) {
    CMatrix v = CMatrix::Zero(d1 + d2, d1 + d2);
    v.topLeftCorner(d1, d1) = rng.unitary(d1);
    v.bottomRightCorner(d2, d2) = rng.unitary(d2);
    sc.V = v;
  } else {
    sc.V = rng.unitary(d1 + d2);
  }
  return sc;
}

}  // namespace detail

// per-suite trial functions; each is a pure function of its sub-seed

inline TrialOutcome calculus_trial(std::uint64_t sub_seed, int dim_min, int dim_max,
                                   const ToleranceConfig& tol, bool sabotage) {
  Rng rng(sub_seed);
  TrialAccumulator acc;
  const int dim = rng.uniform_int(dim_min, dim_max);

  // closed binomial form against the recursive oracle, both kinds
  const CMatrix t = rng.gaussian(dim, dim), s = rng.gaussian(dim, dim), x = rng.gaussian(dim, dim);
  const int m = rng.uniform_int(1, 6);
  for (DKind kind : {DKind::Delta, DKind::SmallDelta}) {
    OperatorPair pair(t, s, kind);
    const CMatrix recursive = d_power(pair, x, m);
    const ClosedPower closed = d_power_closed_scaled(pair, x, m);
    acc.residual(fro(recursive - closed.value) / std::max(closed.scale, 1.0), tol,
                 "closed form disagrees with recursion");
  }

  // product expansion on a commuting quadruple (polynomials in one matrix)
  {
    CMatrix z = rng.gaussian(dim, dim);
    z /= std::max(fro(z), 1e-12);
    auto poly = [&](Rng& r) {
      return CMatrix(r.cgauss() * CMatrix::Identity(dim, dim) + r.cgauss() * z +
                     r.cgauss() * z * z);
    };
    CMatrix t1 = poly(rng), s1 = poly(rng), t2 = poly(rng), s2 = poly(rng);
    if (sabotage) s2 += 0.1 * rng.gaussian(dim, dim);
    const int p = rng.uniform_int(1, 4);
    const DKind kind = rng.uniform_int(0, 1) ? DKind::Delta : DKind::SmallDelta;
    const ExpansionCheck ec = product_expansion(kind, t1, s1, t2, s2, p, tol);
    if (sabotage)
      acc.expect_vacuous(!ec.hypothesis_violations.empty(), "product_expansion");
    else
      acc.residual(ec.residual, tol, "product expansion identity");
  }

  // perturbation expansion with N strictly upper triangular and S = poly(N)
  {
    CMatrix n = CMatrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) n(i, j) = rng.cgauss();
    const CMatrix sp = rng.cgauss() * CMatrix::Identity(dim, dim) + rng.cgauss() * n +
                       rng.cgauss() * n * n;
    const CMatrix tp = rng.gaussian(dim, dim);
    const int p = rng.uniform_int(1, 4);
    const DKind kind = rng.uniform_int(0, 1) ? DKind::Delta : DKind::SmallDelta;
    const ExpansionCheck ec = perturbation_expansion(kind, tp, sp, n, p, tol);
    acc.residual(ec.residual, tol, "perturbation expansion identity");
  }
  return acc.finish();
}

inline TrialOutcome classes_trial(std::uint64_t sub_seed, int dim_min, int dim_max,
                                  const ToleranceConfig& tol, bool sabotage) {
  Rng rng(sub_seed);
  TrialAccumulator acc;
  const int flavor = rng.uniform_int(0, 4);
  const int k = rng.uniform_int(1, 2);
  ClassSpec spec;
  spec.m = 2 * k - 1;
  switch (flavor) {
    case 0: spec.family = ClassFamily::MIsometry; spec.n = 0; break;
    case 1: spec.family = ClassFamily::MIsometry; spec.n = rng.uniform_int(1, 2); break;
    case 2: spec.family = ClassFamily::MSelfadjoint; spec.n = rng.uniform_int(0, 1); break;
    case 3: spec.family = ClassFamily::MCIsometry; spec.n = rng.uniform_int(0, 1); break;
    default: spec.family = ClassFamily::LeftMInvertiblePair; spec.m = 1; spec.n = 0; break;
  }
  const int dim = std::min(std::max(dim_min + rng.uniform_int(0, dim_max - dim_min),
                                    k + std::max(spec.n, 1)),
                           dim_max + 2);
  GeneratedInstance inst = gen_instance(spec, dim, derive_seed(sub_seed, "gen", 0), tol);
  if (sabotage) {
    inst.S += 0.2 * Rng(derive_seed(sub_seed, "sabotage", 0)).gaussian(dim, dim);
    const QuasiResidual r =
        inst.C ? quasi_residual_conjugated(inst.S.adjoint(), inst.S, *inst.C,
                                           family_kind(spec.family), spec.m, spec.n)
               : quasi_residual(OperatorPair(inst.S.adjoint(), inst.S, family_kind(spec.family)),
                                spec.m, spec.n);
    acc.expect_vacuous(!r.scaled().within(tol), "classes sabotage");
    return acc.finish();
  }
  acc.require(inst.certificate.passed, "generated certificate failed",
              inst.certificate.scale > 0 ? inst.certificate.residual_norm / inst.certificate.scale
                                         : 0.0);
  acc.out.worst_residual = std::max(
      acc.out.worst_residual,
      inst.certificate.scale > 0 ? inst.certificate.residual_norm / inst.certificate.scale : 0.0);

  if (spec.family != ClassFamily::LeftMInvertiblePair) {
    OperatorPair pair(inst.T, inst.S, family_kind(spec.family));
    const ClassifyOutcome cls = classify(pair, spec.n, std::max(spec.m, 4), inst.C, tol);
    acc.require(cls.minimal_m.has_value() && *cls.minimal_m <= spec.m,
                "classify missed the advertised order");
    // plain recipe instances have exact strict order 2k-1
    if (spec.n == 0 && cls.minimal_m) {
      acc.require(*cls.minimal_m == spec.m, "strict order mismatch");
      acc.require(cls.strict, "strictness not detected");
    }
    // the n-quasi class is strictly larger: the unsandwiched residual stays away from 0
    if (spec.n >= 1 && spec.family == ClassFamily::MIsometry && k > 1) {
      const QuasiResidual flat = quasi_residual(OperatorPair(inst.T, inst.S, DKind::Delta),
                                                spec.m, 0);
      acc.require(flat.norm > 1e3 * (tol.abs_floor + tol.zero_rel * flat.scale),
                  "lifted instance collapsed to the flat class");
    }
  } else {
    OperatorPair pair(inst.T, inst.S, DKind::Delta);
    const ClassifyOutcome cls = classify(pair, 0, 3, {}, tol);
    acc.require(cls.minimal_m.has_value() && *cls.minimal_m == 1, "inverse pair not order 1");
  }

  // finite-dimensional power-bounded characterization vs. the empirical test
  {
    const int pb_flavor = rng.uniform_int(0, 2);
    CMatrix s;
    if (pb_flavor == 0)
      s = rng.unitary(dim);
    else if (pb_flavor == 1)
      s = 1.3 * rng.unitary(dim);
    else
      s = jordan_nilpotent(dim, std::min(2, dim));
    const bool analytic = is_power_bounded(s, tol);
    double sup = 0.0;
    CMatrix p = CMatrix::Identity(dim, dim);
    for (int i = 1; i <= 200; ++i) {
      p = p * s;
      sup = std::max(sup, fro(p));
    }
    const bool empirical = sup < 10.0 * std::max(fro(s), 1.0) * dim;
    acc.require(analytic == empirical, "power-bounded characterization disagrees");
  }
  return acc.finish();
}

inline TrialOutcome spectral_trial(std::uint64_t sub_seed, int dim_min, int dim_max,
                                   const ToleranceConfig& tol, bool sabotage) {
  (void)sabotage;
  Rng rng(sub_seed);
  TrialAccumulator acc;
  const int dim = rng.uniform_int(dim_min, dim_max);

  // well separated eigenvalues, mildly non-normal similarity
  std::vector<Complex> lambdas;
  while (static_cast<int>(lambdas.size()) < dim) {
    const Complex cand(rng.uniform(-2, 2), rng.uniform(-2, 2));
    bool ok = true;
    for (const Complex& l : lambdas)
      if (std::abs(l - cand) < 0.5) ok = false;
    if (ok) lambdas.push_back(cand);
  }
  const bool jordan_trial = dim >= 2 && rng.uniform_int(0, 2) == 0;
  CMatrix d = CMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) d(i, i) = lambdas[i];
  if (jordan_trial) {
    d(0, 1) = 1.0;
    d(1, 1) = d(0, 0);  // Jordan block of size 2 at lambda_0
  }
  // mildly non-normal similarity with a controlled condition number
  CMatrix g = rng.gaussian(dim, dim);
  g *= 0.1 / std::max(op_norm(g), 1e-12);
  const CMatrix v = rng.unitary(dim) * (CMatrix::Identity(dim, dim) + g);
  const CMatrix a = v * d * v.inverse();

  const SpectralReport rep = spectral_report(a, tol);
  int total_mult = 0;
  for (const auto& e : rep.eigenvalues) total_mult += e.algebraic;
  acc.require(total_mult == dim, "algebraic multiplicities do not sum to dim");
  const double bound_scale = static_cast<double>(dim);
  acc.residual(rep.resolution_residual / bound_scale, tol, "resolution of identity");
  acc.residual(rep.idempotent_residual / bound_scale, tol, "projection idempotence");
  acc.residual(rep.commutation_residual / (bound_scale * std::max(1.0, fro(a))), tol,
               "projection commutation");
  acc.residual(rep.cross_residual / bound_scale, tol, "cross projections");

  for (const auto& e : rep.eigenvalues) {
    acc.require(e.ascent == e.descent && e.ascent == e.pole_order,
                "ascent/descent/pole mismatch");
    // restriction of A to range(P) sees a single eigenvalue
    const RankBases rb = rank_and_bases(e.riesz, tol);
    acc.require(rb.rank == e.algebraic, "riesz rank differs from algebraic multiplicity");
    const CMatrix restricted =
        rb.range_basis.adjoint() * a * rb.range_basis;
    double worst = 0.0;
    for (const auto& g : eigen_data(restricted))
      worst = std::max(worst, std::abs(g.value - e.value));
    acc.require(worst <= 1e-5 * std::max(1.0, fro(a)), "restricted spectrum drifted", worst);
    if (jordan_trial && std::abs(e.value - d(0, 0)) < 1e-6) {
      acc.require(e.pole_order == 2 && e.algebraic == 2, "jordan pole order missed");
    }
  }
  return acc.finish();
}

inline TrialOutcome pro00_trial(std::uint64_t sub_seed, int dim_min, int dim_max,
                                const ToleranceConfig& tol, bool sabotage) {
  Rng rng(sub_seed);
  TrialAccumulator acc;
  const int k = rng.uniform_int(1, 2);
  const int m = 2 * k - 1;
  const int n = rng.uniform_int(1, 2);
  const int dim = std::max(dim_min + rng.uniform_int(0, dim_max - dim_min), k + n);

  auto maybe_sabotage = [&](CMatrix s, std::uint64_t salt) {
    if (sabotage) s += 0.2 * Rng(derive_seed(sub_seed, "sabotage", salt)).gaussian(s.rows(), s.cols());
    return s;
  };

  // lifted (singular) Delta instance
  {
    GeneratedInstance inst = gen_instance({ClassFamily::MIsometry, m, n}, dim,
                                          derive_seed(sub_seed, "lift", 0), tol);
    const CMatrix s = maybe_sabotage(inst.S, 0);
    const ConstructionCertificate cert = construct_aqp(DKind::Delta, s, m, n, tol);
    acc.cert(cert);
    if (!sabotage && cert.passed) {
      const double agree = detail::eigenvalue_agreement(cert.payload.at("A"), matrix_power(s, n));
      acc.require(agree <= 1e-6 * std::max(1.0, fro(matrix_power(s, n))),
                  "spectra of A and S^n disagree", agree);
    }
  }

  // invertible Delta instance: full construct_b branch
  {
    GeneratedInstance inst = gen_instance({ClassFamily::MIsometry, m, 0}, dim,
                                          derive_seed(sub_seed, "inv", 0), tol);
    const CMatrix s = maybe_sabotage(inst.S, 1);
    const ConstructionCertificate ca = construct_aqp(DKind::Delta, s, m, n, tol);
    acc.cert(ca);
    if (!sabotage) {
      const ConstructionCertificate cb = construct_b(DKind::Delta, s, m, n, tol);
      acc.cert(cb);
      if (cb.passed) {
        const double agree =
            detail::eigenvalue_agreement(cb.payload.at("B"), matrix_power(s, n));
        acc.require(agree <= 1e-6 * std::max(1.0, fro(matrix_power(s, n))),
                    "spectra of B and S^n disagree", agree);
      }
      // cor00 companion: Delta^m_{A*,A}(Q) = 0 with injective Q puts the
      // point spectrum of A on the unit circle (vacuous when Q is singular)
      if (ca.passed) {
        const CheckReport circle =
            point_spectrum_circle_check(ca.payload.at("A"), ca.payload.at("Q"), m, tol);
        if (!circle.vacuous())
          acc.require(circle.passed(), "point spectrum left the unit circle");
      }
    }
  }

  // SmallDelta branch needs injective S; at finite dimension that means invertible
  {
    GeneratedInstance inst = gen_instance({ClassFamily::MSelfadjoint, m, 0}, dim,
                                          derive_seed(sub_seed, "sa", 0), tol);
    const CMatrix s = maybe_sabotage(inst.S, 2);
    acc.cert(construct_aqp(DKind::SmallDelta, s, m, n, tol));
    if (!sabotage && rank_and_bases(s, tol).rank == s.rows())
      acc.cert(construct_b(DKind::SmallDelta, s, m, n, tol));
  }
  return acc.finish();
}

inline TrialOutcome pro110_trial(std::uint64_t sub_seed, int dim_min, int dim_max,
                                 const ToleranceConfig& tol, bool sabotage) {
  Rng rng(sub_seed);
  TrialAccumulator acc;
  const int k = rng.uniform_int(1, 2);
  const int m = 2 * k - 1;
  const int n = rng.uniform_int(1, 2);
  const int dim = std::max(dim_min + rng.uniform_int(0, dim_max - dim_min), k + n);

  // lifted (m,C)-isometry with block-diagonal conjugation
  {
    GeneratedInstance inst = gen_instance({ClassFamily::MCIsometry, m, n}, dim,
                                          derive_seed(sub_seed, "mc", 0), tol);
    Conjugation c = *inst.C;
    if (sabotage) c = gen_conjugation(dim, derive_seed(sub_seed, "sabotage", 0));
    const ConstructionCertificate cert = construct_conjugated(DKind::Delta, inst.S, c, m, n, tol);
    if (sabotage)
      acc.expect_vacuous(cert.vacuous, "pro110 sabotage");
    else
      acc.cert(cert);
  }

  // invertible (m,C)-symmetry, SmallDelta branch
  if (!sabotage) {
    GeneratedInstance inst = gen_instance({ClassFamily::MCSymmetry, m, 0}, dim,
                                          derive_seed(sub_seed, "mcs", 0), tol);
    acc.cert(construct_conjugated(DKind::SmallDelta, inst.S, *inst.C, m, n, tol));
  }
  return acc.finish();
}

inline TrialOutcome thm10_trial(std::uint64_t sub_seed, int dim_min, int dim_max,
                                const ToleranceConfig& tol, bool sabotage) {
  Rng rng(sub_seed);
  TrialAccumulator acc;
  const int dim = rng.uniform_int(dim_min, dim_max);

  CMatrix s, t;
  int m = 1;
  const int flavor = sabotage ? 99 : rng.uniform_int(0, 3);
  bool quasi = false;
  int n = 1;
  switch (flavor) {
    case 0:  // unitary pair, power bounded
      s = rng.unit() * rng.unitary(dim);
      t = s.adjoint();
      m = rng.uniform_int(1, 3);
      break;
    case 1: {  // strict 3-isometry, not power bounded
      GeneratedInstance inst = gen_instance({ClassFamily::MIsometry, 3, 0}, std::max(dim, 2),
                                            derive_seed(sub_seed, "iso", 0), tol);
      s = inst.S;
      t = inst.T;
      m = 3;
      break;
    }
    case 2: {  // inverse pair
      s = rng.gaussian(dim, dim);
      t = s.inverse();
      m = 1;
      break;
    }
    case 3: {  // quasi lift of a unitary base, power bounded
      GeneratedInstance inst = gen_instance({ClassFamily::MIsometry, 1, rng.uniform_int(1, 2)},
                                            std::max(dim, 3), derive_seed(sub_seed, "q", 0), tol);
      s = inst.S;
      t = inst.T;
      m = 1;
      n = inst.certificate.spec.n;
      quasi = true;
      break;
    }
    default:  // sabotage: Jordan block, not power bounded
      s = CMatrix::Identity(dim, dim) + jordan_nilpotent(dim, 2);
      t = s.adjoint();
      m = 3;
      break;
  }

  if (!quasi) {
    for (int p = 1; p <= 3; ++p) acc.cert(left_inverse_cp(t, s, m, p, tol));
    const CheckReport check = unimodular_semisimple_check(s, t, m, tol);
    if (sabotage) {
      acc.expect_vacuous(check.vacuous(), "thm10 sabotage");
    } else if (!check.vacuous()) {
      acc.require(check.passed(), "unimodular semisimple surrogate failed");
    }
  } else {
    // thm11 surrogate goes through the block S1 of the decomposition
    const QuasiBlocks qb = quasi_block_decompose(s, t, n, tol);
    if (qb.d1 > 0) {
      for (int p = 1; p <= 3; ++p) acc.cert(left_inverse_cp(qb.T1, qb.S1, m, p, tol));
      const CheckReport check = unimodular_semisimple_check(qb.S1, qb.T1, m, tol);
      if (!check.vacuous()) acc.require(check.passed(), "block surrogate failed");
    }
  }
  return acc.finish();
}

inline TrialOutcome pro10_trial(std::uint64_t sub_seed, int dim_min, int dim_max,
                                const ToleranceConfig& tol, bool sabotage) {
  Rng rng(sub_seed);
  TrialAccumulator acc;
  const int n = rng.uniform_int(1, 2);
  const int d2 = n;
  const int d1 = std::max(2, rng.uniform_int(dim_min, dim_max) - d2);
  const bool coupled = rng.uniform_int(0, 1) == 1;

  const CMatrix u1 = rng.unitary(d1);
  const CMatrix x = coupled ? rng.gaussian(d1, d2) : CMatrix::Zero(d1, d2);
  const CMatrix n2 = jordan_nilpotent(d2, d2);
  CMatrix core = CMatrix::Zero(d1 + d2, d1 + d2);
  core.topLeftCorner(d1, d1) = u1;
  core.topRightCorner(d1, d2) = x;
  core.bottomRightCorner(d2, d2) = n2;
  const CMatrix v = rng.unitary(d1 + d2);
  const CMatrix s = detail::rot(v, core);
  CMatrix t = s.adjoint();
  if (sabotage) t += 0.2 * rng.gaussian(d1 + d2, d1 + d2);

  // lambda = 0 and the largest-modulus eigenvalue of the unitary part
  const ConstructionCertificate at_zero = riesz_selfadjoint_criterion(s, t, n, 0.0, tol, 1);
  Complex lam = 0.0;
  for (const auto& g : eigen_data(s))
    if (std::abs(g.value) > std::abs(lam)) lam = g.value;
  const ConstructionCertificate at_lam = riesz_selfadjoint_criterion(s, t, n, lam, tol, 1);
  if (sabotage) {
    acc.expect_vacuous(at_zero.vacuous && at_lam.vacuous, "pro10 sabotage");
  } else {
    acc.cert(at_zero);
    acc.cert(at_lam);
  }
  return acc.finish();
}

inline TrialOutcome thm01_trial(std::uint64_t sub_seed, int dim_min, int dim_max,
                                const ToleranceConfig& tol, bool sabotage) {
  (void)dim_min;
  (void)dim_max;
  Rng rng(sub_seed);
  TrialAccumulator acc;

  // plain theorem on a commuting direct-sum scenario, both kinds
  for (DKind kind : {DKind::Delta, DKind::SmallDelta}) {
    const int d1 = rng.uniform_int(2, 3), d2 = rng.uniform_int(1, 2);
    auto sc = detail::make_scenario(rng, d1, d2);
    const CMatrix na = jordan_nilpotent(d1, sc.ka);
    const CMatrix g2 = rng.gaussian(d2, d2);
    const int n = std::max(d2, rng.uniform_int(1, 2));

    auto block1 = [&](int power) -> CMatrix {
      const CMatrix nil = matrix_power(na, power);
      if (kind == DKind::Delta) return rng.unit() * (CMatrix::Identity(d1, d1) + rng.cgauss() * nil);
      return rng.uniform(0.5, 2.0) * CMatrix::Identity(d1, d1) + rng.gauss() * nil;
    };
    auto junk2 = [&]() -> CMatrix {
      return rng.cgauss() * CMatrix::Identity(d2, d2) + rng.cgauss() * g2 + rng.cgauss() * g2 * g2;
    };

    const int p1 = rng.uniform_int(1, std::max(1, sc.ka));
    const int p2 = rng.uniform_int(1, std::max(1, sc.ka));
    const CMatrix s11 = block1(p1), s21 = block1(p2);
    const int m1 = 2 * std::max(1, (sc.ka + p1 - 1) / p1) - 1;
    const int m2 = 2 * std::max(1, (sc.ka + p2 - 1) / p2) - 1;
    const CMatrix ab = block1(1);  // invertible core of the sandwich operator
    // zero bottom block: ker(S*^n) = H2 and S commutes with every block-diagonal operator
    const CMatrix s = sc.assemble(ab, CMatrix::Zero(d2, d2));
    CMatrix s1 = sc.assemble(s11, junk2());
    CMatrix s2 = sc.assemble(s21, junk2());
    if (sabotage) s2 += 0.2 * rng.gaussian(d1 + d2, d1 + d2);
    const CMatrix t1 = s1.adjoint(), t2 = s2.adjoint();
    const ConstructionCertificate cert =
        verify_product_theorem(kind, s, s1, t1, s2, t2, m1, m2, n, tol);
    if (sabotage)
      acc.expect_vacuous(cert.vacuous, "thm01 sabotage");
    else
      acc.cert(cert);
  }
  if (sabotage) return acc.finish();

  // tensor corollary, both kinds
  for (DKind kind : {DKind::Delta, DKind::SmallDelta}) {
    const int n = rng.uniform_int(1, 2);
    GeneratedInstance a1 = gen_instance(
        {kind == DKind::Delta ? ClassFamily::MIsometry : ClassFamily::MSelfadjoint, 3, n}, 3,
        derive_seed(sub_seed, "t1", kind == DKind::Delta ? 0 : 1), tol);
    GeneratedInstance a2 = gen_instance(
        {kind == DKind::Delta ? ClassFamily::MIsometry : ClassFamily::MSelfadjoint, 1, 0}, 2,
        derive_seed(sub_seed, "t2", kind == DKind::Delta ? 0 : 1), tol);
    acc.cert(verify_product_tensor(kind, a1.S, a1.T, a2.S, a2.T, 3, 1, n, tol));
  }

  // conjugated corollary: real commuting blocks rotated blockwise, C = D
  for (DKind kind : {DKind::Delta, DKind::SmallDelta}) {
    const int d1 = rng.uniform_int(2, 3), d2 = rng.uniform_int(1, 2);
    auto sc = detail::make_scenario(rng, d1, d2, /*real_only=*/true);
    const CMatrix na = jordan_nilpotent(d1, sc.ka);
    const int m1 = 2 * sc.ka - 1;
    const int n = std::max(d2, 1);
    auto real_block1 = [&]() -> CMatrix {
      const double u = rng.uniform(0, 1) < 0.5 ? -1.0 : 1.0;
      if (kind == DKind::Delta) return u * (CMatrix::Identity(d1, d1) + rng.gauss() * na);
      return rng.uniform(0.5, 2.0) * CMatrix::Identity(d1, d1) + rng.gauss() * na;
    };
    const CMatrix s_core = detail::two_block(real_block1(), jordan_nilpotent(d2, d2));
    const double sign2 = rng.uniform(0, 1) < 0.5 ? -1.0 : 1.0;
    CMatrix t2_block = sign2 * CMatrix::Identity(d2, d2);
    if (kind == DKind::SmallDelta) t2_block = rng.uniform(0.5, 2.0) * CMatrix::Identity(d2, d2);
    const CMatrix t_core = detail::two_block(real_block1(), t2_block);
    const CMatrix s = detail::rot(sc.V, s_core);
    const CMatrix t = detail::rot(sc.V, t_core);
    const Conjugation c(sc.V * sc.V.transpose());
    acc.cert(verify_product_conjugated(kind, s, t, c, c, m1, m1, n, tol));
    acc.cert(verify_product_conjugated_tensor(kind, s, t, c, c, m1, m1, n, tol));
  }

  // isometric / selfadjoint corollaries (plain and tensor forms)
  for (DKind kind : {DKind::Delta, DKind::SmallDelta}) {
    const int d1 = rng.uniform_int(2, 3), d2 = rng.uniform_int(1, 2);
    auto sc = detail::make_scenario(rng, d1, d2);
    const CMatrix na = jordan_nilpotent(d1, sc.ka);
    const CMatrix nb = jordan_nilpotent(d2, d2);
    const int n = std::max(d2, 1);
    const int m1 = 2 * sc.ka - 1;
    auto member1 = [&]() -> CMatrix {
      if (kind == DKind::Delta) return rng.unit() * (CMatrix::Identity(d1, d1) + rng.cgauss() * na);
      return rng.uniform(0.5, 2.0) * CMatrix::Identity(d1, d1) + rng.gauss() * na;
    };
    auto member2 = [&]() -> CMatrix {
      if (kind == DKind::Delta) return rng.unit() * (CMatrix::Identity(d2, d2) + rng.cgauss() * nb);
      return rng.uniform(0.5, 2.0) * CMatrix::Identity(d2, d2) + rng.gauss() * nb;
    };
    const CMatrix s = sc.assemble(member1(), nb);
    const CMatrix t = sc.assemble(member1(), member2());
    const int m2 = std::max(m1, 2 * d2 - 1);
    acc.cert(verify_product_isometry(kind, s, t, m1, m2, n, tol));

    GeneratedInstance ta = gen_instance(
        {kind == DKind::Delta ? ClassFamily::MIsometry : ClassFamily::MSelfadjoint, 1, 0}, 2,
        derive_seed(sub_seed, "flat", kind == DKind::Delta ? 0 : 1), tol);
    acc.cert(verify_product_isometry_tensor(kind, s, ta.S, m1, 1, n, tol));
  }
  return acc.finish();
}

inline TrialOutcome thm30_trial(std::uint64_t sub_seed, int dim_min, int dim_max,
                                const ToleranceConfig& tol, bool sabotage) {
  (void)dim_min;
  (void)dim_max;
  Rng rng(sub_seed);
  TrialAccumulator acc;

  // full theorem: commuting direct sum, nilpotents polynomial in the generators
  for (DKind kind : {DKind::Delta, DKind::SmallDelta}) {
    const int d1 = rng.uniform_int(2, 3), d2 = rng.uniform_int(1, 2);
    auto sc = detail::make_scenario(rng, d1, d2);
    const CMatrix na = jordan_nilpotent(d1, sc.ka);
    const CMatrix nb = jordan_nilpotent(d2, d2);
    const int n = std::max(d2, rng.uniform_int(1, 2));
    const int m = 2 * sc.ka - 1;
    auto core1 = [&]() -> CMatrix {
      if (kind == DKind::Delta) return rng.unit() * (CMatrix::Identity(d1, d1) + rng.cgauss() * na);
      return rng.uniform(0.5, 2.0) * CMatrix::Identity(d1, d1) + rng.gauss() * na;
    };
    const CMatrix s = sc.assemble(core1(), nb);
    const CMatrix t = s.adjoint();
    CMatrix n1 = sc.assemble(CMatrix(rng.cgauss() * na), CMatrix(rng.cgauss() * nb));
    if (sabotage) {
      CMatrix bad = CMatrix::Zero(d1 + d2, d1 + d2);
      for (int i = 0; i < d1 + d2; ++i)
        for (int j = i + 1; j < d1 + d2; ++j) bad(i, j) = rng.cgauss();
      n1 = bad;  // still nilpotent, no longer commutes with S
    }
    const CMatrix n2 =
        CMatrix(sc.assemble(CMatrix(rng.cgauss() * na), CMatrix(rng.cgauss() * nb)).adjoint());
    const int n1_idx = std::max(1, nilpotency_index(n1));
    const int n2_idx = std::max(1, nilpotency_index(n2));
    const ConstructionCertificate cert =
        verify_perturbation_theorem(kind, s, t, n1, n2, m, n, n1_idx, n2_idx, tol);
    if (sabotage) {
      acc.expect_vacuous(cert.vacuous, "thm30 sabotage");
      continue;
    }
    acc.cert(cert);

    // isometric corollary on the same instance
    acc.cert(verify_perturbation_isometric(kind, s, n1, m, n, n1_idx, tol));
  }
  if (sabotage) return acc.finish();

  // flat corollary, both kinds
  for (DKind kind : {DKind::Delta, DKind::SmallDelta}) {
    const int dim = rng.uniform_int(2, 4);
    const int k = rng.uniform_int(1, std::min(2, dim));
    const CMatrix w = rng.unitary(dim);
    const CMatrix na = detail::rot(w, jordan_nilpotent(dim, k));
    CMatrix s;
    if (kind == DKind::Delta)
      s = rng.unit() * (CMatrix::Identity(dim, dim) + rng.cgauss() * na);
    else
      s = rng.uniform(0.5, 2.0) * CMatrix::Identity(dim, dim) + rng.gauss() * na;
    const CMatrix t = s.adjoint();
    const CMatrix n1 = rng.cgauss() * na;
    const CMatrix n2 = CMatrix((rng.cgauss() * na).adjoint());
    const int m = 2 * k - 1;
    const int n1_idx = std::max(1, nilpotency_index(n1));
    const int n2_idx = std::max(1, nilpotency_index(n2));
    acc.cert(verify_perturbation_flat(kind, s, t, n1, n2, m, n1_idx, n2_idx, tol));
  }

  // conjugated corollary: real data, blockwise rotation, block conjugation
  {
    const int d1 = rng.uniform_int(2, 3), d2 = rng.uniform_int(1, 2);
    auto sc = detail::make_scenario(rng, d1, d2, /*real_only=*/true);
    const CMatrix na = jordan_nilpotent(d1, sc.ka);
    const CMatrix nb = jordan_nilpotent(d2, d2);
    const int n = std::max(d2, 1);
    const int m = 2 * sc.ka - 1;
    const double u = rng.uniform(0, 1) < 0.5 ? -1.0 : 1.0;
    const CMatrix s_core = detail::two_block(
        CMatrix(u * (CMatrix::Identity(d1, d1) + rng.gauss() * na)), nb);
    const CMatrix n_core = detail::two_block(CMatrix(rng.gauss() * na), CMatrix(rng.gauss() * nb));
    const CMatrix s = detail::rot(sc.V, s_core);
    const CMatrix nmat = detail::rot(sc.V, n_core);
    const Conjugation c(sc.V * sc.V.transpose());
    const int n1_idx = std::max(1, nilpotency_index(nmat));
    acc.cert(verify_perturbation_conjugated(s, c, nmat, m, n, n1_idx, tol));
  }
  return acc.finish();
}

inline TrialOutcome run_trial(const std::string& suite, std::uint64_t sub_seed, int dim_min,
                              int dim_max, const ToleranceConfig& tol, bool sabotage) {
  if (suite == "calculus") return calculus_trial(sub_seed, dim_min, dim_max, tol, sabotage);
  if (suite == "classes") return classes_trial(sub_seed, dim_min, dim_max, tol, sabotage);
  if (suite == "spectral") return spectral_trial(sub_seed, dim_min, dim_max, tol, sabotage);
  if (suite == "pro00") return pro00_trial(sub_seed, dim_min, dim_max, tol, sabotage);
  if (suite == "pro110") return pro110_trial(sub_seed, dim_min, dim_max, tol, sabotage);
  if (suite == "thm10") return thm10_trial(sub_seed, dim_min, dim_max, tol, sabotage);
  if (suite == "pro10") return pro10_trial(sub_seed, dim_min, dim_max, tol, sabotage);
  if (suite == "thm01") return thm01_trial(sub_seed, dim_min, dim_max, tol, sabotage);
  if (suite == "thm30") return thm30_trial(sub_seed, dim_min, dim_max, tol, sabotage);
  throw InvalidInputError("unknown suite: " + suite);
}

}  // namespace suites

inline SuiteReport run_suite(const SuiteConfig& config) {
  config.validate();
  SuiteReport report;
  report.config = config;
  for (const std::string& name : config.config_suites()) {
    SuiteResult result;
    result.name = name;
    result.trials = config.trials;
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t sub_seed = derive_seed(config.seed, name, trial);
      const TrialOutcome out = suites::run_trial(name, sub_seed, config.dim_min, config.dim_max,
                                                 config.tol, config.sabotage);
      result.worst_residual = std::max(result.worst_residual, out.worst_residual);
      switch (out.status) {
        case TrialStatus::Passed: ++result.passed; break;
        case TrialStatus::Vacuous: ++result.vacuous; break;
        case TrialStatus::Failed:
          ++result.failed;
          result.failures.push_back({trial, sub_seed, out.detail});
          break;
      }
    }
    if (result.failed > 0) report.overall = false;
    report.suites.push_back(std::move(result));
  }
  return report;
}

}  // namespace qil
