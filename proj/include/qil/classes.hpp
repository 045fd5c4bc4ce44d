#pragma once

#include "qil/elementary.hpp"
#include "qil/factorizations.hpp"
#include "qil/rng.hpp"
#include "qil/spectral.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qil {

enum class ClassFamily {
  MIsometry,
  MSelfadjoint,
  MCIsometry,
  MCSymmetry,
  LeftMInvertiblePair,
};

inline const char* to_string(ClassFamily f) {
  switch (f) {
    case ClassFamily::MIsometry: return "m-isometry";
    case ClassFamily::MSelfadjoint: return "m-selfadjoint";
    case ClassFamily::MCIsometry: return "(m,C)-isometry";
    case ClassFamily::MCSymmetry: return "(m,C)-symmetry";
    case ClassFamily::LeftMInvertiblePair: return "left-m-invertible-pair";
  }
  return "?";
}

inline ClassFamily family_from_string(const std::string& s) {
  if (s == "m-isometry") return ClassFamily::MIsometry;
  if (s == "m-selfadjoint") return ClassFamily::MSelfadjoint;
  if (s == "(m,C)-isometry" || s == "mc-isometry") return ClassFamily::MCIsometry;
  if (s == "(m,C)-symmetry" || s == "mc-symmetry") return ClassFamily::MCSymmetry;
  if (s == "left-m-invertible-pair" || s == "left-m-invertible") return ClassFamily::LeftMInvertiblePair;
  throw InvalidInputError("unknown operator class: " + s);
}

inline bool family_uses_conjugation(ClassFamily f) {
  return f == ClassFamily::MCIsometry || f == ClassFamily::MCSymmetry;
}

inline DKind family_kind(ClassFamily f) {
  switch (f) {
    case ClassFamily::MSelfadjoint:
    case ClassFamily::MCSymmetry: return DKind::SmallDelta;
    default: return DKind::Delta;
  }
}

struct ClassSpec {
  ClassFamily family = ClassFamily::MIsometry;
  int m = 1;
  int n = 0;  // n >= 1 marks the n-quasi variant

  void validate() const {
    if (m < 1) throw InvalidInputError("ClassSpec: m must be >= 1");
    if (n < 0) throw InvalidInputError("ClassSpec: n must be >= 0");
  }
};

struct Certificate {
  ClassSpec spec;
  double residual_norm = 0.0;
  double scale = 0.0;
  bool passed = false;
  std::vector<std::pair<std::string, double>> hypothesis_violations;
  std::string recipe;
  std::uint64_t seed = 0;
};

inline constexpr int kMaxClassifyOrder = 12;  // keeps the binomials at 924 or below

struct ClassifyOutcome {
  std::optional<int> minimal_m;
  bool strict = false;
  std::vector<Certificate> certificates;  // one per tested order
};

namespace detail {
inline QuasiResidual class_residual(const OperatorPair& pair, int m, int n,
                                    const std::optional<Conjugation>& c) {
  if (c) return quasi_residual_conjugated(pair.T, pair.S, *c, pair.kind, m, n);
  return quasi_residual(pair, m, n);
}
}  // namespace detail

/// Minimal order with vanishing n-quasi residual, plus strictness. The
/// "nonzero at m-1" side uses a looser threshold so structurally nonzero
/// residuals are not mistaken for noise.
inline ClassifyOutcome classify(const OperatorPair& pair, int n, int m_max,
                                const std::optional<Conjugation>& c = {},
                                const ToleranceConfig& tol = {}) {
  if (m_max < 1 || m_max > kMaxClassifyOrder)
    throw DomainError("classify: m_max must lie in [1, 12]");
  if (n < 0) throw DomainError("classify: n must be >= 0");
  if (c && c->dim() != pair.dim()) throw DimensionError("classify: conjugation dimension mismatch");
  ClassifyOutcome out;
  std::vector<double> norms(m_max + 1, 0.0), scales(m_max + 1, 0.0);
  for (int m = 1; m <= m_max; ++m) {
    const QuasiResidual r = detail::class_residual(pair, m, n, c);
    norms[m] = r.norm;
    scales[m] = r.scale;
    Certificate cert;
    cert.spec = ClassSpec{ClassFamily::MIsometry, m, n};
    cert.residual_norm = r.norm;
    cert.scale = r.scale;
    cert.passed = r.scaled().within(tol);
    out.certificates.push_back(cert);
    if (cert.passed && !out.minimal_m) out.minimal_m = m;
  }
  if (out.minimal_m) {
    const int m = *out.minimal_m;
    if (m == 1) {
      out.strict = true;
    } else {
      out.strict = norms[m - 1] > 1e3 * (tol.abs_floor + tol.zero_rel * scales[m - 1]);
    }
  }
  return out;
}

/// Single Jordan chain of the requested nilpotency index, padded with zeros.
inline CMatrix jordan_nilpotent(int dim, int index) {
  if (index < 1 || index > dim) throw GenerationError("jordan_nilpotent: index out of range");
  CMatrix n = CMatrix::Zero(dim, dim);
  for (int i = 0; i + 1 < index; ++i) n(i, i + 1) = 1.0;
  return n;
}

/// J = W W^T for a seeded random unitary W: symmetric and unitary by
/// construction. Optional block_dims give J = J1 (+) J2.
inline Conjugation gen_conjugation(int dim, std::uint64_t seed,
                                   std::optional<std::pair<int, int>> block_dims = {}) {
  if (dim < 1) throw DimensionError("gen_conjugation: dim must be positive");
  Rng rng(seed);
  if (!block_dims) {
    const CMatrix w = rng.unitary(dim);
    return Conjugation(w * w.transpose());
  }
  const auto [d1, d2] = *block_dims;
  if (d1 < 0 || d2 < 0 || d1 + d2 != dim)
    throw DimensionError("gen_conjugation: block dims must sum to dim");
  CMatrix j = CMatrix::Zero(dim, dim);
  if (d1 > 0) {
    const CMatrix w1 = rng.unitary(d1);
    j.topLeftCorner(d1, d1) = w1 * w1.transpose();
  }
  if (d2 > 0) {
    const CMatrix w2 = rng.unitary(d2);
    j.bottomRightCorner(d2, d2) = w2 * w2.transpose();
  }
  return Conjugation(j);
}

struct GeneratedInstance {
  CMatrix S, T;
  std::optional<Conjugation> C;
  Certificate certificate;
};

namespace detail {

// base block for T = S* classes: u(I+N) for Delta, aI+N for SmallDelta,
// with a random unitary (resp. Hermitian) when no nilpotent part is wanted.
inline CMatrix base_block(Rng& rng, DKind kind, int dim, int k, bool real_only) {
  if (k > dim) throw GenerationError("gen_instance: dim too small for the requested order");
  if (k == 1) {
    if (kind == DKind::Delta) {
      CMatrix u = real_only ? rng.orthogonal(dim) : rng.unitary(dim);
      if (!real_only) u *= rng.unit();
      return u;
    }
    CMatrix g = real_only ? rng.real_gaussian(dim, dim) : rng.gaussian(dim, dim);
    return 0.5 * (g + CMatrix(g.adjoint()));
  }
  const CMatrix w = real_only ? rng.orthogonal(dim) : rng.unitary(dim);
  const double c = rng.uniform(0.5, 1.5);
  const CMatrix n = c * (w * jordan_nilpotent(dim, k) * w.adjoint());
  const CMatrix eye = CMatrix::Identity(dim, dim);
  if (kind == DKind::Delta) {
    const Complex u = real_only ? Complex(rng.uniform(0, 1) < 0.5 ? -1.0 : 1.0, 0.0) : rng.unit();
    return u * (eye + n);
  }
  const double a = (rng.uniform(0, 1) < 0.5 ? -1.0 : 1.0) * rng.uniform(0.5, 2.0);
  return a * eye + n;
}

}  // namespace detail

/// Seeded instance generator. Recipes:
///   (a) m-isometry of order 2k-1: S = u (I + N), N Jordan-nilpotent of index k
///       conjugated by a random unitary; T = S*.
///   (b) m-selfadjoint of order 2k-1: S = a I + N, a real; T = S*.
///   (c) left-m-invertible pair: T = S^{-1} for random invertible S (m = 1),
///       otherwise the pair (S*, S) from (a).
///   (d) n-quasi lift: S = [[S1, X], [0, N2]] with N2 nilpotent of index <= n.
///   (e) (m,C) classes: real base with J = I, conjugated by a random unitary W
///       with J = W W^T (blockwise for quasi lifts).
inline GeneratedInstance gen_instance(const ClassSpec& spec, int dim, std::uint64_t seed,
                                      const ToleranceConfig& tol = {}) {
  spec.validate();
  if (dim < 1 || dim > kMaxDim) throw GenerationError("gen_instance: unsupported dimension");
  Rng rng(seed);
  const DKind kind = family_kind(spec.family);
  const bool conjugated = family_uses_conjugation(spec.family);
  const int k = (spec.m + 1) / 2;  // realized order 2k-1 <= m

  const int d2 = spec.n >= 1 ? std::min(spec.n, dim - k) : 0;
  if (spec.n >= 1 && d2 < 1)
    throw GenerationError("gen_instance: dim too small for an n-quasi lift of order " +
                          std::to_string(spec.m));
  const int d1 = dim - d2;

  std::ostringstream recipe;
  GeneratedInstance out;

  if (spec.family == ClassFamily::LeftMInvertiblePair && spec.n == 0 && spec.m == 1) {
    // recipe (c), inverse pair
    CMatrix s = rng.gaussian(dim, dim);
    out.S = s;
    out.T = s.inverse();
    recipe << "c:inverse-pair(dim=" << dim << ")";
  } else {
    const CMatrix s1 = detail::base_block(rng, kind, d1, k, conjugated);
    CMatrix s;
    if (d2 == 0) {
      s = s1;
    } else {
      // real coupling keeps conjugated lifts compatible with [C,M] = 0
      const CMatrix x = conjugated ? rng.real_gaussian(d1, d2) : rng.gaussian(d1, d2);
      CMatrix n2 = jordan_nilpotent(d2, d2);
      s = CMatrix::Zero(dim, dim);
      s.topLeftCorner(d1, d1) = s1;
      s.topRightCorner(d1, d2) = x;
      s.bottomRightCorner(d2, d2) = n2;
      recipe << "d:quasi-lift(n=" << spec.n << ",d1=" << d1 << ")+";
    }
    recipe << (kind == DKind::Delta ? "a" : "b") << ":shifted-nilpotent(k=" << k << ")";
    if (conjugated) {
      // recipe (e): rotate the real instance by V and take J = V V^T,
      // blockwise when the instance is a quasi lift
      CMatrix v;
      if (d2 == 0) {
        v = rng.unitary(dim);
      } else {
        v = CMatrix::Zero(dim, dim);
        v.topLeftCorner(d1, d1) = rng.unitary(d1);
        v.bottomRightCorner(d2, d2) = rng.unitary(d2);
      }
      out.S = v * s * v.adjoint();
      out.T = out.S.adjoint();
      out.C = Conjugation(v * v.transpose());
      recipe << "+e:conjugated";
    } else {
      const CMatrix v = rng.unitary(dim);
      out.S = v * s * v.adjoint();
      out.T = out.S.adjoint();
    }
    if (spec.family == ClassFamily::LeftMInvertiblePair) recipe << "+c:adjoint-pair";
  }

  const QuasiResidual r =
      out.C ? quasi_residual_conjugated(out.T, out.S, *out.C, kind, spec.m, spec.n)
            : quasi_residual(OperatorPair(out.T, out.S, kind), spec.m, spec.n);
  out.certificate.spec = spec;
  out.certificate.residual_norm = r.norm;
  out.certificate.scale = r.scale;
  out.certificate.passed = r.scaled().within(tol);
  out.certificate.recipe = recipe.str();
  out.certificate.seed = seed;
  return out;
}

}  // namespace qil
