#pragma once

#include "qil/matrix.hpp"
#include "qil/tolerance.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qil {

/// The two elementary operators: Delta(X) = TXS - X, SmallDelta(X) = TX - XS.
enum class DKind { Delta, SmallDelta };

inline const char* to_string(DKind k) { return k == DKind::Delta ? "delta" : "small-delta"; }

inline DKind dkind_from_string(const std::string& s) {
  if (s == "delta" || s == "Delta") return DKind::Delta;
  if (s == "small-delta" || s == "smalldelta" || s == "SmallDelta") return DKind::SmallDelta;
  throw InvalidInputError("unknown elementary-operator kind: " + s);
}

struct OperatorPair {
  CMatrix T, S;
  DKind kind = DKind::Delta;

  OperatorPair(CMatrix t, CMatrix s, DKind k) : T(std::move(t)), S(std::move(s)), kind(k) {
    require_square(T, "OperatorPair");
    require_square(S, "OperatorPair");
    require_same_dim(T, S, "OperatorPair");
    require_finite(T, "OperatorPair");
    require_finite(S, "OperatorPair");
  }
  int dim() const { return static_cast<int>(S.rows()); }
};

/// Antilinear conjugation x -> J * conj(x) with J symmetric unitary, so that
/// C^2 = I and <Cx,y> = <Cy,x>.
struct Conjugation {
  CMatrix J;

  explicit Conjugation(CMatrix j, const ToleranceConfig& tol = {}) : J(std::move(j)) {
    require_square(J, "Conjugation");
    require_finite(J, "Conjugation");
    const double bound = tol.abs_floor + tol.zero_rel * std::max(1.0, fro(J));
    if (unitary_residual() > bound)
      throw InvalidInputError("Conjugation: J is not unitary");
    if (symmetric_residual() > bound)
      throw InvalidInputError("Conjugation: J is not transpose-symmetric");
  }

  static Conjugation identity(int dim) { return Conjugation(CMatrix::Identity(dim, dim)); }

  int dim() const { return static_cast<int>(J.rows()); }
  CVector apply(const CVector& x) const { return J * x.conjugate(); }

  /// Linear matrix of x -> C(M(C(x))), namely J * conj(M) * conj(J).
  CMatrix transform(const CMatrix& m) const {
    require_same_dim(J, m, "Conjugation::transform");
    return J * m.conjugate() * J.conjugate();
  }

  double unitary_residual() const {
    return fro(CMatrix(J.adjoint() * J) - CMatrix::Identity(J.rows(), J.cols()));
  }
  double symmetric_residual() const { return fro(J - CMatrix(J.transpose())); }
  double involution_residual() const {
    return fro(CMatrix(J * J.conjugate()) - CMatrix::Identity(J.rows(), J.cols()));
  }
};

inline CMatrix d_apply(const OperatorPair& p, const CMatrix& x) {
  require_same_dim(p.S, x, "d_apply");
  if (p.kind == DKind::Delta) return p.T * x * p.S - x;
  return p.T * x - x * p.S;
}

/// m-fold recursive application; m = 0 returns X.
inline CMatrix d_power(const OperatorPair& p, CMatrix x, int m) {
  if (m < 0) throw DomainError("d_power: negative order");
  require_same_dim(p.S, x, "d_power");
  for (int i = 0; i < m; ++i) x = d_apply(p, x);
  return x;
}

struct ClosedPower {
  CMatrix value;
  double scale = 0.0;  // largest Frobenius norm among the summed terms
};

namespace detail {
inline std::vector<CMatrix> power_table(const CMatrix& m, int max_pow) {
  std::vector<CMatrix> t;
  t.reserve(max_pow + 1);
  t.push_back(CMatrix::Identity(m.rows(), m.cols()));
  for (int i = 1; i <= max_pow; ++i) t.push_back(t.back() * m);
  return t;
}
}  // namespace detail

/// Closed binomial form: Delta gives sum_j (-1)^j C(m,j) T^{m-j} X S^{m-j},
/// SmallDelta gives sum_j (-1)^j C(m,j) T^{m-j} X S^j.
inline ClosedPower d_power_closed_scaled(const OperatorPair& p, const CMatrix& x, int m) {
  if (m < 0) throw DomainError("d_power_closed: negative order");
  if (m > kMaxBinomialOrder) throw DomainError("d_power_closed: order exceeds binomial-exactness cap");
  require_same_dim(p.S, x, "d_power_closed");
  const Eigen::Index n = p.S.rows();
  if (m == 0) return {x, fro(x)};
  const auto tp = detail::power_table(p.T, m);
  const auto sp = detail::power_table(p.S, m);
  CMatrix sum = CMatrix::Zero(n, n);
  double scale = 0.0;
  for (int j = 0; j <= m; ++j) {
    const double coef = static_cast<double>(binomial(m, j));
    const int s_pow = (p.kind == DKind::Delta) ? m - j : j;
    CMatrix term = coef * (tp[m - j] * x * sp[s_pow]);
    scale = std::max(scale, fro(term));
    if (j % 2 == 0)
      sum += term;
    else
      sum -= term;
  }
  return {std::move(sum), scale};
}

inline CMatrix d_power_closed(const OperatorPair& p, const CMatrix& x, int m) {
  return d_power_closed_scaled(p, x, m).value;
}

inline CMatrix cmc(const Conjugation& c, const CMatrix& m) { return c.transform(m); }

/// sandwich*^q { d^m_{T,right}(I) } sandwich^q, accumulated term by term so the
/// scale reflects the summands actually cancelled.
inline ScaledResidual sandwiched_residual(const CMatrix& T, const CMatrix& right, DKind kind,
                                          int m, const CMatrix& sandwich, int q,
                                          CMatrix* value_out = nullptr) {
  require_square(T, "sandwiched_residual");
  require_same_dim(T, right, "sandwiched_residual");
  require_same_dim(T, sandwich, "sandwiched_residual");
  if (m < 1) throw DomainError("sandwiched_residual: order must be >= 1");
  if (m > kMaxBinomialOrder) throw DomainError("sandwiched_residual: order exceeds binomial cap");
  if (q < 0) throw DomainError("sandwiched_residual: quasi exponent must be >= 0");
  const Eigen::Index n = T.rows();
  const CMatrix sq = matrix_power(sandwich, q);
  const CMatrix sq_adj = sq.adjoint();
  const double sq_gain = std::max(1.0, op_norm(sq));
  const auto tp = detail::power_table(T, m);
  const auto rp = detail::power_table(right, m);
  CMatrix sum = CMatrix::Zero(n, n);
  double scale = 0.0;
  for (int j = 0; j <= m; ++j) {
    const double coef = static_cast<double>(binomial(m, j));
    const int r_pow = (kind == DKind::Delta) ? m - j : j;
    const CMatrix inner = tp[m - j] * rp[r_pow];
    CMatrix term = coef * (sq_adj * inner * sq);
    // the sandwich can annihilate large blocks of the inner product, so the
    // rounding scale follows the products that formed the term, not the
    // (possibly tiny) assembled term itself
    scale = std::max(scale, coef * fro(inner) * sq_gain * sq_gain);
    if (j % 2 == 0)
      sum += term;
    else
      sum -= term;
  }
  ScaledResidual out{fro(sum), scale};
  if (value_out) *value_out = std::move(sum);
  return out;
}

struct QuasiResidual {
  CMatrix value;
  double norm = 0.0;
  double scale = 0.0;
  ScaledResidual scaled() const { return {norm, scale}; }
};

/// S*^n d^m_{T,S}(I) S^n, the defining residual of the n-quasi classes.
inline QuasiResidual quasi_residual(const OperatorPair& p, int m, int n) {
  QuasiResidual out;
  const ScaledResidual r = sandwiched_residual(p.T, p.S, p.kind, m, p.S, n, &out.value);
  out.norm = r.norm;
  out.scale = r.scale;
  return out;
}

/// Conjugated variant: the d-power right operand becomes CSC while the
/// sandwich stays S^n, matching the defining identity of the (m,C) classes.
inline QuasiResidual quasi_residual_conjugated(const CMatrix& T, const CMatrix& S,
                                               const Conjugation& c, DKind kind, int m, int n) {
  QuasiResidual out;
  const ScaledResidual r = sandwiched_residual(T, c.transform(S), kind, m, S, n, &out.value);
  out.norm = r.norm;
  out.scale = r.scale;
  return out;
}

struct ExpansionCheck {
  CMatrix lhs, rhs;
  double residual = 0.0;  // ||lhs - rhs|| / scale
  double scale = 0.0;
  std::vector<std::pair<std::string, double>> hypothesis_violations;
};

/// Structural expansion of d^p for a product pair:
///   Delta:      sum_j C(p,j) T1^{p-j} Delta^{p-j}_{T2,S2}(I) S1^{p-j} Delta^j_{T1,S1}(I)
///   SmallDelta: sum_j C(p,j) T2^{p-j} delta^{p-j}_{T1,S1}(I) delta^j_{T2,S2}(I) S1^j
/// The identity is asserted only under [S1,S2] = 0 = [T1,T2]; violations are
/// reported, not fatal.
inline ExpansionCheck product_expansion(DKind kind, const CMatrix& T1, const CMatrix& S1,
                                        const CMatrix& T2, const CMatrix& S2, int p,
                                        const ToleranceConfig& tol = {}) {
  require_square(T1, "product_expansion");
  require_same_dim(T1, S1, "product_expansion");
  require_same_dim(T1, T2, "product_expansion");
  require_same_dim(T1, S2, "product_expansion");
  if (p < 1) throw DomainError("product_expansion: order must be >= 1");
  ExpansionCheck out;
  const double c_s = commutator_residual(S1, S2);
  const double c_t = commutator_residual(T1, T2);
  if (c_s > tol.zero_rel) out.hypothesis_violations.emplace_back("[S1,S2]", c_s);
  if (c_t > tol.zero_rel) out.hypothesis_violations.emplace_back("[T1,T2]", c_t);

  OperatorPair prod(T1 * T2, S1 * S2, kind);
  ClosedPower lhs = d_power_closed_scaled(prod, CMatrix::Identity(T1.rows(), T1.cols()), p);
  out.lhs = std::move(lhs.value);
  double scale = lhs.scale;

  const auto t1p = detail::power_table(T1, p);
  const auto s1p = detail::power_table(S1, p);
  const auto t2p = detail::power_table(T2, p);
  const CMatrix eye = CMatrix::Identity(T1.rows(), T1.cols());
  OperatorPair p1(T1, S1, kind), p2(T2, S2, kind);
  CMatrix rhs = CMatrix::Zero(T1.rows(), T1.cols());
  for (int j = 0; j <= p; ++j) {
    const double coef = static_cast<double>(binomial(p, j));
    CMatrix term;
    if (kind == DKind::Delta) {
      term = coef * (t1p[p - j] * d_power_closed(p2, eye, p - j) * s1p[p - j] *
                     d_power_closed(p1, eye, j));
    } else {
      term = coef * (t2p[p - j] * d_power_closed(p1, eye, p - j) * d_power_closed(p2, eye, j) *
                     s1p[j]);
    }
    scale = std::max(scale, fro(term));
    rhs += term;
  }
  out.rhs = std::move(rhs);
  out.scale = std::max(scale, tol.abs_floor);
  out.residual = fro(out.lhs - out.rhs) / out.scale;
  return out;
}

/// Perturbation expansion of d^p_{T,S+N}(I) for [S,N] = 0:
///   Delta:      sum_j C(p,j) T^j Delta^{p-j}_{T,S}(I) N^j
///   SmallDelta: sum_j (-1)^j C(p,j) delta^{p-j}_{T,S}(I) N^j
inline ExpansionCheck perturbation_expansion(DKind kind, const CMatrix& T, const CMatrix& S,
                                             const CMatrix& N, int p,
                                             const ToleranceConfig& tol = {}) {
  require_square(T, "perturbation_expansion");
  require_same_dim(T, S, "perturbation_expansion");
  require_same_dim(T, N, "perturbation_expansion");
  if (p < 1) throw DomainError("perturbation_expansion: order must be >= 1");
  ExpansionCheck out;
  const double c_sn = commutator_residual(S, N);
  if (c_sn > tol.zero_rel) out.hypothesis_violations.emplace_back("[S,N]", c_sn);

  OperatorPair perturbed(T, S + N, kind);
  const CMatrix eye = CMatrix::Identity(T.rows(), T.cols());
  ClosedPower lhs = d_power_closed_scaled(perturbed, eye, p);
  out.lhs = std::move(lhs.value);
  double scale = lhs.scale;

  OperatorPair base(T, S, kind);
  const auto tp = detail::power_table(T, p);
  const auto np = detail::power_table(N, p);
  CMatrix rhs = CMatrix::Zero(T.rows(), T.cols());
  for (int j = 0; j <= p; ++j) {
    const double coef = static_cast<double>(binomial(p, j));
    CMatrix term;
    if (kind == DKind::Delta) {
      term = coef * (tp[j] * d_power_closed(base, eye, p - j) * np[j]);
      scale = std::max(scale, fro(term));
      rhs += term;
    } else {
      term = coef * (d_power_closed(base, eye, p - j) * np[j]);
      scale = std::max(scale, fro(term));
      if (j % 2 == 0)
        rhs += term;
      else
        rhs -= term;
    }
  }
  out.rhs = std::move(rhs);
  out.scale = std::max(scale, tol.abs_floor);
  out.residual = fro(out.lhs - out.rhs) / out.scale;
  return out;
}

}  // namespace qil
