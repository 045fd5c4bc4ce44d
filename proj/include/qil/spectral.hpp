#pragma once

#include "qil/elementary.hpp"
#include "qil/factorizations.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

namespace qil {

inline double default_cluster_radius(const CMatrix& a) { return 1e-6 * fro(a); }

struct EigenvalueGroup {
  Complex value;      // cluster representative (mean)
  int algebraic = 0;  // cluster size
};

/// Eigenvalues clustered by the transitive closure of |a - b| <= radius,
/// reported in lexicographic (re, im) order. Multiplicities sum to dim.
inline std::vector<EigenvalueGroup> eigen_data(const CMatrix& a,
                                               std::optional<double> cluster_radius = {}) {
  require_square(a, "eigen_data");
  require_finite(a, "eigen_data");
  const double radius = cluster_radius ? *cluster_radius : default_cluster_radius(a);
  Eigen::ComplexEigenSolver<CMatrix> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalError("eigen_data: eigensolver failed");
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
  std::sort(ev.begin(), ev.end(), [](const Complex& x, const Complex& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  // union-find over the sorted list
  const int n = static_cast<int>(ev.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(ev[i] - ev[j]) <= radius) {
        const int ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
  std::map<int, std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) clusters[find(i)].push_back(i);
  std::vector<EigenvalueGroup> out;
  for (const auto& [root, members] : clusters) {
    Complex mean = 0.0;
    for (int i : members) mean += ev[i];
    mean /= static_cast<double>(members.size());
    out.push_back({mean, static_cast<int>(members.size())});
  }
  std::sort(out.begin(), out.end(), [](const EigenvalueGroup& x, const EigenvalueGroup& y) {
    return x.value.real() != y.value.real() ? x.value.real() < y.value.real()
                                            : x.value.imag() < y.value.imag();
  });
  return out;
}

namespace detail {
inline int rank_of(const CMatrix& m, const ToleranceConfig& tol, double scale_floor = 0.0) {
  return rank_and_bases(m, tol, scale_floor).rank;
}

inline void require_eigenvalue(const CMatrix& a, Complex lambda, const char* what) {
  const double radius = std::max(default_cluster_radius(a), 1e-12);
  for (const auto& g : eigen_data(a))
    if (std::abs(g.value - lambda) <= 10.0 * radius + 1e-9) return;
  throw DomainError(std::string(what) + ": lambda is not an eigenvalue");
}
}  // namespace detail

struct AscentInfo {
  int ascent = 0;
  int descent = 0;
  int pole_order = 0;
};

/// Stabilization index of rank((A - lambda)^k); ascent = descent = pole order
/// at finite dimension.
inline AscentInfo ascent_descent(const CMatrix& a, Complex lambda,
                                 const ToleranceConfig& tol = {}) {
  require_square(a, "ascent_descent");
  detail::require_eigenvalue(a, lambda, "ascent_descent");
  const Eigen::Index n = a.rows();
  const CMatrix shifted = a - lambda * CMatrix::Identity(n, n);
  const double shift_gain = op_norm(shifted);
  int prev_rank = static_cast<int>(n);
  CMatrix power = CMatrix::Identity(n, n);
  double floor = 1.0;
  for (int k = 1; k <= n + 1; ++k) {
    power = power * shifted;
    floor *= shift_gain;
    const int r = detail::rank_of(power, tol, floor);
    if (r == prev_rank) return {k - 1, k - 1, k - 1};
    prev_rank = r;
  }
  throw NumericalError("ascent_descent: rank sequence failed to stabilize");
}

struct RieszProjection {
  CMatrix P;
  int pole_order = 0;
  double condition = 0.0;   // of the [kernel | range] basis concatenation
  bool ill_conditioned = false;
};

/// Spectral idempotent onto ker((A-lambda)^k) along range((A-lambda)^k),
/// built algebraically from the two subspace bases.
inline RieszProjection riesz_projection(const CMatrix& a, Complex lambda,
                                        const ToleranceConfig& tol = {}) {
  require_square(a, "riesz_projection");
  const Eigen::Index n = a.rows();
  const AscentInfo info = ascent_descent(a, lambda, tol);
  const int k = std::max(info.pole_order, 1);
  const CMatrix shifted = a - lambda * CMatrix::Identity(n, n);
  const CMatrix shifted_k = matrix_power(shifted, k);
  const RankBases rb = rank_and_bases(shifted_k, tol, std::pow(op_norm(shifted), k));
  const Eigen::Index mult = n - rb.rank;
  CMatrix basis(n, n);
  basis.leftCols(mult) = rb.kernel_basis;
  basis.rightCols(rb.rank) = rb.range_basis;
  Eigen::JacobiSVD<CMatrix> svd(basis);
  const double smin = svd.singularValues()(n - 1);
  const double smax = svd.singularValues()(0);
  RieszProjection out;
  out.pole_order = k;
  out.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  out.ill_conditioned = !(out.condition < 1.0 / std::max(tol.zero_rel, 1e-300));
  CMatrix selector = CMatrix::Zero(n, n);
  selector.topLeftCorner(mult, mult) = CMatrix::Identity(mult, mult);
  out.P = basis * selector * basis.inverse();
  return out;
}

struct SpectralEntry {
  Complex value;
  int algebraic = 0;
  int geometric = 0;
  int ascent = 0;
  int descent = 0;
  int pole_order = 0;
  CMatrix riesz;
  bool selfadjoint_projection = false;
  bool simple_pole = false;
  double riesz_condition = 0.0;
};

struct SpectralReport {
  int dim = 0;
  std::vector<SpectralEntry> eigenvalues;
  double resolution_residual = 0.0;   // ||sum P - I||
  double idempotent_residual = 0.0;   // max ||P^2 - P||
  double commutation_residual = 0.0;  // max ||A P - P A||
  double cross_residual = 0.0;        // max ||P_i P_j||, i != j
};

inline SpectralReport spectral_report(const CMatrix& a, const ToleranceConfig& tol = {}) {
  require_square(a, "spectral_report");
  const Eigen::Index n = a.rows();
  SpectralReport rep;
  rep.dim = static_cast<int>(n);
  CMatrix sum = CMatrix::Zero(n, n);
  for (const auto& g : eigen_data(a)) {
    SpectralEntry e;
    e.value = g.value;
    e.algebraic = g.algebraic;
    e.geometric = static_cast<int>(n) -
                  detail::rank_of(a - g.value * CMatrix::Identity(n, n), tol);
    const AscentInfo info = ascent_descent(a, g.value, tol);
    e.ascent = info.ascent;
    e.descent = info.descent;
    e.pole_order = info.pole_order;
    const RieszProjection rp = riesz_projection(a, g.value, tol);
    e.riesz = rp.P;
    e.riesz_condition = rp.condition;
    const double herm_scale = std::max(1.0, fro(rp.P));
    e.selfadjoint_projection =
        fro(rp.P - CMatrix(rp.P.adjoint())) <= tol.abs_floor + tol.zero_rel * herm_scale;
    e.simple_pole = (e.pole_order == 1);
    sum += rp.P;
    rep.idempotent_residual = std::max(rep.idempotent_residual, fro(rp.P * rp.P - rp.P));
    rep.commutation_residual = std::max(rep.commutation_residual, fro(a * rp.P - rp.P * a));
    rep.eigenvalues.push_back(std::move(e));
  }
  rep.resolution_residual = fro(sum - CMatrix::Identity(n, n));
  for (size_t i = 0; i < rep.eigenvalues.size(); ++i)
    for (size_t j = 0; j < rep.eigenvalues.size(); ++j)
      if (i != j)
        rep.cross_residual = std::max(
            rep.cross_residual, fro(rep.eigenvalues[i].riesz * rep.eigenvalues[j].riesz));
  return rep;
}

/// Finite-dimensional power boundedness: spectrum in the closed disc with
/// every near-unimodular eigenvalue semisimple.
inline bool is_power_bounded(const CMatrix& s, const ToleranceConfig& tol = {}) {
  require_square(s, "is_power_bounded");
  const Eigen::Index n = s.rows();
  const double eps = std::max(tol.zero_rel, 1e-10);
  for (const auto& g : eigen_data(s)) {
    const double r = std::abs(g.value);
    if (r > 1.0 + eps) return false;
    if (r >= 1.0 - eps) {
      const CMatrix shifted = s - g.value * CMatrix::Identity(n, n);
      const double gain = op_norm(shifted);
      if (detail::rank_of(shifted, tol, gain) !=
          detail::rank_of(shifted * shifted, tol, gain * gain))
        return false;
    }
  }
  return true;
}

/// Hypothesis-aware pass/fail for the spectral surrogate checks.
struct CheckReport {
  bool hypotheses_ok = true;
  bool conclusion_ok = false;
  std::vector<std::pair<std::string, double>> hypothesis_violations;
  std::map<std::string, double> details;

  bool vacuous() const { return !hypotheses_ok; }
  bool passed() const { return hypotheses_ok && conclusion_ok; }
};

/// Finite-dimensional surrogate for the polaroid conclusion on power-bounded
/// left-m-invertible pairs: S is similar to a unitary, i.e. invertible with
/// unimodular semisimple spectrum.
inline CheckReport unimodular_semisimple_check(const CMatrix& s, const CMatrix& t, int m,
                                               const ToleranceConfig& tol = {},
                                               double circle_tol = 1e-6) {
  require_square(s, "unimodular_semisimple_check");
  require_same_dim(s, t, "unimodular_semisimple_check");
  CheckReport rep;
  const ScaledResidual hyp =
      sandwiched_residual(t, s, DKind::Delta, m, s, /*q=*/0);
  rep.details["delta_residual"] = hyp.relative();
  if (!hyp.within(tol)) {
    rep.hypothesis_violations.emplace_back("delta^m(I) != 0", hyp.relative());
    rep.hypotheses_ok = false;
  }
  if (!is_power_bounded(s, tol)) {
    rep.hypothesis_violations.emplace_back("S not power bounded", 1.0);
    rep.hypotheses_ok = false;
  }
  if (!is_power_bounded(t, tol)) {
    rep.hypothesis_violations.emplace_back("T not power bounded", 1.0);
    rep.hypotheses_ok = false;
  }
  if (!rep.hypotheses_ok) return rep;

  bool ok = detail::rank_of(s, tol) == s.rows();
  double worst_circle = 0.0;
  int worst_pole = 1;
  for (const auto& g : eigen_data(s)) {
    worst_circle = std::max(worst_circle, std::abs(std::abs(g.value) - 1.0));
    worst_pole = std::max(worst_pole, ascent_descent(s, g.value, tol).pole_order);
  }
  rep.details["invertible"] = ok ? 1.0 : 0.0;
  rep.details["circle_distance"] = worst_circle;
  rep.details["max_pole_order"] = worst_pole;
  ok = ok && worst_circle <= circle_tol && worst_pole == 1;
  rep.conclusion_ok = ok;
  return rep;
}

/// Point-spectrum-on-the-circle check: Delta^m_{A*,A}(Q) = 0 with Q injective
/// forces |lambda| = 1; residual eps at order m perturbs |lambda| by
/// O(eps^{1/m}), hence the widened tolerance.
inline CheckReport point_spectrum_circle_check(const CMatrix& a, const CMatrix& q, int m,
                                               const ToleranceConfig& tol = {}) {
  require_square(a, "point_spectrum_circle_check");
  require_same_dim(a, q, "point_spectrum_circle_check");
  CheckReport rep;
  const double q_scale = std::max(1.0, fro(q));
  const double herm = fro(q - CMatrix(q.adjoint()));
  if (herm > tol.abs_floor + tol.zero_rel * q_scale) {
    rep.hypothesis_violations.emplace_back("Q not Hermitian", herm / q_scale);
    rep.hypotheses_ok = false;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (q + CMatrix(q.adjoint())));
  const double lam_min = es.eigenvalues().minCoeff();
  const double lam_max = es.eigenvalues().maxCoeff();
  if (lam_min < -(tol.abs_floor + tol.zero_rel * q_scale)) {
    rep.hypothesis_violations.emplace_back("Q not PSD", -lam_min);
    rep.hypotheses_ok = false;
  }
  OperatorPair pair(a.adjoint(), a, DKind::Delta);
  const ClosedPower dq = d_power_closed_scaled(pair, q, m);
  rep.details["delta_q_residual"] = dq.scale > 0 ? fro(dq.value) / dq.scale : fro(dq.value);
  if (fro(dq.value) > tol.abs_floor + tol.zero_rel * dq.scale) {
    rep.hypothesis_violations.emplace_back("Delta^m(Q) != 0", rep.details["delta_q_residual"]);
    rep.hypotheses_ok = false;
  }
  const double inj_thresh =
      tol.zero_rel * std::max(lam_max, 0.0) * static_cast<double>(q.rows()) + tol.abs_floor;
  rep.details["q_min_eigenvalue"] = lam_min;
  if (lam_min <= inj_thresh) {
    // Q singular: the corollary says nothing, the check is vacuous
    rep.hypothesis_violations.emplace_back("Q not injective", lam_min);
    rep.hypotheses_ok = false;
    return rep;
  }
  if (!rep.hypotheses_ok) return rep;
  const double widened = std::pow(tol.zero_rel, 1.0 / static_cast<double>(m));
  double worst = 0.0;
  for (const auto& g : eigen_data(a)) worst = std::max(worst, std::abs(std::abs(g.value) - 1.0));
  rep.details["circle_distance"] = worst;
  rep.conclusion_ok = worst <= widened;
  return rep;
}

}  // namespace qil
