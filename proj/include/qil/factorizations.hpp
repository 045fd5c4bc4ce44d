#pragma once

#include "qil/matrix.hpp"
#include "qil/tolerance.hpp"

#include <utility>

namespace qil {

namespace detail {
inline Eigen::JacobiSVD<CMatrix> full_svd(const CMatrix& m) {
  return Eigen::JacobiSVD<CMatrix>(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

inline int svd_rank(const Eigen::JacobiSVD<CMatrix>& svd, Eigen::Index rows, Eigen::Index cols,
                    const ToleranceConfig& tol, double scale_floor = 0.0) {
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double thresh =
      tol.rank_rel * std::max(sv(0), scale_floor) * static_cast<double>(std::max(rows, cols));
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++r;
  return r;
}
}  // namespace detail

struct PolarDecomposition {
  CMatrix U;  // unitary when M is invertible, else the partial isometry of the compact SVD
  CMatrix P;  // (M*M)^{1/2}, Hermitian PSD
  int rank = 0;
};

/// M = U * P. Rank decisions go through the SVD threshold, never pivot counts.
inline PolarDecomposition polar_decompose(const CMatrix& m, const ToleranceConfig& tol = {}) {
  require_square(m, "polar_decompose");
  require_finite(m, "polar_decompose");
  const Eigen::Index n = m.rows();
  if (n > kMaxDim) throw SizeError("polar_decompose: dimension exceeds supported maximum");
  auto svd = detail::full_svd(m);
  const int rank = detail::svd_rank(svd, n, n, tol);
  const auto& sv = svd.singularValues();
  CMatrix p = svd.matrixV() * sv.asDiagonal().toDenseMatrix().cast<Complex>() *
              svd.matrixV().adjoint();
  p = 0.5 * (p + CMatrix(p.adjoint()));
  CMatrix u;
  if (rank == n) {
    u = svd.matrixU() * svd.matrixV().adjoint();
  } else {
    u = svd.matrixU().leftCols(rank) * svd.matrixV().leftCols(rank).adjoint();
  }
  return {std::move(u), std::move(p), rank};
}

/// Hermitian PSD square root R with R * R = Q.
inline CMatrix psd_sqrt(const CMatrix& q, const ToleranceConfig& tol = {}) {
  require_square(q, "psd_sqrt");
  require_finite(q, "psd_sqrt");
  const double scale = std::max(1.0, fro(q));
  if (fro(q - CMatrix(q.adjoint())) > tol.abs_floor + tol.zero_rel * scale)
    throw InvalidInputError("psd_sqrt: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (q + CMatrix(q.adjoint())));
  if (es.info() != Eigen::Success) throw NumericalError("psd_sqrt: eigensolver failed");
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -(tol.abs_floor + tol.zero_rel * scale))
      throw NotPsdError("psd_sqrt: negative eigenvalue " + std::to_string(ev(i)));
    if (ev(i) < 0.0) ev(i) = 0.0;
  }
  const Eigen::VectorXd root = ev.cwiseSqrt();
  CMatrix r = es.eigenvectors() * root.asDiagonal().toDenseMatrix().cast<Complex>() *
              es.eigenvectors().adjoint();
  return 0.5 * (r + CMatrix(r.adjoint()));
}

/// {Q^{1/2}, Q^{-1/2}}; throws SingularError when Q is not invertible.
inline std::pair<CMatrix, CMatrix> psd_sqrt_with_inverse(const CMatrix& q,
                                                         const ToleranceConfig& tol = {}) {
  require_square(q, "psd_sqrt");
  const double scale = std::max(1.0, fro(q));
  if (fro(q - CMatrix(q.adjoint())) > tol.abs_floor + tol.zero_rel * scale)
    throw InvalidInputError("psd_sqrt: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (q + CMatrix(q.adjoint())));
  if (es.info() != Eigen::Success) throw NumericalError("psd_sqrt: eigensolver failed");
  const Eigen::VectorXd ev = es.eigenvalues();
  const double lam_max = ev.size() ? ev.maxCoeff() : 0.0;
  const double sing_thresh = tol.rank_rel * std::max(lam_max, 0.0) * static_cast<double>(q.rows());
  Eigen::VectorXd root(ev.size()), inv_root(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -(tol.abs_floor + tol.zero_rel * scale))
      throw NotPsdError("psd_sqrt: negative eigenvalue");
    if (ev(i) <= sing_thresh || ev(i) <= 0.0)
      throw SingularError("psd_sqrt: matrix is singular, inverse root undefined");
    root(i) = std::sqrt(ev(i));
    inv_root(i) = 1.0 / root(i);
  }
  const CMatrix v = es.eigenvectors();
  CMatrix r = v * root.asDiagonal().toDenseMatrix().cast<Complex>() * v.adjoint();
  CMatrix rinv = v * inv_root.asDiagonal().toDenseMatrix().cast<Complex>() * v.adjoint();
  return {0.5 * (r + CMatrix(r.adjoint())), 0.5 * (rinv + CMatrix(rinv.adjoint()))};
}

struct RankBases {
  int rank = 0;
  CMatrix range_basis;     // orthonormal basis of range(M)
  CMatrix cokernel_basis;  // orthonormal basis of ker(M*)
  CMatrix kernel_basis;    // orthonormal basis of ker(M)
};

/// Orthonormal range/kernel data of M; [range_basis | cokernel_basis] is
/// unitary for square M since ker(M*) = range(M)^perp. When M is a matrix
/// power, pass scale_floor = ||base||^k so an all-noise power ranks as zero
/// instead of full.
inline RankBases rank_and_bases(const CMatrix& m, const ToleranceConfig& tol = {},
                                double scale_floor = 0.0) {
  require_finite(m, "rank_and_bases");
  auto svd = detail::full_svd(m);
  const int rank = detail::svd_rank(svd, m.rows(), m.cols(), tol, scale_floor);
  RankBases out;
  out.rank = rank;
  out.range_basis = svd.matrixU().leftCols(rank);
  out.cokernel_basis = svd.matrixU().rightCols(m.rows() - rank);
  out.kernel_basis = svd.matrixV().rightCols(m.cols() - rank);
  return out;
}

inline CMatrix kronecker(const CMatrix& a, const CMatrix& b) {
  require_finite(a, "kronecker");
  require_finite(b, "kronecker");
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > kMaxKroneckerDim || cols > kMaxKroneckerDim)
    throw SizeError("kronecker: result dimension exceeds supported maximum");
  CMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace qil
