#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qil {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr int kMaxDim = 64;            // largest dense operator size
inline constexpr int kMaxKroneckerDim = 4096; // largest size after a tensor product
inline constexpr int kMaxBinomialOrder = 62;  // C(62,31) is the last one that fits in 64 bits

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct NotPsdError : std::domain_error {
  using std::domain_error::domain_error;
};
struct SingularError : std::domain_error {
  using std::domain_error::domain_error;
};
struct SizeError : std::domain_error {
  using std::domain_error::domain_error;
};
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool entries_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

inline void require_finite(const CMatrix& m, const char* what) {
  if (!entries_finite(m)) throw InvalidInputError(std::string(what) + ": non-finite entries");
}

inline void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw DimensionError(std::string(what) + ": matrix must be square, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline void require_same_dim(const CMatrix& a, const CMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(what) + ": dimension mismatch " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
}

inline double fro(const CMatrix& m) { return m.norm(); }

/// Largest singular value (operator 2-norm).
inline double op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  require_square(a, "commutator");
  require_same_dim(a, b, "commutator");
  return a * b - b * a;
}

/// ||[A,B]|| / (||A|| ||B||), the hypothesis residual used by every theorem check.
inline double commutator_residual(const CMatrix& a, const CMatrix& b) {
  const double na = fro(a), nb = fro(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return fro(commutator(a, b)) / (na * nb);
}

/// Exact binomial coefficient; n is capped so the value fits in 64 bits.
inline std::uint64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) throw DomainError("binomial: invalid arguments");
  if (n > kMaxBinomialOrder) throw DomainError("binomial: order exceeds exact 64-bit range");
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

/// Integer matrix power by repeated squaring; p = 0 yields the identity.
inline CMatrix matrix_power(const CMatrix& m, int p) {
  require_square(m, "matrix_power");
  if (p < 0) throw DomainError("matrix_power: negative exponent");
  const Eigen::Index n = m.rows();
  CMatrix result = CMatrix::Identity(n, n);
  CMatrix base = m;
  while (p > 0) {
    if (p & 1) result = result * base;
    p >>= 1;
    if (p > 0) base = base * base;
  }
  return result;
}

/// Smallest p in [1, dim] with N^p numerically zero, or 0 if N is not nilpotent.
inline int nilpotency_index(const CMatrix& n, double rel_tol = 1e-10) {
  require_square(n, "nilpotency_index");
  const double scale = std::max(1.0, fro(n));
  CMatrix p = n;
  double s = scale;
  for (int k = 1; k <= n.rows(); ++k) {
    if (fro(p) <= rel_tol * s) return k;
    p = p * n;
    s *= scale;
  }
  return 0;
}

}  // namespace qil
