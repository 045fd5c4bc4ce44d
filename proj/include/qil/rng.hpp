#pragma once

#include "qil/matrix.hpp"

#include <numbers>
#include <random>
#include <string_view>

namespace qil {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Splittable sub-seed for (seed, tag, index). Trials seeded through this are
/// independent of execution order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
  std::uint64_t state = seed ^ fnv1a(tag);
  splitmix64(state);
  state ^= 0x5851f42d4c957f2dull * (index + 1);
  return splitmix64(state);
}

/// Deterministic generator for matrices, unitaries and scalars.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double gauss() { return normal_(gen_); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
  int uniform_int(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen_); }

  Complex cgauss() {
    const double re = gauss();
    const double im = gauss();
    return {re, im};
  }

  /// Uniform point on the unit circle.
  Complex unit() {
    const double t = uniform(0.0, 2.0 * std::numbers::pi);
    return {std::cos(t), std::sin(t)};
  }

  CMatrix gaussian(int rows, int cols) {
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = cgauss();
    return m;
  }

  CMatrix real_gaussian(int rows, int cols) {
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = Complex(gauss(), 0.0);
    return m;
  }

  /// Haar-ish random unitary: QR of a complex Gaussian matrix with the R
  /// diagonal phase-normalized.
  CMatrix unitary(int n) { return qr_orthonormalize(gaussian(n, n)); }

  /// Real orthogonal matrix, returned with complex entry type.
  CMatrix orthogonal(int n) { return qr_orthonormalize(real_gaussian(n, n)); }

 private:
  static CMatrix qr_orthonormalize(const CMatrix& g) {
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      const Complex d = r(i, i);
      const double a = std::abs(d);
      q.col(i) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
    }
    return q;
  }

  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qil
