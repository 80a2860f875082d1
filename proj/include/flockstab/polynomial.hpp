#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

#include "flockstab/errors.hpp"

namespace flockstab {

/// Dense polynomial with complex coefficients; coeffs()[i] multiplies x^i.
class Polynomial {
 public:
  using cplx = std::complex<double>;

  Polynomial() = default;
  Polynomial(std::initializer_list<cplx> c) : c_(c) {}
  explicit Polynomial(std::vector<cplx> c) : c_(std::move(c)) {}

  const std::vector<cplx>& coeffs() const noexcept { return c_; }

  /// Index of the highest nonzero coefficient, -1 for the zero polynomial.
  int degree() const noexcept {
    for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i)
      if (c_[i] != cplx{}) return i;
    return -1;
  }

  cplx operator[](std::size_t i) const noexcept { return i < c_.size() ? c_[i] : cplx{}; }

  cplx operator()(cplx x) const noexcept {
    cplx acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return Polynomial{};
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
    return Polynomial(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<cplx> r(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + b[i];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<cplx> r(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] - b[i];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return Polynomial{};
    std::vector<cplx> r(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator*(cplx s, const Polynomial& p) {
    std::vector<cplx> r = p.c_;
    for (auto& v : r) v *= s;
    return Polynomial(std::move(r));
  }

 private:
  std::vector<cplx> c_;
};

namespace detail {

// Parlett-Reinsch balancing by powers of two; leaves eigenvalues unchanged.
inline void balance(Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  constexpr double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / radix;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace detail

/// Relative size below which a trailing low-order coefficient is treated as
/// an exact zero and deflated as a root at the origin.
inline constexpr double kDeflationThreshold = 1e-13;

/// All roots of sum_i coeffs[i] x^i from the eigenvalues of the balanced
/// companion matrix, each refined by a few guarded Newton steps.
inline std::vector<std::complex<double>> polynomial_roots(
    std::span<const std::complex<double>> coeffs) {
  using cplx = std::complex<double>;
  int d = static_cast<int>(coeffs.size()) - 1;
  if (d < 1) throw DegenerateLeadingCoefficient("polynomial of degree < 1 has no roots");

  double scale = 0.0;
  for (const cplx& a : coeffs) scale = std::max(scale, std::abs(a));
  if (!std::isfinite(scale)) throw DegenerateLeadingCoefficient("non-finite coefficients");
  if (std::abs(coeffs[d]) <= std::numeric_limits<double>::epsilon() * scale || scale == 0.0)
    throw DegenerateLeadingCoefficient("leading coefficient vanishes");

  std::vector<cplx> roots;
  int low = 0;
  while (low < d && std::abs(coeffs[low]) <= kDeflationThreshold * scale) {
    roots.emplace_back(0.0, 0.0);
    ++low;
  }
  const int m = d - low;
  if (m > 0) {
    const cplx lead = coeffs[d];
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) comp(i, m - 1) = -coeffs[low + i] / lead;
    detail::balance(comp);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    const Polynomial p(std::vector<cplx>(coeffs.begin(), coeffs.end()));
    const Polynomial dp = p.derivative();
    for (int i = 0; i < m; ++i) {
      cplx z = es.eigenvalues()[i];
      double res = std::abs(p(z));
      for (int it = 0; it < 3 && res > 0.0; ++it) {
        const cplx slope = dp(z);
        if (slope == cplx{}) break;
        const cplx next = z - p(z) / slope;
        const double next_res = std::abs(p(next));
        if (!(next_res < res)) break;
        z = next;
        res = next_res;
      }
      roots.push_back(z);
    }
  }
  return roots;
}

}  // namespace flockstab
