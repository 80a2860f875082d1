#pragma once

// Numerical check of the small-root structure of Q(z, t) near the origin:
// with a_0(0) = a_1(0) = 0, a_2(0) != 0 and a_0'(0) != 0, the two roots that
// vanish at t = 0 follow +-sqrt(c t), c = -a_0'(0) / a_2(0).

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "flockstab/model.hpp"
#include "flockstab/polynomial.hpp"
#include "flockstab/spectral.hpp"

namespace flockstab {

/// One-parameter family of polynomials Q(., t) with the derivative data the
/// tangency prediction needs.
struct PolynomialFamily {
  std::function<std::vector<cplx>(double)> coefficients;
  cplx a0_prime;    // d a_0 / dt at t = 0
  cplx a2_at_zero;  // a_2(0)

  cplx c() const { return -a0_prime / a2_at_zero; }
};

/// Q(nu, phi) of a spec, with the curve parameter t taken as the mode angle.
inline PolynomialFamily family_from_spec(const FlockSpec& spec) {
  return {[spec](double t) { return char_poly(spec, t).coeffs; }, a0_derivative_at_zero(spec),
          char_poly(spec, 0.0).coeffs[2]};
}

enum class Branch { Plus, Minus };

inline std::string_view to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

struct RootCurve {
  Branch branch = Branch::Plus;
  std::vector<double> t_grid;  // ordered by |t| descending, approaching 0
  std::vector<cplx> roots;

  double sign() const noexcept { return branch == Branch::Plus ? 1.0 : -1.0; }
};

struct BranchTracking {
  RootCurve plus;
  RootCurve minus;
  cplx c;
  double disk_radius = 0.0;     // 2 sqrt(|c| max|t|)
  std::vector<int> disk_counts;  // roots inside the disk, per grid point

  bool two_root_count_holds() const {
    return std::all_of(disk_counts.begin(), disk_counts.end(), [](int k) { return k == 2; });
  }
};

/// Logarithmic grid of `count` points from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < count; ++i) g[i] = std::pow(10.0, a + (b - a) * i / (count - 1));
  return g;
}

inline constexpr double kHypothesisTolerance = 1e-10;

inline BranchTracking track_branches(const PolynomialFamily& family, std::span<const double> t_grid,
                                     double hypothesis_tol = kHypothesisTolerance) {
  if (t_grid.empty()) throw Error("empty t grid");
  const bool negative = t_grid.front() < 0.0;
  for (double t : t_grid)
    if (!std::isfinite(t) || t == 0.0 || (t < 0.0) != negative)
      throw Error("t grid must be nonzero, finite and of one sign");

  const std::vector<cplx> origin = family.coefficients(0.0);
  double scale = 0.0;
  for (const cplx& a : origin) scale = std::max(scale, std::abs(a));
  if (origin.size() < 3 || std::abs(origin[0]) > hypothesis_tol * std::max(1.0, scale) ||
      std::abs(origin[1]) > hypothesis_tol * std::max(1.0, scale))
    throw HypothesisViolated("a_0(0) and a_1(0) must vanish");
  if (std::abs(family.a2_at_zero) <= hypothesis_tol)
    throw HypothesisViolated("a_2(0) vanishes");
  if (std::abs(family.a0_prime) <= hypothesis_tol)
    throw HypothesisViolated("a_0'(0) vanishes");

  std::vector<double> grid(t_grid.begin(), t_grid.end());
  std::sort(grid.begin(), grid.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });

  BranchTracking out;
  out.c = family.c();
  out.plus.branch = Branch::Plus;
  out.minus.branch = Branch::Minus;
  out.disk_radius = 2.0 * std::sqrt(std::abs(out.c) * std::abs(grid.front()));

  auto nearest = [](const std::vector<cplx>& roots, cplx target) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < roots.size(); ++i)
      if (std::abs(roots[i] - target) < std::abs(roots[best] - target)) best = i;
    return best;
  };
  auto gap_to_others = [](const std::vector<cplx>& roots, std::size_t idx) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < roots.size(); ++i)
      if (i != idx) g = std::min(g, std::abs(roots[i] - roots[idx]));
    return g;
  };

  for (std::size_t step = 0; step < grid.size(); ++step) {
    const double t = grid[step];
    const std::vector<cplx> roots = polynomial_roots(family.coefficients(t));
    std::size_t ip, im;
    if (step == 0) {
      const cplx predicted = std::sqrt(out.c * t);
      ip = nearest(roots, predicted);
      im = nearest(roots, -predicted);
      for (const auto& [idx, target] : {std::pair{ip, predicted}, std::pair{im, -predicted}}) {
        const double d = std::abs(roots[idx] - target);
        for (std::size_t i = 0; i < roots.size(); ++i)
          if (i != idx && std::abs(std::abs(roots[i] - target) - d) <= 1e-9 * std::abs(predicted))
            throw BranchAmbiguity("two roots equally close to the predicted branch at t=" +
                                  std::to_string(t));
      }
    } else {
      const cplx prev_p = out.plus.roots.back();
      const cplx prev_m = out.minus.roots.back();
      ip = nearest(roots, prev_p);
      im = nearest(roots, prev_m);
      if (std::abs(roots[ip] - prev_p) >= 0.5 * gap_to_others(roots, ip) ||
          std::abs(roots[im] - prev_m) >= 0.5 * gap_to_others(roots, im))
        throw BranchAmbiguity("branch continuation jumped at t=" + std::to_string(t) +
                              "; refine the grid");
    }
    if (ip == im)
      throw BranchAmbiguity("both branches claim the same root at t=" + std::to_string(t));

    out.plus.t_grid.push_back(t);
    out.plus.roots.push_back(roots[ip]);
    out.minus.t_grid.push_back(t);
    out.minus.roots.push_back(roots[im]);
    out.disk_counts.push_back(static_cast<int>(std::count_if(
        roots.begin(), roots.end(), [&](cplx z) { return std::abs(z) < out.disk_radius; })));
  }
  return out;
}

inline BranchTracking track_branches(const FlockSpec& spec, std::span<const double> t_grid,
                                     double hypothesis_tol = kHypothesisTolerance) {
  return track_branches(family_from_spec(spec), t_grid, hypothesis_tol);
}

/// |root(t) - s sqrt(ct)| / |sqrt(ct)| at each grid point.
inline std::vector<double> tangency_ratios(const RootCurve& curve, cplx c) {
  std::vector<double> r;
  r.reserve(curve.roots.size());
  for (std::size_t i = 0; i < curve.roots.size(); ++i) {
    const cplx predicted = curve.sign() * std::sqrt(c * curve.t_grid[i]);
    r.push_back(std::abs(curve.roots[i] - predicted) / std::abs(predicted));
  }
  return r;
}

struct TangencyProfile {
  std::vector<double> decade_sup;  // finest decade first
  double finest = 0.0;
  bool monotone = false;
  bool passes = false;
};

/// Per-decade suprema of the tangency ratio. The curve passes when the ratio
/// shrinks decade over decade towards t = 0 (allowing `jitter` relative
/// growth), spans at least two decades and ends below `threshold`.
inline TangencyProfile tangency_profile(const RootCurve& curve, cplx c, double jitter = 0.10,
                                        double threshold = 0.05) {
  TangencyProfile prof;
  if (curve.roots.empty()) return prof;
  const std::vector<double> ratios = tangency_ratios(curve, c);
  double t_min = std::numeric_limits<double>::infinity(), t_max = 0.0;
  for (double t : curve.t_grid) {
    t_min = std::min(t_min, std::abs(t));
    t_max = std::max(t_max, std::abs(t));
  }
  const int decades = std::max(1, static_cast<int>(std::floor(std::log10(t_max / t_min) + 1e-9)));
  prof.decade_sup.assign(decades, 0.0);
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    int d = static_cast<int>(std::floor(std::log10(std::abs(curve.t_grid[i]) / t_min) + 1e-9));
    d = std::clamp(d, 0, decades - 1);
    prof.decade_sup[d] = std::max(prof.decade_sup[d], ratios[i]);
  }
  prof.finest = prof.decade_sup.front();
  prof.monotone = true;
  for (int d = 0; d + 1 < decades; ++d)
    if (prof.decade_sup[d] > (1.0 + jitter) * prof.decade_sup[d + 1]) prof.monotone = false;
  prof.passes = prof.monotone && decades >= 2 && prof.finest < threshold;
  return prof;
}

/// Supremum of the tangency ratio over the finest decade of the grid.
inline double tangency_ratio(const RootCurve& curve, cplx c) {
  return tangency_profile(curve, c).finest;
}

struct AngleReport {
  double degrees = 0.0;
  double deviation = 0.0;  // from the nearest multiple of 90 degrees
};

/// Angle between the limiting directions of two curves through the origin,
/// each taken from its root at the smallest |t|.
inline AngleReport orthogonality_angle(const RootCurve& a, const RootCurve& b) {
  if (a.roots.empty() || b.roots.empty()) throw Error("empty root curve");
  const cplx da = a.roots.back();
  const cplx db = b.roots.back();
  double diff = std::abs(std::arg(da) - std::arg(db)) * 180.0 / std::numbers::pi;
  if (diff > 180.0) diff = 360.0 - diff;
  AngleReport r;
  r.degrees = diff;
  r.deviation = std::abs(diff - 90.0 * std::round(diff / 90.0));
  return r;
}

}  // namespace flockstab
