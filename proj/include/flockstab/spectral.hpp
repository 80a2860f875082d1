#pragma once

// Per-mode characteristic polynomials of the periodic system and linear
// stability classification of the resulting spectrum.

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "flockstab/conditions.hpp"
#include "flockstab/model.hpp"
#include "flockstab/parallel.hpp"
#include "flockstab/polynomial.hpp"

namespace flockstab {

inline constexpr double kStabilityTolerance = 1e-9;
/// Largest n for which the geometric multiplicity of the zero eigenvalue is
/// checked on the dense periodic matrix.
inline constexpr int kRankCheckLimit = 64;

/// Determinant of the mode matrix as a polynomial in the eigenvalue nu.
struct CharPoly {
  double phi = 0.0;  // mode angle, reduced to [0, 2pi)
  std::vector<cplx> coeffs;

  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }

  cplx operator()(cplx nu) const noexcept {
    cplx acc{};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * nu + *it;
    return acc;
  }

  double scale() const noexcept {
    double s = 0.0;
    for (const cplx& a : coeffs) s = std::max(s, std::abs(a));
    return s;
  }
};

namespace detail {

inline double reduce_angle(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(phi, two_pi);
  if (r < 0.0) r += two_pi;
  return r >= two_pi ? 0.0 : r;
}

// Laplace expansion along the first row; sizes here are 2 or 3.
inline Polynomial determinant(const std::vector<Polynomial>& m, int size) {
  if (size == 1) return m[0];
  Polynomial det;
  for (int col = 0; col < size; ++col) {
    std::vector<Polynomial> minor;
    minor.reserve((size - 1) * (size - 1));
    for (int r = 1; r < size; ++r)
      for (int c = 0; c < size; ++c)
        if (c != col) minor.push_back(m[r * size + c]);
    const Polynomial term = m[col] * determinant(minor, size - 1);
    det = col % 2 == 0 ? det + term : det - term;
  }
  return det;
}

}  // namespace detail

/// Characteristic polynomial Q(nu, phi) of mode angle phi: the determinant of
/// g_x S_x(phi) + nu g_v S_v(phi) - nu^2 I (gains scaling their agent's row),
/// expanded exactly in polynomial arithmetic.
inline CharPoly char_poly(const FlockSpec& spec, double phi) {
  const int types = spec.type_count();
  const Eigen::MatrixXcd sx = coupling_symbol(spec, Channel::Position, phi);
  const Eigen::MatrixXcd sv = coupling_symbol(spec, Channel::Velocity, phi);
  std::vector<Polynomial> m;
  m.reserve(types * types);
  for (int k = 0; k < types; ++k) {
    const AgentParams& a = spec.agent(k);
    for (int c = 0; c < types; ++c) {
      m.push_back(Polynomial{a.g_x * sx(k, c), a.g_v * sv(k, c), k == c ? -1.0 : 0.0});
    }
  }
  std::vector<cplx> coeffs = detail::determinant(m, types).coeffs();
  coeffs.resize(2 * types + 1);
  return {detail::reduce_angle(phi), std::move(coeffs)};
}

/// Constant term of Q(nu, phi) from its closed form.
inline cplx a0_constant_term(const FlockSpec& spec, double phi) {
  if (spec.arrangement() == Arrangement::TriatomicNN) {
    return g_x_product(spec) *
           D_func(spec.agent(0).rho_x[1], spec.agent(1).rho_x[1], spec.agent(2).rho_x[1], phi);
  }
  const DiatomicSymbols s = diatomic_symbols(spec, phi);
  return g_x_product(spec) * (s.mu_x[0] * s.mu_x[1] - s.lambda_x[0] * s.lambda_x[1]);
}

/// d a0 / d phi at phi = 0, differentiated analytically.
inline cplx a0_derivative_at_zero(const FlockSpec& spec) {
  if (spec.arrangement() == Arrangement::TriatomicNN) {
    return g_x_product(spec) *
           D_derivative(spec.agent(0).rho_x[1], spec.agent(1).rho_x[1], spec.agent(2).rho_x[1], 0.0);
  }
  const DiatomicSymbols s = diatomic_symbols(spec, 0.0);
  const DiatomicSymbols ds = diatomic_symbol_derivatives(spec, 0.0);
  return g_x_product(spec) * (ds.mu_x[0] * s.mu_x[1] + s.mu_x[0] * ds.mu_x[1] -
                              ds.lambda_x[0] * s.lambda_x[1] - s.lambda_x[0] * ds.lambda_x[1]);
}

struct ModeSpectrum {
  int mode = 0;
  double phi = 0.0;
  std::vector<cplx> eigenvalues;  // real part descending
  std::vector<double> residuals;  // |Q(nu, phi)| per eigenvalue
  double zero_threshold = 0.0;    // |nu| below this counts as a zero eigenvalue
  double coefficient_scale = 0.0;  // max |a_i|
};

/// Zero-eigenvalue threshold for a polynomial of the given degree and scale.
inline double zero_threshold(double coefficient_scale, int degree) {
  return 1e-8 * (1.0 + std::pow(coefficient_scale, 1.0 / degree));
}

inline ModeSpectrum mode_roots(const CharPoly& cp) {
  ModeSpectrum ms;
  ms.phi = cp.phi;
  ms.eigenvalues = polynomial_roots(cp.coeffs);
  std::sort(ms.eigenvalues.begin(), ms.eigenvalues.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  for (const cplx& nu : ms.eigenvalues) ms.residuals.push_back(std::abs(cp(nu)));
  ms.coefficient_scale = cp.scale();
  ms.zero_threshold = zero_threshold(ms.coefficient_scale, cp.degree());
  return ms;
}

/// Eigenvalues of the periodic system, grouped by mode phi_m = 2 pi m / n.
inline std::vector<ModeSpectrum> spectrum_periodic(const FlockSpec& spec, int n) {
  if (n < 3) throw SizeError("need at least 3 agents per type, got " + std::to_string(n));
  std::vector<ModeSpectrum> out(n);
  parallel_for(n, [&](int m) {
    const double phi = 2.0 * std::numbers::pi * m / n;
    out[m] = mode_roots(char_poly(spec, phi));
    out[m].mode = m;
  });
  return out;
}

enum class StabilityStatus { Stable, MarginallyUnstable, Unstable };

inline std::string_view to_string(StabilityStatus s) {
  switch (s) {
    case StabilityStatus::Stable: return "Stable";
    case StabilityStatus::MarginallyUnstable: return "MarginallyUnstable";
    case StabilityStatus::Unstable: return "Unstable";
  }
  return "";
}

struct StabilityVerdict {
  StabilityStatus status = StabilityStatus::MarginallyUnstable;
  /// Algebraic count of zero eigenvalues over all modes.
  int zero_multiplicity = 0;
  int zero_multiplicity_at_origin = 0;
  std::optional<int> geometric_multiplicity;
  /// Largest real part among the nonzero eigenvalues.
  double max_real_part = -std::numeric_limits<double>::infinity();
  int witness_mode = -1;
  double witness_phi = 0.0;
  cplx witness_nu{};
  double tolerance = kStabilityTolerance;
  std::optional<cplx> a2_at_zero;
};

/// Classifies a full periodic spectrum. Stable needs exactly two zero
/// eigenvalues, both on mode 0, with every other real part below -tol;
/// any real part above +tol is Unstable; everything else is marginal.
inline StabilityVerdict classify(std::span<const ModeSpectrum> spectra,
                                 double tol = kStabilityTolerance) {
  StabilityVerdict v;
  v.tolerance = tol;
  for (const ModeSpectrum& ms : spectra) {
    for (const cplx& nu : ms.eigenvalues) {
      if (std::abs(nu) < ms.zero_threshold) {
        ++v.zero_multiplicity;
        if (ms.phi == 0.0) ++v.zero_multiplicity_at_origin;
        continue;
      }
      if (nu.real() > v.max_real_part) {
        v.max_real_part = nu.real();
        v.witness_mode = ms.mode;
        v.witness_phi = ms.phi;
        v.witness_nu = nu;
      }
    }
  }
  if (v.max_real_part > tol) {
    v.status = StabilityStatus::Unstable;
  } else if (v.zero_multiplicity == 2 && v.zero_multiplicity_at_origin == 2 &&
             v.max_real_part < -tol) {
    v.status = StabilityStatus::Stable;
  } else {
    v.status = StabilityStatus::MarginallyUnstable;
  }
  return v;
}

/// Number of zero singular values of the dense system matrix.
inline int null_space_dimension(const SystemMatrix& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m.entries);
  const auto& s = svd.singularValues();
  const double cutoff = 1e-9 * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  int count = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) < cutoff) ++count;
  return count;
}

/// Spectrum, classification and the zero-eigenvalue certificate: the
/// geometric multiplicity from the dense matrix rank for n <= 64, otherwise
/// a nonvanishing a_2(0) next to the algebraic double zero.
inline StabilityVerdict analyze_stability(const FlockSpec& spec, int n,
                                          double tol = kStabilityTolerance) {
  const std::vector<ModeSpectrum> spectra = spectrum_periodic(spec, n);
  StabilityVerdict v = classify(spectra, tol);
  const CharPoly origin = char_poly(spec, 0.0);
  v.a2_at_zero = origin.coeffs[2];
  if (n <= kRankCheckLimit) {
    v.geometric_multiplicity = null_space_dimension(assemble_periodic(spec, n));
    if (v.status == StabilityStatus::Stable && *v.geometric_multiplicity != 1)
      v.status = StabilityStatus::MarginallyUnstable;
  } else if (v.status == StabilityStatus::Stable &&
             std::abs(*v.a2_at_zero) <= tol * std::max(1.0, origin.scale())) {
    v.status = StabilityStatus::MarginallyUnstable;
  }
  return v;
}

}  // namespace flockstab
