#pragma once

// Closed-form necessary conditions for stability of the periodic
// arrangements, and the instability certificates built from them.

#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flockstab/model.hpp"

namespace flockstab {

inline constexpr double kConditionTolerance = 1e-9;

/// D(a,b,c;t) = abc(e^{it}-1) - (1+a)(1+b)(1+c)(e^{-it}-1).
inline cplx D_func(double a, double b, double c, double t) {
  const cplx i{0.0, 1.0};
  return a * b * c * (std::exp(i * t) - 1.0) -
         (1.0 + a) * (1.0 + b) * (1.0 + c) * (std::exp(-i * t) - 1.0);
}

/// dD/dt.
inline cplx D_derivative(double a, double b, double c, double t) {
  const cplx i{0.0, 1.0};
  return i * a * b * c * std::exp(i * t) + i * (1.0 + a) * (1.0 + b) * (1.0 + c) * std::exp(-i * t);
}

/// E(a,b,c,d) = ab(1 + c + cd).
inline double E_func(double a, double b, double c, double d) { return a * b * (1.0 + c + c * d); }

enum class Overall { NecessaryConditionsHold, InstabilityCertified };

inline std::string_view to_string(Overall o) {
  return o == Overall::InstabilityCertified ? "InstabilityCertified" : "NecessaryConditionsHold";
}

struct ClauseResult {
  std::string id;
  double value = 0.0;
  bool triggered = false;
  std::string description;
};

struct ConditionReport {
  Arrangement arrangement = Arrangement::TriatomicNN;
  double tolerance = kConditionTolerance;
  std::vector<ClauseResult> clauses;
  /// Supporting values in a fixed order.
  std::vector<std::pair<std::string, double>> quantities;
  std::vector<std::string> notes;
  Overall overall = Overall::NecessaryConditionsHold;

  const ClauseResult& clause(std::string_view id) const {
    for (const auto& c : clauses)
      if (c.id == id) return c;
    throw std::out_of_range("no clause " + std::string(id));
  }

  double quantity(std::string_view name) const {
    for (const auto& [k, v] : quantities)
      if (k == name) return v;
    throw std::out_of_range("no quantity " + std::string(name));
  }
};

inline double g_x_product(const FlockSpec& spec) {
  double p = 1.0;
  for (const auto& a : spec.agents()) p *= a.g_x;
  return p;
}

namespace detail {

inline void finish(ConditionReport& r) {
  r.overall = Overall::NecessaryConditionsHold;
  for (const auto& c : r.clauses)
    if (c.triggered) r.overall = Overall::InstabilityCertified;
}

inline double beta_sum_plus_product(const FlockSpec& spec) {
  const AlphaBeta ab = alphas_betas(spec);
  double sum = 0.0, prod = 1.0;
  for (int k = 0; k < 3; ++k) {
    sum += ab[k].x.b(1);
    prod *= ab[k].x.b(1);
  }
  return sum + prod;
}

inline double diatomic_moment(const FlockSpec& spec) {
  const AlphaBeta ab = alphas_betas(spec);
  return ab[1].x.a(1) * (ab[0].x.b(1) + 2.0 * ab[0].x.b(2)) +
         ab[0].x.a(1) * (ab[1].x.b(1) + 2.0 * ab[1].x.b(2));
}

}  // namespace detail

inline ConditionReport triatomic_conditions(const FlockSpec& spec,
                                            double tol = kConditionTolerance) {
  if (spec.arrangement() != Arrangement::TriatomicNN)
    throw WrongArrangement("triatomic conditions need a TriatomicNN spec");
  ConditionReport r;
  r.arrangement = spec.arrangement();
  r.tolerance = tol;

  const AlphaBeta ab = alphas_betas(spec);
  const double g_prod = g_x_product(spec);
  double e_sum = 0.0, beta_sum = 0.0, beta_prod = 1.0;
  bool zero_gain = false;
  for (int k = 0; k < 3; ++k) {
    const AgentParams& a = spec.agent(k);
    const AgentParams& next = spec.agent(k + 1);
    e_sum += E_func(a.g_x, next.g_x, a.rho_x[1], next.rho_x[1]);
    beta_sum += ab[k].x.b(1);
    beta_prod *= ab[k].x.b(1);
    zero_gain = zero_gain || std::abs(a.g_x) <= tol;
  }
  const double moment = beta_sum + beta_prod;

  r.clauses.push_back({"i", g_prod, zero_gain, "some g_x^(k) = 0"});
  r.clauses.push_back(
      {"ii", e_sum, std::abs(e_sum) <= tol, "sum_k E(g_x^(k), g_x^(k+1), rho_x,1^(k), rho_x,1^(k+1)) = 0"});
  r.clauses.push_back({"iii", g_prod * moment, std::abs(g_prod * moment) > tol,
                       "g_x^(1) g_x^(2) g_x^(3) [sum beta_x,1 + prod beta_x,1] != 0"});

  r.quantities = {{"beta_sum", beta_sum},
                  {"beta_product", beta_prod},
                  {"moment_plus_correction", moment},
                  {"g_x_product", g_prod},
                  {"e_sum", e_sum},
                  {"a2_at_zero", -e_sum}};
  detail::finish(r);
  return r;
}

inline ConditionReport diatomic_conditions(const FlockSpec& spec,
                                           double tol = kConditionTolerance) {
  if (spec.arrangement() != Arrangement::DiatomicNNN)
    throw WrongArrangement("diatomic conditions need a DiatomicNNN spec");
  ConditionReport r;
  r.arrangement = spec.arrangement();
  r.tolerance = tol;

  const AlphaBeta ab = alphas_betas(spec);
  const AgentParams& a1 = spec.agent(0);
  const AgentParams& a2 = spec.agent(1);
  const double g_prod = g_x_product(spec);
  const double x_sum = a1.g_x * ab[0].x.a(1) + a2.g_x * ab[1].x.a(1);
  const double v_sum = a1.g_v * ab[0].v.a(1) + a2.g_v * ab[1].v.a(1);
  const double moment = detail::diatomic_moment(spec);

  const bool zero_gain = std::abs(a1.g_x) <= tol || std::abs(a2.g_x) <= tol;
  r.clauses.push_back({"i", g_prod, zero_gain, "g_x^(1) = 0 or g_x^(2) = 0"});
  r.clauses.push_back(
      {"ii.x", x_sum, x_sum <= tol, "g_x^(1) alpha_x,1^(1) + g_x^(2) alpha_x,1^(2) <= 0"});
  r.clauses.push_back(
      {"ii.v", v_sum, v_sum <= tol, "g_v^(1) alpha_v,1^(1) + g_v^(2) alpha_v,1^(2) <= 0"});
  r.clauses.push_back({"iii", g_prod * moment, std::abs(g_prod * moment) > tol,
                       "g_x^(1) g_x^(2) [alpha^(2)(beta_1^(1) + 2 beta_2^(1)) + "
                       "alpha^(1)(beta_1^(2) + 2 beta_2^(2))] != 0"});

  const DiatomicSymbols s = diatomic_symbols(spec, 0.0);
  const cplx bracket_common = -a1.g_x * s.mu_x[0] - a2.g_x * s.mu_x[1];
  const cplx secondary =
      bracket_common + a1.g_v * a2.g_v * (s.mu_v[0] * s.mu_v[1] - s.lambda_v[0] * s.lambda_v[1]);
  const cplx secondary_alt =
      bracket_common + a1.g_v * a2.g_v * (s.mu_v[0] * s.mu_v[1] - s.lambda_v[1] * s.lambda_v[1]);

  r.quantities = {{"moment_plus_correction", moment},
                  {"g_x_product", g_prod},
                  {"x_alpha_sum", x_sum},
                  {"v_alpha_sum", v_sum},
                  {"origin_nu2_bracket", secondary.real()},
                  {"origin_nu2_bracket_alt", secondary_alt.real()}};
  r.notes = {
      "clause i triggers on a vanishing position gain: g_x = 0 factors nu out of a row of the "
      "mode matrix, adding a zero eigenvalue on every mode",
      "origin_nu2_bracket is the phi=0 nu^2 coefficient from the determinant expansion "
      "(lambda_v^(1) lambda_v^(2)); origin_nu2_bracket_alt uses lambda_v^(2) lambda_v^(2) "
      "instead and is informational only"};
  detail::finish(r);
  return r;
}

inline ConditionReport evaluate_conditions(const FlockSpec& spec,
                                           double tol = kConditionTolerance) {
  return spec.arrangement() == Arrangement::TriatomicNN ? triatomic_conditions(spec, tol)
                                                         : diatomic_conditions(spec, tol);
}

/// The scalar whose vanishing is necessary for stability, without the
/// g_x-product prefactor: sum(beta) + prod(beta) for triatomic specs,
/// alpha^(2)(beta_1^(1) + 2 beta_2^(1)) + alpha^(1)(beta_1^(2) + 2 beta_2^(2))
/// for diatomic ones.
inline double necessary_condition_value(const FlockSpec& spec) {
  return spec.arrangement() == Arrangement::TriatomicNN ? detail::beta_sum_plus_product(spec)
                                                         : detail::diatomic_moment(spec);
}

}  // namespace flockstab
