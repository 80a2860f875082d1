#pragma once

// Flock models: agent parameters, decentralization constraints and the
// assembled first-order system matrices.
//
// Agents are addressed by their position p on the line, p = 0 being the
// leader at the head. With T agent types, position p carries type p mod T
// and belongs to cell p / T, so that within a cell the types run 1..T from
// the head backwards. A coupling weight rho_j of an agent multiplies the
// state of the agent at position p + j.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flockstab/errors.hpp"

namespace flockstab {

using cplx = std::complex<double>;

enum class Arrangement { TriatomicNN, DiatomicNNN };

constexpr int type_count(Arrangement a) noexcept {
  return a == Arrangement::TriatomicNN ? 3 : 2;
}

/// Largest |offset| an agent interacts with.
constexpr int interaction_reach(Arrangement a) noexcept {
  return a == Arrangement::TriatomicNN ? 1 : 2;
}

inline std::string_view to_string(Arrangement a) {
  return a == Arrangement::TriatomicNN ? "TriatomicNN" : "DiatomicNNN";
}

inline std::optional<Arrangement> parse_arrangement(std::string_view s) {
  if (s == "TriatomicNN") return Arrangement::TriatomicNN;
  if (s == "DiatomicNNN") return Arrangement::DiatomicNNN;
  return std::nullopt;
}

inline constexpr std::array<int, 4> kOffsets{-2, -1, 1, 2};
inline constexpr double kConstraintTolerance = 1e-12;

constexpr int floor_mod(int a, int m) noexcept {
  const int r = a % m;
  return r < 0 ? r + m : r;
}

constexpr int floor_div(int a, int m) noexcept {
  return (a - floor_mod(a, m)) / m;
}

/// Coupling weights rho_j for the neighbor offsets j in {-2,-1,1,2}.
class Weights {
 public:
  Weights() = default;
  Weights(std::initializer_list<std::pair<int, double>> entries) {
    for (const auto& [offset, w] : entries) (*this)[offset] = w;
  }

  double operator[](int offset) const { return w_[slot(offset)]; }
  double& operator[](int offset) { return w_[slot(offset)]; }

  double sum() const { return w_[0] + w_[1] + w_[2] + w_[3]; }

  bool operator==(const Weights&) const = default;

 private:
  static std::size_t slot(int offset) {
    switch (offset) {
      case -2: return 0;
      case -1: return 1;
      case 1: return 2;
      case 2: return 3;
      default: throw std::out_of_range("coupling offset must be one of -2,-1,1,2");
    }
  }

  std::array<double, 4> w_{};
};

struct AgentParams {
  double g_x = 0.0;
  double g_v = 0.0;
  Weights rho_x;
  Weights rho_v;

  bool operator==(const AgentParams&) const = default;
};

/// Offsets to derive from the constraint instead of taking them as given.
struct InferRequest {
  std::optional<int> x_offset;
  std::optional<int> v_offset;
};

class FlockSpec;
FlockSpec build_spec(Arrangement arrangement, std::vector<AgentParams> agents,
                     std::span<const InferRequest> infer, double tolerance);

/// A validated periodic arrangement. Only build_spec creates one.
class FlockSpec {
 public:
  Arrangement arrangement() const noexcept { return arrangement_; }
  int type_count() const noexcept { return flockstab::type_count(arrangement_); }
  int reach() const noexcept { return interaction_reach(arrangement_); }
  const std::vector<AgentParams>& agents() const noexcept { return agents_; }

  /// Agent type k (0-based); type superscripts are taken modulo the type count.
  const AgentParams& agent(int k) const { return agents_[floor_mod(k, type_count())]; }

  bool operator==(const FlockSpec&) const = default;

 private:
  FlockSpec(Arrangement a, std::vector<AgentParams> agents)
      : arrangement_(a), agents_(std::move(agents)) {}

  friend FlockSpec build_spec(Arrangement, std::vector<AgentParams>,
                              std::span<const InferRequest>, double);

  Arrangement arrangement_;
  std::vector<AgentParams> agents_;
};

namespace detail {

inline bool offset_allowed(Arrangement a, int offset) {
  return offset != 0 && std::abs(offset) <= interaction_reach(a);
}

inline void check_channel(Arrangement a, const Weights& w, int agent, char channel,
                          double tolerance) {
  for (int j : kOffsets) {
    if (!std::isfinite(w[j]))
      throw ShapeError("agent " + std::to_string(agent + 1) + ": rho_" + channel +
                       " has a non-finite weight");
    if (!offset_allowed(a, j) && w[j] != 0.0)
      throw ShapeError("agent " + std::to_string(agent + 1) + ": rho_" + channel + " offset " +
                       std::to_string(j) + " is not part of a " +
                       std::string(to_string(a)) + " arrangement");
  }
  const double residual = w.sum() + 1.0;
  if (std::abs(residual) > tolerance) throw ConstraintViolation(agent, channel, residual);
}

inline void infer_weight(Arrangement a, Weights& w, int offset, int agent, char channel) {
  if (!offset_allowed(a, offset))
    throw ShapeError("agent " + std::to_string(agent + 1) + ": cannot infer rho_" + channel +
                     " offset " + std::to_string(offset));
  w[offset] = 0.0;
  w[offset] = -1.0 - w.sum();
}

}  // namespace detail

/// Validates agent parameters against the arrangement and the
/// decentralization constraints (each weight set sums to -1).
///
/// `infer` (empty, or one entry per agent) names weights to complete from
/// the constraint; whatever value they carry on input is discarded.
inline FlockSpec build_spec(Arrangement arrangement, std::vector<AgentParams> agents,
                            std::span<const InferRequest> infer = {},
                            double tolerance = kConstraintTolerance) {
  const int types = type_count(arrangement);
  if (static_cast<int>(agents.size()) != types)
    throw ShapeError(std::string(to_string(arrangement)) + " needs " + std::to_string(types) +
                     " agent types, got " + std::to_string(agents.size()));
  if (!infer.empty() && infer.size() != agents.size())
    throw ShapeError("infer list must have one entry per agent type");

  for (int k = 0; k < types; ++k) {
    AgentParams& a = agents[k];
    if (!std::isfinite(a.g_x) || !std::isfinite(a.g_v))
      throw ShapeError("agent " + std::to_string(k + 1) + ": gains must be finite");
    if (!infer.empty()) {
      if (infer[k].x_offset) detail::infer_weight(arrangement, a.rho_x, *infer[k].x_offset, k, 'x');
      if (infer[k].v_offset) detail::infer_weight(arrangement, a.rho_v, *infer[k].v_offset, k, 'v');
    }
    detail::check_channel(arrangement, a.rho_x, k, 'x', tolerance);
    detail::check_channel(arrangement, a.rho_v, k, 'v', tolerance);
  }
  return FlockSpec(arrangement, std::move(agents));
}

// ---------------------------------------------------------------------------
// Sums and differences of forward/backward weights.

struct MomentPair {
  std::array<double, 2> alpha{};  // index j-1
  std::array<double, 2> beta{};

  double a(int j) const { return alpha.at(j - 1); }
  double b(int j) const { return beta.at(j - 1); }
};

struct AgentMoments {
  MomentPair x;
  MomentPair v;
};

struct AlphaBeta {
  std::vector<AgentMoments> agents;

  const AgentMoments& operator[](int k) const {
    return agents[floor_mod(k, static_cast<int>(agents.size()))];
  }
};

inline AlphaBeta alphas_betas(const FlockSpec& spec) {
  AlphaBeta out;
  for (const AgentParams& a : spec.agents()) {
    AgentMoments m;
    for (int j = 1; j <= 2; ++j) {
      m.x.alpha[j - 1] = a.rho_x[j] + a.rho_x[-j];
      m.x.beta[j - 1] = a.rho_x[j] - a.rho_x[-j];
      m.v.alpha[j - 1] = a.rho_v[j] + a.rho_v[-j];
      m.v.beta[j - 1] = a.rho_v[j] - a.rho_v[-j];
    }
    out.agents.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Periodic-cell geometry and Fourier symbols.

struct Neighbor {
  int type;
  int cell_shift;  // +1: next cell towards the tail
};

constexpr Neighbor neighbor_of(int type, int offset, int types) noexcept {
  return {floor_mod(type + offset, types), floor_div(type + offset, types)};
}

enum class Channel { Position, Velocity };

/// Fourier symbol of one coupling channel on mode angle phi: entry (k, k')
/// collects the weights agent type k puts on type k', including the unit
/// self weight, each multiplied by exp(i*phi*cell_shift).
inline Eigen::MatrixXcd coupling_symbol(const FlockSpec& spec, Channel channel, double phi) {
  const int types = spec.type_count();
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Identity(types, types);
  for (int k = 0; k < types; ++k) {
    const Weights& w = channel == Channel::Position ? spec.agent(k).rho_x : spec.agent(k).rho_v;
    for (int j : kOffsets) {
      if (std::abs(j) > spec.reach()) continue;
      const Neighbor nb = neighbor_of(k, j, types);
      s(k, nb.type) += w[j] * std::polar(1.0, phi * nb.cell_shift);
    }
  }
  return s;
}

/// Circulant eigenvalues of the diatomic next-nearest-neighbor blocks,
/// written out per type: lambda couples to the other type, mu to the own type.
struct DiatomicSymbols {
  std::array<cplx, 2> lambda_x, lambda_v, mu_x, mu_v;
};

inline DiatomicSymbols diatomic_symbols(const FlockSpec& spec, double phi) {
  if (spec.arrangement() != Arrangement::DiatomicNNN)
    throw WrongArrangement("diatomic symbols need a DiatomicNNN spec");
  const cplx e = std::polar(1.0, phi);
  const cplx e_inv = std::conj(e);
  const AgentParams& a1 = spec.agent(0);
  const AgentParams& a2 = spec.agent(1);
  DiatomicSymbols s;
  s.lambda_x = {a1.rho_x[1] + a1.rho_x[-1] * e_inv, a2.rho_x[-1] + a2.rho_x[1] * e};
  s.lambda_v = {a1.rho_v[1] + a1.rho_v[-1] * e_inv, a2.rho_v[-1] + a2.rho_v[1] * e};
  s.mu_x = {1.0 + a1.rho_x[2] * e + a1.rho_x[-2] * e_inv, 1.0 + a2.rho_x[2] * e + a2.rho_x[-2] * e_inv};
  s.mu_v = {1.0 + a1.rho_v[2] * e + a1.rho_v[-2] * e_inv, 1.0 + a2.rho_v[2] * e + a2.rho_v[-2] * e_inv};
  return s;
}

/// phi-derivatives of diatomic_symbols.
inline DiatomicSymbols diatomic_symbol_derivatives(const FlockSpec& spec, double phi) {
  if (spec.arrangement() != Arrangement::DiatomicNNN)
    throw WrongArrangement("diatomic symbols need a DiatomicNNN spec");
  const cplx i{0.0, 1.0};
  const cplx de = i * std::polar(1.0, phi);
  const cplx de_inv = -i * std::polar(1.0, -phi);
  const AgentParams& a1 = spec.agent(0);
  const AgentParams& a2 = spec.agent(1);
  DiatomicSymbols s;
  s.lambda_x = {a1.rho_x[-1] * de_inv, a2.rho_x[1] * de};
  s.lambda_v = {a1.rho_v[-1] * de_inv, a2.rho_v[1] * de};
  s.mu_x = {a1.rho_x[2] * de + a1.rho_x[-2] * de_inv, a2.rho_x[2] * de + a2.rho_x[-2] * de_inv};
  s.mu_v = {a1.rho_v[2] * de + a1.rho_v[-2] * de_inv, a2.rho_v[2] * de + a2.rho_v[-2] * de_inv};
  return s;
}

// ---------------------------------------------------------------------------
// System matrices.

enum class Topology { Circle, LineTypeI, LineTypeII };
enum class BoundaryType { TypeI, TypeII };

inline std::string_view to_string(BoundaryType bc) {
  return bc == BoundaryType::TypeI ? "TypeI" : "TypeII";
}

/// Dense first-order system matrix in block layout: positions of type 1
/// (cells 1..n), type 2, ..., then the velocities in the same order.
struct SystemMatrix {
  int n_per_type = 0;
  int types = 0;
  Topology topology = Topology::Circle;
  Eigen::MatrixXd entries;

  int agent_count() const noexcept { return n_per_type * types; }
  int dimension() const noexcept { return 2 * agent_count(); }

  /// Block-layout index of line position p.
  int block_index(int p) const noexcept { return (p % types) * n_per_type + p / types; }
};

namespace detail {

inline SystemMatrix assemble(const FlockSpec& spec, int n, Topology topology) {
  if (n < 3) throw SizeError("need at least 3 agents per type, got " + std::to_string(n));
  SystemMatrix m;
  m.n_per_type = n;
  m.types = spec.type_count();
  m.topology = topology;
  const int agents = m.agent_count();
  m.entries = Eigen::MatrixXd::Zero(2 * agents, 2 * agents);

  for (int p = 0; p < agents; ++p) m.entries(m.block_index(p), agents + m.block_index(p)) = 1.0;

  const bool circle = topology == Topology::Circle;
  for (int p = circle ? 0 : 1; p < agents; ++p) {
    const int row = agents + m.block_index(p);
    const AgentParams& a = spec.agent(p % m.types);
    for (const Channel ch : {Channel::Position, Channel::Velocity}) {
      const bool pos = ch == Channel::Position;
      const double g = pos ? a.g_x : a.g_v;
      const Weights& w = pos ? a.rho_x : a.rho_v;
      const int col0 = pos ? 0 : agents;
      double center = 1.0;
      for (int j : kOffsets) {
        if (std::abs(j) > spec.reach()) continue;
        int q = p + j;
        if (circle) {
          q = floor_mod(q, agents);
        } else if (q < 0 || q >= agents) {
          // Missing neighbor: Type I folds the weight into the centre,
          // Type II onto the mirrored neighbor.
          if (topology == Topology::LineTypeI) {
            center += w[j];
            continue;
          }
          q = p - j;
        }
        m.entries(row, col0 + m.block_index(q)) += g * w[j];
      }
      m.entries(row, col0 + m.block_index(p)) += g * center;
    }
  }
  return m;
}

}  // namespace detail

/// System on the circle: coupling blocks are circulant.
inline SystemMatrix assemble_periodic(const FlockSpec& spec, int n) {
  return detail::assemble(spec, n, Topology::Circle);
}

/// System on the line with the leader (position 0) held at zero acceleration.
inline SystemMatrix assemble_line(const FlockSpec& spec, int n, BoundaryType bc) {
  return detail::assemble(spec, n,
                          bc == BoundaryType::TypeI ? Topology::LineTypeI : Topology::LineTypeII);
}

}  // namespace flockstab
