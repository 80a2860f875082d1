#pragma once

// Line simulations from the leader-kick initial condition and the transient
// (largest leader-relative deviation) they produce.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flockstab/model.hpp"
#include "flockstab/parallel.hpp"

namespace flockstab {

inline constexpr double kBlowUpGuard = 1e12;
inline constexpr double kDefaultDt = 0.01;
/// Default integration window is this many time units per agent.
inline constexpr double kDefaultWindowPerAgent = 3.0;

/// Acceleration rows of a line system in compressed-row form. Row p gives
/// the acceleration of line position p as a combination of the state
/// [z_0..z_{N-1}, v_0..v_{N-1}], also in line order.
class AccelerationOperator {
 public:
  explicit AccelerationOperator(const SystemMatrix& m) : agents_(m.agent_count()) {
    const int n = agents_;
    std::vector<int> position_of(n);
    for (int p = 0; p < n; ++p) position_of[m.block_index(p)] = p;
    for (int p = 0; p < n; ++p) {
      const int bp = m.block_index(p);
      for (int c = 0; c < 2 * n; ++c) {
        const double expect = c == n + bp ? 1.0 : 0.0;
        if (m.entries(bp, c) != expect)
          throw ShapeError("system matrix position rows must be [0 I]");
      }
    }
    row_start_.push_back(0);
    for (int p = 0; p < n; ++p) {
      const int row = n + m.block_index(p);
      for (int c = 0; c < 2 * n; ++c) {
        const double w = m.entries(row, c);
        if (w == 0.0) continue;
        cols_.push_back(c < n ? position_of[c] : n + position_of[c - n]);
        vals_.push_back(w);
      }
      row_start_.push_back(static_cast<int>(cols_.size()));
    }
  }

  int agent_count() const noexcept { return agents_; }

  /// dy = f(y) for the first-order system y = [z, v].
  void derivative(std::span<const double> y, std::span<double> dy) const {
    const int n = agents_;
    std::copy(y.begin() + n, y.end(), dy.begin());
    for (int p = 0; p < n; ++p) {
      double acc = 0.0;
      for (int k = row_start_[p]; k < row_start_[p + 1]; ++k) acc += vals_[k] * y[cols_[k]];
      dy[n + p] = acc;
    }
  }

 private:
  int agents_;
  std::vector<int> row_start_;
  std::vector<int> cols_;
  std::vector<double> vals_;
};

struct SimulationOptions {
  double kick = 1.0;             // initial velocity of the leader
  double position_offset = 0.0;  // added to every initial position
  int store_stride = 0;          // steps between stored samples; 0 means ceil(0.1/dt)
  double blowup_guard = kBlowUpGuard;
};

/// Signed extremal leader-relative deviation.
struct Extremum {
  double deviation = 0.0;
  double time = 0.0;
  int agent = 0;  // line position, 0 = leader
};

struct Trajectory {
  std::optional<FlockSpec> spec;
  BoundaryType bc = BoundaryType::TypeI;
  int n_per_type = 0;
  int agent_count = 0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> positions;   // samples x agents, line order
  std::vector<double> velocities;  // samples x agents, line order
  /// Extremum and end-window maximum over every integration step, when the
  /// trajectory came from simulate().
  std::optional<Extremum> step_extremum;
  std::optional<double> step_tail_max;

  std::size_t samples() const noexcept { return times.size(); }
  std::span<const double> z(std::size_t i) const {
    return {positions.data() + i * agent_count, static_cast<std::size_t>(agent_count)};
  }
  std::span<const double> v(std::size_t i) const {
    return {velocities.data() + i * agent_count, static_cast<std::size_t>(agent_count)};
  }
};

namespace detail {

inline void track_extremum(std::span<const double> z, double t, Extremum& e) {
  for (int p = 1; p < static_cast<int>(z.size()); ++p) {
    const double d = z[p] - z[0];
    if (std::abs(d) > std::abs(e.deviation)) e = {d, t, p};
  }
}

inline double max_deviation(std::span<const double> z) {
  double m = 0.0;
  for (std::size_t p = 1; p < z.size(); ++p) m = std::max(m, std::abs(z[p] - z[0]));
  return m;
}

constexpr double kTailFraction = 0.05;

}  // namespace detail

/// Classical fixed-step RK4 on the line system from rest, with the leader
/// kicked to velocity `opts.kick`. Throws BlowUp once any state component
/// exceeds the overflow guard.
inline Trajectory simulate(const FlockSpec& spec, int n, BoundaryType bc, double t_max, double dt,
                           const SimulationOptions& opts = {}) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("dt must be positive");
  if (!(t_max >= dt) || !std::isfinite(t_max)) throw Error("t_max must be at least dt");
  const AccelerationOperator op(assemble_line(spec, n, bc));
  const int agents = op.agent_count();
  const long steps = std::lround(t_max / dt);
  const int stride =
      opts.store_stride > 0 ? opts.store_stride : std::max(1, static_cast<int>(std::ceil(0.1 / dt - 1e-9)));
  const double t_end = steps * dt;
  const double tail_start = t_end * (1.0 - detail::kTailFraction);

  Trajectory tr;
  tr.spec = spec;
  tr.bc = bc;
  tr.n_per_type = n;
  tr.agent_count = agents;
  tr.dt = dt;
  const std::size_t expected = static_cast<std::size_t>(steps / stride + 2);
  tr.times.reserve(expected);
  tr.positions.reserve(expected * agents);
  tr.velocities.reserve(expected * agents);

  std::vector<double> y(2 * agents, 0.0);
  for (int p = 0; p < agents; ++p) y[p] = opts.position_offset;
  y[agents] = opts.kick;

  auto store = [&](double t) {
    tr.times.push_back(t);
    tr.positions.insert(tr.positions.end(), y.begin(), y.begin() + agents);
    tr.velocities.insert(tr.velocities.end(), y.begin() + agents, y.end());
  };
  store(0.0);

  Extremum ext;
  double tail_max = 0.0;
  std::vector<double> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
  for (long s = 1; s <= steps; ++s) {
    op.derivative(y, k1);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    op.derivative(tmp, k2);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    op.derivative(tmp, k3);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + dt * k3[i];
    op.derivative(tmp, k4);
    double largest = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      largest = std::max(largest, std::abs(y[i]));
    }
    const double t = s * dt;
    if (!(largest <= opts.blowup_guard)) throw BlowUp(t);

    const std::span<const double> z(y.data(), agents);
    detail::track_extremum(z, t, ext);
    if (t >= tail_start) tail_max = std::max(tail_max, detail::max_deviation(z));
    if (s % stride == 0 || s == steps) store(t);
  }
  tr.step_extremum = ext;
  tr.step_tail_max = tail_max;
  return tr;
}

struct TransientReport {
  double magnitude = 0.0;  // signed extremal deviation from the leader
  double time_at_extremum = 0.0;
  int agent_at_extremum = 0;  // line position, 0 = leader
  double tail_max_deviation = 0.0;
  bool converged = true;
};

/// Extremal leader-relative deviation. `converged` holds when the largest
/// deviation over the last 5% of the window is below 10% of the magnitude.
inline TransientReport transient(const Trajectory& tr) {
  if (tr.samples() == 0) throw Error("empty trajectory");
  Extremum ext;
  for (std::size_t i = 0; i < tr.samples(); ++i) detail::track_extremum(tr.z(i), tr.times[i], ext);
  if (tr.step_extremum && std::abs(tr.step_extremum->deviation) > std::abs(ext.deviation))
    ext = *tr.step_extremum;

  const double t0 = tr.times.front();
  const double t_end = tr.times.back();
  const double tail_start = t_end - detail::kTailFraction * (t_end - t0);
  double tail = tr.step_tail_max.value_or(0.0);
  for (std::size_t i = 0; i < tr.samples(); ++i)
    if (tr.times[i] >= tail_start) tail = std::max(tail, detail::max_deviation(tr.z(i)));

  TransientReport r;
  r.magnitude = ext.deviation;
  r.time_at_extremum = ext.time;
  r.agent_at_extremum = ext.agent;
  r.tail_max_deviation = tail;
  r.converged = ext.deviation == 0.0 || tail < 0.1 * std::abs(ext.deviation);
  return r;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double residual_rms = 0.0;
  int points = 0;
};

/// Ordinary least-squares line through (x, y); nullopt with fewer than two
/// distinct abscissae.
inline std::optional<LinearFit> fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  LinearFit f;
  f.points = static_cast<int>(n);
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  f.residual_rms = std::sqrt(ss_res / n);
  return f;
}

struct ScanOptions {
  double dt = kDefaultDt;
  /// Integration window; defaults to kDefaultWindowPerAgent * N per run.
  std::optional<double> t_max;
  int threads = 0;  // 0: thread_budget()
};

struct ScanPoint {
  int N = 0;
  bool censored = false;
  double magnitude = 0.0;
  double log_magnitude = 0.0;
  double time_at_extremum = 0.0;
  std::optional<double> blowup_time;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  std::optional<LinearFit> fit;  // log|magnitude| against N
  std::string fit_error;
};

/// Transient magnitude for each flock size, and the least-squares slope of
/// log|magnitude| against N. Runs that blow up are censored.
inline ScanResult scan_N(const FlockSpec& spec, BoundaryType bc, std::span<const int> N_values,
                         const ScanOptions& opts = {}) {
  const int types = spec.type_count();
  for (int N : N_values)
    if (N <= 0 || N % types != 0)
      throw ShapeError("N=" + std::to_string(N) + " is not a positive multiple of " +
                       std::to_string(types));

  ScanResult out;
  out.points.resize(N_values.size());
  parallel_for(
      static_cast<int>(N_values.size()),
      [&](int i) {
        ScanPoint& pt = out.points[i];
        pt.N = N_values[i];
        const double t_max = opts.t_max.value_or(kDefaultWindowPerAgent * pt.N);
        try {
          const TransientReport r = transient(simulate(spec, pt.N / types, bc, t_max, opts.dt));
          pt.magnitude = r.magnitude;
          pt.time_at_extremum = r.time_at_extremum;
          if (r.magnitude != 0.0) pt.log_magnitude = std::log(std::abs(r.magnitude));
        } catch (const BlowUp& e) {
          pt.censored = true;
          pt.blowup_time = e.time();
        }
      },
      opts.threads > 0 ? opts.threads : thread_budget());

  std::vector<double> xs, ys;
  for (const ScanPoint& pt : out.points) {
    if (pt.censored || pt.magnitude == 0.0) continue;
    xs.push_back(pt.N);
    ys.push_back(pt.log_magnitude);
  }
  out.fit = fit_line(xs, ys);
  if (!out.fit) out.fit_error = "need at least two uncensored sizes to fit log|magnitude| against N";
  return out;
}

}  // namespace flockstab
