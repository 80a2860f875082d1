#pragma once

// Independent reference computations for the tests: dense eigen-solves,
// optimal root matching, hand-built permutation blocks and random specs.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <limits>
#include <random>
#include <vector>

#include "flockstab/model.hpp"
#include "flockstab/spectral.hpp"

namespace oracle {

using flockstab::cplx;

/// Dense eigenvalues of a real matrix.
inline std::vector<cplx> dense_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  std::vector<cplx> out(es.eigenvalues().begin(), es.eigenvalues().end());
  return out;
}

/// Minimum-cost perfect matching (Hungarian algorithm, bottleneck-agnostic)
/// between two equally sized point sets; returns the largest matched distance.
inline double matched_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const int n = static_cast<int>(a.size());
  if (static_cast<int>(b.size()) != n) return std::numeric_limits<double>::infinity();
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials formulation.
  std::vector<double> u(n + 1), v(n + 1);
  std::vector<int> p(n + 1), way(n + 1);
  auto cost = [&](int i, int j) { return std::abs(a[i - 1] - b[j - 1]); };
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double worst = 0.0;
  for (int j = 1; j <= n; ++j) worst = std::max(worst, cost(p[j], j));
  return worst;
}

/// Cyclic shift: (P_minus z)_j = z_{j-1}, (P_plus z)_j = z_{j+1}.
inline Eigen::MatrixXd P_minus(int n) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) p(j, (j - 1 + n) % n) = 1.0;
  return p;
}

inline Eigen::MatrixXd P_plus(int n) { return P_minus(n).transpose(); }

/// Periodic system matrix written out block by block from the permutation
/// matrices, without the library's neighbour arithmetic.
inline Eigen::MatrixXd block_periodic(const flockstab::FlockSpec& spec, int n) {
  using flockstab::Arrangement;
  const int T = spec.type_count();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd Pp = P_plus(n), Pm = P_minus(n);
  // (type k, offset j) -> (neighbour type, shift block)
  struct Link {
    int k, j, target;
    const Eigen::MatrixXd* shift;
  };
  std::vector<Link> links;
  if (spec.arrangement() == Arrangement::TriatomicNN) {
    links = {{0, 1, 1, &I},  {0, -1, 2, &Pm}, {1, 1, 2, &I},
             {1, -1, 0, &I}, {2, 1, 0, &Pp},  {2, -1, 1, &I}};
  } else {
    links = {{0, 1, 1, &I},   {0, -1, 1, &Pm}, {0, 2, 0, &Pp},  {0, -2, 0, &Pm},
             {1, 1, 0, &Pp},  {1, -1, 0, &I},  {1, 2, 1, &Pp},  {1, -2, 1, &Pm}};
  }
  const int A = T * n;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * A, 2 * A);
  m.topRightCorner(A, A) = Eigen::MatrixXd::Identity(A, A);
  for (int k = 0; k < T; ++k) {
    const auto& a = spec.agent(k);
    m.block(A + k * n, k * n, n, n) += a.g_x * I;
    m.block(A + k * n, A + k * n, n, n) += a.g_v * I;
  }
  for (const Link& l : links) {
    const auto& a = spec.agent(l.k);
    m.block(A + l.k * n, l.target * n, n, n) += a.g_x * a.rho_x[l.j] * *l.shift;
    m.block(A + l.k * n, A + l.target * n, n, n) += a.g_v * a.rho_v[l.j] * *l.shift;
  }
  return m;
}

/// Random weights: negative, summing to -1 over the arrangement's offsets.
inline flockstab::Weights random_weights(std::mt19937_64& rng, flockstab::Arrangement arr) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  flockstab::Weights w;
  std::vector<int> offs = arr == flockstab::Arrangement::TriatomicNN ? std::vector<int>{-1, 1}
                                                                      : std::vector<int>{-2, -1, 1, 2};
  double total = 0.0;
  for (int j : offs) total += (w[j] = u(rng));
  for (int j : offs) w[j] = -w[j] / total;
  // Absorb the rounding residual so the constraint holds to the last bit.
  w[offs.back()] = -1.0;
  for (std::size_t i = 0; i + 1 < offs.size(); ++i) w[offs.back()] -= w[offs[i]];
  return w;
}

/// Random valid spec with gains in [-2, -0.2].
inline flockstab::FlockSpec random_spec(std::mt19937_64& rng, flockstab::Arrangement arr) {
  std::uniform_real_distribution<double> gain(-2.0, -0.2);
  std::vector<flockstab::AgentParams> agents;
  for (int k = 0; k < flockstab::type_count(arr); ++k) {
    flockstab::AgentParams a;
    a.g_x = gain(rng);
    a.g_v = gain(rng);
    a.rho_x = random_weights(rng, arr);
    a.rho_v = random_weights(rng, arr);
    agents.push_back(a);
  }
  return flockstab::build_spec(arr, agents);
}

/// Union of all per-mode roots.
inline std::vector<cplx> mode_union(const std::vector<flockstab::ModeSpectrum>& spectra) {
  std::vector<cplx> out;
  for (const auto& ms : spectra) out.insert(out.end(), ms.eigenvalues.begin(), ms.eigenvalues.end());
  return out;
}

}  // namespace oracle
