#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "swss/tree_solve.hpp"

namespace swss {

/// Concrete data of the n-th system in the sequence.
struct NthSystemParams {
  std::int64_t n = 1;
  Eigen::VectorXd lambda_n;          // per class
  Eigen::VectorXd mu_n;              // per edge
  std::vector<std::int64_t> N_n;     // servers per pool
};

/// Multiclass multi-pool network in the Halfin-Whitt parametrization.
/// Per-edge vectors (mu, mu_hat) are indexed like `edges`.
struct NetworkSpec {
  std::vector<std::string> classes;
  std::vector<std::string> pools;
  std::vector<Edge> edges;
  Eigen::VectorXd lambda;
  Eigen::VectorXd lambda_hat;
  Eigen::VectorXd mu;
  Eigen::VectorXd mu_hat;
  Eigen::VectorXd nu;
  Eigen::VectorXd nu_hat;
  std::optional<NthSystemParams> nth;
};

/// A NetworkSpec that passed validation, with adjacency and a leaf-elimination
/// order attached. Construct through validate_topology().
struct ValidatedNetwork {
  NetworkSpec spec;
  std::vector<std::vector<int>> edges_of_class;  // edge ids, increasing pool
  std::vector<std::vector<int>> edges_of_pool;   // edge ids, increasing class
  TreeElimination elimination;

  [[nodiscard]] auto num_classes() const -> int {
    return static_cast<int>(spec.classes.size());
  }
  [[nodiscard]] auto num_pools() const -> int {
    return static_cast<int>(spec.pools.size());
  }
  [[nodiscard]] auto num_edges() const -> int {
    return static_cast<int>(spec.edges.size());
  }
  [[nodiscard]] auto edge(int id) const -> const Edge& {
    return spec.edges[static_cast<std::size_t>(id)];
  }
  /// Edge id of (cls, pool), or nullopt when cls is not connected to pool.
  [[nodiscard]] auto find_edge(int cls, int pool) const -> std::optional<int>;
  [[nodiscard]] auto class_index(const std::string& id) const
      -> std::optional<int>;
  [[nodiscard]] auto pool_index(const std::string& id) const
      -> std::optional<int>;
};

struct FluidSolution {
  Eigen::VectorXd xi_star;  // per edge
  Eigen::VectorXd z_star;   // per edge
  Eigen::VectorXd x_star;   // per class
  double residual = 0.0;    // relative critical-load residual
};

/// Second-order quantities of the n-th system.
struct HatParams {
  Eigen::VectorXd lambda_hat;  // per class
  Eigen::VectorXd mu_hat;      // per edge
  Eigen::VectorXd nu_hat;      // per pool
  Eigen::VectorXd theta;       // per pool
};

inline constexpr double kCriticalLoadTolerance = 1e-9;

auto validate_topology(NetworkSpec spec) -> ValidatedNetwork;

/// Unique CRP allocation of the fluid problem, computed by leaf elimination
/// of {sum_j mu_ij nu_j xi_ij = lambda_i, sum_i xi_ij = 1}.
auto solve_fluid(const ValidatedNetwork& net) -> FluidSolution;

/// theta_j = nu_hat_j + sum_i (mu_hat_ij / mu_ij) z*_ij for the limiting data.
auto limiting_theta(const ValidatedNetwork& net, const FluidSolution& fluid)
    -> Eigen::VectorXd;

auto derive_hat_params(const NthSystemParams& nth, const ValidatedNetwork& net,
                       const FluidSolution& fluid) -> HatParams;

/// The n-th system implied by the limiting parameters:
/// lambda^n = n lambda + sqrt(n) lambda_hat, mu^n = mu + mu_hat / sqrt(n),
/// N^n_j = floor(n nu_j + sqrt(n) nu_hat_j).
auto nth_system_from_limits(const ValidatedNetwork& net, std::int64_t n)
    -> NthSystemParams;

/// Checks the positivity/shape invariants of an n-th system against `net`.
void validate_nth(const ValidatedNetwork& net, const NthSystemParams& nth);

}  // namespace swss
