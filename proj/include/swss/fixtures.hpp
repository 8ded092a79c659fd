#pragma once

#include <Eigen/Core>

#include "swss/network.hpp"

namespace swss::fixtures {

/// Classes {1,2}, pools {1,2}, edges (1,1), (1,2), (2,2);
/// mu = (1, 2, 1), lambda = (2, 0.5), nu = (1, 1), nu_hat = (1, 1).
auto n_network() -> NetworkSpec;

/// Classes {1,2}, pools {1,2,3}, edges (1,1), (1,2), (2,2), (2,3).
/// Rates per edge in that order; lambda is derived from xi (per edge, with
/// xi11 = xi23 = 1 forced) so the network is critically loaded.
auto m_network(const Eigen::Vector4d& mu, const Eigen::Vector3d& nu, double xi12,
               const Eigen::Vector2d& lambda_hat, const Eigen::Vector4d& mu_hat,
               const Eigen::Vector3d& nu_hat) -> NetworkSpec;

/// Classes {1,2,3}, pools {1,2}, edges (1,1), (2,1), (2,2), (3,2).
auto w_network(const Eigen::Vector4d& mu, const Eigen::Vector2d& nu, double xi11,
               double xi22, const Eigen::Vector3d& lambda_hat,
               const Eigen::Vector4d& mu_hat, const Eigen::Vector2d& nu_hat)
    -> NetworkSpec;

/// One class, one pool: lambda = mu * nu.
auto single_edge(double mu, double nu, double lambda_hat, double nu_hat)
    -> NetworkSpec;

}  // namespace swss::fixtures
