#pragma once

#include <random>

#include <Eigen/Core>

#include "swss/network.hpp"

namespace swss {

/// Random critically loaded tree satisfying CRP. The tree is grown by
/// attaching each new node to a uniformly chosen node of the other type;
/// mu and nu are log-uniform on [0.5, 4]; xi* is positive with unit pool
/// sums and lambda is set so that xi* solves the fluid problem.
auto random_crp_network(std::mt19937_64& rng, int num_classes, int num_pools)
    -> NetworkSpec;

/// Same with I and J drawn uniformly from [1, max_classes] x [1, max_pools].
auto random_crp_network_bounded(std::mt19937_64& rng, int max_classes = 8,
                                int max_pools = 8) -> NetworkSpec;

/// Strictly positive point of the simplex in R^k.
auto random_simplex_point(std::mt19937_64& rng, int k) -> Eigen::VectorXd;

/// The positive allocation used to build the last network (for oracle tests).
auto random_crp_network_with_xi(std::mt19937_64& rng, int num_classes,
                                int num_pools, Eigen::VectorXd& xi_star)
    -> NetworkSpec;

}  // namespace swss
