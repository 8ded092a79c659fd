#include "swss/random_network.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace swss {

namespace {

auto log_uniform(std::mt19937_64& rng, double lo, double hi) -> double {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

auto uniform(std::mt19937_64& rng, double lo, double hi) -> double {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

auto random_simplex_point(std::mt19937_64& rng, int k) -> Eigen::VectorXd {
  Eigen::VectorXd p(k);
  for (int i = 0; i < k; ++i) p(i) = uniform(rng, 0.05, 1.0);
  return p / p.sum();
}

auto random_crp_network_with_xi(std::mt19937_64& rng, int num_classes,
                                int num_pools, Eigen::VectorXd& xi_star)
    -> NetworkSpec {
  const int I = num_classes;
  const int J = num_pools;
  NetworkSpec s;
  for (int i = 0; i < I; ++i) s.classes.push_back("c" + std::to_string(i + 1));
  for (int j = 0; j < J; ++j) s.pools.push_back("p" + std::to_string(j + 1));

  // grow the tree from the edge (class 0, pool 0)
  std::vector<int> pending;
  for (int i = 1; i < I; ++i) pending.push_back(i);
  for (int j = 1; j < J; ++j) pending.push_back(I + j);
  std::shuffle(pending.begin(), pending.end(), rng);
  std::vector<int> placed_classes{0};
  std::vector<int> placed_pools{0};
  s.edges.push_back({0, 0});
  for (int node : pending) {
    if (node < I) {
      std::uniform_int_distribution<std::size_t> pick(0, placed_pools.size() - 1);
      s.edges.push_back({node, placed_pools[pick(rng)]});
      placed_classes.push_back(node);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, placed_classes.size() - 1);
      s.edges.push_back({placed_classes[pick(rng)], node - I});
      placed_pools.push_back(node - I);
    }
  }
  const auto E = static_cast<Eigen::Index>(s.edges.size());

  s.mu.resize(E);
  s.mu_hat.resize(E);
  for (Eigen::Index e = 0; e < E; ++e) {
    s.mu(e) = log_uniform(rng, 0.5, 4.0);
    s.mu_hat(e) = uniform(rng, -0.5, 0.5);
  }
  s.nu.resize(J);
  s.nu_hat.resize(J);
  for (int j = 0; j < J; ++j) {
    s.nu(j) = log_uniform(rng, 0.5, 4.0);
    s.nu_hat(j) = uniform(rng, -1.0, 2.0);
  }
  xi_star.resize(E);
  Eigen::VectorXd pool_sum = Eigen::VectorXd::Zero(J);
  for (Eigen::Index e = 0; e < E; ++e) {
    xi_star(e) = uniform(rng, 0.1, 1.0);
    pool_sum(s.edges[static_cast<std::size_t>(e)].pool) += xi_star(e);
  }
  s.lambda = Eigen::VectorXd::Zero(I);
  for (Eigen::Index e = 0; e < E; ++e) {
    const Edge& ed = s.edges[static_cast<std::size_t>(e)];
    xi_star(e) /= pool_sum(ed.pool);
    s.lambda(ed.cls) += s.mu(e) * s.nu(ed.pool) * xi_star(e);
  }
  s.lambda_hat.resize(I);
  for (int i = 0; i < I; ++i) s.lambda_hat(i) = uniform(rng, -1.0, 1.0);
  return s;
}

auto random_crp_network(std::mt19937_64& rng, int num_classes, int num_pools)
    -> NetworkSpec {
  Eigen::VectorXd xi;
  return random_crp_network_with_xi(rng, num_classes, num_pools, xi);
}

auto random_crp_network_bounded(std::mt19937_64& rng, int max_classes,
                                int max_pools) -> NetworkSpec {
  std::uniform_int_distribution<int> ci(1, max_classes);
  std::uniform_int_distribution<int> pj(1, max_pools);
  const int I = ci(rng);
  const int J = pj(rng);
  return random_crp_network(rng, I, J);
}

}  // namespace swss
