#include "swss/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

#include "swss/errors.hpp"

namespace swss {

namespace {

void require_positive(const Eigen::VectorXd& v, const char* name) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (!(v(k) > 0.0) || !std::isfinite(v(k))) {
      std::ostringstream msg;
      msg << name << "[" << k << "] = " << v(k) << " must be positive";
      throw Error(ErrorKind::NonPositiveParameter, msg.str());
    }
  }
}

void require_finite(const Eigen::VectorXd& v, const char* name) {
  if (!v.allFinite()) {
    throw Error(ErrorKind::NonPositiveParameter,
                std::string(name) + " contains a non-finite value");
  }
}

void require_size(const Eigen::VectorXd& v, Eigen::Index expected,
                  const char* name, ErrorKind kind) {
  if (v.size() != expected) {
    std::ostringstream msg;
    msg << name << " has " << v.size() << " entries, expected " << expected;
    throw Error(kind, msg.str());
  }
}

auto leaf_elimination(int num_classes, int num_pools,
                      const std::vector<Edge>& edges) -> TreeElimination {
  const int num_nodes = num_classes + num_pools;
  std::vector<std::vector<int>> incident(static_cast<std::size_t>(num_nodes));
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    incident[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].cls)]
        .push_back(e);
    incident[static_cast<std::size_t>(
                 num_classes + edges[static_cast<std::size_t>(e)].pool)]
        .push_back(e);
  }
  std::vector<int> degree(static_cast<std::size_t>(num_nodes));
  for (int v = 0; v < num_nodes; ++v) {
    degree[static_cast<std::size_t>(v)] =
        static_cast<int>(incident[static_cast<std::size_t>(v)].size());
  }
  std::vector<bool> edge_alive(edges.size(), true);
  std::vector<bool> node_alive(static_cast<std::size_t>(num_nodes), true);
  std::deque<int> leaves;
  for (int v = 0; v < num_nodes; ++v) {
    if (degree[static_cast<std::size_t>(v)] == 1) leaves.push_back(v);
  }

  TreeElimination order;
  while (!leaves.empty() &&
         order.steps.size() + 1 < static_cast<std::size_t>(num_nodes)) {
    const int v = leaves.front();
    leaves.pop_front();
    if (!node_alive[static_cast<std::size_t>(v)] ||
        degree[static_cast<std::size_t>(v)] != 1) {
      continue;
    }
    int edge_id = -1;
    for (int e : incident[static_cast<std::size_t>(v)]) {
      if (edge_alive[static_cast<std::size_t>(e)]) {
        edge_id = e;
        break;
      }
    }
    const Edge& e = edges[static_cast<std::size_t>(edge_id)];
    const int other = v < num_classes ? num_classes + e.pool : e.cls;
    order.steps.push_back({v, edge_id});
    edge_alive[static_cast<std::size_t>(edge_id)] = false;
    node_alive[static_cast<std::size_t>(v)] = false;
    degree[static_cast<std::size_t>(v)] = 0;
    if (--degree[static_cast<std::size_t>(other)] == 1) {
      leaves.push_back(other);
    }
  }
  for (int v = 0; v < num_nodes; ++v) {
    if (node_alive[static_cast<std::size_t>(v)]) order.root = v;
  }
  return order;
}

}  // namespace

auto ValidatedNetwork::find_edge(int cls, int pool) const -> std::optional<int> {
  if (cls < 0 || cls >= num_classes()) return std::nullopt;
  for (int e : edges_of_class[static_cast<std::size_t>(cls)]) {
    if (edge(e).pool == pool) return e;
  }
  return std::nullopt;
}

auto ValidatedNetwork::class_index(const std::string& id) const
    -> std::optional<int> {
  const auto it = std::find(spec.classes.begin(), spec.classes.end(), id);
  if (it == spec.classes.end()) return std::nullopt;
  return static_cast<int>(it - spec.classes.begin());
}

auto ValidatedNetwork::pool_index(const std::string& id) const
    -> std::optional<int> {
  const auto it = std::find(spec.pools.begin(), spec.pools.end(), id);
  if (it == spec.pools.end()) return std::nullopt;
  return static_cast<int>(it - spec.pools.begin());
}

auto validate_topology(NetworkSpec spec) -> ValidatedNetwork {
  const int I = static_cast<int>(spec.classes.size());
  const int J = static_cast<int>(spec.pools.size());
  const int E = static_cast<int>(spec.edges.size());
  if (I < 1 || J < 1) {
    throw Error(ErrorKind::NotATree, "network needs at least one class and one pool");
  }
  require_size(spec.lambda, I, "lambda", ErrorKind::NonPositiveParameter);
  require_size(spec.lambda_hat, I, "lambda_hat", ErrorKind::NonPositiveParameter);
  require_size(spec.nu, J, "nu", ErrorKind::NonPositiveParameter);
  require_size(spec.nu_hat, J, "nu_hat", ErrorKind::NonPositiveParameter);
  require_size(spec.mu, E, "mu", ErrorKind::EdgeRateMissing);
  require_size(spec.mu_hat, E, "mu_hat", ErrorKind::EdgeRateMissing);

  std::set<std::pair<int, int>> seen;
  for (const Edge& e : spec.edges) {
    if (e.cls < 0 || e.cls >= I || e.pool < 0 || e.pool >= J) {
      throw Error(ErrorKind::NotATree, "edge refers to an unknown class or pool");
    }
    if (!seen.insert({e.cls, e.pool}).second) {
      throw Error(ErrorKind::NotATree, "duplicate edge (" +
                                           spec.classes[static_cast<std::size_t>(e.cls)] +
                                           ", " +
                                           spec.pools[static_cast<std::size_t>(e.pool)] + ")");
    }
  }
  if (E != I + J - 1) {
    std::ostringstream msg;
    msg << "|E| = " << E << " but a tree on " << I << " classes and " << J
        << " pools has " << I + J - 1 << " edges";
    throw Error(ErrorKind::NotATree, msg.str());
  }

  // connectivity by union-find
  std::vector<int> parent(static_cast<std::size_t>(I + J));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  for (const Edge& e : spec.edges) {
    const int a = find(e.cls);
    const int b = find(I + e.pool);
    if (a == b) throw Error(ErrorKind::NotATree, "edge set contains a cycle");
    parent[static_cast<std::size_t>(a)] = b;
  }

  require_positive(spec.lambda, "lambda");
  require_positive(spec.mu, "mu");
  require_positive(spec.nu, "nu");
  require_finite(spec.lambda_hat, "lambda_hat");
  require_finite(spec.mu_hat, "mu_hat");
  require_finite(spec.nu_hat, "nu_hat");

  ValidatedNetwork net;
  net.edges_of_class.resize(static_cast<std::size_t>(I));
  net.edges_of_pool.resize(static_cast<std::size_t>(J));
  for (int e = 0; e < E; ++e) {
    const Edge& ed = spec.edges[static_cast<std::size_t>(e)];
    net.edges_of_class[static_cast<std::size_t>(ed.cls)].push_back(e);
    net.edges_of_pool[static_cast<std::size_t>(ed.pool)].push_back(e);
  }
  auto by_pool = [&](int a, int b) {
    return spec.edges[static_cast<std::size_t>(a)].pool <
           spec.edges[static_cast<std::size_t>(b)].pool;
  };
  auto by_class = [&](int a, int b) {
    return spec.edges[static_cast<std::size_t>(a)].cls <
           spec.edges[static_cast<std::size_t>(b)].cls;
  };
  for (auto& list : net.edges_of_class) std::sort(list.begin(), list.end(), by_pool);
  for (auto& list : net.edges_of_pool) std::sort(list.begin(), list.end(), by_class);
  net.elimination = leaf_elimination(I, J, spec.edges);
  net.spec = std::move(spec);
  if (net.spec.nth) validate_nth(net, *net.spec.nth);
  return net;
}

void validate_nth(const ValidatedNetwork& net, const NthSystemParams& nth) {
  if (nth.n < 1) {
    throw Error(ErrorKind::NonPositiveParameter, "system order n must be >= 1");
  }
  require_size(nth.lambda_n, net.num_classes(), "lambda_n",
               ErrorKind::NonPositiveParameter);
  require_size(nth.mu_n, net.num_edges(), "mu_n", ErrorKind::EdgeRateMissing);
  if (static_cast<int>(nth.N_n.size()) != net.num_pools()) {
    throw Error(ErrorKind::NonPositiveParameter, "N_n must have one entry per pool");
  }
  require_positive(nth.lambda_n, "lambda_n");
  require_positive(nth.mu_n, "mu_n");
  for (std::size_t j = 0; j < nth.N_n.size(); ++j) {
    if (nth.N_n[j] < 1) {
      throw Error(ErrorKind::NonPositiveParameter,
                  "N_n[" + std::to_string(j) + "] must be >= 1");
    }
  }
}

auto solve_fluid(const ValidatedNetwork& net) -> FluidSolution {
  const NetworkSpec& s = net.spec;
  const int I = net.num_classes();
  const int J = net.num_pools();

  Eigen::VectorXd rhs(I + J);
  rhs.head(I) = s.lambda;
  rhs.tail(J).setOnes();
  auto coef = [&](int node, int e) -> double {
    if (node < I) {
      const Edge& ed = net.edge(e);
      return s.mu(e) * s.nu(ed.pool);
    }
    return 1.0;
  };
  const auto sol =
      solve_tree_edges<double>(net.elimination, s.edges, I, coef, rhs);

  const double scale = std::max({1.0, s.lambda.cwiseAbs().maxCoeff()});
  FluidSolution fluid;
  fluid.residual = std::abs(sol.residual) / scale;
  if (fluid.residual > kCriticalLoadTolerance) {
    std::ostringstream msg;
    msg << "fluid balance equations are inconsistent (relative residual "
        << fluid.residual << ")";
    throw Error(ErrorKind::NotCriticallyLoaded, msg.str());
  }
  for (int e = 0; e < net.num_edges(); ++e) {
    if (!(sol.values(e) > 0.0)) {
      const Edge& ed = net.edge(e);
      std::ostringstream msg;
      msg << "xi*(" << s.classes[static_cast<std::size_t>(ed.cls)] << ", "
          << s.pools[static_cast<std::size_t>(ed.pool)] << ") = " << sol.values(e)
          << " is not positive";
      throw Error(ErrorKind::CRPViolated, msg.str());
    }
  }

  fluid.xi_star = sol.values;
  fluid.z_star.resize(net.num_edges());
  fluid.x_star = Eigen::VectorXd::Zero(I);
  for (int e = 0; e < net.num_edges(); ++e) {
    const Edge& ed = net.edge(e);
    fluid.z_star(e) = fluid.xi_star(e) * s.nu(ed.pool);
    fluid.x_star(ed.cls) += fluid.z_star(e);
  }
  return fluid;
}

auto limiting_theta(const ValidatedNetwork& net, const FluidSolution& fluid)
    -> Eigen::VectorXd {
  Eigen::VectorXd theta = net.spec.nu_hat;
  for (int e = 0; e < net.num_edges(); ++e) {
    theta(net.edge(e).pool) +=
        net.spec.mu_hat(e) / net.spec.mu(e) * fluid.z_star(e);
  }
  return theta;
}

auto derive_hat_params(const NthSystemParams& nth, const ValidatedNetwork& net,
                       const FluidSolution& fluid) -> HatParams {
  const NetworkSpec& s = net.spec;
  const double n = static_cast<double>(nth.n);
  const double rn = std::sqrt(n);
  HatParams hat;
  hat.lambda_hat = (nth.lambda_n - n * s.lambda) / rn;
  hat.mu_hat = rn * (nth.mu_n - s.mu);
  hat.nu_hat.resize(net.num_pools());
  for (int j = 0; j < net.num_pools(); ++j) {
    hat.nu_hat(j) =
        rn * (static_cast<double>(nth.N_n[static_cast<std::size_t>(j)]) / n - s.nu(j));
  }
  hat.theta = hat.nu_hat;
  for (int e = 0; e < net.num_edges(); ++e) {
    hat.theta(net.edge(e).pool) += hat.mu_hat(e) / nth.mu_n(e) * fluid.z_star(e);
  }
  return hat;
}

auto nth_system_from_limits(const ValidatedNetwork& net, std::int64_t n)
    -> NthSystemParams {
  if (n < 1) throw Error(ErrorKind::NonPositiveParameter, "n must be >= 1");
  const NetworkSpec& s = net.spec;
  const double nd = static_cast<double>(n);
  const double rn = std::sqrt(nd);
  NthSystemParams nth;
  nth.n = n;
  nth.lambda_n = nd * s.lambda + rn * s.lambda_hat;
  nth.mu_n = s.mu + s.mu_hat / rn;
  nth.N_n.resize(static_cast<std::size_t>(net.num_pools()));
  for (int j = 0; j < net.num_pools(); ++j) {
    // the small offset keeps exact integers from flooring one below
    const double target = nd * s.nu(j) + rn * s.nu_hat(j);
    nth.N_n[static_cast<std::size_t>(j)] =
        static_cast<std::int64_t>(std::floor(target + 1e-9 * std::max(1.0, target)));
  }
  validate_nth(net, nth);
  return nth;
}

}  // namespace swss
