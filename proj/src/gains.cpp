#include "swss/gains.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/LU>

#include "swss/errors.hpp"

namespace swss {

namespace {

// Gains from `root` to every node. Stepping class -> pool multiplies by the
// edge rate; stepping pool -> class divides by it.
auto gains_from_node(const ValidatedNetwork& net, const Eigen::VectorXd& mu,
                     int root) -> Eigen::VectorXd {
  const int I = net.num_classes();
  const int nodes = I + net.num_pools();
  Eigen::VectorXd gain = Eigen::VectorXd::Constant(nodes, -1.0);
  std::vector<int> stack{root};
  gain(root) = 1.0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    const bool is_class = v < I;
    const auto& incident = is_class
                               ? net.edges_of_class[static_cast<std::size_t>(v)]
                               : net.edges_of_pool[static_cast<std::size_t>(v - I)];
    for (int e : incident) {
      const Edge& ed = net.edge(e);
      const int w = is_class ? I + ed.pool : ed.cls;
      if (gain(w) >= 0.0) continue;
      gain(w) = is_class ? gain(v) * mu(e) : gain(v) / mu(e);
      stack.push_back(w);
    }
  }
  return gain;
}

auto equality_residual(const ValidatedNetwork& net, const SecondOrderData& data,
                       const Eigen::VectorXd& p, double vartheta,
                       const Eigen::VectorXd& kappa) -> double {
  Eigen::VectorXd class_eq = -(data.lambda_hat + vartheta * p);
  Eigen::VectorXd pool_eq = -data.theta;
  for (int e = 0; e < net.num_edges(); ++e) {
    const Edge& ed = net.edge(e);
    class_eq(ed.cls) += data.mu(e) * kappa(e);
    pool_eq(ed.pool) += kappa(e);
  }
  return std::max(class_eq.cwiseAbs().maxCoeff(), pool_eq.cwiseAbs().maxCoeff());
}

// kappa by the constructive elimination: strip leaf classes, then repeatedly
// remove the smallest class with exactly one non-leaf pool, finishing with the
// single remaining class whose pools are all leaves.
auto kappa_by_recursion(const ValidatedNetwork& net, const SecondOrderData& data,
                        const Eigen::VectorXd& p, double vartheta)
    -> Eigen::VectorXd {
  const int I = net.num_classes();
  const int J = net.num_pools();
  Eigen::VectorXd kappa = Eigen::VectorXd::Zero(net.num_edges());
  Eigen::VectorXd theta = data.theta;
  std::vector<bool> class_alive(static_cast<std::size_t>(I), true);
  std::vector<bool> edge_alive(static_cast<std::size_t>(net.num_edges()), true);
  std::vector<int> pool_degree(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    pool_degree[static_cast<std::size_t>(j)] =
        static_cast<int>(net.edges_of_pool[static_cast<std::size_t>(j)].size());
  }
  int alive = I;

  auto remove_class = [&](int i) {
    for (int e : net.edges_of_class[static_cast<std::size_t>(i)]) {
      if (!edge_alive[static_cast<std::size_t>(e)]) continue;
      edge_alive[static_cast<std::size_t>(e)] = false;
      --pool_degree[static_cast<std::size_t>(net.edge(e).pool)];
    }
    class_alive[static_cast<std::size_t>(i)] = false;
    --alive;
  };
  auto demand = [&](int i) { return data.lambda_hat(i) + vartheta * p(i); };

  // leaf classes
  if (I > 1) {
    for (int i = 0; i < I; ++i) {
      const auto& incident = net.edges_of_class[static_cast<std::size_t>(i)];
      if (incident.size() != 1) continue;
      const int e = incident.front();
      kappa(e) = demand(i) / data.mu(e);
      theta(net.edge(e).pool) -= kappa(e);
    }
    for (int i = 0; i < I; ++i) {
      if (net.edges_of_class[static_cast<std::size_t>(i)].size() == 1) remove_class(i);
    }
  }

  while (alive > 1) {
    int chosen = -1;
    int hub_edge = -1;
    for (int i = 0; i < I && chosen < 0; ++i) {
      if (!class_alive[static_cast<std::size_t>(i)]) continue;
      int non_leaf = 0;
      int candidate = -1;
      for (int e : net.edges_of_class[static_cast<std::size_t>(i)]) {
        if (edge_alive[static_cast<std::size_t>(e)] &&
            pool_degree[static_cast<std::size_t>(net.edge(e).pool)] > 1) {
          ++non_leaf;
          candidate = e;
        }
      }
      if (non_leaf == 1) {
        chosen = i;
        hub_edge = candidate;
      }
    }
    if (chosen < 0) {
      throw std::logic_error("tree recursion found no class with one non-leaf pool");
    }
    double rest = demand(chosen);
    for (int e : net.edges_of_class[static_cast<std::size_t>(chosen)]) {
      if (!edge_alive[static_cast<std::size_t>(e)] || e == hub_edge) continue;
      kappa(e) = theta(net.edge(e).pool);
      rest -= data.mu(e) * kappa(e);
    }
    kappa(hub_edge) = rest / data.mu(hub_edge);
    theta(net.edge(hub_edge).pool) -= kappa(hub_edge);
    remove_class(chosen);
  }

  for (int i = 0; i < I; ++i) {
    if (!class_alive[static_cast<std::size_t>(i)]) continue;
    for (int e : net.edges_of_class[static_cast<std::size_t>(i)]) {
      if (edge_alive[static_cast<std::size_t>(e)]) kappa(e) = theta(net.edge(e).pool);
    }
  }
  return kappa;
}

}  // namespace

auto limiting_second_order(const ValidatedNetwork& net,
                           const FluidSolution& fluid) -> SecondOrderData {
  return {net.spec.mu, net.spec.lambda_hat, limiting_theta(net, fluid)};
}

auto nth_second_order(const ValidatedNetwork& net, const FluidSolution& fluid,
                      const NthSystemParams& nth) -> SecondOrderData {
  const HatParams hat = derive_hat_params(nth, net, fluid);
  return {nth.mu_n, hat.lambda_hat, hat.theta};
}

auto compute_gains(const ValidatedNetwork& net) -> GainTable {
  return compute_gains(net, net.spec.mu);
}

auto compute_gains(const ValidatedNetwork& net, const Eigen::VectorXd& mu)
    -> GainTable {
  const int I = net.num_classes();
  const int J = net.num_pools();
  GainTable table;
  table.class_to_pool.resize(I, J);
  table.class_to_class.resize(I, I);
  table.pool_to_pool.resize(J, J);
  for (int i = 0; i < I; ++i) {
    const Eigen::VectorXd g = gains_from_node(net, mu, i);
    table.class_to_class.row(i) = g.head(I).transpose();
    table.class_to_pool.row(i) = g.tail(J).transpose();
  }
  for (int j = 0; j < J; ++j) {
    const Eigen::VectorXd g = gains_from_node(net, mu, I + j);
    table.pool_to_pool.row(j) = g.tail(J).transpose();
  }
  return table;
}

void validate_p(const Eigen::VectorXd& p, int num_classes) {
  if (p.size() != num_classes) {
    throw Error(ErrorKind::InvalidP, "p must have one entry per class");
  }
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) > 0.0)) {
      throw Error(ErrorKind::InvalidP, "p has a nonpositive entry");
    }
  }
  if (std::abs(p.sum() - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "p sums to " << p.sum() << ", not 1";
    throw Error(ErrorKind::InvalidP, msg.str());
  }
}

auto solve_second_order(const ValidatedNetwork& net, const SecondOrderData& data,
                        const Eigen::VectorXd& p) -> SwssResult {
  const int I = net.num_classes();
  const GainTable gains = compute_gains(net, data.mu);

  SwssResult out;
  out.p = p;
  out.theta = data.theta;
  out.lambda_hat = data.lambda_hat;
  out.R.resize(I);
  out.Gamma.resize(I);

  Eigen::VectorXd per_anchor(I);
  for (int i = 0; i < I; ++i) {
    const double numerator = gains.class_to_pool.row(i).dot(data.theta) -
                             gains.class_to_class.row(i).dot(data.lambda_hat);
    const double weight = gains.class_to_class.row(i).dot(p);
    per_anchor(i) = numerator / weight;
    if (p(i) > 0.0) {
      out.R(i) = numerator / p(i);
      out.Gamma(i) = weight / p(i);
    } else {
      out.R(i) = std::numeric_limits<double>::infinity();
      out.Gamma(i) = std::numeric_limits<double>::infinity();
    }
  }
  out.vartheta_p = per_anchor(0);
  const double scale = std::max(1.0, std::abs(out.vartheta_p));
  out.anchor_spread =
      (per_anchor.array() - out.vartheta_p).abs().maxCoeff() / scale;
  if (out.anchor_spread > 1e-9) {
    std::ostringstream msg;
    msg << "closed form disagrees across anchor classes (spread "
        << out.anchor_spread << ")";
    throw std::logic_error(msg.str());
  }

  out.kappa = kappa_by_recursion(net, data, p, out.vartheta_p);
  out.residual = equality_residual(net, data, p, out.vartheta_p, out.kappa);
  return out;
}

auto compute_swss(const ValidatedNetwork& net, const FluidSolution& fluid,
                  const Eigen::VectorXd& p) -> SwssResult {
  validate_p(p, net.num_classes());
  return solve_second_order(net, limiting_second_order(net, fluid), p);
}

auto compute_swss_nth(const ValidatedNetwork& net, const FluidSolution& fluid,
                      const NthSystemParams& nth, const Eigen::VectorXd& p)
    -> SwssResult {
  validate_p(p, net.num_classes());
  validate_nth(net, nth);
  return solve_second_order(net, nth_second_order(net, fluid, nth), p);
}

auto class_headroom(const ValidatedNetwork& net, const FluidSolution& fluid,
                    const Eigen::VectorXd& p) -> Headroom {
  const SwssResult base = compute_swss(net, fluid, p);
  const SecondOrderData data = limiting_second_order(net, fluid);
  Headroom out{base.R, base.Gamma, Eigen::VectorXd(net.num_classes())};
  for (int i = 0; i < net.num_classes(); ++i) {
    const Eigen::VectorXd unit = Eigen::VectorXd::Unit(net.num_classes(), i);
    out.vartheta_unit(i) = solve_second_order(net, data, unit).vartheta_p;
  }
  return out;
}

auto reallocate(const ValidatedNetwork& net, int from_pool, int to_pool,
                double delta) -> NetworkSpec {
  if (from_pool == to_pool) {
    throw Error(ErrorKind::SamePool, "source and target pool coincide");
  }
  if (from_pool < 0 || from_pool >= net.num_pools() || to_pool < 0 ||
      to_pool >= net.num_pools()) {
    throw Error(ErrorKind::PreconditionFailed, "pool index out of range");
  }
  const GainTable gains = compute_gains(net);
  const double ratio =
      gains.class_to_pool(0, from_pool) / gains.class_to_pool(0, to_pool);
  NetworkSpec out = net.spec;
  out.nu_hat(from_pool) -= delta;
  out.nu_hat(to_pool) += delta * ratio;
  out.nth.reset();
  return out;
}

auto lp_oracle(const ValidatedNetwork& net, const SecondOrderData& data,
               const Eigen::VectorXd& p) -> SwssResult {
  const int I = net.num_classes();
  const int J = net.num_pools();
  const int E = net.num_edges();
  // unknowns: kappa_e (E of them) then vartheta; rows: classes then pools
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(I + J, E + 1);
  Eigen::VectorXd b(I + J);
  for (int e = 0; e < E; ++e) {
    const Edge& ed = net.edge(e);
    A(ed.cls, e) = data.mu(e);
    A(I + ed.pool, e) = 1.0;
  }
  A.block(0, E, I, 1) = -p;
  b.head(I) = data.lambda_hat;
  b.tail(J) = data.theta;

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (lu.rank() != std::min(A.rows(), A.cols())) {
    throw Error(ErrorKind::SingularSystem, "dense SWSS system is rank deficient");
  }
  const Eigen::VectorXd sol = lu.solve(b);
  SwssResult out;
  out.p = p;
  out.theta = data.theta;
  out.lambda_hat = data.lambda_hat;
  out.kappa = sol.head(E);
  out.vartheta_p = sol(E);
  out.residual = (A * sol - b).cwiseAbs().maxCoeff();
  if (out.residual > 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::SingularSystem, "dense SWSS solve left a residual");
  }
  out.R = Eigen::VectorXd::Constant(I, std::numeric_limits<double>::quiet_NaN());
  out.Gamma = out.R;
  return out;
}

auto lp_oracle(const ValidatedNetwork& net, const FluidSolution& fluid,
               const Eigen::VectorXd& p) -> SwssResult {
  validate_p(p, net.num_classes());
  return lp_oracle(net, limiting_second_order(net, fluid), p);
}

}  // namespace swss
