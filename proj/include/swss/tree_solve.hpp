#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace swss {

/// One edge of the class/pool bipartite graph, stored by index.
struct Edge {
  int cls = 0;
  int pool = 0;

  friend auto operator==(const Edge&, const Edge&) -> bool = default;
};

/// A leaf-peeling order of a tree over the nodes {classes} ∪ {pools}.
/// Node ids: classes are 0..I-1, pools are I..I+J-1.
struct TreeElimination {
  struct Step {
    int node = 0;  // leaf being removed
    int edge = 0;  // its single remaining edge
  };
  std::vector<Step> steps;
  int root = 0;  // the node left after all |E| peelings
};

template <typename Scalar>
struct TreeEdgeSolution {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;  // one per edge
  Scalar residual{0};  // leftover right-hand side at the root node
};

/// Solves the node-balance system
///   sum_{e incident to v} coef(v, e) * u_e = rhs_v   for every node v
/// on a tree by leaf elimination. The system has one more equation than
/// unknowns; the root equation is not enforced and its leftover is returned
/// as `residual` so callers can test consistency.
///
/// `coef(node, edge)` must be nonzero for every incident pair.
template <typename Scalar, typename NodeCoef>
auto solve_tree_edges(const TreeElimination& order,
                      const std::vector<Edge>& edges, int num_classes,
                      NodeCoef&& coef,
                      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs)
    -> TreeEdgeSolution<Scalar> {
  TreeEdgeSolution<Scalar> out;
  out.values.setZero(static_cast<Eigen::Index>(edges.size()));
  for (const auto& step : order.steps) {
    const Edge& e = edges[static_cast<std::size_t>(step.edge)];
    const int class_node = e.cls;
    const int pool_node = num_classes + e.pool;
    const int other = step.node == class_node ? pool_node : class_node;
    const Scalar value = rhs(step.node) / coef(step.node, step.edge);
    out.values(step.edge) = value;
    rhs(other) -= coef(other, step.edge) * value;
    rhs(step.node) = Scalar(0);
  }
  out.residual = rhs(order.root);
  return out;
}

}  // namespace swss
