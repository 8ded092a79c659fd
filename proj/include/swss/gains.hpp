#pragma once

#include <Eigen/Core>

#include "swss/network.hpp"

namespace swss {

/// Path gains of the tree: the alternating product of service-rate ratios
/// along the unique path between two nodes.
struct GainTable {
  Eigen::MatrixXd class_to_pool;   // I x J
  Eigen::MatrixXd class_to_class;  // I x I
  Eigen::MatrixXd pool_to_pool;    // J x J
};

/// Data of the second-order staffing program: rates on the edges, the
/// per-class arrival perturbation and the per-pool capacity theta.
struct SecondOrderData {
  Eigen::VectorXd mu;          // per edge
  Eigen::VectorXd lambda_hat;  // per class
  Eigen::VectorXd theta;       // per pool
};

struct SwssResult {
  double vartheta_p = 0.0;
  Eigen::VectorXd kappa;       // per edge
  Eigen::VectorXd theta;       // per pool
  Eigen::VectorXd lambda_hat;  // per class, as used in the program
  Eigen::VectorXd p;
  Eigen::VectorXd R;           // per-class headroom
  Eigen::VectorXd Gamma;
  double anchor_spread = 0.0;  // max relative disagreement across anchors
  double residual = 0.0;       // max residual of the equality system
};

struct Headroom {
  Eigen::VectorXd R;
  Eigen::VectorXd Gamma;
  // vartheta_{e_i}; equals p_i R_i, i.e. R_i evaluated at p = e_i
  Eigen::VectorXd vartheta_unit;
};

auto limiting_second_order(const ValidatedNetwork& net,
                           const FluidSolution& fluid) -> SecondOrderData;
auto nth_second_order(const ValidatedNetwork& net, const FluidSolution& fluid,
                      const NthSystemParams& nth) -> SecondOrderData;

auto compute_gains(const ValidatedNetwork& net) -> GainTable;
auto compute_gains(const ValidatedNetwork& net, const Eigen::VectorXd& mu)
    -> GainTable;

/// Throws InvalidP unless p has I strictly positive entries summing to 1.
void validate_p(const Eigen::VectorXd& p, int num_classes);

/// Closed-form SWSS (evaluated from every anchor class) plus kappa from the
/// leaf-elimination recursion. `p` is only required to be nonnegative with
/// unit sum here; the public entry points require strict positivity.
auto solve_second_order(const ValidatedNetwork& net, const SecondOrderData& data,
                        const Eigen::VectorXd& p) -> SwssResult;

auto compute_swss(const ValidatedNetwork& net, const FluidSolution& fluid,
                  const Eigen::VectorXd& p) -> SwssResult;
auto compute_swss_nth(const ValidatedNetwork& net, const FluidSolution& fluid,
                      const NthSystemParams& nth, const Eigen::VectorXd& p)
    -> SwssResult;

auto class_headroom(const ValidatedNetwork& net, const FluidSolution& fluid,
                    const Eigen::VectorXd& p) -> Headroom;

/// Moves delta units of second-order capacity out of `from_pool` and adds the
/// gain-equivalent amount to `to_pool`. The returned spec has the same SWSS.
/// The n-th system block is dropped since its integer staffing no longer
/// matches.
auto reallocate(const ValidatedNetwork& net, int from_pool, int to_pool,
                double delta) -> NetworkSpec;

/// Dense solve of the square equality system in (kappa, vartheta_p).
/// Independent of the tree recursion; used to cross-check compute_swss.
auto lp_oracle(const ValidatedNetwork& net, const SecondOrderData& data,
               const Eigen::VectorXd& p) -> SwssResult;
auto lp_oracle(const ValidatedNetwork& net, const FluidSolution& fluid,
               const Eigen::VectorXd& p) -> SwssResult;

}  // namespace swss
