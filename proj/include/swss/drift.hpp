#pragma once

#include <Eigen/Core>

#include "swss/network.hpp"

namespace swss {

/// Drift data of the piecewise-affine diffusion drift
///   b(x, u) = h - B1 (x - <e,x>^+ u^c) + <e,x>^- B2 u^s.
struct DriftModel {
  Eigen::VectorXd h;      // per class
  Eigen::MatrixXd B1;     // I x I
  Eigen::MatrixXd B2;     // I x J, column anchor.pool is zero
  Edge anchor;            // (i_hat, j_hat)
  Eigen::VectorXd sigma;  // diagonal of Sigma, sqrt(2 lambda)
};

struct IdlenessMargin {
  double margin = 0.0;
  int pool = 0;  // vertex of the pool simplex attaining the minimum
};

/// Unique edge flow with row sums alpha and column sums beta.
/// Throws BalanceViolated unless <e,alpha> = <e,beta>.
auto solve_psi(const ValidatedNetwork& net, const Eigen::VectorXd& alpha,
               const Eigen::VectorXd& beta) -> Eigen::VectorXd;

/// Lexicographically smallest (class, pool) edge.
auto default_anchor(const ValidatedNetwork& net) -> Edge;

auto build_drift(const ValidatedNetwork& net, const FluidSolution& fluid,
                 Edge anchor) -> DriftModel;
auto build_drift_nth(const ValidatedNetwork& net, const FluidSolution& fluid,
                     const NthSystemParams& nth, Edge anchor) -> DriftModel;

/// Copy of `model` with h replaced by -vartheta * p (centering at the
/// synthesized staffing).
auto recentered(const DriftModel& model, double vartheta,
                const Eigen::VectorXd& p) -> DriftModel;

/// Throws NotASimplexPoint unless u is nonnegative with unit sum (1e-12).
void check_simplex(const Eigen::VectorXd& u, Eigen::Index size);

auto eval_drift(const DriftModel& model, const Eigen::VectorXd& x,
                const Eigen::VectorXd& uc, const Eigen::VectorXd& us)
    -> Eigen::VectorXd;

/// Same drift through the flow map: h_i - sum_j mu_ij Psi_ij(x - <e,x>^+ u^c,
/// -<e,x>^- u^s). `mu` is per edge.
auto eval_drift_primitive(const ValidatedNetwork& net, const Eigen::VectorXd& mu,
                          const Eigen::VectorXd& h, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& uc, const Eigen::VectorXd& us)
    -> Eigen::VectorXd;

/// n-th system drift h^n - (mu^n-weighted row sums of z_breve).
auto eval_drift_scaled(const ValidatedNetwork& net, const Eigen::VectorXd& mu_n,
                       const Eigen::VectorXd& h_n, const Eigen::VectorXd& z_breve)
    -> Eigen::VectorXd;

/// The same quantity through the (u, zeta) decomposition recovered from the
/// queue/idleness of (x_breve, z_breve).
auto eval_drift_decomposed(const ValidatedNetwork& net, const DriftModel& model_n,
                           const Eigen::VectorXd& x_breve,
                           const Eigen::VectorXd& z_breve) -> Eigen::VectorXd;

/// -<e, B1^{-1} h> / <e, B1^{-1} p>.
auto swss_from_drift(const DriftModel& model, const Eigen::VectorXd& p) -> double;

/// e^T B1^{-1} as a column vector.
auto left_weights(const DriftModel& model) -> Eigen::VectorXd;

/// gains(i, l) = (e^T B1^{-1})_l / (e^T B1^{-1})_i.
auto gains_from_B1(const DriftModel& model) -> Eigen::MatrixXd;

/// min over pool vertices of 1 + (e^T B1^{-1} B2)_j; positive on every tree.
/// Scales with the normalization of e^T B1^{-1}, which depends on the anchor
/// pool.
auto idleness_margin(const DriftModel& model) -> IdlenessMargin;

}  // namespace swss
