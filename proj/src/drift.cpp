#include "swss/drift.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include <Eigen/LU>

#include "swss/errors.hpp"

namespace swss {

namespace {

auto positive_part(double v) -> double { return std::max(v, 0.0); }
auto negative_part(double v) -> double { return std::max(-v, 0.0); }

// M_i = sum_j mu_ij psi_ij
auto weighted_row_sums(const ValidatedNetwork& net, const Eigen::VectorXd& mu,
                       const Eigen::VectorXd& psi) -> Eigen::VectorXd {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(net.num_classes());
  for (int e = 0; e < net.num_edges(); ++e) out(net.edge(e).cls) += mu(e) * psi(e);
  return out;
}

auto assemble(const ValidatedNetwork& net, const Eigen::VectorXd& mu,
              Edge anchor) -> DriftModel {
  if (!net.find_edge(anchor.cls, anchor.pool)) {
    std::ostringstream msg;
    msg << "anchor (" << anchor.cls << ", " << anchor.pool << ") is not an edge";
    throw Error(ErrorKind::AnchorNotEdge, msg.str());
  }
  const int I = net.num_classes();
  const int J = net.num_pools();
  DriftModel model;
  model.anchor = anchor;
  model.B1.resize(I, I);
  model.B2 = Eigen::MatrixXd::Zero(I, J);
  const Eigen::VectorXd e_hat = Eigen::VectorXd::Unit(J, anchor.pool);
  for (int k = 0; k < I; ++k) {
    const Eigen::VectorXd psi = solve_psi(net, Eigen::VectorXd::Unit(I, k), e_hat);
    model.B1.col(k) = weighted_row_sums(net, mu, psi);
  }
  for (int j = 0; j < J; ++j) {
    if (j == anchor.pool) continue;
    const Eigen::VectorXd psi = solve_psi(net, Eigen::VectorXd::Zero(I),
                                          Eigen::VectorXd::Unit(J, j) - e_hat);
    model.B2.col(j) = weighted_row_sums(net, mu, psi);
  }
  model.sigma = (2.0 * net.spec.lambda.array()).sqrt().matrix();
  return model;
}

}  // namespace

auto solve_psi(const ValidatedNetwork& net, const Eigen::VectorXd& alpha,
               const Eigen::VectorXd& beta) -> Eigen::VectorXd {
  const int I = net.num_classes();
  const int J = net.num_pools();
  if (alpha.size() != I || beta.size() != J) {
    throw Error(ErrorKind::PreconditionFailed, "flow map argument has wrong size");
  }
  const double gap = std::abs(alpha.sum() - beta.sum());
  if (gap > 1e-10 * (1.0 + alpha.lpNorm<1>() + beta.lpNorm<1>())) {
    std::ostringstream msg;
    msg << "row and column totals differ by " << gap;
    throw Error(ErrorKind::BalanceViolated, msg.str());
  }
  Eigen::VectorXd rhs(I + J);
  rhs << alpha, beta;
  auto unit = [](int, int) { return 1.0; };
  return solve_tree_edges<double>(net.elimination, net.spec.edges, I, unit, rhs)
      .values;
}

auto default_anchor(const ValidatedNetwork& net) -> Edge {
  return *std::min_element(net.spec.edges.begin(), net.spec.edges.end(),
                           [](const Edge& a, const Edge& b) {
                             return std::tie(a.cls, a.pool) < std::tie(b.cls, b.pool);
                           });
}

auto build_drift(const ValidatedNetwork& net, const FluidSolution& fluid,
                 Edge anchor) -> DriftModel {
  DriftModel model = assemble(net, net.spec.mu, anchor);
  const NetworkSpec& s = net.spec;
  model.h = s.lambda_hat;
  for (int e = 0; e < net.num_edges(); ++e) {
    const Edge& ed = net.edge(e);
    model.h(ed.cls) -= s.mu(e) * fluid.xi_star(e) * s.nu_hat(ed.pool) +
                       s.mu_hat(e) * fluid.z_star(e);
  }
  return model;
}

auto build_drift_nth(const ValidatedNetwork& net, const FluidSolution& fluid,
                     const NthSystemParams& nth, Edge anchor) -> DriftModel {
  validate_nth(net, nth);
  DriftModel model = assemble(net, nth.mu_n, anchor);
  const double rn = std::sqrt(static_cast<double>(nth.n));
  Eigen::VectorXd served = Eigen::VectorXd::Zero(net.num_classes());
  for (int e = 0; e < net.num_edges(); ++e) {
    const Edge& ed = net.edge(e);
    served(ed.cls) += nth.mu_n(e) * fluid.xi_star(e) *
                      static_cast<double>(nth.N_n[static_cast<std::size_t>(ed.pool)]);
  }
  model.h = (nth.lambda_n - served) / rn;
  return model;
}

auto recentered(const DriftModel& model, double vartheta,
                const Eigen::VectorXd& p) -> DriftModel {
  DriftModel out = model;
  out.h = -vartheta * p;
  return out;
}

void check_simplex(const Eigen::VectorXd& u, Eigen::Index size) {
  if (u.size() != size || (u.array() < -1e-12).any() ||
      std::abs(u.sum() - 1.0) > 1e-12) {
    throw Error(ErrorKind::NotASimplexPoint, "control is not a simplex point");
  }
}

auto eval_drift(const DriftModel& model, const Eigen::VectorXd& x,
                const Eigen::VectorXd& uc, const Eigen::VectorXd& us)
    -> Eigen::VectorXd {
  check_simplex(uc, model.B1.rows());
  check_simplex(us, model.B2.cols());
  const double total = x.sum();
  return model.h - model.B1 * (x - positive_part(total) * uc) +
         negative_part(total) * (model.B2 * us);
}

auto eval_drift_primitive(const ValidatedNetwork& net, const Eigen::VectorXd& mu,
                          const Eigen::VectorXd& h, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& uc, const Eigen::VectorXd& us)
    -> Eigen::VectorXd {
  check_simplex(uc, net.num_classes());
  check_simplex(us, net.num_pools());
  const double total = x.sum();
  const Eigen::VectorXd psi =
      solve_psi(net, x - positive_part(total) * uc, -negative_part(total) * us);
  return h - weighted_row_sums(net, mu, psi);
}

auto eval_drift_scaled(const ValidatedNetwork& net, const Eigen::VectorXd& mu_n,
                       const Eigen::VectorXd& h_n, const Eigen::VectorXd& z_breve)
    -> Eigen::VectorXd {
  return h_n - weighted_row_sums(net, mu_n, z_breve);
}

auto eval_drift_decomposed(const ValidatedNetwork& net, const DriftModel& model_n,
                           const Eigen::VectorXd& x_breve,
                           const Eigen::VectorXd& z_breve) -> Eigen::VectorXd {
  const int I = net.num_classes();
  const int J = net.num_pools();
  Eigen::VectorXd q = x_breve;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(J);
  for (int e = 0; e < net.num_edges(); ++e) {
    const Edge& ed = net.edge(e);
    q(ed.cls) -= z_breve(e);
    y(ed.pool) -= z_breve(e);
  }
  const double zeta = std::min(q.sum(), y.sum());
  const double total = x_breve.sum();
  // q = (zeta + <e,x>^+) u^c and y = (zeta + <e,x>^-) u^s
  Eigen::VectorXd uc = Eigen::VectorXd::Unit(I, 0);
  Eigen::VectorXd us = Eigen::VectorXd::Unit(J, 0);
  if (q.sum() > 0.0) uc = q / q.sum();
  if (y.sum() > 0.0) us = y / y.sum();
  return model_n.h - model_n.B1 * (x_breve - positive_part(total) * uc) +
         negative_part(total) * (model_n.B2 * us) +
         zeta * (model_n.B1 * uc + model_n.B2 * us);
}

auto left_weights(const DriftModel& model) -> Eigen::VectorXd {
  const Eigen::Index I = model.B1.rows();
  return model.B1.transpose().partialPivLu().solve(Eigen::VectorXd::Ones(I));
}

auto swss_from_drift(const DriftModel& model, const Eigen::VectorXd& p) -> double {
  const Eigen::VectorXd w = left_weights(model);
  return -w.dot(model.h) / w.dot(p);
}

auto gains_from_B1(const DriftModel& model) -> Eigen::MatrixXd {
  const Eigen::VectorXd w = left_weights(model);
  const Eigen::Index I = w.size();
  Eigen::MatrixXd out(I, I);
  for (Eigen::Index i = 0; i < I; ++i) out.row(i) = w.transpose() / w(i);
  return out;
}

auto idleness_margin(const DriftModel& model) -> IdlenessMargin {
  const Eigen::VectorXd row = model.B2.transpose() * left_weights(model);
  IdlenessMargin out;
  out.margin = 1.0 + row.minCoeff(&out.pool);
  return out;
}

}  // namespace swss
