#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "swss/drift.hpp"

namespace swss {

/// Stationary Markov control x -> (u^c(x), u^s(x)).
struct ControlFunction {
  std::function<std::pair<Eigen::VectorXd, Eigen::VectorXd>(const Eigen::VectorXd&)> eval;
  std::optional<Edge> constant;  // set for the constant vertex control
};

/// u == (e_cls, e_pool). Throws AnchorNotEdge.
auto barv_control(const ValidatedNetwork& net, Edge anchor) -> ControlFunction;

/// Samples every `thin` steps: column k is X at time k * thin * dt.
struct SdeTrajectory {
  double dt = 0.0;
  int thin = 1;
  std::int64_t steps = 0;
  std::uint64_t seed = 0;
  int replication = 0;
  Eigen::MatrixXd samples;  // I x (steps / thin + 1)

  [[nodiscard]] auto sample_time(Eigen::Index k) const -> double {
    return static_cast<double>(k) * thin * dt;
  }
};

/// Euler-Maruyama for dX = b(X, u(X)) dt + Sigma dW with floor(horizon/dt)
/// steps. Throws NonFiniteState with the step index on blow-up.
auto simulate_sde(const DriftModel& model, const ControlFunction& control,
                  const Eigen::VectorXd& x0, double dt, double horizon,
                  std::uint64_t seed, int replication = 0, int thin = 1)
    -> SdeTrajectory;

auto simulate_sde_replications(const DriftModel& model, const ControlFunction& control,
                               const Eigen::VectorXd& x0, double dt, double horizon,
                               std::uint64_t seed, int reps, int threads, int thin = 1)
    -> std::vector<SdeTrajectory>;

struct IdlenessEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  int batches = 0;
};

/// Average of <e, X>^- after the burn-in fraction; standard error from
/// `batches` batch means per replication. Throws EmptyTrajectory.
auto estimate_idleness(const std::vector<SdeTrajectory>& trajs, double burn_in,
                       int batches = 32) -> IdlenessEstimate;

/// Mean over replications of f(X) averaged within each of `windows` equal
/// time windows (no burn-in).
auto window_means(const std::vector<SdeTrajectory>& trajs, int windows,
                  const std::function<double(const Eigen::VectorXd&)>& f)
    -> std::vector<double>;

}  // namespace swss
