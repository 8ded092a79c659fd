#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "swss/drift.hpp"
#include "swss/gains.hpp"
#include "swss/network.hpp"

namespace swss {

/// Integer per-edge staffing of the n-th system. Pool totals match N^n_j
/// exactly; every edge except the designated one of each pool sits at the
/// floor of n z*_ij + sqrt(n) (kappa_ij - (mu_hat_ij / mu_ij) z*_ij).
struct StaffingPlan {
  std::int64_t n = 1;
  std::vector<std::int64_t> N_tilde;        // per edge
  std::vector<std::int64_t> N_tilde_class;  // per class
  std::vector<std::int64_t> N_pool;         // per pool
  std::vector<int> designated;              // per pool, class index
  Eigen::VectorXd target;                   // per edge, unrounded
  double c0 = 0.0;  // max |xi*_ij N_j - N_tilde_ij| / sqrt(n)
};

/// Throws NTooSmall when some edge would get a negative headcount.
auto synthesize_staffing(const ValidatedNetwork& net, const FluidSolution& fluid,
                         const NthSystemParams& nth, const SwssResult& swss)
    -> StaffingPlan;

/// Stationary Markov scheduling rule x -> z(x), z per edge.
class SchedulingPolicy {
 public:
  virtual ~SchedulingPolicy() = default;
  virtual void assign(const std::vector<std::int64_t>& x,
                      std::vector<std::int64_t>& z) const = 0;
  [[nodiscard]] virtual auto name() const -> std::string = 0;
};

using PolicyPtr = std::shared_ptr<const SchedulingPolicy>;

/// Balanced saturation: saturated classes hold exactly N_tilde_ij, the others
/// fill their edges in increasing pool order up to N_tilde_ij; leftover pool
/// capacity then goes to leftover backlog by increasing (class, pool).
auto bsp_policy(const ValidatedNetwork& net, const StaffingPlan& plan) -> PolicyPtr;

/// Queue only at class anchor.cls and idleness only at pool anchor.pool
/// while |x - x_bar|_1 <= m0 * n (the JWC region) and the resulting flow is
/// nonnegative; the BSP action otherwise.
auto constant_control_policy(const ValidatedNetwork& net, const FluidSolution& fluid,
                             const StaffingPlan& plan, Edge anchor, double m0 = 1.0)
    -> PolicyPtr;

/// Per-class queue and per-pool idleness of (x, z).
void queues_and_idleness(const ValidatedNetwork& net,
                         const std::vector<std::int64_t>& N_pool,
                         const std::vector<std::int64_t>& x,
                         const std::vector<std::int64_t>& z,
                         std::vector<std::int64_t>& q, std::vector<std::int64_t>& y);

/// Jump sequence of the n-th system. Record k holds on [t[k], t[k+1]), the
/// last one until `horizon`. x, q, y are flattened row-major per record.
struct Trajectory {
  std::int64_t n = 1;
  int num_classes = 0;
  int num_pools = 0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  int replication = 0;
  std::int64_t arrivals = 0;
  std::int64_t departures = 0;
  std::vector<double> t;
  std::vector<std::int64_t> x;
  std::vector<std::int64_t> q;
  std::vector<std::int64_t> y;

  [[nodiscard]] auto size() const -> std::size_t { return t.size(); }
  [[nodiscard]] auto duration(std::size_t k) const -> double {
    return (k + 1 < t.size() ? t[k + 1] : horizon) - t[k];
  }
};

/// Competing exponential clocks; the stream is seeded with (seed, replication).
auto simulate_ctmc(const ValidatedNetwork& net, const NthSystemParams& nth,
                   const SchedulingPolicy& policy, const std::vector<std::int64_t>& x0,
                   double horizon, std::uint64_t seed, int replication = 0)
    -> Trajectory;

/// Replications 0..reps-1 on up to `threads` workers, stored by index.
auto simulate_ctmc_replications(const ValidatedNetwork& net, const NthSystemParams& nth,
                                const SchedulingPolicy& policy,
                                const std::vector<std::int64_t>& x0, double horizon,
                                std::uint64_t seed, int reps, int threads)
    -> std::vector<Trajectory>;

enum class ScaleMode { Breve, Tilde };

/// Per-record scaled state (x - center) / sqrt(n), I x records.
/// Breve centers at x_bar^n_i = sum_j xi*_ij N^n_j, Tilde at N_tilde_i. Throws
/// ModeMismatch when Tilde is requested without a plan or the plan's n
/// differs from the trajectory's.
auto diffusion_scale(const Trajectory& traj, const ValidatedNetwork& net,
                     const FluidSolution& fluid, const NthSystemParams& nth,
                     const StaffingPlan* plan, ScaleMode mode) -> Eigen::MatrixXd;

auto centering(const ValidatedNetwork& net, const FluidSolution& fluid,
               const NthSystemParams& nth, const StaffingPlan* plan, ScaleMode mode)
    -> Eigen::VectorXd;

struct TrajectoryStats {
  int replications = 0;
  std::uint64_t seed = 0;
  double burn_in = 0.0;
  double observed_time = 0.0;
  std::vector<double> levels{0.5, 0.9, 0.99};
  std::vector<double> norm_quantiles;  // of |x_scaled|
  double mean_idleness = 0.0;          // <e, y> / sqrt(n)
  double tail_slope = 0.0;             // of log P(<e,x>^+ > s | <e,x> > 0)
  double tail_r2 = 0.0;
  int tail_points = 0;
  std::vector<double> window_medians;  // of |x_scaled| per window
};

/// Time-weighted statistics after dropping the first burn_in fraction of each
/// replication. Throws EmptyTrajectory when nothing is left.
auto stationary_stats(const std::vector<Trajectory>& trajs,
                      const std::vector<Eigen::MatrixXd>& scaled, double burn_in,
                      int windows = 4) -> TrajectoryStats;

/// Time-weighted quantile of `values` with weights `weights`.
auto weighted_quantile(std::vector<std::pair<double, double>> value_weight,
                       double level) -> double;

/// V(y) = exp(eps |y|^2 / sqrt(1 + |y|^2)).
auto ctmc_lyapunov(double eps, const Eigen::VectorXd& y) -> double;

/// (generator of the n-th system applied to x -> V(x_tilde(x))) / V, exact.
auto ctmc_generator_ratio(const ValidatedNetwork& net, const NthSystemParams& nth,
                          const StaffingPlan& plan, const SchedulingPolicy& policy,
                          double eps, const std::vector<std::int64_t>& x) -> double;

struct CtmcCertificate {
  double epsilon = 0.0;
  double C0 = 0.0;
  double C1 = 0.0;
  double worst_far_ratio = 0.0;
  std::vector<std::int64_t> worst_state;
  int sample_count = 0;
  double far_radius = 0.0;
  std::uint64_t seed = 0;
};

struct CtmcCheckOptions {
  int box_samples = 2000;        // uniform in the sup-norm box of radius 20
  int rays = 64;                 // directions sampled outward
  std::vector<double> ray_radii{1, 2, 4, 8, 16, 32, 64, 128, 256, 512};
  double far_radius = 8.0;       // in scaled units
  int far_doublings = 2;         // also try 2x and 4x the far radius
  double eps_start = 0.1;
  double eps_floor = 1e-6;
  std::uint64_t seed = 1;
};

/// Samples states around N_tilde and fits C1 = -max_{far} ratio / 2 and the
/// smallest C0 with L V <= C0 - C1 V at every sample. For each eps (halved
/// on failure) the far shell starts at far_radius and may double
/// far_doublings times. Throws PreconditionFailed unless vartheta > 0 and
/// InequalityFailed with the offending state.
auto check_drift_inequality_ctmc(const ValidatedNetwork& net, const NthSystemParams& nth,
                                 const StaffingPlan& plan, const SchedulingPolicy& policy,
                                 double vartheta, const CtmcCheckOptions& options = {})
    -> CtmcCertificate;

}  // namespace swss
