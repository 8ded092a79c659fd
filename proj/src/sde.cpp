#include "swss/sde.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "swss/errors.hpp"

namespace swss {

auto barv_control(const ValidatedNetwork& net, Edge anchor) -> ControlFunction {
  if (!net.find_edge(anchor.cls, anchor.pool)) {
    std::ostringstream msg;
    msg << "anchor (" << anchor.cls << ", " << anchor.pool << ") is not an edge";
    throw Error(ErrorKind::AnchorNotEdge, msg.str());
  }
  const Eigen::VectorXd uc = Eigen::VectorXd::Unit(net.num_classes(), anchor.cls);
  const Eigen::VectorXd us = Eigen::VectorXd::Unit(net.num_pools(), anchor.pool);
  ControlFunction c;
  c.eval = [uc, us](const Eigen::VectorXd&) { return std::make_pair(uc, us); };
  c.constant = anchor;
  return c;
}

auto simulate_sde(const DriftModel& model, const ControlFunction& control,
                  const Eigen::VectorXd& x0, double dt, double horizon,
                  std::uint64_t seed, int replication, int thin) -> SdeTrajectory {
  const Eigen::Index I = model.B1.rows();
  if (!(dt > 0.0) || !(horizon >= dt) || thin < 1) {
    throw Error(ErrorKind::PreconditionFailed, "need dt > 0, horizon >= dt and thin >= 1");
  }
  if (x0.size() != I) throw Error(ErrorKind::PreconditionFailed, "initial state has wrong size");

  SdeTrajectory out;
  out.dt = dt;
  out.thin = thin;
  out.steps = static_cast<std::int64_t>(std::floor(horizon / dt * (1.0 + 1e-12)));
  out.seed = seed;
  out.replication = replication;
  out.samples.resize(I, out.steps / thin + 1);
  out.samples.col(0) = x0;

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replication)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  const Eigen::VectorXd noise_scale = model.sigma * std::sqrt(dt);

  // constant controls reduce the drift to h - B1 x + s^+ B1 u^c + s^- B2 u^s
  Eigen::VectorXd plus_dir;
  Eigen::VectorXd minus_dir;
  if (control.constant) {
    const auto [uc, us] = control.eval(x0);
    check_simplex(uc, I);
    check_simplex(us, model.B2.cols());
    plus_dir = model.B1 * uc;
    minus_dir = model.B2 * us;
  }

  Eigen::VectorXd x = x0;
  Eigen::VectorXd b(I);
  for (std::int64_t k = 1; k <= out.steps; ++k) {
    if (control.constant) {
      const double s = x.sum();
      b.noalias() = model.h - model.B1 * x;
      if (s > 0.0) {
        b += s * plus_dir;
      } else {
        b -= s * minus_dir;
      }
    } else {
      const auto [uc, us] = control.eval(x);
      b = eval_drift(model, x, uc, us);
    }
    x += b * dt;
    for (Eigen::Index i = 0; i < I; ++i) x(i) += noise_scale(i) * normal(rng);
    if (!std::isfinite(x.sum())) {
      std::ostringstream msg;
      msg << "state left the reals at step " << k;
      throw Error(ErrorKind::NonFiniteState, msg.str());
    }
    if (k % thin == 0) out.samples.col(k / thin) = x;
  }
  return out;
}

auto simulate_sde_replications(const DriftModel& model, const ControlFunction& control,
                               const Eigen::VectorXd& x0, double dt, double horizon,
                               std::uint64_t seed, int reps, int threads, int thin)
    -> std::vector<SdeTrajectory> {
  std::vector<SdeTrajectory> out(static_cast<std::size_t>(std::max(reps, 0)));
  std::vector<std::exception_ptr> errors(out.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < reps; r = next++) {
      try {
        out[static_cast<std::size_t>(r)] =
            simulate_sde(model, control, x0, dt, horizon, seed, r, thin);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, std::max(reps, 1));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

auto estimate_idleness(const std::vector<SdeTrajectory>& trajs, double burn_in, int batches)
    -> IdlenessEstimate {
  if (!(burn_in >= 0.0 && burn_in < 0.9) || batches < 2) {
    throw Error(ErrorKind::PreconditionFailed, "burn-in must lie in [0, 0.9) and batches >= 2");
  }
  std::vector<double> means;
  for (const auto& tr : trajs) {
    const Eigen::Index K = tr.samples.cols();
    const auto first = static_cast<Eigen::Index>(std::ceil(burn_in * static_cast<double>(K - 1)));
    const Eigen::Index count = K - first;
    if (count < batches) continue;
    for (int bidx = 0; bidx < batches; ++bidx) {
      const Eigen::Index a = first + count * bidx / batches;
      const Eigen::Index e = first + count * (bidx + 1) / batches;
      double acc = 0.0;
      for (Eigen::Index k = a; k < e; ++k) acc += std::max(-tr.samples.col(k).sum(), 0.0);
      means.push_back(acc / static_cast<double>(e - a));
    }
  }
  if (means.empty()) throw Error(ErrorKind::EmptyTrajectory, "too few samples after burn-in");
  IdlenessEstimate est;
  est.batches = static_cast<int>(means.size());
  const auto m = static_cast<double>(means.size());
  for (double v : means) est.mean += v / m;
  double var = 0.0;
  for (double v : means) var += (v - est.mean) * (v - est.mean);
  est.stderr_ = std::sqrt(var / (m - 1.0) / m);
  return est;
}

auto window_means(const std::vector<SdeTrajectory>& trajs, int windows,
                  const std::function<double(const Eigen::VectorXd&)>& f)
    -> std::vector<double> {
  if (trajs.empty() || windows < 1) throw Error(ErrorKind::EmptyTrajectory, "no trajectories");
  std::vector<double> out(static_cast<std::size_t>(windows), 0.0);
  for (const auto& tr : trajs) {
    const Eigen::Index K = tr.samples.cols() - 1;  // sample 0 is the initial state
    if (K < windows) throw Error(ErrorKind::EmptyTrajectory, "fewer samples than windows");
    for (int w = 0; w < windows; ++w) {
      const Eigen::Index a = 1 + K * w / windows;
      const Eigen::Index e = 1 + K * (w + 1) / windows;
      double acc = 0.0;
      for (Eigen::Index k = a; k < e; ++k) acc += f(tr.samples.col(k));
      out[static_cast<std::size_t>(w)] += acc / static_cast<double>(e - a) /
                                          static_cast<double>(trajs.size());
    }
  }
  return out;
}

}  // namespace swss
