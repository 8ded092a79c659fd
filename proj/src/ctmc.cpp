#include "swss/ctmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "swss/errors.hpp"

namespace swss {

namespace {

auto sqrt_n(std::int64_t n) -> double { return std::sqrt(static_cast<double>(n)); }

class BspPolicy final : public SchedulingPolicy {
 public:
  BspPolicy(const ValidatedNetwork& net, const StaffingPlan& plan)
      : edges_of_class_(net.edges_of_class), edges_(net.spec.edges), plan_(plan) {}

  void assign(const std::vector<std::int64_t>& x,
              std::vector<std::int64_t>& z) const override {
    const std::size_t I = edges_of_class_.size();
    z.assign(edges_.size(), 0);
    std::vector<std::int64_t> cap = plan_.N_pool;
    std::vector<std::int64_t> backlog(I, 0);
    for (std::size_t i = 0; i < I; ++i) {
      const auto& es = edges_of_class_[i];
      if (x[i] > plan_.N_tilde_class[i]) {
        for (int e : es) z[e] = plan_.N_tilde[e];
        backlog[i] = x[i] - plan_.N_tilde_class[i];
      } else {
        std::int64_t rem = x[i];
        for (int e : es) {
          z[e] = std::min(rem, plan_.N_tilde[e]);
          rem -= z[e];
        }
      }
      for (int e : es) cap[edges_[e].pool] -= z[e];
    }
    // work conservation: leftover backlog into leftover capacity
    for (std::size_t i = 0; i < I; ++i) {
      for (int e : edges_of_class_[i]) {
        if (backlog[i] == 0) break;
        auto& c = cap[edges_[e].pool];
        const std::int64_t add = std::min(backlog[i], c);
        z[e] += add;
        backlog[i] -= add;
        c -= add;
      }
    }
  }

  [[nodiscard]] auto name() const -> std::string override { return "bsp"; }

 private:
  std::vector<std::vector<int>> edges_of_class_;
  std::vector<Edge> edges_;
  StaffingPlan plan_;
};

class ConstantControlPolicy final : public SchedulingPolicy {
 public:
  ConstantControlPolicy(const ValidatedNetwork& net, const FluidSolution& fluid,
                        const StaffingPlan& plan, Edge anchor, double m0)
      : net_(net), plan_(plan), anchor_(anchor), m0_(m0), fallback_(net, plan) {
    x_bar_ = Eigen::VectorXd::Zero(net.num_classes());
    for (int e = 0; e < net.num_edges(); ++e) {
      x_bar_(net.edge(e).cls) +=
          fluid.xi_star(e) *
          static_cast<double>(plan.N_pool[static_cast<std::size_t>(net.edge(e).pool)]);
    }
  }

  void assign(const std::vector<std::int64_t>& x,
              std::vector<std::int64_t>& z) const override {
    const int I = net_.num_classes();
    const int J = net_.num_pools();
    double dist = 0.0;
    std::int64_t jobs = 0;
    for (int i = 0; i < I; ++i) {
      dist += std::abs(static_cast<double>(x[i]) - x_bar_(i));
      jobs += x[i];
    }
    if (dist <= m0_ * static_cast<double>(plan_.n)) {
      std::int64_t servers = 0;
      for (auto v : plan_.N_pool) servers += v;
      Eigen::VectorXd rows(I);
      Eigen::VectorXd cols(J);
      for (int i = 0; i < I; ++i) rows(i) = static_cast<double>(x[i]);
      for (int j = 0; j < J; ++j) cols(j) = static_cast<double>(plan_.N_pool[j]);
      rows(anchor_.cls) -= static_cast<double>(std::max<std::int64_t>(jobs - servers, 0));
      cols(anchor_.pool) -= static_cast<double>(std::max<std::int64_t>(servers - jobs, 0));
      // integer row/column sums give an integer flow on a tree
      const Eigen::VectorXd flow = solve_psi(net_, rows, cols);
      z.resize(static_cast<std::size_t>(flow.size()));
      bool ok = true;
      for (Eigen::Index e = 0; e < flow.size(); ++e) {
        z[static_cast<std::size_t>(e)] = std::llround(flow(e));
        ok = ok && z[static_cast<std::size_t>(e)] >= 0;
      }
      if (ok) return;
    }
    fallback_.assign(x, z);
  }

  [[nodiscard]] auto name() const -> std::string override { return "constant"; }

 private:
  ValidatedNetwork net_;
  StaffingPlan plan_;
  Edge anchor_;
  double m0_;
  BspPolicy fallback_;
  Eigen::VectorXd x_bar_;
};

// exponent of V: |y|^2 / sqrt(1 + |y|^2)
auto bowl(const Eigen::VectorXd& y) -> double {
  const double s = y.squaredNorm();
  return s / std::sqrt(1.0 + s);
}

auto random_unit(std::mt19937_64& rng, int dim) -> Eigen::VectorXd {
  std::normal_distribution<double> normal;
  Eigen::VectorXd d(dim);
  do {
    for (int i = 0; i < dim; ++i) d(i) = normal(rng);
  } while (d.norm() < 1e-12);
  return d / d.norm();
}

}  // namespace

auto synthesize_staffing(const ValidatedNetwork& net, const FluidSolution& fluid,
                         const NthSystemParams& nth, const SwssResult& swss)
    -> StaffingPlan {
  validate_nth(net, nth);
  const NetworkSpec& s = net.spec;
  const double rn = sqrt_n(nth.n);
  StaffingPlan plan;
  plan.n = nth.n;
  plan.N_pool = nth.N_n;
  plan.N_tilde.assign(static_cast<std::size_t>(net.num_edges()), 0);
  plan.target.resize(net.num_edges());
  for (int e = 0; e < net.num_edges(); ++e) {
    const double z = fluid.z_star(e);
    plan.target(e) = static_cast<double>(nth.n) * z +
                     rn * (swss.kappa(e) - s.mu_hat(e) / s.mu(e) * z);
  }
  for (int j = 0; j < net.num_pools(); ++j) {
    const auto& es = net.edges_of_pool[static_cast<std::size_t>(j)];
    plan.designated.push_back(net.edge(es.front()).cls);
    std::int64_t others = 0;
    for (std::size_t k = 1; k < es.size(); ++k) {
      const double t = plan.target(es[k]);
      const auto v = static_cast<std::int64_t>(std::floor(t + 1e-9 * std::max(1.0, std::abs(t))));
      plan.N_tilde[static_cast<std::size_t>(es[k])] = v;
      others += v;
    }
    plan.N_tilde[static_cast<std::size_t>(es.front())] =
        nth.N_n[static_cast<std::size_t>(j)] - others;
  }
  plan.N_tilde_class.assign(static_cast<std::size_t>(net.num_classes()), 0);
  for (int e = 0; e < net.num_edges(); ++e) {
    const auto v = plan.N_tilde[static_cast<std::size_t>(e)];
    if (v < 0) {
      std::ostringstream msg;
      msg << "edge (" << s.classes[net.edge(e).cls] << ", " << s.pools[net.edge(e).pool]
          << ") gets " << v << " servers at n = " << nth.n;
      throw Error(ErrorKind::NTooSmall, msg.str());
    }
    plan.N_tilde_class[static_cast<std::size_t>(net.edge(e).cls)] += v;
    const double ref = fluid.xi_star(e) *
                       static_cast<double>(nth.N_n[static_cast<std::size_t>(net.edge(e).pool)]);
    plan.c0 = std::max(plan.c0, std::abs(ref - static_cast<double>(v)) / rn);
  }
  return plan;
}

auto bsp_policy(const ValidatedNetwork& net, const StaffingPlan& plan) -> PolicyPtr {
  return std::make_shared<BspPolicy>(net, plan);
}

auto constant_control_policy(const ValidatedNetwork& net, const FluidSolution& fluid,
                             const StaffingPlan& plan, Edge anchor, double m0)
    -> PolicyPtr {
  if (!net.find_edge(anchor.cls, anchor.pool)) {
    throw Error(ErrorKind::AnchorNotEdge, "constant control anchor is not an edge");
  }
  return std::make_shared<ConstantControlPolicy>(net, fluid, plan, anchor, m0);
}

void queues_and_idleness(const ValidatedNetwork& net,
                         const std::vector<std::int64_t>& N_pool,
                         const std::vector<std::int64_t>& x,
                         const std::vector<std::int64_t>& z,
                         std::vector<std::int64_t>& q, std::vector<std::int64_t>& y) {
  q = x;
  y = N_pool;
  for (int e = 0; e < net.num_edges(); ++e) {
    q[static_cast<std::size_t>(net.edge(e).cls)] -= z[static_cast<std::size_t>(e)];
    y[static_cast<std::size_t>(net.edge(e).pool)] -= z[static_cast<std::size_t>(e)];
  }
}

auto simulate_ctmc(const ValidatedNetwork& net, const NthSystemParams& nth,
                   const SchedulingPolicy& policy, const std::vector<std::int64_t>& x0,
                   double horizon, std::uint64_t seed, int replication) -> Trajectory {
  validate_nth(net, nth);
  const int I = net.num_classes();
  const int E = net.num_edges();
  if (static_cast<int>(x0.size()) != I ||
      std::any_of(x0.begin(), x0.end(), [](std::int64_t v) { return v < 0; })) {
    throw Error(ErrorKind::PreconditionFailed, "initial state must be a nonnegative count per class");
  }
  if (!(horizon >= 0.0)) throw Error(ErrorKind::PreconditionFailed, "horizon must be nonnegative");

  Trajectory traj;
  traj.n = nth.n;
  traj.num_classes = I;
  traj.num_pools = net.num_pools();
  traj.horizon = horizon;
  traj.seed = seed;
  traj.replication = replication;

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replication)};
  std::mt19937_64 rng(seq);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<std::int64_t> x = x0;
  std::vector<std::int64_t> z;
  std::vector<std::int64_t> q;
  std::vector<std::int64_t> y;
  auto record = [&](double t) {
    policy.assign(x, z);
    queues_and_idleness(net, nth.N_n, x, z, q, y);
    traj.t.push_back(t);
    traj.x.insert(traj.x.end(), x.begin(), x.end());
    traj.q.insert(traj.q.end(), q.begin(), q.end());
    traj.y.insert(traj.y.end(), y.begin(), y.end());
  };
  record(0.0);

  const double arrival_rate = nth.lambda_n.sum();
  double t = 0.0;
  while (true) {
    double service_rate = 0.0;
    for (int e = 0; e < E; ++e) service_rate += nth.mu_n(e) * static_cast<double>(z[static_cast<std::size_t>(e)]);
    const double total = arrival_rate + service_rate;
    t += expo(rng) / total;
    if (t >= horizon) break;
    double u = unif(rng) * total;
    int event = -1;
    for (int i = 0; i < I && event < 0; ++i) {
      u -= nth.lambda_n(i);
      if (u < 0.0) event = i;
    }
    if (event >= 0) {
      ++x[static_cast<std::size_t>(event)];
      ++traj.arrivals;
    } else {
      int chosen = -1;
      for (int e = 0; e < E; ++e) {
        if (z[static_cast<std::size_t>(e)] == 0) continue;
        chosen = e;
        u -= nth.mu_n(e) * static_cast<double>(z[static_cast<std::size_t>(e)]);
        if (u < 0.0) break;
      }
      // chosen is the last busy edge if rounding left u slightly positive
      --x[static_cast<std::size_t>(net.edge(chosen).cls)];
      ++traj.departures;
    }
    record(t);
  }
  return traj;
}

auto simulate_ctmc_replications(const ValidatedNetwork& net, const NthSystemParams& nth,
                                const SchedulingPolicy& policy,
                                const std::vector<std::int64_t>& x0, double horizon,
                                std::uint64_t seed, int reps, int threads)
    -> std::vector<Trajectory> {
  std::vector<Trajectory> out(static_cast<std::size_t>(std::max(reps, 0)));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(out.size());
  auto worker = [&] {
    for (int r = next++; r < reps; r = next++) {
      try {
        out[static_cast<std::size_t>(r)] = simulate_ctmc(net, nth, policy, x0, horizon, seed, r);
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

auto centering(const ValidatedNetwork& net, const FluidSolution& fluid,
               const NthSystemParams& nth, const StaffingPlan* plan, ScaleMode mode)
    -> Eigen::VectorXd {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(net.num_classes());
  if (mode == ScaleMode::Tilde) {
    if (plan == nullptr || plan->n != nth.n) {
      throw Error(ErrorKind::ModeMismatch, "tilde scaling needs a staffing plan for the same n");
    }
    for (int i = 0; i < net.num_classes(); ++i) {
      c(i) = static_cast<double>(plan->N_tilde_class[static_cast<std::size_t>(i)]);
    }
    return c;
  }
  for (int e = 0; e < net.num_edges(); ++e) {
    c(net.edge(e).cls) +=
        fluid.xi_star(e) * static_cast<double>(nth.N_n[static_cast<std::size_t>(net.edge(e).pool)]);
  }
  return c;
}

auto diffusion_scale(const Trajectory& traj, const ValidatedNetwork& net,
                     const FluidSolution& fluid, const NthSystemParams& nth,
                     const StaffingPlan* plan, ScaleMode mode) -> Eigen::MatrixXd {
  if (traj.n != nth.n) {
    throw Error(ErrorKind::ModeMismatch, "trajectory and n-th system differ in n");
  }
  const Eigen::VectorXd c = centering(net, fluid, nth, plan, mode);
  const double rn = sqrt_n(nth.n);
  const auto K = static_cast<Eigen::Index>(traj.size());
  Eigen::MatrixXd out(traj.num_classes, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (int i = 0; i < traj.num_classes; ++i) {
      out(i, k) = (static_cast<double>(traj.x[static_cast<std::size_t>(k * traj.num_classes + i)]) - c(i)) / rn;
    }
  }
  return out;
}

auto weighted_quantile(std::vector<std::pair<double, double>> value_weight, double level)
    -> double {
  if (value_weight.empty()) throw Error(ErrorKind::EmptyTrajectory, "no samples");
  std::sort(value_weight.begin(), value_weight.end());
  double total = 0.0;
  for (const auto& [v, w] : value_weight) total += w;
  double acc = 0.0;
  for (const auto& [v, w] : value_weight) {
    acc += w;
    if (acc >= level * total * (1.0 - 1e-12)) return v;
  }
  return value_weight.back().first;
}

auto stationary_stats(const std::vector<Trajectory>& trajs,
                      const std::vector<Eigen::MatrixXd>& scaled, double burn_in,
                      int windows) -> TrajectoryStats {
  if (trajs.empty() || trajs.size() != scaled.size()) {
    throw Error(ErrorKind::EmptyTrajectory, "no replications");
  }
  if (!(burn_in >= 0.0 && burn_in <= 0.9)) {
    throw Error(ErrorKind::PreconditionFailed, "burn-in fraction must lie in [0, 0.9]");
  }
  TrajectoryStats st;
  st.replications = static_cast<int>(trajs.size());
  st.seed = trajs.front().seed;
  st.burn_in = burn_in;

  std::vector<std::pair<double, double>> norms;
  std::vector<std::pair<double, double>> totals;
  std::vector<std::vector<std::pair<double, double>>> per_window(
      static_cast<std::size_t>(std::max(windows, 0)));
  double idle = 0.0;
  for (std::size_t r = 0; r < trajs.size(); ++r) {
    const Trajectory& tr = trajs[r];
    const double start = burn_in * tr.horizon;
    const double width = (tr.horizon - start) / std::max(windows, 1);
    const double rn = sqrt_n(tr.n);
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const double a = std::max(tr.t[k], start);
      const double b = k + 1 < tr.size() ? tr.t[k + 1] : tr.horizon;
      if (b <= a) continue;
      const auto col = scaled[r].col(static_cast<Eigen::Index>(k));
      const double nrm = col.norm();
      norms.emplace_back(nrm, b - a);
      totals.emplace_back(col.sum(), b - a);
      double yk = 0.0;
      for (int j = 0; j < tr.num_pools; ++j) yk += static_cast<double>(tr.y[k * static_cast<std::size_t>(tr.num_pools) + static_cast<std::size_t>(j)]);
      idle += (b - a) * yk / rn;
      st.observed_time += b - a;
      for (int w = 0; w < windows; ++w) {
        const double wa = std::max(a, start + w * width);
        const double wb = std::min(b, start + (w + 1) * width);
        if (wb > wa) per_window[static_cast<std::size_t>(w)].emplace_back(nrm, wb - wa);
      }
    }
  }
  if (norms.empty() || !(st.observed_time > 0.0)) {
    throw Error(ErrorKind::EmptyTrajectory, "nothing left after burn-in");
  }
  for (double lv : st.levels) st.norm_quantiles.push_back(weighted_quantile(norms, lv));
  st.mean_idleness = idle / st.observed_time;
  for (auto& w : per_window) {
    st.window_medians.push_back(w.empty() ? std::numeric_limits<double>::quiet_NaN()
                                          : weighted_quantile(w, 0.5));
  }

  // exponential tail of <e,x>^+: regress log survival on a grid up to the
  // 0.99 conditional quantile
  std::vector<std::pair<double, double>> pos;
  double pos_weight = 0.0;
  for (const auto& vw : totals) {
    if (vw.first > 0.0) {
      pos.push_back(vw);
      pos_weight += vw.second;
    }
  }
  if (!pos.empty()) {
    std::sort(pos.begin(), pos.end());
    const double top = weighted_quantile(pos, 0.99);
    constexpr int kGrid = 20;
    std::vector<double> sx;
    std::vector<double> sy;
    for (int g = 0; g < kGrid; ++g) {
      const double s = top * g / kGrid;
      double above = 0.0;
      for (auto it = std::upper_bound(pos.begin(), pos.end(), std::make_pair(s, std::numeric_limits<double>::infinity()));
           it != pos.end(); ++it) {
        above += it->second;
      }
      if (above > 0.0) {
        sx.push_back(s);
        sy.push_back(std::log(above / pos_weight));
      }
    }
    st.tail_points = static_cast<int>(sx.size());
    if (sx.size() >= 3) {
      const auto m = static_cast<double>(sx.size());
      double mx = 0.0;
      double my = 0.0;
      for (std::size_t k = 0; k < sx.size(); ++k) {
        mx += sx[k] / m;
        my += sy[k] / m;
      }
      double sxx = 0.0;
      double sxy = 0.0;
      double syy = 0.0;
      for (std::size_t k = 0; k < sx.size(); ++k) {
        sxx += (sx[k] - mx) * (sx[k] - mx);
        sxy += (sx[k] - mx) * (sy[k] - my);
        syy += (sy[k] - my) * (sy[k] - my);
      }
      st.tail_slope = sxx > 0.0 ? sxy / sxx : 0.0;
      st.tail_r2 = (sxx > 0.0 && syy > 0.0) ? sxy * sxy / (sxx * syy) : 0.0;
    }
  }
  return st;
}

auto ctmc_lyapunov(double eps, const Eigen::VectorXd& y) -> double {
  return std::exp(eps * bowl(y));
}

auto ctmc_generator_ratio(const ValidatedNetwork& net, const NthSystemParams& nth,
                          const StaffingPlan& plan, const SchedulingPolicy& policy,
                          double eps, const std::vector<std::int64_t>& x) -> double {
  const int I = net.num_classes();
  const double rn = sqrt_n(nth.n);
  Eigen::VectorXd y(I);
  for (int i = 0; i < I; ++i) {
    y(i) = (static_cast<double>(x[static_cast<std::size_t>(i)]) -
            static_cast<double>(plan.N_tilde_class[static_cast<std::size_t>(i)])) / rn;
  }
  std::vector<std::int64_t> z;
  policy.assign(x, z);
  const double g0 = bowl(y);
  Eigen::VectorXd out_rate = Eigen::VectorXd::Zero(I);
  for (int e = 0; e < net.num_edges(); ++e) {
    out_rate(net.edge(e).cls) += nth.mu_n(e) * static_cast<double>(z[static_cast<std::size_t>(e)]);
  }
  double ratio = 0.0;
  for (int i = 0; i < I; ++i) {
    y(i) += 1.0 / rn;
    ratio += nth.lambda_n(i) * std::expm1(eps * (bowl(y) - g0));
    y(i) -= 2.0 / rn;
    if (out_rate(i) > 0.0) ratio += out_rate(i) * std::expm1(eps * (bowl(y) - g0));
    y(i) += 1.0 / rn;
  }
  return ratio;
}

auto check_drift_inequality_ctmc(const ValidatedNetwork& net, const NthSystemParams& nth,
                                 const StaffingPlan& plan, const SchedulingPolicy& policy,
                                 double vartheta, const CtmcCheckOptions& options)
    -> CtmcCertificate {
  if (!(vartheta > 0.0)) {
    throw Error(ErrorKind::PreconditionFailed,
                "drift inequality needs a positive safety staffing");
  }
  const int I = net.num_classes();
  const double rn = sqrt_n(nth.n);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> box(-20.0, 20.0);
  std::vector<std::vector<std::int64_t>> states;
  auto add = [&](const Eigen::VectorXd& offset) {
    std::vector<std::int64_t> x(static_cast<std::size_t>(I));
    for (int i = 0; i < I; ++i) {
      const auto v = plan.N_tilde_class[static_cast<std::size_t>(i)] + std::llround(rn * offset(i));
      x[static_cast<std::size_t>(i)] = std::max<std::int64_t>(v, 0);
    }
    states.push_back(std::move(x));
  };
  add(Eigen::VectorXd::Zero(I));
  for (int s = 0; s < options.box_samples; ++s) {
    Eigen::VectorXd u(I);
    for (int i = 0; i < I; ++i) u(i) = box(rng);
    add(u);
  }
  for (int r = 0; r < options.rays; ++r) {
    const Eigen::VectorXd d = random_unit(rng, I);
    for (double rad : options.ray_radii) add(rad * d);
  }
  for (int i = 0; i < I; ++i) {
    for (double rad : options.ray_radii) {
      add(rad * Eigen::VectorXd::Unit(I, i));
      add(-rad * Eigen::VectorXd::Unit(I, i));
    }
  }

  auto scaled_norm = [&](const std::vector<std::int64_t>& x) {
    double s = 0.0;
    for (int i = 0; i < I; ++i) {
      const double d = (static_cast<double>(x[static_cast<std::size_t>(i)]) -
                        static_cast<double>(plan.N_tilde_class[static_cast<std::size_t>(i)])) / rn;
      s += d * d;
    }
    return std::sqrt(s);
  };
  std::vector<double> norms;
  for (const auto& x : states) norms.push_back(scaled_norm(x));

  CtmcCertificate out;
  out.sample_count = static_cast<int>(states.size());
  out.seed = options.seed;
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> worst_state;
  double far = options.far_radius;
  for (double eps = options.eps_start; eps >= options.eps_floor * (1.0 - 1e-12); eps *= 0.5) {
    std::vector<double> ratio(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
      ratio[k] = ctmc_generator_ratio(net, nth, plan, policy, eps, states[k]);
    }
    // the second-order jump term decays like 1/|x|, so a wider shell can succeed
    for (int g = 0; g <= options.far_doublings; ++g) {
      far = options.far_radius * std::ldexp(1.0, g);
      worst = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < states.size(); ++k) {
        if (norms[k] >= far && ratio[k] > worst) {
          worst = ratio[k];
          worst_state = states[k];
        }
      }
      if (!(worst < 0.0)) continue;
      out.epsilon = eps;
      out.far_radius = far;
      out.C1 = -0.5 * worst;
      out.worst_far_ratio = worst;
      out.worst_state = worst_state;
      out.C0 = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < states.size(); ++k) {
        const double V = std::exp(eps * norms[k] * norms[k] / std::sqrt(1.0 + norms[k] * norms[k]));
        out.C0 = std::max(out.C0, V * (ratio[k] + out.C1));
      }
      return out;
    }
  }
  std::ostringstream msg;
  msg << "no eps in [" << options.eps_floor << ", " << options.eps_start
      << "] makes the generator ratio negative beyond radius " << far << "; worst " << worst
      << " at x = (";
  for (std::size_t i = 0; i < worst_state.size(); ++i) msg << (i ? ", " : "") << worst_state[i];
  msg << ")";
  throw Error(ErrorKind::InequalityFailed, msg.str());
}

}  // namespace swss
