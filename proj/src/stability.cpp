#include "swss/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "swss/errors.hpp"

namespace swss {

namespace {

auto min_eig(const Eigen::MatrixXd& A) -> double {
  if (A.size() == 0) return std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

// Projection onto {X symmetric : X >= floor I}.
auto clamp_spectrum(const Eigen::MatrixXd& A, double floor) -> Eigen::MatrixXd {
  const Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

auto drop_index(const Eigen::MatrixXd& A, int k) -> Eigen::MatrixXd {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd out(n - 1, n - 1);
  for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
    if (r == k) continue;
    for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
      if (c == k) continue;
      out(rr, cc++) = A(r, c);
    }
    ++rr;
  }
  return out;
}

auto log_cosh(double y) -> double {
  const double a = std::abs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

auto random_direction(std::mt19937_64& rng, Eigen::Index dim) -> Eigen::VectorXd {
  std::normal_distribution<double> normal;
  Eigen::VectorXd d(dim);
  do {
    for (Eigen::Index i = 0; i < dim; ++i) d(i) = normal(rng);
  } while (d.norm() < 1e-12);
  return d / d.norm();
}

struct Feasibility {
  double S = 0.0;
  double lyap = 0.0;
  double phi = 0.0;
};

auto feasibility(const Eigen::MatrixXd& S, const Eigen::MatrixXd& B1, int k)
    -> Feasibility {
  return {min_eig(S), min_eig(S * B1 + B1.transpose() * S),
          min_eig(phi_matrix(S, B1, k))};
}

auto accept(const Feasibility& f) -> bool {
  return f.S > 1e-9 && f.lyap > 1e-9 && f.phi >= -1e-9;
}

auto finish(Eigen::MatrixXd S, const Eigen::MatrixXd& B1, int k, int iterations)
    -> SMatrix {
  S = 0.5 * (S + S.transpose());
  S *= static_cast<double>(S.rows()) / S.trace();
  SMatrix out;
  out.S = S;
  const Eigen::MatrixXd L = S * B1 + B1.transpose() * S;
  out.kappa_circ = 0.5 * min_eig(L) * (1.0 - 1e-9);
  out.min_eig_S = min_eig(S);
  out.min_eig_lyap =
      min_eig(L - 2.0 * out.kappa_circ * Eigen::MatrixXd::Identity(S.rows(), S.cols()));
  out.min_eig_phi = min_eig(phi_matrix(S, B1, k));
  out.iterations = iterations;
  return out;
}

}  // namespace

auto to_string(Classification c) -> std::string {
  switch (c) {
    case Classification::Transient: return "Transient";
    case Classification::NotPositiveRecurrent: return "NotPositiveRecurrent";
    case Classification::Stabilizable: return "Stabilizable";
  }
  return "?";
}

auto classify(double vartheta_p) -> Classification {
  if (vartheta_p < -kClassifyTolerance) return Classification::Transient;
  if (vartheta_p > kClassifyTolerance) return Classification::Stabilizable;
  return Classification::NotPositiveRecurrent;
}

auto classify(const SwssResult& swss, const std::optional<SwssResult>& nth)
    -> StabilityReport {
  StabilityReport out;
  out.vartheta_p = swss.vartheta_p;
  out.classification = classify(swss.vartheta_p);
  if (nth) {
    out.vartheta_p_n = nth->vartheta_p;
    out.nth_classification = classify(nth->vartheta_p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// transience

auto transience_bracket(const DriftModel& model, double beta,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& us)
    -> double {
  const Eigen::VectorXd w = left_weights(model);
  const double c = w.dot(model.h);
  const double sn2 = (model.sigma.array() * w.array()).matrix().squaredNorm();
  const double y = beta * w.dot(x);
  const double minus = std::max(-x.sum(), 0.0);
  return c - beta * std::tanh(y) * sn2 + minus * (1.0 + w.dot(model.B2 * us));
}

auto transience_generator(const DriftModel& model, double beta,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& uc,
                          const Eigen::VectorXd& us) -> double {
  const Eigen::VectorXd w = left_weights(model);
  const double y = beta * w.dot(x);
  const double t = std::tanh(y);
  const double sech2 = 1.0 - t * t;
  // grad H = beta sech^2 w, hess H = -2 beta^2 tanh sech^2 w w^T
  const Eigen::VectorXd b = eval_drift(model, x, uc, us);
  double second = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    second += model.sigma(i) * model.sigma(i) * w(i) * w(i);
  }
  return beta * sech2 * b.dot(w) - beta * beta * t * sech2 * second;
}

auto transience_certificate(const DriftModel& model, int sample_count,
                            std::uint64_t seed, double max_radius)
    -> TransienceCertificate {
  const Eigen::VectorXd w = left_weights(model);
  TransienceCertificate out;
  out.drift_weight = w.dot(model.h);
  if (!(out.drift_weight > 0.0)) {
    std::ostringstream msg;
    msg << "<e, B1^{-1} h> = " << out.drift_weight << " is not positive";
    throw Error(ErrorKind::NotTransientRegime, msg.str());
  }
  out.sigma_norm2 = (model.sigma.array() * w.array()).matrix().squaredNorm();
  out.beta = 0.5 * out.drift_weight / out.sigma_norm2;
  out.seed = seed;
  out.max_radius = max_radius;
  out.min_margin = std::numeric_limits<double>::infinity();
  out.min_log_generator = std::numeric_limits<double>::infinity();

  const Eigen::Index I = model.B1.rows();
  const Eigen::Index J = model.B2.cols();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_r(std::log(1e-3), std::log(max_radius));
  auto probe = [&](const Eigen::VectorXd& x) {
    const double y = out.beta * w.dot(x);
    for (Eigen::Index j = 0; j < J; ++j) {
      const Eigen::VectorXd us = Eigen::VectorXd::Unit(J, j);
      const double m = transience_bracket(model, out.beta, x, us);
      if (m < out.min_margin) {
        out.min_margin = m;
        out.worst_x = x;
        out.worst_pool = static_cast<int>(j);
      }
      if (m > 0.0) {
        const double lg = std::log(out.beta) + std::log(m) - 2.0 * log_cosh(y);
        out.min_log_generator = std::min(out.min_log_generator, lg);
      }
    }
    ++out.sample_count;
  };
  probe(Eigen::VectorXd::Zero(I));
  for (int s = 0; s < sample_count; ++s) {
    const double r = std::exp(log_r(rng));
    probe(r * random_direction(rng, I));
  }
  if (!(out.min_margin > 0.0)) {
    std::ostringstream msg;
    msg << "transience margin " << out.min_margin << " at pool vertex "
        << out.worst_pool;
    throw Error(ErrorKind::MarginNonPositive, msg.str());
  }
  return out;
}

// ---------------------------------------------------------------------------
// S matrix

auto lyapunov_solve(const Eigen::MatrixXd& B1) -> Eigen::MatrixXd {
  const Eigen::Index n = B1.rows();
  const Eigen::MatrixXd Id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd Bt = B1.transpose();
  // vec(S B1) = (B1^T kron I) vec S, vec(B1^T S) = (I kron B1^T) vec S
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      K.block(a * n, b * n, n, n) += Bt(a, b) * Id;
      K.block(a * n, b * n, n, n) += Id(a, b) * Bt;
    }
  }
  const Eigen::MatrixXd rhs2 = 2.0 * Id;
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(rhs2.data(), n * n);
  const Eigen::VectorXd v = K.fullPivLu().solve(rhs);
  const Eigen::MatrixXd S = Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n);
  return 0.5 * (S + S.transpose());
}

auto phi_matrix(const Eigen::MatrixXd& S, const Eigen::MatrixXd& B1, int k)
    -> Eigen::MatrixXd {
  const Eigen::Index n = S.rows();
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) -
                            Eigen::VectorXd::Unit(n, k) * Eigen::RowVectorXd::Ones(n);
  const Eigen::MatrixXd M = S * B1 * P;
  return M + M.transpose();
}

auto find_S(const DriftModel& model, int max_iterations) -> SMatrix {
  const Eigen::MatrixXd& B1 = model.B1;
  const int n = static_cast<int>(B1.rows());
  const int k = model.anchor.cls;

  const Eigen::MatrixXd S0 = lyapunov_solve(B1);
  if (S0.allFinite() && accept(feasibility(S0, B1, k))) return finish(S0, B1, k, 0);

  // e_k^T Phi e_k = 0, so Phi >= 0 forces S e_k to be a multiple of the left
  // weights B1^{-T} e. Fix that row/column and search over the free block.
  const Eigen::VectorXd w = left_weights(model);
  if (!(w(k) > 0.0)) throw Error(ErrorKind::NotFound, "left weight at anchor not positive");
  Eigen::MatrixXd S_fixed = Eigen::MatrixXd::Zero(n, n);
  S_fixed.col(k) = w;
  S_fixed.row(k) = w.transpose();

  std::vector<std::pair<int, int>> free;
  for (int a = 0; a < n; ++a) {
    if (a == k) continue;
    for (int b = a; b < n; ++b) {
      if (b != k) free.emplace_back(a, b);
    }
  }
  if (free.empty()) {
    if (accept(feasibility(S_fixed, B1, k))) return finish(S_fixed, B1, k, 0);
    throw Error(ErrorKind::NotFound, "no feasible S");
  }

  const int m = static_cast<int>(free.size());
  const int rows = 2 * n * n + (n - 1) * (n - 1);
  // stacked linear images (S, S B1 + B1^T S, Phi without row/col k)
  auto images = [&](const Eigen::MatrixXd& S) {
    Eigen::VectorXd v(rows);
    const Eigen::MatrixXd L = S * B1 + B1.transpose() * S;
    const Eigen::MatrixXd P = drop_index(phi_matrix(S, B1, k), k);
    v << Eigen::Map<const Eigen::VectorXd>(S.data(), n * n),
        Eigen::Map<const Eigen::VectorXd>(L.data(), n * n),
        Eigen::Map<const Eigen::VectorXd>(P.data(), (n - 1) * (n - 1));
    return v;
  };
  auto basis = [&](int idx) {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
    E(free[idx].first, free[idx].second) = 1.0;
    E(free[idx].second, free[idx].first) = 1.0;
    return E;
  };
  auto assemble = [&](const Eigen::VectorXd& theta) {
    Eigen::MatrixXd S = S_fixed;
    for (int t = 0; t < m; ++t) S += theta(t) * basis(t);
    return S;
  };
  Eigen::MatrixXd A(rows, m);
  for (int t = 0; t < m; ++t) A.col(t) = images(basis(t));
  const Eigen::VectorXd c0 = images(S_fixed);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);

  // start from the Lyapunov solution rescaled to match S_kk
  Eigen::VectorXd theta(m);
  const double scale = S0.allFinite() && S0(k, k) > 0.0 ? w(k) / S0(k, k) : 1.0;
  for (int t = 0; t < m; ++t) {
    theta(t) = S0.allFinite() ? scale * S0(free[t].first, free[t].second)
                              : (free[t].first == free[t].second ? 1.0 : 0.0);
  }
  const double floor = 1e-3 * w.cwiseAbs().maxCoeff();
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::MatrixXd S = assemble(theta);
    if (accept(feasibility(S, B1, k))) return finish(S, B1, k, it - 1);
    const Eigen::VectorXd v = A * theta + c0;
    Eigen::VectorXd target(rows);
    const Eigen::MatrixXd T1 =
        clamp_spectrum(Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n), floor);
    const Eigen::MatrixXd T2 =
        clamp_spectrum(Eigen::Map<const Eigen::MatrixXd>(v.data() + n * n, n, n), floor);
    const Eigen::MatrixXd T3 = clamp_spectrum(
        Eigen::Map<const Eigen::MatrixXd>(v.data() + 2 * n * n, n - 1, n - 1), floor);
    target << Eigen::Map<const Eigen::VectorXd>(T1.data(), n * n),
        Eigen::Map<const Eigen::VectorXd>(T2.data(), n * n),
        Eigen::Map<const Eigen::VectorXd>(T3.data(), (n - 1) * (n - 1));
    theta = qr.solve(target - c0);
  }
  const Eigen::MatrixXd S = assemble(theta);
  if (accept(feasibility(S, B1, k))) return finish(S, B1, k, max_iterations);
  const Feasibility f = feasibility(S, B1, k);
  std::ostringstream msg;
  msg << "no S after " << max_iterations << " iterations (min eigenvalues S "
      << f.S << ", SB1+B1'S " << f.lyap << ", Phi " << f.phi << ")";
  throw Error(ErrorKind::NotFound, msg.str());
}

auto choose_p_for_eta(const Eigen::MatrixXd& S, int ihat, double vartheta,
                      const Eigen::VectorXd& preferred) -> Eigen::VectorXd {
  const Eigen::VectorXd col = S.col(ihat);
  if (preferred.size() == col.size() && (preferred.array() > 0.0).all() &&
      vartheta * preferred.dot(col) > 0.0) {
    return preferred;
  }
  const Eigen::ArrayXd pos = col.array().max(0.0);
  const Eigen::ArrayXd ex = (pos - pos.maxCoeff()).exp();
  return (ex / ex.sum()).matrix();
}

// ---------------------------------------------------------------------------
// Lyapunov function

auto lyapunov_value(const Eigen::MatrixXd& S, double eps, const Eigen::VectorXd& x)
    -> double {
  const double s = x.dot(S * x);
  return std::exp(eps * s / std::sqrt(1.0 + s));
}

auto lyapunov_gradient(const Eigen::MatrixXd& S, double eps,
                       const Eigen::VectorXd& x) -> Eigen::VectorXd {
  const Eigen::VectorXd Sx = S * x;
  const double s = x.dot(Sx);
  const double phi = (2.0 + s) / std::pow(1.0 + s, 1.5);
  return eps * lyapunov_value(S, eps, x) * phi * Sx;
}

auto lyapunov_hessian(const Eigen::MatrixXd& S, double eps,
                      const Eigen::VectorXd& x) -> Eigen::MatrixXd {
  const Eigen::VectorXd Sx = S * x;
  const double s = x.dot(Sx);
  const double phi = (2.0 + s) / std::pow(1.0 + s, 1.5);
  const double dphi = (-4.0 - s) / std::pow(1.0 + s, 2.5);
  const Eigen::MatrixXd outer = Sx * Sx.transpose();
  return lyapunov_value(S, eps, x) *
         (eps * eps * phi * phi * outer + eps * (phi * S + dphi * outer));
}

auto sde_generator_ratio(const DriftModel& model, const Eigen::MatrixXd& S,
                         double eps, const Eigen::VectorXd& x) -> double {
  const Eigen::Index I = model.B1.rows();
  const Eigen::Index J = model.B2.cols();
  const Eigen::VectorXd b = eval_drift(model, x, Eigen::VectorXd::Unit(I, model.anchor.cls),
                                       Eigen::VectorXd::Unit(J, model.anchor.pool));
  // same expressions as the gradient/Hessian with V factored out
  const Eigen::VectorXd Sx = S * x;
  const double s = x.dot(Sx);
  const double phi = (2.0 + s) / std::pow(1.0 + s, 1.5);
  const double dphi = (-4.0 - s) / std::pow(1.0 + s, 2.5);
  double second = 0.0;
  for (Eigen::Index i = 0; i < I; ++i) {
    const double hii = eps * eps * phi * phi * Sx(i) * Sx(i) +
                       eps * (phi * S(i, i) + dphi * Sx(i) * Sx(i));
    second += model.sigma(i) * model.sigma(i) * hii;
  }
  return 0.5 * second + eps * phi * b.dot(Sx);
}

auto check_drift_inequality_sde(const DriftModel& model, const SMatrix& s,
                                double vartheta, const Eigen::VectorXd& p,
                                const SdeCheckOptions& options)
    -> LyapunovCertificate {
  if (!(vartheta > 0.0)) {
    throw Error(ErrorKind::PreconditionFailed,
                "drift inequality needs a positive safety staffing");
  }
  const Eigen::Index I = model.B1.rows();
  const int ihat = model.anchor.cls;
  LyapunovCertificate out;
  out.s = s;
  out.p = choose_p_for_eta(s.S, ihat, vartheta, p);
  out.eta = vartheta * out.p.dot(s.S.col(ihat));
  out.delta = 0.25 * s.kappa_circ / (s.S * model.B1.col(ihat)).norm();
  out.radii = options.radii;
  out.directions = options.directions;
  out.far_radius = options.far_radius;
  out.seed = options.seed;

  // grid: random directions plus the coordinate axes and +-e
  std::mt19937_64 rng(options.seed);
  std::vector<Eigen::VectorXd> dirs;
  for (int d = 0; d < options.directions; ++d) dirs.push_back(random_direction(rng, I));
  for (Eigen::Index i = 0; i < I; ++i) {
    dirs.push_back(Eigen::VectorXd::Unit(I, i));
    dirs.push_back(-Eigen::VectorXd::Unit(I, i));
  }
  dirs.push_back(Eigen::VectorXd::Ones(I) / std::sqrt(static_cast<double>(I)));
  dirs.push_back(-dirs.back());
  std::vector<Eigen::VectorXd> points{Eigen::VectorXd::Zero(I)};
  for (double r : options.radii) {
    for (const auto& d : dirs) points.push_back(r * d);
  }

  const DriftModel centered = recentered(model, vartheta, out.p);
  double worst_far = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd worst_x;
  for (double eps = options.eps_start; eps >= options.eps_floor * (1.0 - 1e-12);
       eps *= 0.5) {
    worst_far = -std::numeric_limits<double>::infinity();
    std::vector<double> ratio(points.size());
    for (std::size_t q = 0; q < points.size(); ++q) {
      ratio[q] = sde_generator_ratio(centered, s.S, eps, points[q]);
      if (points[q].norm() >= options.far_radius * (1.0 - 1e-12) && ratio[q] > worst_far) {
        worst_far = ratio[q];
        worst_x = points[q];
      }
    }
    if (!(worst_far < 0.0)) continue;
    out.epsilon = eps;
    out.kappa1 = -0.5 * worst_far;
    out.worst_far_ratio = worst_far;
    out.worst_x = worst_x;
    out.kappa0 = -std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < points.size(); ++q) {
      const double V = lyapunov_value(s.S, eps, points[q]);
      out.kappa0 = std::max(out.kappa0, V * (ratio[q] + out.kappa1));
    }
    return out;
  }
  std::ostringstream msg;
  msg << "no eps in [" << options.eps_floor << ", " << options.eps_start
      << "] gives a negative far-field ratio; worst " << worst_far << " at x = ("
      << worst_x.transpose() << ")";
  throw Error(ErrorKind::InequalityFailed, msg.str());
}

auto idleness_target(const DriftModel& model, const Eigen::VectorXd& p,
                     double vartheta) -> double {
  return left_weights(model).dot(p) * vartheta;
}

}  // namespace swss
