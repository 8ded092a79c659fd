#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "swss/drift.hpp"
#include "swss/gains.hpp"

namespace swss {

enum class Classification { Transient, NotPositiveRecurrent, Stabilizable };

auto to_string(Classification c) -> std::string;

inline constexpr double kClassifyTolerance = 1e-9;

struct StabilityReport {
  Classification classification = Classification::NotPositiveRecurrent;
  double vartheta_p = 0.0;
  std::optional<double> vartheta_p_n;
  std::optional<Classification> nth_classification;
};

auto classify(double vartheta_p) -> Classification;
auto classify(const SwssResult& swss,
              const std::optional<SwssResult>& nth = std::nullopt)
    -> StabilityReport;

/// Witness for transience: H(x) = tanh(beta <e, B1^{-1} x>) has a strictly
/// positive generator. Since L_u H = beta / cosh^2(y) * bracket and cosh^2
/// overflows far out, the margin reported is the bracket itself; the log of
/// the generator is reported alongside.
struct TransienceCertificate {
  double beta = 0.0;
  double drift_weight = 0.0;   // <e, B1^{-1} h>, positive in the regime
  double sigma_norm2 = 0.0;    // |Sigma^T B1^{-1} e|^2
  double min_margin = 0.0;     // min of the bracket over the grid
  double min_log_generator = 0.0;
  Eigen::VectorXd worst_x;
  int worst_pool = 0;
  int sample_count = 0;
  double max_radius = 0.0;
  std::uint64_t seed = 0;
};

/// L_u H(x) / (beta / cosh^2(beta <e,B1^{-1}x>)).
auto transience_bracket(const DriftModel& model, double beta,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& us)
    -> double;
/// L_u H(x) computed directly from the gradient and Hessian of H.
auto transience_generator(const DriftModel& model, double beta,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& uc,
                          const Eigen::VectorXd& us) -> double;

/// Throws NotTransientRegime unless <e, B1^{-1} h> > 0, MarginNonPositive if
/// the grid finds a nonpositive margin.
auto transience_certificate(const DriftModel& model, int sample_count,
                            std::uint64_t seed, double max_radius = 1e3)
    -> TransienceCertificate;

struct SMatrix {
  Eigen::MatrixXd S;
  double kappa_circ = 0.0;
  double min_eig_S = 0.0;
  double min_eig_lyap = 0.0;  // of S B1 + B1^T S - 2 kappa_circ I
  double min_eig_phi = 0.0;
  int iterations = 0;         // 0 when the plain Lyapunov solution worked
};

/// Solution of S B1 + B1^T S = 2 I.
auto lyapunov_solve(const Eigen::MatrixXd& B1) -> Eigen::MatrixXd;

/// S B1 (I - e_k e^T) + (I - e e_k^T) B1^T S.
auto phi_matrix(const Eigen::MatrixXd& S, const Eigen::MatrixXd& B1, int k)
    -> Eigen::MatrixXd;

/// Positive definite S with S B1 + B1^T S > 0 and Phi >= 0, trace(S) = I.
/// Throws NotFound when the search fails.
auto find_S(const DriftModel& model, int max_iterations = 500) -> SMatrix;

/// p with eta = vartheta <p, S e_ihat> > 0: `preferred` if it already works,
/// otherwise the softmax of the positive part of S e_ihat.
auto choose_p_for_eta(const Eigen::MatrixXd& S, int ihat, double vartheta,
                      const Eigen::VectorXd& preferred) -> Eigen::VectorXd;

/// V(x) = exp(eps s / sqrt(1 + s)), s = x^T S x.
auto lyapunov_value(const Eigen::MatrixXd& S, double eps,
                    const Eigen::VectorXd& x) -> double;
auto lyapunov_gradient(const Eigen::MatrixXd& S, double eps,
                       const Eigen::VectorXd& x) -> Eigen::VectorXd;
auto lyapunov_hessian(const Eigen::MatrixXd& S, double eps,
                      const Eigen::VectorXd& x) -> Eigen::MatrixXd;

/// (L V)(x) / V(x) under the constant control (e_ihat, e_jhat).
auto sde_generator_ratio(const DriftModel& model, const Eigen::MatrixXd& S,
                         double eps, const Eigen::VectorXd& x) -> double;

struct LyapunovCertificate {
  SMatrix s;
  double epsilon = 0.0;
  double kappa0 = 0.0;
  double kappa1 = 0.0;
  double eta = 0.0;
  double delta = 0.0;
  Eigen::VectorXd p;
  std::vector<double> radii;
  int directions = 0;
  double far_radius = 0.0;
  double worst_far_ratio = 0.0;  // max of L V / V beyond far_radius
  Eigen::VectorXd worst_x;
  std::uint64_t seed = 0;
};

struct SdeCheckOptions {
  std::vector<double> radii{0.5, 1, 2, 4, 8, 16, 32, 64};
  int directions = 64;
  double far_radius = 16.0;
  double eps_start = 1e-2;
  double eps_floor = 1e-6;
  std::uint64_t seed = 1;
};

/// Fits kappa1 = -max_{|x| >= far} (L V / V) / 2 and the smallest kappa0 with
/// L V <= kappa0 - kappa1 V on the grid, halving eps until kappa1 > 0.
/// `model` must be recentered (h = -vartheta p). Throws PreconditionFailed
/// for vartheta <= 0 and InequalityFailed when no eps works.
auto check_drift_inequality_sde(const DriftModel& model, const SMatrix& s,
                                double vartheta, const Eigen::VectorXd& p,
                                const SdeCheckOptions& options = {})
    -> LyapunovCertificate;

/// <e^T B1^{-1}, p> vartheta: stationary mean idleness under (e_ihat, e_jhat).
auto idleness_target(const DriftModel& model, const Eigen::VectorXd& p,
                    double vartheta) -> double;

}  // namespace swss
