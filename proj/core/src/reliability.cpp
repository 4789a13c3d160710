#include "rgc/reliability.hpp"

#include <algorithm>
#include <cmath>

#include "rgc/errors.hpp"
#include "rgc/numerics.hpp"

namespace rgc {

namespace {
constexpr double kKappaFloor = 1e-12;
}

double last_layer_trace(const Vec& p, const Vec& target, const Vec& h) {
  if (p.size() != target.size()) {
    throw InvalidInputError("last_layer_trace: dimension mismatch");
  }
  double residual_sq = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double d = p[k] - target[k];
    residual_sq += d * d;
  }
  return residual_sq * squared_norm(h);
}

TraceRecord full_trace(const PerSampleGrad& grad) {
  TraceRecord rec;
  rec.tau_last = frobenius_squared_norm(grad.head);
  const double resid = squared_norm(grad.encoder_flat);
  rec.epsilon_resid = resid;
  rec.tau_full = rec.tau_last + resid;
  rec.kappa = resid / std::max(rec.tau_last, kKappaFloor);
  return rec;
}

OrderingVerdict full_trace_ordering(const TraceRecord& trace_i,
                                    const TraceRecord& trace_j) {
  if (!trace_i.kappa.has_value() || !trace_j.kappa.has_value()) {
    throw InvalidInputError("full_trace_ordering: kappa bounds missing");
  }
  const bool guaranteed =
      trace_i.tau_last > (1.0 + *trace_j.kappa) * trace_j.tau_last;
  return guaranteed ? OrderingVerdict::Guaranteed : OrderingVerdict::NotGuaranteed;
}

ConflictRecord geometric_conflict(const Matrix& g_obs, const Matrix& g_ref,
                                  double eps) {
  if (!g_obs.same_shape(g_ref)) {
    throw InvalidInputError("geometric_conflict: shape mismatch");
  }
  if (eps <= 0.0) {
    throw InvalidConfigError("geometric_conflict: eps must be > 0");
  }
  ConflictRecord rec;
  rec.obs_norm = frobenius_norm(g_obs);
  rec.ref_norm = frobenius_norm(g_ref);
  const double inner = frobenius_dot(g_obs, g_ref);
  rec.conflict = 1.0 - inner / (rec.obs_norm * rec.ref_norm + eps);
  if (rec.ref_norm > 0.0) rec.ratio = rec.obs_norm / rec.ref_norm;
  if (rec.obs_norm > 0.0 && rec.ref_norm > 0.0) {
    rec.raw_conflict = 1.0 - inner / (rec.obs_norm * rec.ref_norm);
  }
  return rec;
}

DecompositionCheck discrepancy_decomposition(const Matrix& g_obs,
                                             const Matrix& g_ref) {
  if (!g_obs.same_shape(g_ref)) {
    throw InvalidInputError("discrepancy_decomposition: shape mismatch");
  }
  const double a = frobenius_norm(g_obs);
  const double b = frobenius_norm(g_ref);
  if (a == 0.0 || b == 0.0) {
    throw DegenerateGeometryError(
        "discrepancy_decomposition: zero-norm gradient");
  }
  double diff_sq = 0.0;
  for (std::size_t i = 0; i < g_obs.data.size(); ++i) {
    const double d = g_obs.data[i] - g_ref.data[i];
    diff_sq += d * d;
  }
  const double r = a / b;
  const double raw_conflict = 1.0 - frobenius_dot(g_obs, g_ref) / (a * b);

  DecompositionCheck check;
  check.lhs = diff_sq / (b * b);
  check.rhs = (r - 1.0) * (r - 1.0) + 2.0 * r * raw_conflict;
  check.gap = std::abs(check.lhs - check.rhs);
  return check;
}

FidelityCheck reference_fidelity(const ForwardRecord& fr, const Vec& q,
                                 const Vec& q_star) {
  if (q.size() != fr.p.size() || q_star.size() != fr.p.size()) {
    throw InvalidInputError("reference_fidelity: dimension mismatch");
  }
  const Matrix g_q = last_layer_gradient(fr, q);
  const Matrix g_star = last_layer_gradient(fr, q_star);
  double gap_sq = 0.0;
  for (std::size_t i = 0; i < g_q.data.size(); ++i) {
    const double d = g_q.data[i] - g_star.data[i];
    gap_sq += d * d;
  }
  Vec target_gap(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) target_gap[k] = q[k] - q_star[k];

  FidelityCheck check;
  check.grad_gap = std::sqrt(gap_sq);
  check.bound = norm(fr.h) * norm(target_gap);
  return check;
}

double radial_score(double tau_obs, double tau_ref, double eps) {
  if (eps <= 0.0) {
    throw InvalidConfigError("radial_score: eps must be > 0");
  }
  return std::log((tau_obs + eps) / (tau_ref + eps));
}

Vec fuse_scores(const Vec& r_hat, const Vec& c_hat, double beta) {
  if (beta < 0.0 || beta > 1.0) {
    throw InvalidConfigError("fuse_scores: beta must be in [0, 1]");
  }
  if (r_hat.size() != c_hat.size()) {
    throw InvalidInputError("fuse_scores: dimension mismatch");
  }
  Vec s(r_hat.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = beta * r_hat[i] + (1.0 - beta) * c_hat[i];
  }
  return s;
}

double beta_ordering_bound(double margin_conflict, double margin_radial) {
  if (margin_conflict <= 0.0) {
    throw InvalidInputError("beta_ordering_bound: conflict margin must be > 0");
  }
  if (margin_radial < 0.0) {
    throw InvalidInputError("beta_ordering_bound: radial margin must be >= 0");
  }
  return margin_conflict / (margin_conflict + margin_radial);
}

double smooth_score(std::optional<double> prev_smoothed, double s_raw,
                    double mu) {
  if (mu < 0.0 || mu >= 1.0) {
    throw InvalidConfigError("smooth_score: mu must be in [0, 1)");
  }
  if (!prev_smoothed.has_value()) return s_raw;
  return mu * *prev_smoothed + (1.0 - mu) * s_raw;
}

Vec trust_weights(const Vec& s_tilde, double alpha) {
  if (alpha <= 0.0) {
    throw InvalidConfigError("trust_weights: alpha must be > 0");
  }
  const Vec standardized = num::zscore(s_tilde);  // throws for N < 2
  Vec w(standardized.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = num::sigmoid(-alpha * standardized[i]);
  }
  return w;
}

}  // namespace rgc
