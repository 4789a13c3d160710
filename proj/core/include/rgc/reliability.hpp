#pragma once

#include <optional>

#include "rgc/linalg.hpp"
#include "rgc/model.hpp"

namespace rgc {

/// Per-sample update-energy record. tau_last is the classifier-layer
/// trace; the full-model fields are filled only in exact (validation)
/// mode. When present, tau_full = tau_last + epsilon_resid, and kappa is
/// the tight residual ratio epsilon_resid / tau_last.
struct TraceRecord {
  double tau_last = 0.0;
  std::optional<double> tau_full;
  std::optional<double> epsilon_resid;
  std::optional<double> kappa;
};

/// |p - target|^2 * |h|^2, the squared Frobenius norm of the closed-form
/// classifier gradient (p - target) h^T.
double last_layer_trace(const Vec& p, const Vec& target, const Vec& h);

/// Exact-mode trace: head energy plus encoder residual energy.
TraceRecord full_trace(const PerSampleGrad& grad);

enum class OrderingVerdict { Guaranteed, NotGuaranteed };

/// Sufficient check that sample i's full trace exceeds sample j's using
/// only last-layer traces and the residual ratio bound:
/// guaranteed iff tau_i_last > (1 + kappa_j) * tau_j_last.
/// Sufficient, not necessary.
OrderingVerdict full_trace_ordering(const TraceRecord& trace_i,
                                    const TraceRecord& trace_j);

/// Directional-conflict record for one sample. conflict is the
/// stabilized value 1 - <g_obs, g_ref>_F / (|g_obs| |g_ref| + eps);
/// raw_conflict drops the stabilizer and is defined only when both
/// norms are positive. ratio = obs_norm / ref_norm when defined.
struct ConflictRecord {
  double conflict = 0.0;
  double obs_norm = 0.0;
  double ref_norm = 0.0;
  std::optional<double> ratio;
  std::optional<double> raw_conflict;
};

/// When either gradient is numerically zero, the stabilized conflict
/// evaluates to 1: no directional evidence either way.
ConflictRecord geometric_conflict(const Matrix& g_obs, const Matrix& g_ref,
                                  double eps);

/// Both sides of the normalized-discrepancy identity
/// |g_obs - g_ref|^2 / b^2 = (r - 1)^2 + 2 r C  (unstabilized geometry).
struct DecompositionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

/// Throws DegenerateGeometryError when either norm is zero.
DecompositionCheck discrepancy_decomposition(const Matrix& g_obs,
                                             const Matrix& g_ref);

/// Sensitivity of the reference gradient to the reference target. At the
/// classifier layer the gap is (q_star - q) h^T, so grad_gap equals
/// bound = |h| * |q - q_star| exactly.
struct FidelityCheck {
  double grad_gap = 0.0;
  double bound = 0.0;
};

FidelityCheck reference_fidelity(const ForwardRecord& fr, const Vec& q,
                                 const Vec& q_star);

/// log((tau_obs + eps) / (tau_ref + eps)); finite for all nonnegative
/// traces and antisymmetric in its two trace arguments.
double radial_score(double tau_obs, double tau_ref, double eps);

/// s = beta * r_hat + (1 - beta) * c_hat, elementwise. Inputs are
/// expected to be already standardized over the epoch.
Vec fuse_scores(const Vec& r_hat, const Vec& c_hat, double beta);

/// Largest fusion coefficient that provably preserves the
/// noisy-over-hard-clean score ordering given a conflict margin
/// margin_conflict > 0 and a worst-case radial deficit margin_radial:
/// any beta in [0, bound) works, where bound =
/// margin_conflict / (margin_conflict + margin_radial).
double beta_ordering_bound(double margin_conflict, double margin_radial);

/// Per-sample score EMA. The first observation initializes the state.
double smooth_score(std::optional<double> prev_smoothed, double s_raw,
                    double mu);

/// w_i = sigmoid(-alpha * zscore(s_tilde)_i); strictly inside (0,1) and
/// decreasing in the score. Requires at least 2 samples.
Vec trust_weights(const Vec& s_tilde, double alpha);

/// Per-sample reliability quantities for one epoch, in dump-column order.
struct ReliabilityRecord {
  int sample_id = 0;
  int epoch = 0;
  double tau_obs = 0.0;
  double tau_ref = 0.0;
  double conflict = 0.0;
  double r_tau = 0.0;
  double s_raw = 0.0;
  double s_smoothed = 0.0;
  double trust_w = 0.0;
  bool is_noisy = false;
  bool is_hard_clean = false;
};

}  // namespace rgc
