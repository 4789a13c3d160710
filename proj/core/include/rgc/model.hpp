#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rgc/linalg.hpp"
#include "rgc/rng.hpp"

namespace rgc {

/// One encoder layer: a = tanh(W x + b).
struct DenseLayer {
  Matrix weight;
  Vec bias;
};

/// Student parameters: encoder stack plus a linear classifier head with
/// no bias (the trace and conflict closed forms assume z = W h).
/// Read-only operations (forward, gradients) may run concurrently on a
/// frozen ModelParams; updates require exclusive access.
struct ModelParams {
  std::vector<DenseLayer> encoder;  // may be empty: h = x
  Matrix head;                      // K x D

  int input_dim() const {
    return encoder.empty() ? head.cols : encoder.front().weight.cols;
  }
  int feature_dim() const { return head.cols; }
  int num_classes() const { return head.rows; }
};

/// tanh MLP with the given hidden widths; weights ~ N(0, 1/fan_in),
/// biases zero. Deterministic for a given stream state.
ModelParams make_mlp(int input_dim, const std::vector<int>& hidden_widths,
                     int num_classes, RandomStream& rng);

/// Cached forward pass: activations are kept for backprop.
struct ForwardRecord {
  Vec input;                      // x
  std::vector<Vec> activations;   // post-tanh output of each encoder layer
  Vec h;                          // encoder output (== input for empty encoder)
  Vec z;                          // head * h
  Vec p;                          // softmax(z)
};

ForwardRecord forward(const ModelParams& params, const Vec& x);

/// Closed-form classifier-head gradient of cross-entropy at a soft or
/// one-hot target: (p - target) h^T.
Matrix last_layer_gradient(const ForwardRecord& fr, const Vec& target);

/// Full parameter gradient, same shapes as ModelParams.
struct ModelGrad {
  std::vector<DenseLayer> encoder;
  Matrix head;
};

ModelGrad make_zero_grad(const ModelParams& params);

/// Exact backprop given the loss gradient w.r.t. the logits. For
/// cross-entropy at target t this is p - t; the trust-weighted objective
/// passes the convex combination of the two residuals.
ModelGrad backward(const ModelParams& params, const ForwardRecord& fr,
                   const Vec& logit_residual);

/// acc += scale * g
void accumulate(ModelGrad& acc, const ModelGrad& g, double scale);

/// Per-sample exact gradient with the encoder part flattened
/// (layer-major, weights row-major then bias). Validation mode only;
/// the training path uses the last-layer closed forms.
struct PerSampleGrad {
  Matrix head;       // K x D
  Vec encoder_flat;  // empty for a zero-depth encoder
};

PerSampleGrad full_gradient(const ModelParams& params, const Vec& x,
                            const Vec& target);

/// params -= lr * grad. Throws TrainingDivergedError on non-finite
/// gradient entries. Requires exclusive access to params.
void apply_sgd(ModelParams& params, const ModelGrad& grad, double lr);

/// EMA teacher: a lagged copy of the student plus the sharpening
/// temperature used for its targets.
struct TeacherState {
  ModelParams params;
  double momentum = 0.999;     // m
  double temperature = 0.7;    // T
};

/// theta' <- m * theta' + (1 - m) * theta, elementwise.
void ema_update(TeacherState& teacher, const ModelParams& student);

/// q = sharpen(softmax(teacher logits), T).
Vec teacher_target(const TeacherState& teacher, const Vec& x);

/// Largest absolute elementwise difference over all parameters.
double parameter_distance(const ModelParams& a, const ModelParams& b);

std::size_t parameter_count(const ModelParams& params);

/// Checkpoints are a JSON container of named flat real arrays
/// ("encoder.<i>.weight", "encoder.<i>.bias", "head") with shapes,
/// lossless for doubles.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace rgc
