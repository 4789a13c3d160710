#include "rgc/model.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "rgc/errors.hpp"
#include "rgc/numerics.hpp"

namespace rgc {

ModelParams make_mlp(int input_dim, const std::vector<int>& hidden_widths,
                     int num_classes, RandomStream& rng) {
  if (input_dim < 1 || num_classes < 2) {
    throw InvalidConfigError("make_mlp: need input_dim >= 1 and num_classes >= 2");
  }
  ModelParams params;
  int fan_in = input_dim;
  for (int width : hidden_widths) {
    if (width < 1) throw InvalidConfigError("make_mlp: hidden width must be >= 1");
    DenseLayer layer;
    layer.weight = Matrix(width, fan_in);
    const double scale = std::sqrt(1.0 / fan_in);
    for (double& w : layer.weight.data) w = scale * rng.normal();
    layer.bias = Vec(width, 0.0);
    params.encoder.push_back(std::move(layer));
    fan_in = width;
  }
  params.head = Matrix(num_classes, fan_in);
  const double scale = std::sqrt(1.0 / fan_in);
  for (double& w : params.head.data) w = scale * rng.normal();
  return params;
}

ForwardRecord forward(const ModelParams& params, const Vec& x) {
  if (static_cast<int>(x.size()) != params.input_dim()) {
    throw InvalidInputError("forward: input dimension mismatch");
  }
  ForwardRecord fr;
  fr.input = x;
  const Vec* current = &fr.input;
  fr.activations.reserve(params.encoder.size());
  for (const DenseLayer& layer : params.encoder) {
    Vec pre = matvec(layer.weight, *current);
    axpy(1.0, layer.bias, pre);
    for (double& v : pre) v = std::tanh(v);
    fr.activations.push_back(std::move(pre));
    current = &fr.activations.back();
  }
  fr.h = *current;
  fr.z = matvec(params.head, fr.h);
  fr.p = num::softmax(fr.z);
  return fr;
}

Matrix last_layer_gradient(const ForwardRecord& fr, const Vec& target) {
  if (target.size() != fr.p.size()) {
    throw InvalidInputError("last_layer_gradient: target dimension mismatch");
  }
  Vec residual(fr.p.size());
  for (std::size_t k = 0; k < residual.size(); ++k) residual[k] = fr.p[k] - target[k];
  return outer_product(residual, fr.h);
}

ModelGrad make_zero_grad(const ModelParams& params) {
  ModelGrad g;
  g.encoder.reserve(params.encoder.size());
  for (const DenseLayer& layer : params.encoder) {
    g.encoder.push_back({Matrix(layer.weight.rows, layer.weight.cols),
                         Vec(layer.bias.size(), 0.0)});
  }
  g.head = Matrix(params.head.rows, params.head.cols);
  return g;
}

ModelGrad backward(const ModelParams& params, const ForwardRecord& fr,
                   const Vec& logit_residual) {
  if (static_cast<int>(logit_residual.size()) != params.num_classes()) {
    throw InvalidInputError("backward: logit residual dimension mismatch");
  }
  ModelGrad g;
  g.encoder.resize(params.encoder.size());
  g.head = outer_product(logit_residual, fr.h);

  Vec dh = matvec_transpose(params.head, logit_residual);
  for (int l = static_cast<int>(params.encoder.size()) - 1; l >= 0; --l) {
    const Vec& act = fr.activations[static_cast<std::size_t>(l)];
    Vec ds(act.size());
    for (std::size_t i = 0; i < act.size(); ++i) {
      ds[i] = dh[i] * (1.0 - act[i] * act[i]);  // tanh'
    }
    const Vec& below = (l == 0) ? fr.input : fr.activations[static_cast<std::size_t>(l) - 1];
    g.encoder[static_cast<std::size_t>(l)].weight = outer_product(ds, below);
    g.encoder[static_cast<std::size_t>(l)].bias = ds;
    if (l > 0) dh = matvec_transpose(params.encoder[static_cast<std::size_t>(l)].weight, ds);
  }
  return g;
}

void accumulate(ModelGrad& acc, const ModelGrad& g, double scale) {
  if (acc.encoder.size() != g.encoder.size() || !acc.head.same_shape(g.head)) {
    throw InvalidInputError("accumulate: gradient shape mismatch");
  }
  for (std::size_t l = 0; l < g.encoder.size(); ++l) {
    axpy(scale, g.encoder[l].weight.data, acc.encoder[l].weight.data);
    axpy(scale, g.encoder[l].bias, acc.encoder[l].bias);
  }
  axpy(scale, g.head.data, acc.head.data);
}

PerSampleGrad full_gradient(const ModelParams& params, const Vec& x,
                            const Vec& target) {
  const ForwardRecord fr = forward(params, x);
  Vec residual(fr.p.size());
  for (std::size_t k = 0; k < residual.size(); ++k) residual[k] = fr.p[k] - target[k];
  ModelGrad g = backward(params, fr, residual);

  PerSampleGrad out;
  out.head = std::move(g.head);
  for (const DenseLayer& layer : g.encoder) {
    out.encoder_flat.insert(out.encoder_flat.end(), layer.weight.data.begin(),
                            layer.weight.data.end());
    out.encoder_flat.insert(out.encoder_flat.end(), layer.bias.begin(), layer.bias.end());
  }
  return out;
}

void apply_sgd(ModelParams& params, const ModelGrad& grad, double lr) {
  if (lr <= 0.0) {
    throw InvalidConfigError("apply_sgd: learning rate must be > 0");
  }
  if (grad.encoder.size() != params.encoder.size() || !grad.head.same_shape(params.head)) {
    throw InvalidInputError("apply_sgd: gradient shape mismatch");
  }
  for (const DenseLayer& layer : grad.encoder) {
    if (!all_finite(layer.weight) || !all_finite(layer.bias)) {
      throw TrainingDivergedError("apply_sgd: non-finite encoder gradient");
    }
  }
  if (!all_finite(grad.head)) {
    throw TrainingDivergedError("apply_sgd: non-finite head gradient");
  }
  for (std::size_t l = 0; l < params.encoder.size(); ++l) {
    axpy(-lr, grad.encoder[l].weight.data, params.encoder[l].weight.data);
    axpy(-lr, grad.encoder[l].bias, params.encoder[l].bias);
  }
  axpy(-lr, grad.head.data, params.head.data);
}

namespace {

void check_same_architecture(const ModelParams& a, const ModelParams& b,
                             const char* what) {
  bool ok = a.encoder.size() == b.encoder.size() && a.head.same_shape(b.head);
  for (std::size_t l = 0; ok && l < a.encoder.size(); ++l) {
    ok = a.encoder[l].weight.same_shape(b.encoder[l].weight) &&
         a.encoder[l].bias.size() == b.encoder[l].bias.size();
  }
  if (!ok) throw InvalidInputError(std::string(what) + ": architecture mismatch");
}

void ema_vec(Vec& teacher, const Vec& student, double m) {
  for (std::size_t i = 0; i < teacher.size(); ++i) {
    teacher[i] = m * teacher[i] + (1.0 - m) * student[i];
  }
}

}  // namespace

void ema_update(TeacherState& teacher, const ModelParams& student) {
  check_same_architecture(teacher.params, student, "ema_update");
  const double m = teacher.momentum;
  for (std::size_t l = 0; l < student.encoder.size(); ++l) {
    ema_vec(teacher.params.encoder[l].weight.data, student.encoder[l].weight.data, m);
    ema_vec(teacher.params.encoder[l].bias, student.encoder[l].bias, m);
  }
  ema_vec(teacher.params.head.data, student.head.data, m);
}

Vec teacher_target(const TeacherState& teacher, const Vec& x) {
  const ForwardRecord fr = forward(teacher.params, x);
  return num::sharpen(fr.p, teacher.temperature);
}

double parameter_distance(const ModelParams& a, const ModelParams& b) {
  check_same_architecture(a, b, "parameter_distance");
  double d = 0.0;
  auto update = [&d](const Vec& u, const Vec& v) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      d = std::max(d, std::abs(u[i] - v[i]));
    }
  };
  for (std::size_t l = 0; l < a.encoder.size(); ++l) {
    update(a.encoder[l].weight.data, b.encoder[l].weight.data);
    update(a.encoder[l].bias, b.encoder[l].bias);
  }
  update(a.head.data, b.head.data);
  return d;
}

std::size_t parameter_count(const ModelParams& params) {
  std::size_t n = params.head.data.size();
  for (const DenseLayer& layer : params.encoder) {
    n += layer.weight.data.size() + layer.bias.size();
  }
  return n;
}

void save_checkpoint(const ModelParams& params, const std::string& path) {
  nlohmann::json arrays;
  auto put = [&arrays](const std::string& name, const std::vector<long>& shape,
                       const Vec& data) {
    arrays[name] = {{"shape", shape}, {"data", data}};
  };
  for (std::size_t l = 0; l < params.encoder.size(); ++l) {
    const DenseLayer& layer = params.encoder[l];
    put("encoder." + std::to_string(l) + ".weight",
        {layer.weight.rows, layer.weight.cols}, layer.weight.data);
    put("encoder." + std::to_string(l) + ".bias",
        {static_cast<long>(layer.bias.size())}, layer.bias);
  }
  put("head", {params.head.rows, params.head.cols}, params.head.data);

  nlohmann::json doc = {{"format", "rgc-checkpoint-v1"},
                        {"encoder_layers", params.encoder.size()},
                        {"arrays", arrays}};
  std::ofstream out(path);
  if (!out) throw InvalidInputError("save_checkpoint: cannot open " + path);
  out << doc.dump(2) << "\n";
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("load_checkpoint: cannot open " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  if (doc.value("format", "") != "rgc-checkpoint-v1") {
    throw InvalidInputError("load_checkpoint: unknown format in " + path);
  }
  const nlohmann::json& arrays = doc.at("arrays");
  ModelParams params;
  const std::size_t layers = doc.at("encoder_layers").get<std::size_t>();
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& w = arrays.at("encoder." + std::to_string(l) + ".weight");
    const auto& b = arrays.at("encoder." + std::to_string(l) + ".bias");
    DenseLayer layer;
    layer.weight = Matrix(w.at("shape").at(0).get<int>(), w.at("shape").at(1).get<int>());
    layer.weight.data = w.at("data").get<Vec>();
    layer.bias = b.at("data").get<Vec>();
    params.encoder.push_back(std::move(layer));
  }
  const auto& h = arrays.at("head");
  params.head = Matrix(h.at("shape").at(0).get<int>(), h.at("shape").at(1).get<int>());
  params.head.data = h.at("data").get<Vec>();
  return params;
}

}  // namespace rgc
