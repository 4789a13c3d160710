#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "rgc/errors.hpp"
#include "rgc/model.hpp"
#include "rgc/numerics.hpp"
#include "rgc/rng.hpp"

using namespace rgc;

namespace {

// Central-difference gradient of cross_entropy(forward(params, x).p, target)
// with respect to one parameter slot. Step 1e-4. The slot must point into
// params; it is restored before returning.
double finite_diff(ModelParams& params, double* slot, const Vec& x, const Vec& target) {
  const double step = 1e-4;
  const double original = *slot;
  *slot = original + step;
  const double up = num::cross_entropy(forward(params, x).p, target);
  *slot = original - step;
  const double down = num::cross_entropy(forward(params, x).p, target);
  *slot = original;
  return (up - down) / (2.0 * step);
}

bool grad_close(double analytic, double numeric) {
  const double diff = std::abs(analytic - numeric);
  return diff <= std::max(1e-5 * std::max(std::abs(analytic), std::abs(numeric)), 1e-7);
}

Vec random_prob(int k, RandomStream& rng) {
  Vec logits(k);
  for (double& v : logits) v = rng.uniform(-2.0, 2.0);
  return num::softmax(logits);
}

ModelParams identity_head_model(int k) {
  ModelParams params;
  params.head = Matrix(k, k);
  for (int i = 0; i < k; ++i) params.head(i, i) = 1.0;
  return params;
}

}  // namespace

TEST_CASE("forward on zero-depth encoder") {
  const ModelParams params = identity_head_model(2);
  const ForwardRecord fr = forward(params, {0.0, 0.0});
  CHECK(fr.p[0] == doctest::Approx(0.5));
  CHECK(fr.p[1] == doctest::Approx(0.5));
  CHECK(fr.h == Vec{0.0, 0.0});

  ModelParams zero_head = params;
  zero_head.head = Matrix(2, 2, 0.0);
  const ForwardRecord fu = forward(zero_head, {3.0, -1.0});
  CHECK(fu.p[0] == doctest::Approx(0.5));
}

TEST_CASE("forward caches consistent logits and rejects bad shapes") {
  RandomStream rng(1);
  const ModelParams params = make_mlp(4, {8}, 3, rng);
  const Vec x = {0.3, -0.2, 1.0, 0.5};
  const ForwardRecord fr = forward(params, x);
  const Vec z = matvec(params.head, fr.h);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(fr.z[i] == z[i]);
  CHECK(num::is_prob_vector(fr.p));
  CHECK_THROWS_AS(forward(params, {1.0, 2.0}), InvalidInputError);
}

TEST_CASE("forward is deterministic for a fixed seed") {
  RandomStream rng_a(99), rng_b(99);
  const ModelParams a = make_mlp(5, {16, 16}, 4, rng_a);
  const ModelParams b = make_mlp(5, {16, 16}, 4, rng_b);
  CHECK(parameter_distance(a, b) == 0.0);
  const Vec x = {0.1, 0.2, 0.3, 0.4, 0.5};
  const ForwardRecord fa = forward(a, x);
  const ForwardRecord fb = forward(b, x);
  CHECK(fa.p == fb.p);
  CHECK(fa.h == fb.h);
}

TEST_CASE("last layer gradient closed form") {
  ModelParams params = identity_head_model(2);
  const ForwardRecord fr = forward(params, {0.0, 0.0});  // p = [.5,.5], h = [0,0]

  SUBCASE("p equals target gives zero matrix") {
    const Matrix g = last_layer_gradient(fr, fr.p);
    for (double v : g.data) CHECK(v == 0.0);
  }

  SUBCASE("hand outer product") {
    ForwardRecord rec;
    rec.h = {1.0, 1.0};
    rec.p = {0.5, 0.5};
    const Matrix g = last_layer_gradient(rec, {1.0, 0.0});
    CHECK(g(0, 0) == doctest::Approx(-0.5));
    CHECK(g(0, 1) == doctest::Approx(-0.5));
    CHECK(g(1, 0) == doctest::Approx(0.5));
    CHECK(g(1, 1) == doctest::Approx(0.5));
  }
}

TEST_CASE("last layer gradient matches finite differences") {
  RandomStream rng(123);
  ModelParams params = make_mlp(3, {}, 3, rng);
  const Vec x = {0.4, -1.2, 0.7};
  const Vec target = random_prob(3, rng);
  const ForwardRecord fr = forward(params, x);
  const Matrix g = last_layer_gradient(fr, target);
  for (int i = 0; i < g.rows; ++i) {
    for (int j = 0; j < g.cols; ++j) {
      const double numeric = finite_diff(params, &params.head(i, j), x, target);
      CHECK_MESSAGE(grad_close(g(i, j), numeric), "head(", i, ",", j, ")");
    }
  }
}

// Gradient-check suite: full backprop against central finite differences on
// 200 random (params, x, target) instances.
TEST_CASE("full gradient matches finite differences on random instances") {
  RandomStream rng(2024);
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + rng.uniform_int(0, 2);
    const int k = 2 + rng.uniform_int(0, 2);
    std::vector<int> hidden;
    const int depth = rng.uniform_int(0, 2);
    for (int l = 0; l < depth; ++l) hidden.push_back(2 + rng.uniform_int(0, 4));
    ModelParams params = make_mlp(dim, hidden, k, rng);

    Vec x(dim);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    const Vec target = random_prob(k, rng);

    const PerSampleGrad grad = full_gradient(params, x, target);

    // Head block.
    for (int i = 0; i < params.head.rows; ++i) {
      for (int j = 0; j < params.head.cols; ++j) {
        const double numeric = finite_diff(params, &params.head(i, j), x, target);
        if (!grad_close(grad.head(i, j), numeric)) ++failures;
      }
    }
    // Encoder block, flattened layer-major: weights row-major then bias.
    std::size_t flat = 0;
    for (std::size_t l = 0; l < params.encoder.size(); ++l) {
      for (double& slot : params.encoder[l].weight.data) {
        const double numeric = finite_diff(params, &slot, x, target);
        if (!grad_close(grad.encoder_flat[flat++], numeric)) ++failures;
      }
      for (double& slot : params.encoder[l].bias) {
        const double numeric = finite_diff(params, &slot, x, target);
        if (!grad_close(grad.encoder_flat[flat++], numeric)) ++failures;
      }
    }
    CHECK(flat == grad.encoder_flat.size());
  }
  CHECK(failures == 0);
}

TEST_CASE("full gradient edge cases") {
  RandomStream rng(5);

  SUBCASE("zero-depth encoder leaves encoder_flat empty") {
    ModelParams params = make_mlp(3, {}, 2, rng);
    const Vec x = {1.0, 2.0, 3.0};
    const PerSampleGrad g = full_gradient(params, x, {1.0, 0.0});
    CHECK(g.encoder_flat.empty());
    const Matrix direct = last_layer_gradient(forward(params, x), {1.0, 0.0});
    for (std::size_t i = 0; i < direct.data.size(); ++i) {
      CHECK(std::abs(g.head.data[i] - direct.data[i]) < 1e-12);
    }
  }

  SUBCASE("p equals target gives all-zero gradients") {
    ModelParams params = make_mlp(3, {4}, 2, rng);
    const Vec x = {0.5, -0.5, 1.5};
    const Vec p = forward(params, x).p;
    const PerSampleGrad g = full_gradient(params, x, p);
    for (double v : g.head.data) CHECK(std::abs(v) < 1e-15);
    for (double v : g.encoder_flat) CHECK(std::abs(v) < 1e-15);
  }
}

// The full squared norm always splits exactly into head and encoder parts.
TEST_CASE("trace decomposition is exact by construction") {
  RandomStream rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    ModelParams params = make_mlp(4, {6}, 3, rng);
    Vec x(4);
    for (double& v : x) v = rng.normal();
    const PerSampleGrad g = full_gradient(params, x, random_prob(3, rng));
    const double total = frobenius_squared_norm(g.head) + squared_norm(g.encoder_flat);
    const double head_part = frobenius_squared_norm(g.head);
    const double enc_part = squared_norm(g.encoder_flat);
    CHECK(std::abs(total - (head_part + enc_part)) < 1e-12);
  }
}

TEST_CASE("sgd step") {
  RandomStream rng(8);
  ModelParams params = make_mlp(3, {4}, 2, rng);

  SUBCASE("zero gradient leaves params unchanged") {
    const ModelParams before = params;
    apply_sgd(params, make_zero_grad(params), 0.5);
    CHECK(parameter_distance(before, params) == 0.0);
  }

  SUBCASE("lr=1 with grad=params zeroes everything") {
    ModelGrad grad = make_zero_grad(params);
    grad.head = params.head;
    for (std::size_t l = 0; l < params.encoder.size(); ++l) {
      grad.encoder[l] = params.encoder[l];
    }
    apply_sgd(params, grad, 1.0);
    for (double v : params.head.data) CHECK(v == 0.0);
    for (const DenseLayer& layer : params.encoder) {
      for (double v : layer.weight.data) CHECK(v == 0.0);
    }
  }

  SUBCASE("two half steps equal one full step") {
    ModelParams twice = params;
    ModelGrad grad = make_zero_grad(params);
    for (double& v : grad.head.data) v = rng.normal();
    for (auto& layer : grad.encoder) {
      for (double& v : layer.weight.data) v = rng.normal();
      for (double& v : layer.bias) v = rng.normal();
    }
    apply_sgd(params, grad, 0.2);
    apply_sgd(twice, grad, 0.1);
    apply_sgd(twice, grad, 0.1);
    CHECK(parameter_distance(params, twice) < 1e-15);
  }

  SUBCASE("non-finite gradient diverges") {
    ModelGrad grad = make_zero_grad(params);
    grad.head.data[0] = std::nan("");
    CHECK_THROWS_AS(apply_sgd(params, grad, 0.1), TrainingDivergedError);
  }

  SUBCASE("non-positive lr rejected") {
    CHECK_THROWS_AS(apply_sgd(params, make_zero_grad(params), 0.0), InvalidConfigError);
  }
}

TEST_CASE("ema update") {
  RandomStream rng(9);
  const ModelParams student = make_mlp(3, {4}, 2, rng);
  ModelParams other = make_mlp(3, {4}, 2, rng);

  SUBCASE("m=0 copies the student") {
    TeacherState teacher{other, 0.0, 1.0};
    ema_update(teacher, student);
    CHECK(parameter_distance(teacher.params, student) == 0.0);
  }

  SUBCASE("midpoint at m=0.5 on a scalar view") {
    ModelParams zeros = student;
    for (double& v : zeros.head.data) v = 0.0;
    for (auto& layer : zeros.encoder) {
      for (double& v : layer.weight.data) v = 0.0;
      for (double& v : layer.bias) v = 0.0;
    }
    ModelParams twos = zeros;
    for (double& v : twos.head.data) v = 2.0;
    TeacherState teacher{zeros, 0.5, 1.0};
    ema_update(teacher, twos);
    for (double v : teacher.params.head.data) CHECK(v == doctest::Approx(1.0));
  }

  SUBCASE("shape mismatch") {
    RandomStream rng2(10);
    TeacherState teacher{make_mlp(3, {5}, 2, rng2), 0.5, 1.0};
    CHECK_THROWS_AS(ema_update(teacher, student), InvalidInputError);
  }
}

// With a frozen student the teacher gap contracts by exactly m per step.
TEST_CASE("ema fixed point convergence") {
  RandomStream rng(12);
  const ModelParams student = make_mlp(3, {4}, 2, rng);
  ModelParams far = student;
  for (double& v : far.head.data) v += 1.0;
  const double m = 0.8;
  TeacherState teacher{far, m, 1.0};
  const double initial_gap = parameter_distance(teacher.params, student);
  const int steps = 20;
  for (int t = 0; t < steps; ++t) ema_update(teacher, student);
  const double expected = initial_gap * std::pow(m, steps);
  CHECK(std::abs(parameter_distance(teacher.params, student) - expected) < 1e-9);
}

TEST_CASE("teacher target") {
  RandomStream rng(13);
  const ModelParams student = make_mlp(3, {4}, 2, rng);
  const Vec x = {0.2, -0.1, 0.4};

  SUBCASE("teacher equals student at T=1 reproduces p") {
    TeacherState teacher{student, 0.999, 1.0};
    const Vec q = teacher_target(teacher, x);
    const Vec p = forward(student, x).p;
    for (std::size_t k = 0; k < q.size(); ++k) {
      CHECK(q[k] == doctest::Approx(p[k]).epsilon(1e-12));
    }
  }

  SUBCASE("T=0.7 applies the power rule") {
    // Build a head-only teacher whose softmax is exactly [0.6, 0.4].
    ModelParams probe = identity_head_model(2);
    probe.head = Matrix(2, 1);
    probe.head(0, 0) = std::log(0.6);
    probe.head(1, 0) = std::log(0.4);
    TeacherState teacher{probe, 0.999, 0.7};
    const Vec q = teacher_target(teacher, {1.0});
    CHECK(q[0] == doctest::Approx(0.6408915607921499).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(0.35910843920785007).epsilon(1e-12));
  }
}

TEST_CASE("checkpoint round trip") {
  RandomStream rng(14);
  const ModelParams params = make_mlp(4, {6, 5}, 3, rng);
  const auto path = std::filesystem::temp_directory_path() / "rgc_ckpt_test.json";
  save_checkpoint(params, path.string());
  const ModelParams loaded = load_checkpoint(path.string());
  CHECK(parameter_distance(params, loaded) == 0.0);
  std::filesystem::remove(path);
}
