#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rgc/errors.hpp"
#include "rgc/numerics.hpp"
#include "rgc/rng.hpp"

using namespace rgc;

TEST_CASE("softmax basics") {
  const Vec uniform = num::softmax({0.0, 0.0, 0.0});
  for (double v : uniform) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const Vec two = num::softmax({std::log(2.0), 0.0});
  CHECK(two[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(two[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const Vec extreme = num::softmax({1000.0, 0.0});
  CHECK(all_finite(extreme));
  CHECK(extreme[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(extreme[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("softmax rejects bad input") {
  CHECK_THROWS_AS(num::softmax({1.0}), InvalidInputError);
  CHECK_THROWS_AS(num::softmax({1.0, std::nan("")}), InvalidInputError);
  CHECK_THROWS_AS(num::softmax({1.0, std::numeric_limits<double>::infinity()}),
                  InvalidInputError);
}

TEST_CASE("softmax sums to one for large-magnitude logits") {
  RandomStream rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    Vec logits(2 + rng.uniform_int(0, 8));
    for (double& v : logits) v = rng.uniform(-1e3, 1e3);
    const Vec p = num::softmax(logits);
    double sum = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("sharpen power rule") {
  const Vec identity = num::sharpen({0.8, 0.2}, 1.0);
  CHECK(identity[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(identity[1] == doctest::Approx(0.2).epsilon(1e-12));

  const Vec sharp = num::sharpen({0.8, 0.2}, 0.5);
  CHECK(sharp[0] == doctest::Approx(16.0 / 17.0).epsilon(1e-12));
  CHECK(sharp[1] == doctest::Approx(1.0 / 17.0).epsilon(1e-12));

  const Vec symmetric = num::sharpen({0.5, 0.5}, 0.31);
  CHECK(symmetric[0] == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(num::sharpen({0.5, 0.5}, 0.0), InvalidConfigError);
  CHECK_THROWS_AS(num::sharpen({0.5, 0.5}, -1.0), InvalidConfigError);
  CHECK_THROWS_AS(num::sharpen({0.0, 0.0}, 1.0), InvalidInputError);
  CHECK_THROWS_AS(num::sharpen({-0.1, 1.1}, 1.0), InvalidInputError);
}

TEST_CASE("sharpen preserves argmax and T=1 identity on random inputs") {
  RandomStream rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Vec logits(3);
    for (double& v : logits) v = rng.uniform(-3.0, 3.0);
    const Vec p = num::softmax(logits);
    const Vec same = num::sharpen(p, 1.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      CHECK(std::abs(same[k] - p[k]) < 1e-12);
    }
    const double t = rng.uniform(0.05, 3.0);
    const Vec sharp = num::sharpen(p, t);
    const auto arg = [](const Vec& v) {
      return std::max_element(v.begin(), v.end()) - v.begin();
    };
    CHECK(arg(sharp) == arg(p));
    CHECK(num::is_prob_vector(sharp));
  }
}

TEST_CASE("cross entropy") {
  CHECK(num::cross_entropy({1.0, 0.0}, {1.0, 0.0}) <= 1e-11);
  CHECK(num::cross_entropy({0.5, 0.5}, {1.0, 0.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(num::cross_entropy({0.25, 0.75}, {0.5, 0.5}) ==
        doctest::Approx(0.8369882167858358).epsilon(1e-12));
  CHECK_THROWS_AS(num::cross_entropy({0.5, 0.5}, {1.0, 0.0, 0.0}), InvalidInputError);
}

TEST_CASE("cross entropy clamps zero probabilities") {
  const double loss = num::cross_entropy({0.0, 1.0}, {1.0, 0.0});
  CHECK(std::isfinite(loss));
  CHECK(loss == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("cosine") {
  CHECK(num::cosine({1.0, 0.0}, {1.0, 0.0}, 0.0) == doctest::Approx(1.0));
  CHECK(num::cosine({1.0, 0.0}, {0.0, 1.0}, 1e-8) == doctest::Approx(0.0));
  CHECK(num::cosine({0.0, 0.0}, {1.0, 0.0}, 1e-8) == doctest::Approx(0.0));
  CHECK(num::cosine({0.0, 0.0}, {1.0, 0.0}, 0.0) == 0.0);  // guarded denominator
  CHECK_THROWS_AS(num::cosine({1.0}, {1.0, 2.0}, 0.0), InvalidInputError);
}

TEST_CASE("cosine self-similarity and scale invariance") {
  RandomStream rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Vec u(5), v(5);
    for (double& x : u) x = rng.normal();
    for (double& x : v) x = rng.normal();
    CHECK(num::cosine(u, u, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    const double c = rng.uniform(0.1, 10.0);
    Vec cu(u);
    for (double& x : cu) x *= c;
    CHECK(num::cosine(cu, v, 0.0) ==
          doctest::Approx(num::cosine(u, v, 0.0)).epsilon(1e-10));
  }
}

TEST_CASE("zscore") {
  const Vec constant = num::zscore({5.0, 5.0, 5.0});
  for (double v : constant) CHECK(v == 0.0);

  const Vec pair = num::zscore({0.0, 2.0});
  CHECK(pair[0] == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(pair[1] == doctest::Approx(1.0).epsilon(1e-7));

  const Vec triple = num::zscore({1.0, 2.0, 3.0});
  CHECK(triple[0] == doctest::Approx(-std::sqrt(1.5)).epsilon(1e-7));
  CHECK(triple[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(triple[2] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-7));

  CHECK_THROWS_AS(num::zscore({1.0}), InvalidInputError);
}

TEST_CASE("zscore output moments") {
  RandomStream rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Vec values(20);
    for (double& v : values) v = rng.uniform(-10.0, 10.0);
    const Vec z = num::zscore(values);
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(z.size());
    CHECK(std::abs(mean) < 1e-9);
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    var /= static_cast<double>(z.size());
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-6);
  }
}

TEST_CASE("sigmoid") {
  CHECK(num::sigmoid(0.0) == doctest::Approx(0.5));
  CHECK(num::sigmoid(700.0) == doctest::Approx(1.0));
  CHECK(num::sigmoid(-700.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(num::sigmoid(700.0)));
  CHECK(std::isfinite(num::sigmoid(-700.0)));

  RandomStream rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const double x = rng.uniform(-50.0, 50.0);
    CHECK(num::sigmoid(x) + num::sigmoid(-x) == doctest::Approx(1.0).epsilon(1e-12));
  }
}
