#include "rgc/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "rgc/errors.hpp"

namespace rgc::num {

Vec softmax(const Vec& logits) {
  if (logits.size() < 2) {
    throw InvalidInputError("softmax: need at least 2 logits");
  }
  if (!all_finite(logits)) {
    throw InvalidInputError("softmax: non-finite logit");
  }
  const double zmax = *std::max_element(logits.begin(), logits.end());
  Vec p(logits.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - zmax);
    sum += p[k];
  }
  for (double& v : p) v /= sum;
  return p;
}

Vec sharpen(const Vec& p, double temperature) {
  if (temperature <= 0.0) {
    throw InvalidConfigError("sharpen: temperature must be > 0");
  }
  double total = 0.0;
  for (double v : p) {
    if (v < 0.0) throw InvalidInputError("sharpen: negative probability");
    total += v;
  }
  if (total <= 0.0) {
    throw InvalidInputError("sharpen: all-zero probability vector");
  }
  const double inv_t = 1.0 / temperature;
  Vec out(p.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    out[k] = std::pow(p[k], inv_t);
    sum += out[k];
  }
  for (double& v : out) v /= sum;
  return out;
}

double cross_entropy(const Vec& p, const Vec& target) {
  if (p.size() != target.size()) {
    throw InvalidInputError("cross_entropy: dimension mismatch");
  }
  double loss = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    loss -= target[k] * std::log(std::max(p[k], kProbFloor));
  }
  return loss;
}

double cosine(const Vec& u, const Vec& v, double eps) {
  if (u.size() != v.size()) {
    throw InvalidInputError("cosine: dimension mismatch");
  }
  const double denom = norm(u) * norm(v) + eps;
  if (denom == 0.0) return 0.0;
  return dot(u, v) / denom;
}

Vec zscore(const Vec& values) {
  const std::size_t n = values.size();
  if (n < 2) {
    throw InvalidInputError("zscore: need at least 2 values");
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);  // population variance
  const double denom = std::sqrt(var) + kZscoreEps;
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (values[i] - mean) / denom;
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

bool is_prob_vector(const Vec& p, double tol) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0 || v > 1.0) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

}  // namespace rgc::num
