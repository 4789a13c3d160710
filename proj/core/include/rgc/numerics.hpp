#pragma once

#include "rgc/linalg.hpp"

namespace rgc::num {

/// Probabilities are clamped at this floor before any log.
inline constexpr double kProbFloor = 1e-12;

/// Denominator stabilizer used by zscore, matching the "+eps" convention
/// of the score standardization.
inline constexpr double kZscoreEps = 1e-8;

/// Max-subtracted softmax. Requires K >= 2 finite entries.
Vec softmax(const Vec& logits);

/// Temperature sharpening: out_k proportional to p_k^(1/T), renormalized.
/// T = 1 is the identity. Requires T > 0 and a nonnegative p with at
/// least one positive entry.
Vec sharpen(const Vec& p, double temperature);

/// Soft-label cross-entropy -sum_k target_k * log(p_k), with p clamped
/// at kProbFloor. Hard labels are one-hot targets.
double cross_entropy(const Vec& p, const Vec& target);

/// <u,v> / (|u| * |v| + eps). Zero denominators evaluate to 0.
double cosine(const Vec& u, const Vec& v, double eps);

/// (v - mean) / (population_std + kZscoreEps). Constant input maps to
/// all zeros. Requires N >= 2.
Vec zscore(const Vec& values);

/// Numerically stable logistic function.
double sigmoid(double x);

/// True when entries are in [0,1] and sum to 1 within tol.
bool is_prob_vector(const Vec& p, double tol = 1e-9);

}  // namespace rgc::num
