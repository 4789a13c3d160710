#include "rgc/linalg.hpp"

#include <cassert>
#include <cmath>

#include "rgc/errors.hpp"

namespace rgc {

Matrix outer_product(const Vec& u, const Vec& v) {
  Matrix m(static_cast<int>(u.size()), static_cast<int>(v.size()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      m.data[i * v.size() + j] = u[i] * v[j];
    }
  }
  return m;
}

double dot(const Vec& u, const Vec& v) {
  if (u.size() != v.size()) {
    throw InvalidInputError("dot: size mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc;
}

double squared_norm(const Vec& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

double norm(const Vec& v) { return std::sqrt(squared_norm(v)); }

double frobenius_dot(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) {
    throw InvalidInputError("frobenius_dot: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
  return acc;
}

double frobenius_squared_norm(const Matrix& m) { return squared_norm(m.data); }

double frobenius_norm(const Matrix& m) { return std::sqrt(frobenius_squared_norm(m)); }

Vec matvec(const Matrix& m, const Vec& x) {
  if (static_cast<int>(x.size()) != m.cols) {
    throw InvalidInputError("matvec: size mismatch");
  }
  Vec y(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double acc = 0.0;
    const double* row = m.data.data() + static_cast<std::size_t>(i) * m.cols;
    for (int j = 0; j < m.cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

Vec matvec_transpose(const Matrix& m, const Vec& x) {
  if (static_cast<int>(x.size()) != m.rows) {
    throw InvalidInputError("matvec_transpose: size mismatch");
  }
  Vec y(m.cols, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const double xi = x[i];
    const double* row = m.data.data() + static_cast<std::size_t>(i) * m.cols;
    for (int j = 0; j < m.cols; ++j) y[j] += row[j] * xi;
  }
  return y;
}

void axpy(double a, const Vec& x, Vec& y) {
  if (x.size() != y.size()) {
    throw InvalidInputError("axpy: size mismatch");
  }
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

bool all_finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool all_finite(const Matrix& m) { return all_finite(m.data); }

}  // namespace rgc
