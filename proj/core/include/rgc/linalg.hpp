#pragma once

#include <cstddef>
#include <vector>

namespace rgc {

using Vec = std::vector<double>;

/// Dense row-major matrix. Covers only the shapes this project needs
/// (classifier heads, MLP layers); not a general tensor type.
struct Matrix {
  int rows = 0;
  int cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

  double& operator()(int i, int j) {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }

  bool same_shape(const Matrix& other) const {
    return rows == other.rows && cols == other.cols;
  }
};

/// u ⊗ v as a |u| x |v| matrix.
Matrix outer_product(const Vec& u, const Vec& v);

double dot(const Vec& u, const Vec& v);
double squared_norm(const Vec& v);
double norm(const Vec& v);

double frobenius_dot(const Matrix& a, const Matrix& b);
double frobenius_squared_norm(const Matrix& m);
double frobenius_norm(const Matrix& m);

/// M x
Vec matvec(const Matrix& m, const Vec& x);
/// M^T x
Vec matvec_transpose(const Matrix& m, const Vec& x);

/// y += a * x
void axpy(double a, const Vec& x, Vec& y);

bool all_finite(const Vec& v);
bool all_finite(const Matrix& m);

}  // namespace rgc
