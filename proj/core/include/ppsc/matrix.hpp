#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace ppsc::numerics {

// Dense row-major matrix of doubles. Desk-scale only; every factorization in
// the project goes through this module.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(int n);
  static Matrix column(std::span<const double> v);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  Matrix transpose() const;
  Matrix operator*(const Matrix& rhs) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix scaled(double s) const;
  std::vector<double> apply(std::span<const double> v) const;          // A v
  std::vector<double> apply_transpose(std::span<const double> v) const;  // A^T v

  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;
  // max |a_ij - a_ji| over pairs.
  double asymmetry() const;

 private:
  int rows_;
  int cols_;
  std::vector<double> data_;
};

struct EigResult {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // orthonormal columns, paired with eigenvalues
};

struct SvdResult {
  Matrix u;                   // left vectors for the positive singular values
  std::vector<double> sigma;  // descending, length min-side padded to cols of v
  Matrix v;                   // full set of right vectors (square cols(a) x cols(a))
};

// Cyclic Jacobi eigendecomposition for symmetric input.
EigResult sym_eig(const Matrix& a);

// One-sided Jacobi SVD; works on the matrix itself, so tiny singular values
// keep full accuracy (||A v_k|| == sigma_k up to rounding).
SvdResult svd(const Matrix& a);

// Relative rank threshold: singular values >= tol * sigma_max count.
// Default tol follows the usual numerical-rank convention.
double default_tol(int rows, int cols);
int rank(const Matrix& m, double tol);
int rank(const Matrix& m);

// Orthonormal basis of the null space; may have zero columns.
Matrix kernel_basis(const Matrix& m, double tol);
Matrix kernel_basis(const Matrix& m);

// min_k |lambda_k| of a symmetric matrix; rejects asymmetric input.
double smallest_abs_eigenvalue(const Matrix& sym);

// Minimum-norm least-squares solve via the SVD pseudo-inverse.
std::vector<double> solve_least_squares(const Matrix& a, std::span<const double> b);

// Symmetric-matrix inverse through the eigendecomposition; requires SPD.
Matrix spd_inverse(const Matrix& a);

struct KktResult {
  std::vector<double> solution;
  std::vector<double> multipliers;
  bool unique;
};

// Solves the saddle system [h a_eq^T; a_eq 0] [x; lambda] = [grad_rhs; eq_rhs]
// by minimum-norm least squares. `unique` is true iff the saddle matrix has
// full rank within the default tolerance. Throws when the system is
// inconsistent (residual above tolerance).
KktResult solve_kkt(const Matrix& h, const Matrix& a_eq, std::span<const double> grad_rhs,
                    std::span<const double> eq_rhs);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double sum(std::span<const double> v);

}  // namespace ppsc::numerics
