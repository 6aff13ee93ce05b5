#include "ppsc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ppsc::numerics {

Matrix::Matrix(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
  data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
  data_.reserve(static_cast<std::size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) throw std::invalid_argument("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::span<const double> v) {
  Matrix m(static_cast<int>(v.size()), 1);
  for (int i = 0; i < m.rows(); ++i) m(i, 0) = v[static_cast<std::size_t>(i)];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("matrix product dimension mismatch");
  Matrix out(rows_, rhs.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = 0; k < cols_; ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < rhs.cols_; ++j) out(i, j) += aik * rhs(k, j);
    }
  }
  return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw std::invalid_argument("matrix sum mismatch");
  Matrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += rhs.data_[i];
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw std::invalid_argument("matrix diff mismatch");
  Matrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
  return out;
}

Matrix Matrix::scaled(double s) const {
  Matrix out = *this;
  for (double& x : out.data_) x *= s;
  return out;
}

std::vector<double> Matrix::apply(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != cols_) throw std::invalid_argument("matvec size mismatch");
  std::vector<double> out(static_cast<std::size_t>(rows_), 0.0);
  for (int i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

std::vector<double> Matrix::apply_transpose(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != rows_) throw std::invalid_argument("matvec size mismatch");
  std::vector<double> out(static_cast<std::size_t>(cols_), 0.0);
  for (int i = 0; i < rows_; ++i) {
    const double vi = v[static_cast<std::size_t>(i)];
    if (vi == 0.0) continue;
    for (int j = 0; j < cols_; ++j) out[static_cast<std::size_t>(j)] += (*this)(i, j) * vi;
  }
  return out;
}

double Matrix::frobenius_norm() const {
  double acc = 0.0;
  for (double x : data_) acc += x * x;
  return std::sqrt(acc);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

double Matrix::asymmetry() const {
  if (rows_ != cols_) throw std::invalid_argument("asymmetry needs a square matrix");
  double m = 0.0;
  for (int i = 0; i < rows_; ++i) {
    for (int j = i + 1; j < cols_; ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
  }
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double sum(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

EigResult sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig needs a square matrix");
  const int n = a.rows();
  Matrix w = a;
  Matrix v = Matrix::identity(n);
  const double off_tol = 1e-15;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(w(p, q)));
    }
    if (off <= off_tol * std::max(1.0, w.max_abs())) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (std::abs(apq) <= off_tol * std::max(1.0, w.max_abs())) continue;
        const double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double wkp = w(k, p), wkq = w(k, q);
          w(k, p) = c * wkp - s * wkq;
          w(k, q) = s * wkp + c * wkq;
        }
        for (int k = 0; k < n; ++k) {
          const double wpk = w(p, k), wqk = w(q, k);
          w(p, k) = c * wpk - s * wqk;
          w(q, k) = s * wpk + c * wqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int x, int y) { return w(x, x) < w(y, y); });
  EigResult res;
  res.eigenvalues.resize(static_cast<std::size_t>(n));
  res.eigenvectors = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    res.eigenvalues[static_cast<std::size_t>(j)] = w(idx[static_cast<std::size_t>(j)],
                                                     idx[static_cast<std::size_t>(j)]);
    for (int i = 0; i < n; ++i) res.eigenvectors(i, j) = v(i, idx[static_cast<std::size_t>(j)]);
  }
  return res;
}

SvdResult svd(const Matrix& a) {
  const int m = a.rows(), n = a.cols();
  // Pad with zero rows when wide so the full right-vector set (incl. the
  // kernel) comes out of the one-sided sweep.
  const int mm = std::max(m, n);
  Matrix w(mm, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) w(i, j) = a(i, j);
  }
  Matrix v = Matrix::identity(n);

  const double tol = 1e-15;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int k = 0; k < mm; ++k) {
          alpha += w(k, p) * w(k, p);
          beta += w(k, q) * w(k, q);
          gamma += w(k, p) * w(k, q);
        }
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int k = 0; k < mm; ++k) {
          const double wp = w(k, p), wq = w(k, q);
          w(k, p) = c * wp - s * wq;
          w(k, q) = s * wp + c * wq;
        }
        for (int k = 0; k < n; ++k) {
          const double vp = v(k, p), vq = v(k, q);
          v(k, p) = c * vp - s * vq;
          v(k, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sig(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int k = 0; k < mm; ++k) acc += w(k, j) * w(k, j);
    sig[static_cast<std::size_t>(j)] = std::sqrt(acc);
  }
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int x, int y) {
    return sig[static_cast<std::size_t>(x)] > sig[static_cast<std::size_t>(y)];
  });

  SvdResult res;
  res.sigma.resize(static_cast<std::size_t>(n));
  res.v = Matrix(n, n);
  res.u = Matrix(m, n);
  for (int j = 0; j < n; ++j) {
    const int src = idx[static_cast<std::size_t>(j)];
    const double s = sig[static_cast<std::size_t>(src)];
    res.sigma[static_cast<std::size_t>(j)] = s;
    for (int i = 0; i < n; ++i) res.v(i, j) = v(i, src);
    if (s > 0.0) {
      for (int i = 0; i < m; ++i) res.u(i, j) = w(i, src) / s;
    }
  }
  return res;
}

double default_tol(int rows, int cols) { return 1e-9 * static_cast<double>(std::max(rows, cols)); }

int rank(const Matrix& m, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("rank tolerance must be positive");
  if (m.empty()) return 0;
  SvdResult s = svd(m);
  const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
  if (smax == 0.0) return 0;
  int r = 0;
  for (double x : s.sigma) {
    if (x >= tol * smax) ++r;
  }
  return r;
}

int rank(const Matrix& m) { return rank(m, default_tol(m.rows(), m.cols())); }

Matrix kernel_basis(const Matrix& m, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("kernel tolerance must be positive");
  if (m.cols() == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::identity(m.cols());  // no constraints
  SvdResult s = svd(m);
  const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
  int r = 0;
  if (smax > 0.0) {
    for (double x : s.sigma) {
      if (x >= tol * smax) ++r;
    }
  }
  const int k = m.cols() - r;
  Matrix basis(m.cols(), k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < m.cols(); ++i) basis(i, j) = s.v(i, r + j);
  }
  return basis;
}

Matrix kernel_basis(const Matrix& m) { return kernel_basis(m, default_tol(m.rows(), m.cols())); }

double smallest_abs_eigenvalue(const Matrix& sym) {
  if (sym.rows() != sym.cols() || sym.rows() == 0) {
    throw std::invalid_argument("smallest_abs_eigenvalue needs a nonempty square matrix");
  }
  if (sym.asymmetry() > 1e-10 * std::max(1.0, sym.max_abs())) {
    throw std::invalid_argument("smallest_abs_eigenvalue: matrix is not symmetric");
  }
  EigResult e = sym_eig(sym);
  double best = std::abs(e.eigenvalues.front());
  for (double lam : e.eigenvalues) best = std::min(best, std::abs(lam));
  return best;
}

std::vector<double> solve_least_squares(const Matrix& a, std::span<const double> b) {
  if (static_cast<int>(b.size()) != a.rows()) {
    throw std::invalid_argument("solve_least_squares size mismatch");
  }
  SvdResult s = svd(a);
  const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
  const double cut = default_tol(a.rows(), a.cols()) * smax;
  std::vector<double> x(static_cast<std::size_t>(a.cols()), 0.0);
  for (int j = 0; j < a.cols(); ++j) {
    const double sj = s.sigma[static_cast<std::size_t>(j)];
    if (sj <= cut || sj == 0.0) continue;
    double uj_b = 0.0;
    for (int i = 0; i < a.rows(); ++i) uj_b += s.u(i, j) * b[static_cast<std::size_t>(i)];
    const double coef = uj_b / sj;
    for (int i = 0; i < a.cols(); ++i) x[static_cast<std::size_t>(i)] += coef * s.v(i, j);
  }
  return x;
}

Matrix spd_inverse(const Matrix& a) {
  if (a.asymmetry() > 1e-10 * std::max(1.0, a.max_abs())) {
    throw std::invalid_argument("spd_inverse: matrix is not symmetric");
  }
  EigResult e = sym_eig(a);
  const int n = a.rows();
  const double lmax = std::abs(e.eigenvalues.back());
  for (double lam : e.eigenvalues) {
    if (lam <= default_tol(n, n) * std::max(1.0, lmax)) {
      throw std::invalid_argument("spd_inverse: matrix is not positive definite");
    }
  }
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        acc += e.eigenvectors(i, k) * e.eigenvectors(j, k) / e.eigenvalues[static_cast<std::size_t>(k)];
      }
      out(i, j) = acc;
    }
  }
  return out;
}

KktResult solve_kkt(const Matrix& h, const Matrix& a_eq, std::span<const double> grad_rhs,
                    std::span<const double> eq_rhs) {
  const int n = h.cols();
  const int m = a_eq.rows();
  if (h.rows() != n) throw std::invalid_argument("solve_kkt: h must be square");
  if (a_eq.cols() != n || static_cast<int>(grad_rhs.size()) != n ||
      static_cast<int>(eq_rhs.size()) != m) {
    throw std::invalid_argument("solve_kkt: dimension mismatch");
  }
  // Equilibrate the constraint block against the Hessian scale so a strong
  // quadratic term (e.g. a tight prior) cannot sink the constraint rows below
  // the rank threshold. Rescaling rows/columns by a nonzero constant leaves
  // the rank and the solution set in x untouched; the multiplier comes back
  // in the original scale.
  const double scale = std::max(1.0, h.max_abs());
  Matrix s(n + m, n + m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s(i, j) = h(i, j);
    for (int j = 0; j < m; ++j) {
      s(i, n + j) = scale * a_eq(j, i);
      s(n + j, i) = scale * a_eq(j, i);
    }
  }
  std::vector<double> rhs(static_cast<std::size_t>(n + m));
  for (int i = 0; i < n; ++i) rhs[static_cast<std::size_t>(i)] = grad_rhs[static_cast<std::size_t>(i)];
  for (int j = 0; j < m; ++j) {
    rhs[static_cast<std::size_t>(n + j)] = scale * eq_rhs[static_cast<std::size_t>(j)];
  }

  std::vector<double> z = solve_least_squares(s, rhs);
  std::vector<double> resid = s.apply(z);
  double err = 0.0;
  for (std::size_t i = 0; i < resid.size(); ++i) err = std::max(err, std::abs(resid[i] - rhs[i]));
  const double rhs_norm = norm2(rhs);
  if (err > 1e-8 * (1.0 + rhs_norm)) {
    throw std::runtime_error("solve_kkt: inconsistent saddle system (residual " +
                             std::to_string(err) + ")");
  }

  KktResult out;
  out.solution.assign(z.begin(), z.begin() + n);
  out.multipliers.assign(z.begin() + n, z.end());
  for (double& lam : out.multipliers) lam *= scale;
  out.unique = rank(s) == n + m;
  return out;
}

}  // namespace ppsc::numerics
