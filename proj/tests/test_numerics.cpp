#include <doctest.h>

#include <cmath>

#include "ppsc/matrix.hpp"
#include "ppsc/rng.hpp"
#include "ppsc/symbolic.hpp"
#include "ppsc/verify.hpp"

using namespace ppsc;
using numerics::Matrix;

namespace {

Matrix random_symmetric(int n, SplitRng& rng) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      a(i, j) = a(j, i) = rng.uniform(-2.0, 2.0);
    }
  }
  return a;
}

}  // namespace

TEST_CASE("rank") {
  CHECK(numerics::rank(Matrix::identity(3)) == 3);
  CHECK(numerics::rank(Matrix(4, 4, 0.0)) == 0);
  const auto mm = symbolic::extract_matrices(symbolic::run_symbolic(verify::demo5_tree()));
  CHECK(numerics::rank(mm.c_matrix()) == 2);
}

TEST_CASE("kernel basis") {
  CHECK(numerics::kernel_basis(Matrix::identity(3)).cols() == 0);
  // No constraints: the kernel is the whole space.
  const Matrix unconstrained = numerics::kernel_basis(Matrix(0, 3));
  CHECK(unconstrained.cols() == 3);
  CHECK((unconstrained - Matrix::identity(3)).max_abs() == 0.0);

  const Matrix flat{{1.0, 1.0}, {1.0, 1.0}};
  const Matrix kb = numerics::kernel_basis(flat);
  REQUIRE(kb.cols() == 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(kb(0, 0)) - inv_sqrt2) < 1e-12);
  CHECK(kb(0, 0) * kb(1, 0) < 0.0);

  // Wide matrix: the kernel has dimension cols - rank.
  const Matrix wide{{1.0, 2.0, 3.0}};
  const Matrix wkb = numerics::kernel_basis(wide);
  REQUIRE(wkb.cols() == 2);
  for (int c = 0; c < 2; ++c) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) acc += wide(0, i) * wkb(i, c);
    CHECK(std::abs(acc) < 1e-12);
  }

  SplitRng rng(5);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 3 + static_cast<int>(rng.below(8));
    // Build a rank-deficient matrix as an outer product sum.
    Matrix a(n, n, 0.0);
    for (int k = 0; k < n - 2; ++k) {
      std::vector<double> u(n), v(n);
      for (auto& x : u) x = rng.uniform(-1.0, 1.0);
      for (auto& x : v) x = rng.uniform(-1.0, 1.0);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) += u[i] * v[j];
      }
    }
    const Matrix kb2 = numerics::kernel_basis(a);
    CHECK(kb2.cols() >= 2);
    for (int c = 0; c < kb2.cols(); ++c) {
      std::vector<double> col(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = kb2(i, c);
      CHECK(numerics::norm2(a.apply(col)) <= 1e-9 * n);
      CHECK(std::abs(numerics::norm2(col) - 1.0) < 1e-10);
      for (int c2 = c + 1; c2 < kb2.cols(); ++c2) {
        double d = 0.0;
        for (int i = 0; i < n; ++i) d += kb2(i, c) * kb2(i, c2);
        CHECK(std::abs(d) < 1e-10);
      }
    }
  }
}

TEST_CASE("smallest eigenvalue in absolute value") {
  CHECK(numerics::smallest_abs_eigenvalue(Matrix{{2, 0, 0}, {0, -1, 0}, {0, 0, 3}}) ==
        doctest::Approx(1.0));
  CHECK(numerics::smallest_abs_eigenvalue(Matrix{{5.0}}) == doctest::Approx(5.0));

  const auto mm = symbolic::extract_matrices(symbolic::run_symbolic(verify::demo5_tree()));
  const Matrix d = mm.d_matrix();
  const Matrix dtd = d.transpose() * d;
  // Frozen from an independent eigensolve of the integer matrix
  // [[2,1,0,1],[1,2,-1,1],[0,-1,2,0],[1,1,0,2]].
  CHECK(numerics::smallest_abs_eigenvalue(dtd) == doctest::Approx(0.5188056959079841).epsilon(1e-10));
  const auto eig = numerics::sym_eig(dtd);
  CHECK(eig.eigenvalues.front() == doctest::Approx(0.5188056959079841).epsilon(1e-10));

  CHECK_THROWS_AS(numerics::smallest_abs_eigenvalue(Matrix{{1, 2}, {0, 1}}), std::invalid_argument);
}

TEST_CASE("symmetric eigendecomposition reconstructs") {
  SplitRng rng(9);
  for (int n : {2, 5, 16, 33, 64}) {
    const Matrix a = random_symmetric(n, rng);
    const auto eig = numerics::sym_eig(a);
    Matrix lambda(n, n);
    for (int i = 0; i < n; ++i) lambda(i, i) = eig.eigenvalues[static_cast<std::size_t>(i)];
    const Matrix recon = eig.eigenvectors * lambda * eig.eigenvectors.transpose();
    CHECK((a - recon).frobenius_norm() <= 1e-9 * a.frobenius_norm());
    const Matrix gram = eig.eigenvectors.transpose() * eig.eigenvectors;
    CHECK((gram - Matrix::identity(n)).max_abs() <= 1e-10);
    for (int i = 0; i + 1 < n; ++i) {
      CHECK(eig.eigenvalues[static_cast<std::size_t>(i)] <=
            eig.eigenvalues[static_cast<std::size_t>(i) + 1]);
    }
  }
}

TEST_CASE("svd factors and pseudo-inverse solve") {
  SplitRng rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const int m = 2 + static_cast<int>(rng.below(8));
    const int n = 2 + static_cast<int>(rng.below(8));
    Matrix a(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-3.0, 3.0);
    }
    const auto s = numerics::svd(a);
    Matrix sigma(n, n);
    for (int j = 0; j < n; ++j) sigma(j, j) = s.sigma[static_cast<std::size_t>(j)];
    const Matrix recon = s.u * sigma * s.v.transpose();
    CHECK((a - recon).frobenius_norm() <= 1e-10 * (1.0 + a.frobenius_norm()));

    std::vector<double> b(static_cast<std::size_t>(m));
    for (auto& x : b) x = rng.uniform(-1.0, 1.0);
    const std::vector<double> x = numerics::solve_least_squares(a, b);
    // Normal-equation residual: A^T (A x - b) ~ 0.
    std::vector<double> ax = a.apply(x);
    for (std::size_t i = 0; i < ax.size(); ++i) ax[i] -= b[i];
    CHECK(numerics::norm2(a.apply_transpose(ax)) <= 1e-8 * (1.0 + numerics::norm2(b)));
  }
}

TEST_CASE("kkt solve") {
  const Matrix h = Matrix::identity(2);
  const Matrix a_eq{{1.0, 1.0}};
  const std::vector<double> grad{0.0, 0.0};
  const std::vector<double> eq{2.0};
  const auto res = numerics::solve_kkt(h, a_eq, grad, eq);
  CHECK(res.unique);
  CHECK(res.solution[0] == doctest::Approx(1.0));
  CHECK(res.solution[1] == doctest::Approx(1.0));

  // Inconsistent equality rows must be rejected.
  const Matrix h0(2, 2, 0.0);
  const Matrix bad_a{{1.0, 1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(numerics::solve_kkt(h0, bad_a, grad, std::vector<double>{0.0, 1.0}),
                  std::runtime_error);

  SplitRng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(6));
    Matrix base(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) base(i, j) = rng.uniform(-1.0, 1.0);
    }
    const Matrix spd = base.transpose() * base + Matrix::identity(n).scaled(0.5);
    Matrix ones(1, n, 1.0);
    std::vector<double> g(static_cast<std::size_t>(n));
    for (auto& x : g) x = rng.uniform(-1.0, 1.0);
    const std::vector<double> rhs{rng.uniform(-2.0, 2.0)};
    const auto sol = numerics::solve_kkt(spd, ones, g, rhs);
    CHECK(sol.unique);
    // Both KKT residuals within tolerance.
    std::vector<double> r = spd.apply(sol.solution);
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] += sol.multipliers[0] - g[static_cast<std::size_t>(i)];
    CHECK(numerics::norm2(r) <= 1e-8 * (1.0 + numerics::norm2(g)));
    CHECK(std::abs(numerics::sum(sol.solution) - rhs[0]) <= 1e-8 * (1.0 + std::abs(rhs[0])));
  }
}

TEST_CASE("spd inverse") {
  SplitRng rng(31);
  const int n = 6;
  Matrix base(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) base(i, j) = rng.uniform(-1.0, 1.0);
  }
  const Matrix spd = base.transpose() * base + Matrix::identity(n);
  const Matrix inv = numerics::spd_inverse(spd);
  CHECK((spd * inv - Matrix::identity(n)).max_abs() <= 1e-10);
  CHECK_THROWS_AS(numerics::spd_inverse(Matrix{{1.0, 0.0}, {0.0, -1.0}}), std::invalid_argument);
}
