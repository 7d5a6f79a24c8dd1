// Copyright 2026 The lgap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <utility>

#include <Eigen/Dense>

namespace lgap {

struct KrylovSchurOptions {
  Eigen::Index subspace = 0;  ///< 0: 2*nev + 20, capped at the problem size
  int max_restarts = 500;
  double tol = 1e-13;  ///< on ||A x - theta x|| / |theta|
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct KrylovSchurResult {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Vector values;   ///< largest-magnitude Ritz values, descending |theta|
  Matrix vectors;  ///< matching unit Ritz vectors
  Eigen::Matrix<double, Eigen::Dynamic, 1> residuals;
  int restarts = 0;
  bool converged = false;
};

namespace detail {

/// Givens rotation (c real, s complex) with [c s; -conj(s) c] [f; g] = [r; 0].
template <typename Scalar>
void givens(const Scalar& f, const Scalar& g, typename Eigen::NumTraits<Scalar>::Real& c,
            Scalar& s) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  const Real af = std::abs(f), ag = std::abs(g);
  if (ag == Real(0)) {
    c = 1;
    s = 0;
  } else if (af == Real(0)) {
    c = 0;
    s = std::conj(g) / ag;
  } else {
    const Real norm = std::hypot(af, ag);
    c = af / norm;
    s = (f / af) * std::conj(g) / norm;
  }
}

/// Swaps diagonal entries k and k+1 of the upper-triangular T, updating
/// the Schur vectors Q so that A Q = Q T still holds.
template <typename MatT, typename MatQ>
void swap_schur(MatT& T, MatQ& Q, Eigen::Index k) {
  using Scalar = typename MatT::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  const Eigen::Index n = T.rows();
  const Scalar t11 = T(k, k), t22 = T(k + 1, k + 1);
  Real c;
  Scalar s;
  givens<Scalar>(T(k, k + 1), t22 - t11, c, s);
  // rows k, k+1 from column k+2 on
  for (Eigen::Index j = k + 2; j < n; ++j) {
    const Scalar x = T(k, j), y = T(k + 1, j);
    T(k, j) = c * x + s * y;
    T(k + 1, j) = c * y - std::conj(s) * x;
  }
  // columns k, k+1 above row k
  const Scalar sc = std::conj(s);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Scalar x = T(i, k), y = T(i, k + 1);
    T(i, k) = c * x + sc * y;
    T(i, k + 1) = c * y - s * x;
  }
  T(k, k) = t22;
  T(k + 1, k + 1) = t11;
  for (Eigen::Index i = 0; i < Q.rows(); ++i) {
    const Scalar x = Q(i, k), y = Q(i, k + 1);
    Q(i, k) = c * x + sc * y;
    Q(i, k + 1) = c * y - s * x;
  }
}

}  // namespace detail

/// Krylov-Schur iteration for the `nev` largest-magnitude eigenvalues of a
/// linear operator of size n, given only its action `op(x, y)` : y = A x.
///
/// The Krylov decomposition A V_m = V_m S + v_{m+1} b^T is kept with S upper
/// triangular on the locked part after every restart (complex Schur form,
/// reordered by Givens swaps), so no implicit shifts are needed.
template <typename Scalar, typename Op>
KrylovSchurResult<Scalar> krylov_schur(Op&& op, Eigen::Index n, Eigen::Index nev,
                                       const KrylovSchurOptions& opts = {}) {
  using Index = Eigen::Index;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  KrylovSchurResult<Scalar> res;
  nev = std::clamp<Index>(nev, 1, n);
  Index m = opts.subspace > 0 ? opts.subspace : 2 * nev + 20;
  m = std::clamp<Index>(m, std::min(nev + 1, n), n);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<Real> normal;
  auto random_vector = [&] {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = Scalar(normal(rng), normal(rng));
    return v;
  };

  Matrix V = Matrix::Zero(n, m + 1);
  Matrix B = Matrix::Zero(m + 1, m);  // rows 0..m-1: projected matrix, row m: residual row
  V.col(0) = random_vector().normalized();
  Index k = 0;
  Vector w(n), h;
  const Real eps = std::numeric_limits<Real>::epsilon();

  Matrix T, U;
  for (res.restarts = 0;; ++res.restarts) {
    // Extend the Krylov basis from k to m vectors.
    for (Index j = k; j < m; ++j) {
      op(V.col(j), w);
      const Real wnorm0 = w.norm();
      h = V.leftCols(j + 1).adjoint() * w;
      w.noalias() -= V.leftCols(j + 1) * h;
      // DGKS reorthogonalization
      Vector h2 = V.leftCols(j + 1).adjoint() * w;
      w.noalias() -= V.leftCols(j + 1) * h2;
      h += h2;
      Real beta = w.norm();
      B.col(j).head(j + 1) = h;
      if (beta <= Real(10) * eps * std::max(wnorm0, Real(1))) {
        // Invariant subspace: continue with a fresh orthogonal direction.
        B(j + 1, j) = Scalar(0);
        if (j + 1 < n) {
          Vector r = random_vector();
          for (int pass = 0; pass < 2; ++pass) r -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * r);
          V.col(j + 1) = r.normalized();
        } else {
          V.col(j + 1).setZero();
        }
      } else {
        B(j + 1, j) = beta;
        V.col(j + 1) = w / beta;
      }
    }

    Eigen::ComplexSchur<Matrix> schur(B.topRows(m));
    T = schur.matrixT();
    U = schur.matrixU();
    // Bubble the largest |theta| to the front.
    for (Index i = 0; i < m; ++i) {
      Index best = i;
      for (Index j = i + 1; j < m; ++j) {
        if (std::abs(T(j, j)) > std::abs(T(best, best))) best = j;
      }
      for (Index j = best; j > i; --j) detail::swap_schur(T, U, j - 1);
    }
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> brow = B.row(m) * U;

    // Ritz vectors of the leading nev x nev triangular block.
    Eigen::ComplexEigenSolver<Matrix> tri(T.topLeftCorner(nev, nev));
    const Matrix Z = tri.eigenvectors();
    res.values.resize(nev);
    res.residuals.resize(nev);
    Index nconv = 0;
    for (Index i = 0; i < nev; ++i) {
      res.values(i) = tri.eigenvalues()(i);
      const Real r = std::abs((brow.head(nev) * Z.col(i))(0));
      res.residuals(i) = static_cast<double>(r / std::max(std::abs(res.values(i)), eps));
      if (res.residuals(i) <= opts.tol) ++nconv;
    }

    if (nconv == nev || res.restarts >= opts.max_restarts) {
      res.converged = nconv == nev;
      // Order by descending |theta| (ComplexEigenSolver gives no guarantee).
      std::vector<Index> order(static_cast<std::size_t>(nev));
      for (Index i = 0; i < nev; ++i) order[static_cast<std::size_t>(i)] = i;
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return std::abs(res.values(a)) > std::abs(res.values(b));
      });
      const Matrix X = V.leftCols(m) * (U.leftCols(nev) * Z);
      Vector vals(nev);
      Eigen::Matrix<double, Eigen::Dynamic, 1> resid(nev);
      res.vectors.resize(n, nev);
      for (Index i = 0; i < nev; ++i) {
        const Index src = order[static_cast<std::size_t>(i)];
        vals(i) = res.values(src);
        resid(i) = res.residuals(src);
        res.vectors.col(i) = X.col(src).normalized();
      }
      res.values = std::move(vals);
      res.residuals = std::move(resid);
      return res;
    }

    // Thick restart: keep the wanted Schur vectors plus a few extra.
    Index keep = std::min<Index>(nev + std::max<Index>(nconv, (m - nev) / 2), m - 1);
    keep = std::max<Index>(keep, nev);
    if (keep >= m) keep = m - 1;
    Matrix Vk = V.leftCols(m) * U.leftCols(keep);
    V.leftCols(keep) = Vk;
    V.col(keep) = V.col(m);
    B.setZero();
    B.topLeftCorner(keep, keep) = T.topLeftCorner(keep, keep).template triangularView<Eigen::Upper>();
    B.row(keep).head(keep) = brow.head(keep);
    k = keep;
  }
}

}  // namespace lgap
