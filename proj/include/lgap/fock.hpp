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

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "lgap/error.hpp"

namespace lgap {

using Index = Eigen::Index;

/// Entries with magnitude below this are dropped after every operation.
inline constexpr double kPruneThreshold = 1e-15;

/// Sparse operator on a truncated Fock space with levels |0>, ..., |dim-1>.
///
/// Storage is always canonical: compressed column-major with sorted inner
/// indices and no entries below kPruneThreshold. Two operators built by the
/// same sequence of operations are therefore bitwise identical.
template <typename Scalar_>
class FockOperatorT {
 public:
  using Scalar = Scalar_;
  using RealScalar = typename Eigen::NumTraits<Scalar>::Real;
  using SparseType = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, int>;
  using DenseType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  FockOperatorT() = default;

  explicit FockOperatorT(SparseType m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) {
      throw InvalidDimension("Fock operator must be square with dim >= 1, got " +
                             std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
    }
    canonicalize();
  }

  Index dim() const noexcept { return m_.rows(); }
  Index nonZeros() const noexcept { return m_.nonZeros(); }
  const SparseType& matrix() const noexcept { return m_; }
  Scalar coeff(Index row, Index col) const { return m_.coeff(row, col); }
  DenseType dense() const { return DenseType(m_); }

  bool operator==(const FockOperatorT& other) const {
    if (dim() != other.dim() || nonZeros() != other.nonZeros()) return false;
    for (Index k = 0; k < m_.outerSize(); ++k) {
      typename SparseType::InnerIterator a(m_, k), b(other.m_, k);
      for (; a && b; ++a, ++b) {
        if (a.index() != b.index() || a.value() != b.value()) return false;
      }
      if (a || b) return false;
    }
    return true;
  }

 private:
  void canonicalize() {
    m_.prune([](Index, Index, const Scalar& v) {
      return std::abs(v) >= RealScalar(kPruneThreshold);
    });
    // Double transpose sorts inner indices.
    SparseType t = m_.transpose();
    m_ = t.transpose();
    m_.makeCompressed();
  }

  SparseType m_;
};

using FockOperator = FockOperatorT<std::complex<double>>;

namespace detail {

template <typename Scalar>
using Triplets = std::vector<Eigen::Triplet<Scalar, int>>;

template <typename Scalar>
FockOperatorT<Scalar> from_triplets(Index dim, const Triplets<Scalar>& t) {
  typename FockOperatorT<Scalar>::SparseType m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return FockOperatorT<Scalar>(std::move(m));
}

inline void require_dim(Index dim, Index min, const char* what) {
  if (dim < min) {
    throw InvalidDimension(std::string(what) + " requires dim >= " + std::to_string(min) +
                           ", got " + std::to_string(dim));
  }
}

template <typename Scalar>
void require_same_dim(const FockOperatorT<Scalar>& a, const FockOperatorT<Scalar>& b,
                      const char* what) {
  if (a.dim() != b.dim()) {
    throw InvalidDimension(std::string(what) + ": dimension mismatch " + std::to_string(a.dim()) +
                           " vs " + std::to_string(b.dim()));
  }
}

}  // namespace detail

/// Ladder operator a with a|n> = sqrt(n)|n-1>.
template <typename Scalar = std::complex<double>>
FockOperatorT<Scalar> annihilation(Index dim) {
  detail::require_dim(dim, 2, "annihilation");
  detail::Triplets<Scalar> t;
  t.reserve(static_cast<std::size_t>(dim - 1));
  for (Index n = 1; n < dim; ++n) {
    using std::sqrt;
    t.emplace_back(static_cast<int>(n - 1), static_cast<int>(n),
                   Scalar(sqrt(typename FockOperatorT<Scalar>::RealScalar(n))));
  }
  return detail::from_triplets<Scalar>(dim, t);
}

template <typename Scalar = std::complex<double>>
FockOperatorT<Scalar> creation(Index dim) {
  detail::require_dim(dim, 2, "creation");
  detail::Triplets<Scalar> t;
  for (Index n = 1; n < dim; ++n) {
    using std::sqrt;
    t.emplace_back(static_cast<int>(n), static_cast<int>(n - 1),
                   Scalar(sqrt(typename FockOperatorT<Scalar>::RealScalar(n))));
  }
  return detail::from_triplets<Scalar>(dim, t);
}

template <typename Scalar = std::complex<double>>
FockOperatorT<Scalar> number(Index dim) {
  detail::require_dim(dim, 1, "number");
  detail::Triplets<Scalar> t;
  for (Index n = 1; n < dim; ++n) {
    t.emplace_back(static_cast<int>(n), static_cast<int>(n), Scalar(static_cast<double>(n)));
  }
  return detail::from_triplets<Scalar>(dim, t);
}

template <typename Scalar = std::complex<double>>
FockOperatorT<Scalar> identity(Index dim) {
  detail::require_dim(dim, 1, "identity");
  detail::Triplets<Scalar> t;
  for (Index n = 0; n < dim; ++n) {
    t.emplace_back(static_cast<int>(n), static_cast<int>(n), Scalar(1));
  }
  return detail::from_triplets<Scalar>(dim, t);
}

template <typename Scalar = std::complex<double>>
FockOperatorT<Scalar> zero(Index dim) {
  detail::require_dim(dim, 1, "zero");
  return FockOperatorT<Scalar>(typename FockOperatorT<Scalar>::SparseType(dim, dim));
}

template <typename Scalar>
FockOperatorT<Scalar> add(const FockOperatorT<Scalar>& a, const FockOperatorT<Scalar>& b) {
  detail::require_same_dim(a, b, "add");
  return FockOperatorT<Scalar>(a.matrix() + b.matrix());
}

template <typename Scalar>
FockOperatorT<Scalar> sub(const FockOperatorT<Scalar>& a, const FockOperatorT<Scalar>& b) {
  detail::require_same_dim(a, b, "sub");
  return FockOperatorT<Scalar>(a.matrix() - b.matrix());
}

template <typename Scalar>
FockOperatorT<Scalar> mul(const FockOperatorT<Scalar>& a, const FockOperatorT<Scalar>& b) {
  detail::require_same_dim(a, b, "mul");
  return FockOperatorT<Scalar>(a.matrix() * b.matrix());
}

template <typename Scalar>
FockOperatorT<Scalar> scale(const Scalar& c, const FockOperatorT<Scalar>& a) {
  return FockOperatorT<Scalar>(c * a.matrix());
}

/// Conjugate transpose.
template <typename Scalar>
FockOperatorT<Scalar> adjoint(const FockOperatorT<Scalar>& a) {
  return FockOperatorT<Scalar>(a.matrix().adjoint());
}

template <typename Scalar>
FockOperatorT<Scalar> transpose(const FockOperatorT<Scalar>& a) {
  return FockOperatorT<Scalar>(a.matrix().transpose());
}

/// Entrywise complex conjugate, computed on the stored entries only.
template <typename Scalar>
FockOperatorT<Scalar> conj(const FockOperatorT<Scalar>& a) {
  return FockOperatorT<Scalar>(a.matrix().conjugate());
}

/// Kronecker product; entry (i*dimB + k, j*dimB + l) = A(i,j) B(k,l).
template <typename Scalar>
FockOperatorT<Scalar> kron(const FockOperatorT<Scalar>& a, const FockOperatorT<Scalar>& b) {
  const Index db = b.dim();
  detail::Triplets<Scalar> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  using Sparse = typename FockOperatorT<Scalar>::SparseType;
  for (Index ka = 0; ka < a.matrix().outerSize(); ++ka) {
    for (typename Sparse::InnerIterator ia(a.matrix(), ka); ia; ++ia) {
      for (Index kb = 0; kb < b.matrix().outerSize(); ++kb) {
        for (typename Sparse::InnerIterator ib(b.matrix(), kb); ib; ++ib) {
          t.emplace_back(static_cast<int>(ia.row() * db + ib.row()),
                         static_cast<int>(ia.col() * db + ib.col()), ia.value() * ib.value());
        }
      }
    }
  }
  return detail::from_triplets<Scalar>(a.dim() * db, t);
}

/// Integer power by repeated multiplication; power 0 gives the identity.
template <typename Scalar>
FockOperatorT<Scalar> power(const FockOperatorT<Scalar>& a, int k) {
  if (k < 0) throw InvalidParameters("operator power must be non-negative");
  FockOperatorT<Scalar> out = identity<Scalar>(a.dim());
  for (int i = 0; i < k; ++i) out = mul(out, a);
  return out;
}

template <typename Scalar>
FockOperatorT<Scalar> operator+(const FockOperatorT<Scalar>& a, const FockOperatorT<Scalar>& b) {
  return add(a, b);
}

template <typename Scalar>
FockOperatorT<Scalar> operator-(const FockOperatorT<Scalar>& a, const FockOperatorT<Scalar>& b) {
  return sub(a, b);
}

template <typename Scalar>
FockOperatorT<Scalar> operator*(const FockOperatorT<Scalar>& a, const FockOperatorT<Scalar>& b) {
  return mul(a, b);
}

template <typename Scalar>
FockOperatorT<Scalar> operator*(const Scalar& c, const FockOperatorT<Scalar>& a) {
  return scale(c, a);
}

/// Largest elementwise |A - A^dagger|.
template <typename Scalar>
typename FockOperatorT<Scalar>::RealScalar hermiticity_defect(const FockOperatorT<Scalar>& a) {
  using Sparse = typename FockOperatorT<Scalar>::SparseType;
  Sparse d = a.matrix() - Sparse(a.matrix().adjoint());
  typename FockOperatorT<Scalar>::RealScalar worst(0);
  for (Index k = 0; k < d.outerSize(); ++k) {
    for (typename Sparse::InnerIterator it(d, k); it; ++it) {
      worst = std::max(worst, std::abs(it.value()));
    }
  }
  return worst;
}

}  // namespace lgap
