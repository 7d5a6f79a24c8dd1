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

#include <complex>

#include <Eigen/Dense>

#include "lgap/fock.hpp"

namespace lgap {

/// Dense density matrix in the Fock basis.
using DensityMatrix = Eigen::MatrixXcd;

/// Largest elementwise |rho - rho^dagger|.
inline double hermiticity_defect(const DensityMatrix& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

inline DensityMatrix hermitize(const DensityMatrix& rho) {
  return 0.5 * (rho + rho.adjoint());
}

/// Smallest eigenvalue of the Hermitian part.
inline double min_eigenvalue(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitize(rho), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

struct DensityChecks {
  bool normalized = true;
  bool physical = true;
  double hermitian_tol = 1e-12;
  double trace_tol = 1e-12;
  double eigenvalue_tol = 1e-10;
};

/// Throws InvalidParameters if rho fails any of the requested checks.
inline void validate_density(const DensityMatrix& rho, const DensityChecks& checks = {}) {
  if (rho.rows() != rho.cols() || rho.rows() < 1) {
    throw InvalidDimension("density matrix must be square");
  }
  if (hermiticity_defect(rho) > checks.hermitian_tol) {
    throw InvalidParameters("density matrix is not Hermitian");
  }
  if (checks.normalized && std::abs(rho.trace() - 1.0) > checks.trace_tol) {
    throw InvalidParameters("density matrix trace differs from 1");
  }
  if (checks.physical && min_eigenvalue(rho) < -checks.eigenvalue_tol) {
    throw InvalidParameters("density matrix has a negative eigenvalue");
  }
}

inline DensityMatrix fock_state(Index dim, Index n) {
  if (n < 0 || n >= dim) throw InvalidDimension("Fock level outside truncation");
  DensityMatrix rho = DensityMatrix::Zero(dim, dim);
  rho(n, n) = 1.0;
  return rho;
}

/// Coherent state |alpha> truncated to `dim` levels and renormalized.
inline DensityMatrix coherent_state(Index dim, std::complex<double> alpha) {
  if (dim < 1) throw InvalidDimension("coherent_state requires dim >= 1");
  Eigen::VectorXcd psi(dim);
  psi(0) = 1.0;
  for (Index n = 1; n < dim; ++n) psi(n) = psi(n - 1) * alpha / std::sqrt(double(n));
  psi.normalize();
  return psi * psi.adjoint();
}

/// Tr(O rho).
inline std::complex<double> expectation(const FockOperator& op, const DensityMatrix& rho) {
  if (op.dim() != rho.rows()) throw InvalidDimension("expectation: dimension mismatch");
  std::complex<double> acc = 0.0;
  const auto& m = op.matrix();
  for (Index k = 0; k < m.outerSize(); ++k) {
    for (FockOperator::SparseType::InnerIterator it(m, k); it; ++it) {
      acc += it.value() * rho(it.col(), it.row());
    }
  }
  return acc;
}

inline double purity(const DensityMatrix& rho) {
  return (rho * rho).trace().real();
}

}  // namespace lgap
