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

#include <iosfwd>

#include <Eigen/Sparse>

#include "lgap/density.hpp"
#include "lgap/model.hpp"

namespace lgap {

using SparseMatrixXcd = Eigen::SparseMatrix<std::complex<double>, Eigen::ColMajor, int>;

/// Vectorization convention. Only column stacking is used:
/// vec(A X B) = (B^T ⊗ A) vec(X).
enum class VecConvention { ColumnStacking };

/// Generator L of d(rho)/dt = L rho acting on vec(rho), of size dim² x dim².
struct Liouvillian {
  Index dim = 0;
  SparseMatrixXcd matrix;
  VecConvention convention = VecConvention::ColumnStacking;

  Index vector_dim() const noexcept { return dim * dim; }
};

struct BuildOptions {
  /// Largest accepted dim².
  Index max_vector_dim = 10'000;
};

Liouvillian build_superoperator(const AssembledModel& model, const BuildOptions& opts = {});
Liouvillian build_superoperator(const LindbladModel& model, Index dim, const BuildOptions& opts = {});

/// -i[H, rho] + sum_k r_k D[L_k] rho, evaluated with matrix products.
DensityMatrix apply_rhs(const AssembledModel& model, const DensityMatrix& rho);
DensityMatrix apply_rhs(const LindbladModel& model, const DensityMatrix& rho);

Eigen::VectorXcd vec(const DensityMatrix& rho);
DensityMatrix unvec(const Eigen::VectorXcd& v, Index dim);

/// ||L^dagger vec(I)|| / ||L||_F. Zero for a trace-preserving generator.
double trace_preservation_defect(const Liouvillian& L);

/// One "row col re im" line per stored entry, 0-based, column-major order.
void write_coordinate(std::ostream& os, const Liouvillian& L);

}  // namespace lgap
