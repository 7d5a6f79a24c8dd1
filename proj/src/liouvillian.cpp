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

#include "lgap/liouvillian.hpp"

#include <cstdio>
#include <ostream>

namespace lgap {

namespace {
const std::complex<double> kI{0.0, 1.0};
}

Liouvillian build_superoperator(const AssembledModel& model, const BuildOptions& opts) {
  const Index n = model.dim();
  if (n < 2) throw InvalidDimension("build_superoperator requires dim >= 2");
  if (n * n > opts.max_vector_dim) {
    throw InvalidDimension("dim^2 = " + std::to_string(n * n) + " exceeds configured maximum " +
                           std::to_string(opts.max_vector_dim));
  }
  const FockOperator id = identity(n);
  const FockOperator& h = model.hamiltonian;

  SparseMatrixXcd m = -kI * (kron(id, h).matrix() - kron(transpose(h), id).matrix());
  for (const auto& [rate, op] : model.channels) {
    if (rate == 0.0) continue;
    const FockOperator ldl = mul(adjoint(op), op);
    SparseMatrixXcd term = kron(conj(op), op).matrix();
    term -= 0.5 * kron(id, ldl).matrix();
    term -= 0.5 * kron(transpose(ldl), id).matrix();
    m += rate * term;
  }
  // Re-canonicalize through FockOperator so assembly is bitwise deterministic.
  return Liouvillian{n, FockOperator(std::move(m)).matrix(), VecConvention::ColumnStacking};
}

Liouvillian build_superoperator(const LindbladModel& model, Index dim, const BuildOptions& opts) {
  return build_superoperator(assemble(model, dim), opts);
}

DensityMatrix apply_rhs(const AssembledModel& model, const DensityMatrix& rho) {
  if (rho.rows() != model.dim() || rho.cols() != model.dim()) {
    throw InvalidDimension("apply_rhs: rho is " + std::to_string(rho.rows()) + "x" +
                           std::to_string(rho.cols()) + ", model dim " + std::to_string(model.dim()));
  }
  const auto& h = model.hamiltonian.matrix();
  DensityMatrix out = -kI * (h * rho);
  out += kI * (rho * h);
  for (const auto& [rate, op] : model.channels) {
    if (rate == 0.0) continue;
    const auto& l = op.matrix();
    const SparseMatrixXcd ld = l.adjoint();
    const SparseMatrixXcd ldl = ld * l;
    DensityMatrix lr = l * rho;
    out += rate * (lr * ld);
    out -= (0.5 * rate) * (ldl * rho);
    out -= (0.5 * rate) * (rho * ldl);
  }
  return out;
}

DensityMatrix apply_rhs(const LindbladModel& model, const DensityMatrix& rho) {
  return apply_rhs(assemble(model, rho.rows()), rho);
}

Eigen::VectorXcd vec(const DensityMatrix& rho) {
  return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

DensityMatrix unvec(const Eigen::VectorXcd& v, Index dim) {
  if (dim < 1 || v.size() != dim * dim) {
    throw InvalidDimension("unvec: vector length " + std::to_string(v.size()) +
                           " is not dim^2 for dim " + std::to_string(dim));
  }
  return Eigen::Map<const DensityMatrix>(v.data(), dim, dim);
}

double trace_preservation_defect(const Liouvillian& L) {
  const Eigen::VectorXcd one = vec(DensityMatrix::Identity(L.dim, L.dim));
  const Eigen::VectorXcd r = L.matrix.adjoint() * one;
  const double scale = L.matrix.norm();
  return scale > 0.0 ? r.norm() / scale : r.norm();
}

void write_coordinate(std::ostream& os, const Liouvillian& L) {
  char buf[128];
  for (Index k = 0; k < L.matrix.outerSize(); ++k) {
    for (SparseMatrixXcd::InnerIterator it(L.matrix, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g %.17g\n", static_cast<long>(it.row()),
                    static_cast<long>(it.col()), it.value().real(), it.value().imag());
      os << buf;
    }
  }
}

}  // namespace lgap
