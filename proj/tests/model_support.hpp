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
#include <random>

#include "lgap/density.hpp"
#include "lgap/model.hpp"

namespace lgap::testing {

/// Random Hermitian Hamiltonian plus random channels built from short monomials.
inline LindbladModel random_model(std::mt19937_64& rng) {
  static const char* monomials[] = {"a", "ad", "n", "a^2", "ad a^2", "ad^2 a^2", "a n", "ad^2"};
  std::uniform_int_distribution<int> pick(0, 7), count(1, 4);
  std::uniform_real_distribution<double> u(-2.0, 2.0), rate(0.0, 1.5);
  LindbladModel m;
  const int nh = count(rng);
  for (int k = 0; k < nh; ++k) {
    const OperatorExpr op = OperatorExpr::parse(monomials[pick(rng)]);
    const std::complex<double> c(u(rng), u(rng));
    m.hamiltonian.push_back({c, op});
    std::vector<OperatorExpr::Factor> rev;
    for (auto it = op.factors().rbegin(); it != op.factors().rend(); ++it) {
      Ladder s = it->symbol;
      if (s == Ladder::Annihilate) s = Ladder::Create;
      else if (s == Ladder::Create) s = Ladder::Annihilate;
      rev.push_back({s, it->power});
    }
    m.hamiltonian.push_back({std::conj(c), OperatorExpr(rev)});
  }
  const int nc = count(rng);
  for (int k = 0; k < nc; ++k) m.dissipators.push_back({rate(rng), OperatorExpr::parse(monomials[pick(rng)])});
  return m;
}

/// Van der Pol family with every parameter drawn at random.
inline LindbladModel random_vdp_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  VdPParams p;
  p.g = 2.0 * u(rng);
  p.kappa = u(rng);
  p.eta = 0.02 + u(rng);
  p.delta = 20.0 * (u(rng) - 0.5);
  p.epsilon = 4.0 * u(rng);
  p.gamma = 0.3 * u(rng);
  p.u_kerr = 0.1 * u(rng);
  return vdp_model(p);
}

/// Sum of coefficient magnitudes weighted by the squared norms of their operators at `dim`.
inline double weighted_coefficient_sum(const LindbladModel& m, Index dim) {
  auto norm = [dim](const OperatorExpr& e) { return std::max(1.0, e.at(dim).dense().operatorNorm()); };
  double s = 0.0;
  for (const auto& t : m.hamiltonian) s += std::abs(t.coeff) * norm(t.op);
  for (const auto& c : m.dissipators) s += c.rate * norm(c.op) * norm(c.op);
  return s;
}

inline double coefficient_sum(const LindbladModel& m) {
  double s = 0.0;
  for (const auto& t : m.hamiltonian) s += std::abs(t.coeff);
  for (const auto& c : m.dissipators) s += c.rate;
  return s;
}

/// Random density matrix from a Ginibre draw.
inline DensityMatrix random_density(std::mt19937_64& rng, Index dim) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd g(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) g(i, j) = {nd(rng), nd(rng)};
  DensityMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  return hermitize(rho);
}

}  // namespace lgap::testing
