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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lgap/fock.hpp"

namespace lgap {

enum class Ladder { Annihilate, Create, Number, Identity };

/// Product of ladder-operator symbols, resolvable at any truncation.
///
/// Text form: factors separated by whitespace or '*', each one of
/// `a`, `ad`, `n`, `id`, optionally raised to a power with `^k`.
/// Factors are multiplied left to right, so "ad^2 a^2" is a†a†aa.
class OperatorExpr {
 public:
  struct Factor {
    Ladder symbol;
    int power;
    bool operator==(const Factor&) const = default;
  };

  OperatorExpr() = default;
  explicit OperatorExpr(std::vector<Factor> factors);

  /// Throws InvalidParameters on an unknown symbol or malformed power.
  static OperatorExpr parse(std::string_view text);

  FockOperator at(Index dim) const;
  std::string str() const;
  const std::vector<Factor>& factors() const noexcept { return factors_; }

  bool operator==(const OperatorExpr&) const = default;

 private:
  std::vector<Factor> factors_;
};

struct HamiltonianTerm {
  std::complex<double> coeff;
  OperatorExpr op;
  bool operator==(const HamiltonianTerm&) const = default;
};

/// Dissipator channel rate * D[L] with D[L]rho = L rho L† - {L†L, rho}/2.
struct Channel {
  double rate;
  OperatorExpr op;
  bool operator==(const Channel&) const = default;
};

struct LindbladModel {
  std::vector<HamiltonianTerm> hamiltonian;
  std::vector<Channel> dissipators;

  /// Checks rates >= 0 and Hermiticity of H at several truncations.
  void validate() const;
  bool operator==(const LindbladModel&) const = default;
};

/// Multipliers on the rate of each built-in Van der Pol channel.
struct ChannelPrefactors {
  double gain = 1.0;
  double loss = 1.0;
  double two_photon = 1.0;
  double dephasing = 2.0;
};

/// Driven quantum Van der Pol oscillator with optional dephasing and Kerr terms.
struct VdPParams {
  double g = 1.0;
  double kappa = 0.1;
  double eta = 1.0;
  double delta = 10.0;
  double epsilon = 2.0;
  double gamma = 0.0;
  double u_kerr = 0.0;
  ChannelPrefactors prefactors{};

  /// Derives epsilon from a fixed product sqrt(eta) * epsilon.
  static VdPParams with_drive_product(double g, double kappa, double delta, double inv_eta,
                                      double sqrt_eta_eps, double gamma = 0.0,
                                      double u_kerr = 0.0);

  void validate() const;
};

/// H = delta a†a + eps a + eps a† [+ U a†²a²];
/// channels (g, a†), (kappa, a), (eta, a²) [+ (2 gamma, a†a)].
/// The dephasing channel and the Kerr term are present only when nonzero.
LindbladModel vdp_model(const VdPParams& p);

/// A model instantiated at a concrete truncation.
struct AssembledModel {
  FockOperator hamiltonian;
  std::vector<std::pair<double, FockOperator>> channels;

  Index dim() const noexcept { return hamiltonian.dim(); }
};

AssembledModel assemble(const LindbladModel& model, Index dim);

/// Parses an inline model tree:
///   {"hamiltonian": [{"coeff": 1.0, "op": "n"}, ...],
///    "dissipators": [{"rate": 0.5, "op": "a"}, ...]}
/// `coeff` is a number, [re, im] or {"re": x, "im": y}. "H" is accepted as an
/// alias of "hamiltonian". Errors are SchemaError naming the field path.
LindbladModel model_from_config(const nlohmann::json& tree, const std::string& path = "model");

nlohmann::json model_to_config(const LindbladModel& model);

}  // namespace lgap
