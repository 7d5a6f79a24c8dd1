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

#include <cstdio>
#include <stdexcept>
#include <string>

namespace lgap {

namespace detail {

/// Compact rendering of a real number for messages.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace detail

/// Base class for every error raised by the library. `kind()` is a short
/// machine-readable tag used by the CLI when reporting failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class InvalidDimension : public Error {
 public:
  explicit InvalidDimension(const std::string& what) : Error("invalid-dimension", what) {}
};

class InvalidParameters : public Error {
 public:
  explicit InvalidParameters(const std::string& what) : Error("invalid-parameters", what) {}
};

/// Config/schema violation. `path()` names the offending field, e.g.
/// `model.dissipators[1].rate`.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error("schema", path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class DenseTooLarge : public Error {
 public:
  explicit DenseTooLarge(const std::string& what) : Error("dense-too-large", what) {}
};

class DegenerateSteadyState : public Error {
 public:
  explicit DegenerateSteadyState(long multiplicity)
      : Error("degenerate-steady-space",
              "steady subspace has multiplicity " + std::to_string(multiplicity) +
                  "; request a zero-subspace basis instead"),
        multiplicity_(multiplicity) {}

  long multiplicity() const noexcept { return multiplicity_; }

 private:
  long multiplicity_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error("convergence", what + " (best residual " + detail::num(best_residual) + ")"),
        best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

class InsufficientSpectrum : public Error {
 public:
  explicit InsufficientSpectrum(const std::string& what) : Error("insufficient-spectrum", what) {}
};

class StiffnessError : public Error {
 public:
  explicit StiffnessError(const std::string& what) : Error("stiffness", what) {}
};

class FitFailure : public Error {
 public:
  explicit FitFailure(const std::string& what) : Error("fit-failure", what) {}
};

}  // namespace lgap
