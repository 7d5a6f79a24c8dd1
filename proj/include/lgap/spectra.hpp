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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lgap/density.hpp"
#include "lgap/liouvillian.hpp"

namespace lgap {

enum class SolveMethod { Dense, Iterative };

/// Spectral transform used by the iterative path.
enum class SpectralTransform {
  ShiftInvert,  ///< (L - sigma)^-1 via a sparse LU factorization
  ScaledShift,  ///< I + tau L with tau = 0.5 / ||L||_1, matrix-vector products only
};

struct SpectrumResult {
  /// Sorted by descending Re, then ascending |Im|, then ascending Im.
  std::vector<std::complex<double>> eigenvalues;
  Index zero_multiplicity = 0;
  double gap = 0.0;
  double zero_tol = 0.0;
  double spectral_scale = 0.0;
  SolveMethod method = SolveMethod::Dense;
  /// Iterative only: max ||L v - lambda v|| / ||v|| over the reported pairs.
  double residual_bound = 0.0;
  /// No eigenvalue was found outside the zero band; gap is 0.
  bool degenerate = false;
  std::optional<std::size_t> lambda1_index;
  std::vector<std::string> warnings;

  /// The eigenvalue realizing the gap. Throws InsufficientSpectrum if degenerate.
  std::complex<double> lambda1() const;
};

/// max(1e-10, 1e-8 * spectral_scale).
double zero_tolerance(double spectral_scale);

/// Sorts eigenvalues in place and fills the zero band, gap and lambda1.
void classify_spectrum(SpectrumResult& s, double spectral_scale);

struct DenseOptions {
  Index dense_max = 4096;  ///< largest dim² accepted
};

SpectrumResult dense_spectrum(const Liouvillian& L, const DenseOptions& opts = {});

struct IterativeOptions {
  Index nev = 0;       ///< eigenvalues requested per shift; 0: max(k, 40)
  Index subspace = 0;  ///< Krylov dimension; 0: 2 nev + 20
  double residual_tol = 1e-8;
  double krylov_tol = 1e-12;
  int max_restarts = 500;
  std::uint64_t seed = 0;
  SpectralTransform transform = SpectralTransform::ShiftInvert;
  /// Extra shift-invert centers, solved after the default one at +zero_tol.
  std::vector<std::complex<double>> shifts;
  /// Adds shifts at zero_tol ± i j |Im lambda1|, j = 1..harmonics, once the
  /// first pass has located lambda1.
  int harmonics = 0;
};

/// Eigenvalues of L with the largest real parts, using only products with L
/// or solves with (L - sigma). Non-zero eigenvalues have traceless
/// eigenvectors, so the Krylov space is restricted to traceless vectors and
/// the trace-carrying null vector is obtained separately by inverse iteration.
SpectrumResult leading_eigs_iterative(const Liouvillian& L, Index k, const IterativeOptions& opts = {});

struct SteadyStateOptions {
  Index dense_below = 256;  ///< dim² at or below which the multiplicity check is dense
  IterativeOptions iterative{};
};

/// Unique steady state: Hermitized, unit trace. Throws DegenerateSteadyState
/// when the zero band holds more than one eigenvalue.
DensityMatrix steady_state(const Liouvillian& L, const SteadyStateOptions& opts = {});

/// As above, with the multiplicity taken from an existing spectrum of L.
DensityMatrix steady_state(const Liouvillian& L, const SpectrumResult& spectrum);

/// Basis of the zero subspace (the `multiplicity` eigenvectors nearest 0).
std::vector<DensityMatrix> zero_subspace_basis(const Liouvillian& L, Index multiplicity,
                                               const IterativeOptions& opts = {});

struct SpacingStats {
  double mean_spacing = 0.0;
  double rel_spread = 0.0;
};

/// Spacing statistics of Im(lambda) over the positive-Im members of the m+1
/// slowest eigenvalues.
SpacingStats imag_spacing_uniformity(const SpectrumResult& s, Index m);

/// True if the multiset pairs with its complex conjugate, |mu - conj(lambda)| <= tol.
bool conjugation_closed(const std::vector<std::complex<double>>& eigenvalues, double tol);

/// Largest Re(lambda).
double max_real_part(const std::vector<std::complex<double>>& eigenvalues);

}  // namespace lgap
