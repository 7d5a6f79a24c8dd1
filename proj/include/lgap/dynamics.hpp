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
#include <string>
#include <vector>

#include "lgap/density.hpp"
#include "lgap/model.hpp"

namespace lgap {

struct TimeTrace {
  std::vector<double> times;  ///< strictly increasing
  std::vector<std::complex<double>> values;
  std::string observable_tag;
};

struct Observable {
  std::string tag;
  FockOperator op;
};

struct EvolveOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0.0;  ///< 0: estimated from ||L rho0||
  double min_step = 1e-12;
  long max_steps = 50'000'000;
  DensityChecks initial_checks{true, true, 1e-10, 1e-10, 1e-10};
};

struct EvolveStats {
  long accepted = 0;
  long rejected = 0;
  /// Sum over steps of the max-entry change made by Hermitizing and renormalizing.
  double cumulative_correction = 0.0;
};

struct Evolution {
  std::vector<TimeTrace> traces;  ///< one per observable, sampled on the grid
  DensityMatrix final_state;
  EvolveStats stats;
};

/// Integrates d(rho)/dt = apply_rhs(rho) from t_grid.front() with adaptive
/// Dormand-Prince 5(4) steps that land exactly on every grid time. After each
/// accepted step rho is Hermitized and renormalized to unit trace.
Evolution evolve(const AssembledModel& model, const DensityMatrix& rho0,
                 const std::vector<double>& t_grid, const std::vector<Observable>& observables,
                 const EvolveOptions& opts = {});

Evolution evolve(const LindbladModel& model, const DensityMatrix& rho0,
                 const std::vector<double>& t_grid, const std::vector<Observable>& observables,
                 const EvolveOptions& opts = {});

/// Uniform grid t0, t0 + dt, ..., up to and including t_max.
std::vector<double> uniform_grid(double t0, double t_max, double dt);

struct DecayFit {
  double rate = 0.0;
  double frequency = 0.0;  ///< signed slope of the unwrapped phase
  double fit_residual = 0.0;  ///< RMS deviation of log|values - asymptote| from the line
  bool low_confidence = false;  ///< fewer than 3 e-foldings after t_min
};

/// Fits |values - asymptote| ~ A exp(-rate t) on t >= t_min by least squares
/// on the logarithm, and the phase of (values - asymptote) to a line.
DecayFit fit_decay(const TimeTrace& trace, double t_min, std::complex<double> asymptote = 0.0);

/// Columns t, re_value, im_value, observable_tag.
void write_traces_csv(std::ostream& os, const std::vector<TimeTrace>& traces);

}  // namespace lgap
