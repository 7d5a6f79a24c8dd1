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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgap/model.hpp"
#include "lgap/spectra.hpp"

namespace lgap {

struct TruncationPolicy {
  Index dim_start = 12;
  double dim_growth = 1.5;  ///< next = ceil(dim * growth), rounded up to even
  Index dim_max = 0;        ///< 0: 64 for the dense solver, 120 otherwise
  double gap_rtol = 1e-3;
  double top_population_tol = 1e-8;
};

enum class SolverKind { Dense, Iterative, Auto };

struct SolverConfig {
  SolverKind kind = SolverKind::Auto;
  Index auto_dense_max_dim = 24;  ///< Auto uses the dense path up to this Fock dim
  DenseOptions dense{};
  IterativeOptions iterative{};
};

struct FixedParams {
  double g = 1.0;
  double kappa = 0.1;
  double delta = 10.0;
  double sqrt_eta_eps = 2.0;
  ChannelPrefactors prefactors{};
};

struct SweepConfig {
  int schema_version = 1;
  /// Unset: the built-in Van der Pol model.
  std::optional<LindbladModel> inline_model;
  FixedParams fixed{};
  std::vector<double> inv_eta_values;
  std::vector<double> gamma_values{0.0};
  std::vector<double> u_kerr_values{0.0};
  TruncationPolicy truncation{};
  SolverConfig solver{};
  std::string output;
  unsigned parallelism = 0;  ///< 0: LGAP_THREADS, else hardware concurrency

  Index resolved_dim_max() const;
};

/// Strict parse: unknown keys and out-of-range values raise SchemaError.
SweepConfig parse_sweep_config(const nlohmann::json& tree);
/// Reads a JSON file; // and /* */ comments are allowed.
SweepConfig load_sweep_config(const std::string& path);

struct SweepPoint {
  double inv_eta;  ///< +inf for an inline model without a two-photon axis
  double gamma;
  double u_kerr;
};

/// Model at one axis point. For inline models the axes append (1/inv_eta, a²),
/// (2 gamma, n) and U ad^2 a^2 when the respective value is finite and nonzero.
LindbladModel point_model(const SweepConfig& cfg, const SweepPoint& p);

/// Axis points in deterministic order: inv_eta outermost, then gamma, then u_kerr.
std::vector<SweepPoint> sweep_points(const SweepConfig& cfg);

/// The exact dims attempted: dim_start, then ceil(growth * d) rounded up to
/// even, with the final entry clamped to dim_max.
std::vector<Index> dimension_sequence(const TruncationPolicy& policy, Index dim_max);

/// Dispatches to the dense or iterative path.
SpectrumResult solve_spectrum(const Liouvillian& L, const SolverConfig& solver, Index k = 2);

enum class PointStatus { Converged, Unconverged, Unresolved, Failed };

const char* to_string(PointStatus s);

struct GapPoint {
  double inv_eta = 0.0;
  double gamma = 0.0;
  double u_kerr = 0.0;
  Index dim_used = 0;
  double gap = 0.0;
  std::complex<double> lambda1{};
  bool converged = false;
  PointStatus status = PointStatus::Unconverged;
  std::vector<Index> dims_tried;
  double top_population = 0.0;  ///< <N-1|rho_ss|N-1> at dim_used; nan if not unique
  double zero_tol = 0.0;
  std::string note;
};

/// Grows the truncation until consecutive gaps agree to gap_rtol and the
/// steady state leaves the top Fock level empty (< top_population_tol).
/// Numerical failures are recorded in the point, not thrown.
GapPoint converge_truncation(const LindbladModel& model, const SweepPoint& where,
                             const TruncationPolicy& policy, const SolverConfig& solver,
                             Index dim_max);

struct SeriesSummary {
  double gamma = 0.0;
  double u_kerr = 0.0;
  std::size_t converged_points = 0;
  std::optional<double> loglog_slope;  ///< gamma == 0 series
  std::optional<double> plateau;       ///< gamma > 0: gap at the largest converged inv_eta
  std::optional<double> plateau_slope; ///< d log gap / d log inv_eta over the last two converged points
  bool plateau_flat = false;           ///< |plateau_slope| < 0.15
  std::optional<double> last_inv_eta;
  std::optional<double> last_gap;
};

struct SweepResult {
  std::vector<GapPoint> rows;
  std::vector<SeriesSummary> series;
};

SweepResult run_sweep(const SweepConfig& cfg);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

std::vector<SeriesSummary> summarize(const std::vector<GapPoint>& rows);

inline constexpr const char* kSweepCsvHeader =
    "inv_eta,gamma,u_kerr,dim_used,gap,re_lambda1,im_lambda1,converged";

std::string csv_row(const GapPoint& p);
void write_sweep_csv(std::ostream& os, const std::vector<GapPoint>& rows);
std::string format_summary(const SweepResult& r);

}  // namespace lgap
