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

#include "lgap/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <ostream>

#include "lgap/csv.hpp"
#include "lgap/liouvillian.hpp"

namespace lgap {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const DensityMatrix& err, const DensityMatrix& y0, const DensityMatrix& y1,
                  double atol, double rtol) {
  double acc = 0.0;
  for (Index j = 0; j < err.cols(); ++j) {
    for (Index i = 0; i < err.rows(); ++i) {
      const double sc = atol + rtol * std::max(std::abs(y0(i, j)), std::abs(y1(i, j)));
      const double r = std::abs(err(i, j)) / sc;
      acc += r * r;
    }
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace

std::vector<double> uniform_grid(double t0, double t_max, double dt) {
  if (!(dt > 0.0) || !(t_max >= t0)) throw InvalidParameters("uniform_grid needs dt > 0 and t_max >= t0");
  const auto steps = static_cast<long>(std::floor((t_max - t0) / dt + 1e-9));
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(steps + 1));
  for (long i = 0; i <= steps; ++i) g.push_back(t0 + static_cast<double>(i) * dt);
  return g;
}

Evolution evolve(const AssembledModel& model, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                 const std::vector<Observable>& observables, const EvolveOptions& opts) {
  if (rho0.rows() != model.dim()) throw InvalidDimension("evolve: rho0 does not match model dimension");
  validate_density(rho0, opts.initial_checks);
  if (t_grid.empty()) throw InvalidParameters("evolve: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw InvalidParameters("evolve: time grid must be strictly increasing");
  }
  for (const auto& o : observables) {
    if (o.op.dim() != model.dim()) throw InvalidDimension("evolve: observable '" + o.tag + "' has wrong dimension");
  }

  Evolution out;
  for (const auto& o : observables) out.traces.push_back({{}, {}, o.tag});
  auto sample = [&](double t, const DensityMatrix& rho) {
    for (std::size_t k = 0; k < observables.size(); ++k) {
      out.traces[k].times.push_back(t);
      out.traces[k].values.push_back(expectation(observables[k].op, rho));
    }
  };

  auto f = [&](const DensityMatrix& r) { return apply_rhs(model, r); };
  DensityMatrix y = rho0;
  double t = t_grid.front();
  sample(t, y);

  DensityMatrix k1 = f(y);
  double h = opts.initial_step;
  if (!(h > 0.0)) {
    const double d = k1.cwiseAbs().maxCoeff();
    h = d > 0.0 ? 0.01 * std::max(y.cwiseAbs().maxCoeff(), 1e-3) / d : 1e-2;
  }

  for (std::size_t target = 1; target < t_grid.size(); ++target) {
    const double t_end = t_grid[target];
    while (t < t_end) {
      if (out.stats.accepted + out.stats.rejected >= opts.max_steps) {
        throw StiffnessError("evolve: step budget exhausted at t = " + detail::num(t));
      }
      bool last = false;
      double step = h;
      if (t + step >= t_end) {
        step = t_end - t;
        last = true;
      }
      const DensityMatrix k2 = f(y + step * (a21 * k1));
      const DensityMatrix k3 = f(y + step * (a31 * k1 + a32 * k2));
      const DensityMatrix k4 = f(y + step * (a41 * k1 + a42 * k2 + a43 * k3));
      const DensityMatrix k5 = f(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const DensityMatrix k6 = f(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      DensityMatrix ynew = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const DensityMatrix k7 = f(ynew);
      const DensityMatrix err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = error_norm(err, y, ynew, opts.atol, opts.rtol);

      if (en <= 1.0) {
        t = last ? t_end : t + step;
        DensityMatrix fixed = hermitize(ynew);
        fixed /= fixed.trace();
        out.stats.cumulative_correction += (fixed - ynew).cwiseAbs().maxCoeff();
        y = std::move(fixed);
        k1 = f(y);
        ++out.stats.accepted;
        const double grow = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
        // keep h when a step was shortened to land on the grid
        if (!last || step >= h) h = step * std::clamp(grow, 0.2, 5.0);
      } else {
        ++out.stats.rejected;
        h = step * std::clamp(0.9 * std::pow(en, -0.2), 0.2, 1.0);
        if (h < opts.min_step) {
          throw StiffnessError("evolve: step size underflow (h = " + detail::num(h) + ") at t = " +
                               detail::num(t) + "; shorten the time span or use spectral methods");
        }
      }
    }
    sample(t, y);
  }
  out.final_state = std::move(y);
  return out;
}

Evolution evolve(const LindbladModel& model, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                 const std::vector<Observable>& observables, const EvolveOptions& opts) {
  return evolve(assemble(model, rho0.rows()), rho0, t_grid, observables, opts);
}

DecayFit fit_decay(const TimeTrace& trace, double t_min, std::complex<double> asymptote) {
  std::vector<double> t, logmag, phase;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    if (trace.times[i] < t_min) continue;
    const std::complex<double> d = trace.values[i] - asymptote;
    const double mag = std::abs(d);
    if (!(mag > 0.0) || !std::isfinite(mag)) {
      throw FitFailure("fit_decay: trace reaches the asymptote at t = " + detail::num(trace.times[i]) +
                       "; nothing to fit");
    }
    t.push_back(trace.times[i]);
    logmag.push_back(std::log(mag));
    double p = std::arg(d);
    if (!phase.empty()) {
      // unwrap
      while (p - phase.back() > std::numbers::pi) p -= 2.0 * std::numbers::pi;
      while (p - phase.back() < -std::numbers::pi) p += 2.0 * std::numbers::pi;
    }
    phase.push_back(p);
  }
  if (t.size() < 3) throw FitFailure("fit_decay: fewer than 3 samples after t_min");

  const auto n = static_cast<double>(t.size());
  const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
  double stt = 0.0;
  for (double x : t) stt += (x - tm) * (x - tm);
  auto slope = [&](const std::vector<double>& y, double& intercept) {
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sty = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) sty += (t[i] - tm) * (y[i] - ym);
    const double s = sty / stt;
    intercept = ym - s * tm;
    return s;
  };

  DecayFit fit;
  double c0 = 0.0, c1 = 0.0;
  fit.rate = -slope(logmag, c0);
  fit.frequency = slope(phase, c1);
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = logmag[i] - (c0 - fit.rate * t[i]);
    ss += r * r;
  }
  fit.fit_residual = std::sqrt(ss / n);
  const double span = t.back() - t.front();
  if (!(fit.rate > 1e-12 / std::max(span, 1e-300)) || !std::isfinite(fit.rate)) {
    throw FitFailure("fit_decay: trace does not decay (fitted rate " + detail::num(fit.rate) + ")");
  }
  fit.low_confidence = fit.rate * span < 3.0;
  return fit;
}

void write_traces_csv(std::ostream& os, const std::vector<TimeTrace>& traces) {
  os << "t,re_value,im_value,observable_tag\n";
  for (const auto& tr : traces) {
    const std::string tag = csv_field(tr.observable_tag);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      os << format_double(tr.times[i]) << ',' << format_double(tr.values[i].real()) << ','
         << format_double(tr.values[i].imag()) << ',' << tag << '\n';
    }
  }
}

}  // namespace lgap
