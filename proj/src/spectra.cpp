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

#include "lgap/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SparseLU>

#include "lgap/krylov_schur.hpp"

namespace lgap {

using cd = std::complex<double>;

namespace {

bool spectrum_order(const cd& a, const cd& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  if (std::abs(a.imag()) != std::abs(b.imag())) return std::abs(a.imag()) < std::abs(b.imag());
  return a.imag() < b.imag();
}

double max_abs_real_diagonal(const SparseMatrixXcd& m) {
  double s = 0.0;
  for (Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrixXcd::InnerIterator it(m, k); it; ++it) {
      if (it.row() == it.col()) s = std::max(s, std::abs(it.value().real()));
    }
  }
  return s;
}

double norm1(const SparseMatrixXcd& m) {
  double best = 0.0;
  for (Index k = 0; k < m.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrixXcd::InnerIterator it(m, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

SparseMatrixXcd shifted(const SparseMatrixXcd& m, cd sigma) {
  SparseMatrixXcd id(m.rows(), m.cols());
  id.setIdentity();
  SparseMatrixXcd a = m - sigma * id;
  a.makeCompressed();
  return a;
}

using LU = Eigen::SparseLU<SparseMatrixXcd, Eigen::COLAMDOrdering<int>>;

void factorize(LU& lu, const SparseMatrixXcd& a) {
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    throw ConvergenceError("sparse LU factorization of (L - sigma) failed: " + lu.lastErrorMessage(),
                           std::numeric_limits<double>::infinity());
  }
}

/// Removes the trace component along `carrier`, a vector with unit trace.
/// The null vector of L is the natural carrier: the projection then commutes
/// with L and also strips solver noise amplified along the near-null direction.
void project_traceless(Eigen::Ref<Eigen::VectorXcd> v, Index dim, const Eigen::VectorXcd& carrier) {
  cd tr = 0.0;
  for (Index i = 0; i < dim; ++i) tr += v(i * dim + i);
  v -= tr * carrier;
}

/// Unit-trace carrier for the projection; falls back to vec(I) / dim.
Eigen::VectorXcd trace_carrier(const Eigen::VectorXcd& null_vector, Index dim) {
  cd tr = 0.0;
  for (Index i = 0; i < dim; ++i) tr += null_vector(i * dim + i);
  if (std::abs(tr) > 1e-8 * null_vector.norm()) return null_vector / tr;
  return vec(DensityMatrix::Identity(dim, dim)) / static_cast<double>(dim);
}

struct Eigenpair {
  cd value;
  double residual;
};

double true_residual(const SparseMatrixXcd& m, const Eigen::VectorXcd& x, cd lambda) {
  return (m * x - lambda * x).norm() / x.norm();
}

/// Krylov-Schur on the traceless subspace with the requested transform.
std::vector<Eigenpair> traceless_pass(const Liouvillian& L, cd sigma, Index nev,
                                      const IterativeOptions& opts, const Eigen::VectorXcd& carrier,
                                      bool& converged) {
  const Index n = L.vector_dim();
  const Index dim = L.dim;
  KrylovSchurOptions ks;
  ks.subspace = opts.subspace;
  ks.max_restarts = opts.max_restarts;
  ks.tol = opts.krylov_tol;
  ks.seed = opts.seed;

  std::vector<Eigenpair> out;
  auto finish = [&](const KrylovSchurResult<cd>& r, auto&& to_lambda) {
    converged = r.converged;
    for (Index i = 0; i < r.values.size(); ++i) {
      const cd lambda = to_lambda(r.values(i));
      out.push_back({lambda, true_residual(L.matrix, r.vectors.col(i), lambda)});
    }
  };

  if (opts.transform == SpectralTransform::ShiftInvert) {
    LU lu;
    factorize(lu, shifted(L.matrix, sigma));
    auto op = [&](const auto& x, Eigen::VectorXcd& y) {
      Eigen::VectorXcd in = x;
      project_traceless(in, dim, carrier);
      y = lu.solve(in);
      project_traceless(y, dim, carrier);
    };
    // The traceless subspace has dimension n - 1.
    const auto r = krylov_schur<cd>(op, n, std::min(nev, n - 1), ks);
    finish(r, [&](cd theta) { return sigma + 1.0 / theta; });
  } else {
    const double tau = 0.5 / std::max(norm1(L.matrix), 1e-300);
    auto op = [&](const auto& x, Eigen::VectorXcd& y) {
      Eigen::VectorXcd in = x;
      project_traceless(in, dim, carrier);
      y = in + tau * (L.matrix * in);
      project_traceless(y, dim, carrier);
    };
    const auto r = krylov_schur<cd>(op, n, std::min(nev, n - 1), ks);
    finish(r, [&](cd theta) { return (theta - 1.0) / tau; });
  }
  return out;
}

/// Null vector carrying the trace, by inverse iteration from vec(I).
Eigen::VectorXcd trace_null_vector(const Liouvillian& L, double sigma) {
  LU lu;
  factorize(lu, shifted(L.matrix, sigma));
  Eigen::VectorXcd x = vec(DensityMatrix::Identity(L.dim, L.dim));
  x.normalize();
  for (int it = 0; it < 3; ++it) {
    x = lu.solve(x);
    x.normalize();
  }
  return x;
}

/// Adds `extra` to `into`, skipping values already present (one-to-one match).
void merge_unique(std::vector<Eigenpair>& into, const std::vector<Eigenpair>& extra) {
  std::vector<bool> used(into.size(), false);
  const std::size_t base = into.size();
  for (const auto& e : extra) {
    bool dup = false;
    for (std::size_t i = 0; i < base; ++i) {
      if (!used[i] && std::abs(into[i].value - e.value) <= 1e-7 * std::max(1.0, std::abs(e.value))) {
        used[i] = true;
        dup = true;
        break;
      }
    }
    if (!dup) into.push_back(e);
  }
}

/// Adds conj(λ) for every member whose partner is missing. L(X†) = (LX)†, so the
/// partner carries the same residual.
void complete_conjugates(std::vector<Eigenpair>& pairs, double zero_tol) {
  std::vector<Eigenpair> partners;
  for (const auto& p : pairs) {
    if (std::abs(p.value.imag()) <= zero_tol) continue;
    const cd target = std::conj(p.value);
    const double tol = 1e-7 * std::max(1.0, std::abs(target));
    const auto near = [&](const Eigenpair& e) { return std::abs(e.value - target) <= tol; };
    if (std::none_of(pairs.begin(), pairs.end(), near) && std::none_of(partners.begin(), partners.end(), near)) {
      partners.push_back({target, p.residual});
    }
  }
  pairs.insert(pairs.end(), partners.begin(), partners.end());
}

}  // namespace

cd SpectrumResult::lambda1() const {
  if (!lambda1_index) throw InsufficientSpectrum("no eigenvalue outside the zero band");
  return eigenvalues[*lambda1_index];
}

double zero_tolerance(double spectral_scale) { return std::max(1e-10, 1e-8 * spectral_scale); }

void classify_spectrum(SpectrumResult& s, double spectral_scale) {
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), spectrum_order);
  // Conjugate partners differ in real part only by rounding; list the
  // negative-imaginary member first so the order does not depend on that noise.
  for (std::size_t i = 0; i + 1 < s.eigenvalues.size(); ++i) {
    cd& a = s.eigenvalues[i];
    cd& b = s.eigenvalues[i + 1];
    if (a.imag() > 0.0 && std::abs(a - std::conj(b)) <= 1e-9 * std::max(1.0, std::abs(a))) {
      std::swap(a, b);
      ++i;
    }
  }
  s.spectral_scale = spectral_scale;
  s.zero_tol = zero_tolerance(spectral_scale);
  s.zero_multiplicity = 0;
  s.lambda1_index.reset();
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    const double re = s.eigenvalues[i].real();
    if (std::abs(re) <= s.zero_tol) {
      ++s.zero_multiplicity;
    } else if (re > 0.0) {
      s.warnings.push_back("eigenvalue with positive real part " + detail::num(re));
    } else if (!s.lambda1_index) {
      s.lambda1_index = i;
    }
  }
  s.degenerate = !s.lambda1_index.has_value();
  s.gap = s.degenerate ? 0.0 : -s.eigenvalues[*s.lambda1_index].real();
  if (s.zero_multiplicity == 0) s.warnings.push_back("no eigenvalue in the zero band");
}

SpectrumResult dense_spectrum(const Liouvillian& L, const DenseOptions& opts) {
  const Index n = L.vector_dim();
  if (n > opts.dense_max) {
    throw DenseTooLarge("dim^2 = " + std::to_string(n) + " exceeds dense_max " +
                        std::to_string(opts.dense_max) + "; use the iterative solver");
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(L.matrix), false);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("dense eigenvalue solver did not converge", std::numeric_limits<double>::infinity());
  }
  SpectrumResult s;
  s.method = SolveMethod::Dense;
  s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  double scale = 0.0;
  for (const auto& l : s.eigenvalues) scale = std::max(scale, std::abs(l.real()));
  classify_spectrum(s, scale);
  return s;
}

SpectrumResult leading_eigs_iterative(const Liouvillian& L, Index k, const IterativeOptions& opts) {
  if (k < 2) throw InvalidParameters("leading_eigs_iterative requires k >= 2");
  const Index n = L.vector_dim();
  SpectrumResult s;
  s.method = SolveMethod::Iterative;
  if (k > n) {
    s.warnings.push_back("k = " + std::to_string(k) + " exceeds dim^2 = " + std::to_string(n) +
                         "; clamped");
    k = n;
  }
  const double scale = max_abs_real_diagonal(L.matrix);
  const double sigma0 = zero_tolerance(scale);

  // Steady-state direction, carried outside the Krylov space.
  const Eigen::VectorXcd x0 = trace_null_vector(L, sigma0);
  const cd lambda0 = x0.dot(L.matrix * x0);
  std::vector<Eigenpair> pairs{{lambda0, true_residual(L.matrix, x0, lambda0)}};
  const Eigen::VectorXcd carrier = trace_carrier(x0, L.dim);

  Index nev = opts.nev > 0 ? std::max(opts.nev, k - 1) : std::max<Index>(k - 1, 40);
  nev = std::min(nev, n - 1);
  bool all_converged = true;
  std::vector<Eigenpair> first;
  for (;;) {
    bool conv = true;
    first = traceless_pass(L, sigma0, nev, opts, carrier, conv);
    all_converged = conv;
    const bool any_outside = std::any_of(first.begin(), first.end(), [&](const Eigenpair& e) {
      return std::abs(e.value.real()) > zero_tolerance(scale);
    });
    if (any_outside || nev >= n - 1) break;
    nev = std::min(2 * nev, n - 1);
    s.warnings.push_back("zero band filled the request; retrying with nev = " + std::to_string(nev));
  }
  merge_unique(pairs, first);

  std::vector<cd> shifts = opts.shifts;
  if (opts.harmonics > 0) {
    SpectrumResult probe;
    for (const auto& p : pairs) probe.eigenvalues.push_back(p.value);
    classify_spectrum(probe, scale);
    if (!probe.degenerate) {
      const double omega = std::abs(probe.lambda1().imag());
      if (omega > probe.zero_tol) {
        for (int j = 1; j <= opts.harmonics; ++j) {
          shifts.emplace_back(sigma0, j * omega);
          shifts.emplace_back(sigma0, -j * omega);
        }
      }
    }
  }
  if (opts.transform == SpectralTransform::ShiftInvert) {
    for (const cd& sigma : shifts) {
      bool conv = true;
      merge_unique(pairs, traceless_pass(L, sigma, nev, opts, carrier, conv));
      all_converged = all_converged && conv;
    }
  }

  complete_conjugates(pairs, zero_tolerance(scale));

  double worst = 0.0;
  for (const auto& p : pairs) {
    s.eigenvalues.push_back(p.value);
    worst = std::max(worst, p.residual);
  }
  s.residual_bound = worst;
  classify_spectrum(s, scale);
  if (!all_converged || worst > opts.residual_tol) {
    throw ConvergenceError("iterative eigensolver did not reach residual " +
                               detail::num(opts.residual_tol),
                           worst);
  }
  return s;
}

DensityMatrix steady_state(const Liouvillian& L, const SpectrumResult& spectrum) {
  if (spectrum.zero_multiplicity > 1) throw DegenerateSteadyState(static_cast<long>(spectrum.zero_multiplicity));
  const Eigen::VectorXcd x = trace_null_vector(L, std::max(spectrum.zero_tol, 1e-10));
  DensityMatrix rho = hermitize(unvec(x, L.dim));
  rho /= rho.trace();
  return hermitize(rho);
}

DensityMatrix steady_state(const Liouvillian& L, const SteadyStateOptions& opts) {
  if (L.vector_dim() <= opts.dense_below) return steady_state(L, dense_spectrum(L));
  IterativeOptions it = opts.iterative;
  if (it.nev == 0) it.nev = 8;
  return steady_state(L, leading_eigs_iterative(L, 2, it));
}

std::vector<DensityMatrix> zero_subspace_basis(const Liouvillian& L, Index multiplicity,
                                               const IterativeOptions& opts) {
  const Index n = L.vector_dim();
  if (multiplicity < 1 || multiplicity > n) throw InvalidParameters("invalid zero-subspace multiplicity");
  const double sigma = zero_tolerance(max_abs_real_diagonal(L.matrix));
  LU lu;
  factorize(lu, shifted(L.matrix, sigma));
  KrylovSchurOptions ks;
  ks.subspace = opts.subspace;
  ks.max_restarts = opts.max_restarts;
  ks.tol = 1e-10;
  ks.seed = opts.seed;
  auto op = [&](const auto& x, Eigen::VectorXcd& y) { y = lu.solve(Eigen::VectorXcd(x)); };
  const auto r = krylov_schur<cd>(op, n, multiplicity, ks);
  std::vector<DensityMatrix> basis;
  for (Index i = 0; i < multiplicity; ++i) basis.push_back(unvec(r.vectors.col(i), L.dim));
  return basis;
}

SpacingStats imag_spacing_uniformity(const SpectrumResult& s, Index m) {
  if (m < 2) throw InvalidParameters("imag_spacing_uniformity requires m >= 2");
  if (static_cast<Index>(s.eigenvalues.size()) < m + 1) {
    throw InsufficientSpectrum("need " + std::to_string(m + 1) + " eigenvalues, have " +
                               std::to_string(s.eigenvalues.size()));
  }
  std::vector<cd> band(s.eigenvalues.begin(), s.eigenvalues.begin() + (m + 1));
  std::sort(band.begin(), band.end(), spectrum_order);
  const double im_tol = std::max(s.zero_tol, 1e-12);
  std::vector<double> im;
  for (const auto& l : band) {
    if (l.imag() > im_tol) im.push_back(l.imag());
  }
  if (im.size() < 2) {
    throw InsufficientSpectrum("fewer than two slow eigenvalues with positive imaginary part");
  }
  std::sort(im.begin(), im.end());
  im.erase(std::unique(im.begin(), im.end(),
                       [](double a, double b) { return b - a <= 1e-8 * std::max(1.0, b); }),
           im.end());
  if (im.size() < 2) {
    throw InsufficientSpectrum("fewer than two distinct positive imaginary parts in the slow band");
  }
  std::vector<double> d;
  for (std::size_t i = 1; i < im.size(); ++i) d.push_back(im[i] - im[i - 1]);
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  double var = 0.0;
  for (double x : d) var += (x - mean) * (x - mean);
  var /= static_cast<double>(d.size());
  return {mean, mean != 0.0 ? std::sqrt(var) / std::abs(mean) : INFINITY};
}

bool conjugation_closed(const std::vector<cd>& eigenvalues, double tol) {
  std::vector<cd> v = eigenvalues;
  std::sort(v.begin(), v.end(), [](const cd& a, const cd& b) { return a.real() < b.real(); });
  std::vector<bool> used(v.size(), false);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (used[i]) continue;
    const cd target = std::conj(v[i]);
    if (std::abs(v[i].imag()) <= tol) {
      used[i] = true;
      continue;
    }
    bool found = false;
    // scan the window of candidates with |Re diff| <= tol
    auto lo = std::lower_bound(v.begin(), v.end(), target.real() - tol,
                               [](const cd& a, double x) { return a.real() < x; });
    for (auto it = lo; it != v.end() && it->real() <= target.real() + tol; ++it) {
      const auto j = static_cast<std::size_t>(it - v.begin());
      if (j != i && !used[j] && std::abs(*it - target) <= tol) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

double max_real_part(const std::vector<cd>& eigenvalues) {
  double m = -INFINITY;
  for (const auto& l : eigenvalues) m = std::max(m, l.real());
  return m;
}

}  // namespace lgap
