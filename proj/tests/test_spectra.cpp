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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "lgap/spectra.hpp"
#include "model_support.hpp"

using namespace lgap;
using cd = std::complex<double>;

namespace {

LindbladModel single_channel(double rate, const char* op) {
  LindbladModel m;
  m.dissipators.push_back({rate, OperatorExpr::parse(op)});
  return m;
}

LindbladModel vdp(double inv_eta, double gamma = 0.0, double u = 0.0) {
  return vdp_model(VdPParams::with_drive_product(1.0, 0.1, 10.0, inv_eta, 2.0, gamma, u));
}

void check_structure(const SpectrumResult& s) {
  CHECK(s.zero_multiplicity >= 1);
  CHECK(max_real_part(s.eigenvalues) <= 1e-9 * std::max(1.0, s.spectral_scale));
  CHECK(conjugation_closed(s.eigenvalues, 1e-9));
  CHECK(s.gap >= 0.0);
}

}  // namespace

TEST_CASE("dense analytic spectra") {
  SUBCASE("two-level amplitude damping") {
    const SpectrumResult s = dense_spectrum(build_superoperator(single_channel(0.1, "a"), 2));
    REQUIRE(s.eigenvalues.size() == 4);
    CHECK(std::abs(s.eigenvalues[0]) <= 1e-12);
    CHECK(std::abs(s.eigenvalues[1] - cd(-0.05)) <= 1e-12);
    CHECK(std::abs(s.eigenvalues[2] - cd(-0.05)) <= 1e-12);
    CHECK(std::abs(s.eigenvalues[3] - cd(-0.1)) <= 1e-12);
    CHECK(s.zero_multiplicity == 1);
    CHECK(std::abs(s.gap - 0.05) <= 1e-10);
    CHECK(s.method == SolveMethod::Dense);
  }
  SUBCASE("amplitude damping gap at larger truncations") {
    for (Index dim : {3, 6, 12}) {
      const SpectrumResult s = dense_spectrum(build_superoperator(single_channel(0.1, "a"), dim));
      CHECK(std::abs(s.gap - 0.05) <= 1e-10);
      CHECK(s.zero_multiplicity == 1);
      check_structure(s);
    }
  }
  SUBCASE("dephasing") {
    const SpectrumResult s = dense_spectrum(build_superoperator(single_channel(0.6, "n"), 2));
    CHECK(s.zero_multiplicity == 2);
    CHECK(std::abs(s.gap - 0.3) <= 1e-10);
    for (Index dim = 2; dim <= 8; ++dim) {
      const SpectrumResult sd = dense_spectrum(build_superoperator(single_channel(0.6, "n"), dim));
      CHECK(sd.zero_multiplicity == dim);
      CHECK(std::abs(sd.gap - 0.3) <= 1e-10);
      CHECK_FALSE(sd.degenerate);
    }
  }
  SUBCASE("closed ladder") {
    const double w = 3.0;
    LindbladModel m;
    m.hamiltonian.push_back({w, OperatorExpr::parse("n")});
    const SpectrumResult s = dense_spectrum(build_superoperator(m, 4));
    for (const cd& l : s.eigenvalues) {
      CHECK(std::abs(l.real()) <= 1e-10);
      const double k = l.imag() / w;
      CHECK(std::abs(k - std::round(k)) <= 1e-10);
    }
    CHECK(s.zero_multiplicity == 16);
    CHECK(s.degenerate);
    CHECK(s.gap == 0.0);
    const SpacingStats st = imag_spacing_uniformity(s, 15);
    CHECK(st.mean_spacing == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(st.rel_spread <= 1e-12);
  }
}

TEST_CASE("spectrum ordering") {
  const SpectrumResult s = dense_spectrum(build_superoperator(vdp(1.0, 0.05), 10));
  for (std::size_t i = 1; i < s.eigenvalues.size(); ++i) {
    const cd a = s.eigenvalues[i - 1], b = s.eigenvalues[i];
    // conjugate partners count as tied and list negative imaginary part first
    const double tie = 1e-9 * std::max(1.0, std::abs(a));
    CHECK(a.real() >= b.real() - tie);
    if (std::abs(a - std::conj(b)) <= tie && a.imag() != 0.0) CHECK(a.imag() < 0.0);
  }
  REQUIRE(s.lambda1_index.has_value());
  CHECK(-s.lambda1().real() == s.gap);
  CHECK(s.lambda1().imag() < 0.0);
}

TEST_CASE("golden Van der Pol gap") {
  // independent reference: 0.5563108982689964 (dim 20), 0.5563108982697874 (dim 28)
  const SpectrumResult s = dense_spectrum(build_superoperator(vdp(1.0), 20));
  CHECK(s.gap == doctest::Approx(0.5563108982689964).epsilon(1e-9));
  CHECK(std::abs(s.lambda1().imag()) == doctest::Approx(9.995715773366).epsilon(1e-9));
  CHECK(s.zero_multiplicity == 1);
  CHECK(conjugation_closed(s.eigenvalues, 1e-9));
  check_structure(s);
}

TEST_CASE("dense size guard") {
  const Liouvillian L = build_superoperator(single_channel(0.1, "a"), 65, BuildOptions{65 * 65});
  CHECK_THROWS_AS(dense_spectrum(L), DenseTooLarge);
  CHECK_NOTHROW(dense_spectrum(build_superoperator(single_channel(0.1, "a"), 8), DenseOptions{64}));
  CHECK_THROWS_AS(dense_spectrum(build_superoperator(single_channel(0.1, "a"), 9), DenseOptions{64}),
                  DenseTooLarge);
}

TEST_CASE("structural properties on random models") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    const Index dim = 3 + trial % 6;
    const LindbladModel m = trial % 2 ? testing::random_model(rng) : testing::random_vdp_model(rng);
    const Liouvillian L = build_superoperator(m, dim);
    const SpectrumResult s = dense_spectrum(L);
    check_structure(s);
    CHECK(conjugation_closed(s.eigenvalues, 1e-9 * std::max(1.0, s.spectral_scale)));
    CHECK(trace_preservation_defect(L) <= 1e-10);
  }
}

TEST_CASE("conjugation check detects an unpaired eigenvalue") {
  CHECK(conjugation_closed({cd(0), cd(-1, 2), cd(-1, -2)}, 1e-9));
  CHECK_FALSE(conjugation_closed({cd(0), cd(-1, 2), cd(-1, -2.1)}, 1e-9));
  CHECK_FALSE(conjugation_closed({cd(0), cd(-1, 2)}, 1e-9));
}

TEST_CASE("steady states") {
  for (Index dim : {3, 8, 15}) {
    const DensityMatrix rho = steady_state(build_superoperator(single_channel(0.1, "a"), dim));
    CHECK((rho - fock_state(dim, 0)).cwiseAbs().maxCoeff() <= 1e-10);
  }

  try {
    steady_state(build_superoperator(single_channel(0.6, "n"), 2));
    FAIL("expected a degenerate steady space");
  } catch (const DegenerateSteadyState& e) {
    CHECK(e.multiplicity() == 2);
  }

  const Liouvillian Ld = build_superoperator(single_channel(0.6, "n"), 3);
  const auto basis = zero_subspace_basis(Ld, 3);
  REQUIRE(basis.size() == 3);
  for (const auto& b : basis) CHECK((Ld.matrix * vec(b)).norm() <= 1e-10 * vec(b).norm());

  const LindbladModel m = vdp(1.0, 0.1);
  const AssembledModel am = assemble(m, 20);
  const Liouvillian L = build_superoperator(am);
  const DensityMatrix rho = steady_state(L);
  CHECK(hermiticity_defect(rho) <= 1e-12);
  CHECK(std::abs(rho.trace() - 1.0) <= 1e-12);
  CHECK(min_eigenvalue(rho) >= -1e-8);
  CHECK(apply_rhs(am, rho).cwiseAbs().maxCoeff() <= 1e-8);

  const DensityMatrix rho_dense_path = steady_state(L, dense_spectrum(L));
  CHECK((rho - rho_dense_path).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("iterative amplitude damping ladder") {
  const double kappa = 0.1;
  const SpectrumResult s = leading_eigs_iterative(build_superoperator(single_channel(kappa, "a"), 12), 6);
  REQUIRE(s.eigenvalues.size() >= 6);
  // decay rates kappa (j + |d| / 2): 0, k/2 (x2), k (x3)
  const double expected[] = {0.0, -0.5 * kappa, -0.5 * kappa, -kappa, -kappa, -kappa};
  for (int i = 0; i < 6; ++i) CHECK(std::abs(s.eigenvalues[i].real() - expected[i]) <= 1e-8);
  CHECK(std::abs(s.gap - 0.5 * kappa) <= 1e-10);
  CHECK(s.method == SolveMethod::Iterative);
  CHECK(s.residual_bound <= 1e-8);

  const SpectrumResult d = dense_spectrum(build_superoperator(single_channel(kappa, "a"), 12));
  for (int i = 0; i < 6; ++i) CHECK(std::abs(d.eigenvalues[i].real() - expected[i]) <= 1e-10);
}

TEST_CASE("iterative agrees with dense on Van der Pol") {
  struct Case {
    double inv_eta, gamma, u;
    Index dim;
  };
  for (const Case c : {Case{1.0, 0.0, 0.0, 24}, Case{5.0, 0.05, 0.0, 30}, Case{2.0, 0.1, 0.02, 24}}) {
    const Liouvillian L = build_superoperator(vdp(c.inv_eta, c.gamma, c.u), c.dim);
    const SpectrumResult d = dense_spectrum(L);
    const SpectrumResult it = leading_eigs_iterative(L, 2);
    CAPTURE(c.inv_eta);
    CHECK(std::abs(d.gap - it.gap) <= 1e-7 * d.gap);
    CHECK(std::abs(d.lambda1().imag()) == doctest::Approx(std::abs(it.lambda1().imag())).epsilon(1e-7));
    CHECK(it.residual_bound <= 1e-8);
    CHECK(it.zero_multiplicity == 1);
    check_structure(it);
  }
}

TEST_CASE("iterative sets are closed under conjugation") {
  const SpectrumResult it = leading_eigs_iterative(build_superoperator(vdp(20.0, 0.05), 64), 2);
  CHECK(conjugation_closed(it.eigenvalues, 1e-9));
  CHECK(it.residual_bound <= 1e-8);
}

TEST_CASE("scaled-shift transform") {
  IterativeOptions opts;
  opts.transform = SpectralTransform::ScaledShift;
  const SpectrumResult s = leading_eigs_iterative(build_superoperator(single_channel(0.1, "a"), 6), 4, opts);
  CHECK(std::abs(s.gap - 0.05) <= 1e-10);
  CHECK(s.residual_bound <= 1e-8);
}

TEST_CASE("harmonic shifts recover the slow band") {
  const Liouvillian L = build_superoperator(vdp(2.0), 24);
  const SpectrumResult d = dense_spectrum(L);
  IterativeOptions opts;
  opts.harmonics = 5;
  const SpectrumResult it = leading_eigs_iterative(L, 9, opts);
  REQUIRE(it.eigenvalues.size() >= 9);
  for (int i = 0; i < 9; ++i) {
    // conjugate partners may swap places, so match each value within the top nine
    CHECK(std::abs(it.eigenvalues[i].real() - d.eigenvalues[i].real()) <= 1e-7);
    double best = INFINITY;
    for (std::size_t j = 0; j < std::min<std::size_t>(it.eigenvalues.size(), 10); ++j) best = std::min(best, std::abs(it.eigenvalues[j] - d.eigenvalues[i]));
    CHECK(best <= 1e-7);
  }
}

TEST_CASE("iterative request validation") {
  const Liouvillian L = build_superoperator(single_channel(0.1, "a"), 2);
  const SpectrumResult s = leading_eigs_iterative(L, 10);
  CHECK(s.eigenvalues.size() == 4);
  CHECK_FALSE(s.warnings.empty());
  CHECK_THROWS_AS(leading_eigs_iterative(L, 1), InvalidParameters);
}

TEST_CASE("iterative solves are deterministic for a fixed seed") {
  const Liouvillian L = build_superoperator(vdp(3.0, 0.05), 20);
  IterativeOptions opts;
  opts.seed = 11;
  const SpectrumResult a = leading_eigs_iterative(L, 4, opts);
  const SpectrumResult b = leading_eigs_iterative(L, 4, opts);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.gap == b.gap);
}

TEST_CASE("imaginary spacing statistics") {
  SpectrumResult s;
  s.eigenvalues = {cd(0), cd(-0.1, 2), cd(-0.1, -2), cd(-0.2, 4), cd(-0.2, -4), cd(-0.3, 6), cd(-0.3, -6)};
  const SpacingStats st = imag_spacing_uniformity(s, 6);
  CHECK(st.mean_spacing == doctest::Approx(2.0));
  CHECK(st.rel_spread == doctest::Approx(0.0));

  s.eigenvalues = {cd(0), cd(-0.1, 2), cd(-0.1, -2), cd(-0.2, 5), cd(-0.2, -5)};
  CHECK(imag_spacing_uniformity(s, 4).rel_spread == doctest::Approx(0.0));
  CHECK_THROWS_AS(imag_spacing_uniformity(s, 2), InsufficientSpectrum);
  CHECK_THROWS_AS(imag_spacing_uniformity(s, 6), InsufficientSpectrum);
  CHECK_THROWS_AS(imag_spacing_uniformity(s, 1), InvalidParameters);
}
