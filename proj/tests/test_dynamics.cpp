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

#include <cmath>
#include <sstream>

#include "lgap/dynamics.hpp"
#include "lgap/spectra.hpp"

using namespace lgap;
using cd = std::complex<double>;

namespace {

LindbladModel single_channel(double rate, const char* op) {
  LindbladModel m;
  m.dissipators.push_back({rate, OperatorExpr::parse(op)});
  return m;
}

LindbladModel vdp(double inv_eta, double gamma) {
  return vdp_model(VdPParams::with_drive_product(1.0, 0.1, 10.0, inv_eta, 2.0, gamma));
}

TimeTrace synthetic(cd lambda, double t_max, double dt, cd offset = 0.0) {
  TimeTrace tr;
  tr.observable_tag = "synthetic";
  for (double t : uniform_grid(0.0, t_max, dt)) {
    tr.times.push_back(t);
    tr.values.push_back(offset + std::exp(lambda * t));
  }
  return tr;
}

}  // namespace

TEST_CASE("free rotation of a qubit superposition") {
  const double delta = 10.0;
  LindbladModel m;
  m.hamiltonian.push_back({delta, OperatorExpr::parse("n")});
  const Index dim = 4;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(0) = psi(1) = 1.0 / std::sqrt(2.0);
  const DensityMatrix rho0 = psi * psi.adjoint();
  const auto ev = evolve(m, rho0, uniform_grid(0.0, 2.0, 0.01), {{"a", annihilation(dim)}});
  const TimeTrace& tr = ev.traces[0];
  REQUIRE(tr.times.size() == 201);
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    worst = std::max(worst, std::abs(tr.values[i] - 0.5 * std::exp(cd(0.0, -delta * tr.times[i]))));
  }
  CHECK(worst <= 1e-6);
  CHECK(tr.observable_tag == "a");
}

TEST_CASE("amplitude damping of a single photon") {
  const double kappa = 0.3;
  const auto ev = evolve(single_channel(kappa, "a"), fock_state(3, 1), uniform_grid(0.0, 10.0, 0.1),
                         {{"n", number(3)}});
  double worst = 0.0;
  for (std::size_t i = 0; i < ev.traces[0].times.size(); ++i) {
    worst = std::max(worst, std::abs(ev.traces[0].values[i] - std::exp(-kappa * ev.traces[0].times[i])));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("trace and Hermiticity are preserved") {
  const AssembledModel am = assemble(vdp(2.0, 0.05), 16);
  const DensityMatrix rho0 = coherent_state(16, cd(1.5, 0.5));
  const auto grid = uniform_grid(0.0, 5.0, 0.5);
  const auto ev = evolve(am, rho0, grid, {{"id", identity(16)}});
  for (const cd& v : ev.traces[0].values) CHECK(std::abs(v - 1.0) <= 1e-8);
  CHECK(hermiticity_defect(ev.final_state) <= 1e-8);
  CHECK(std::abs(ev.final_state.trace() - 1.0) <= 1e-8);
  CHECK(ev.stats.accepted > 0);
  CHECK(ev.stats.cumulative_correction < 1e-6);
}

TEST_CASE("evolution is linear in the initial state") {
  const AssembledModel am = assemble(vdp(1.0, 0.1), 12);
  const DensityMatrix r1 = coherent_state(12, cd(1.0, 0.0));
  const DensityMatrix r2 = fock_state(12, 3);
  const auto grid = uniform_grid(0.0, 3.0, 0.25);
  const std::vector<Observable> obs{{"a", annihilation(12)}};
  EvolveOptions opts;
  opts.rtol = 1e-10;
  opts.atol = 1e-12;
  const auto e1 = evolve(am, r1, grid, obs, opts);
  const auto e2 = evolve(am, r2, grid, obs, opts);
  const auto em = evolve(am, 0.5 * (r1 + r2), grid, obs, opts);
  CHECK((em.final_state - 0.5 * (e1.final_state + e2.final_state)).cwiseAbs().maxCoeff() <= 1e-8);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(em.traces[0].values[i] - 0.5 * (e1.traces[0].values[i] + e2.traces[0].values[i])) <= 1e-8);
  }
}

TEST_CASE("evolve input validation") {
  const LindbladModel m = single_channel(0.1, "a");
  CHECK_THROWS_AS(evolve(m, fock_state(3, 0), {0.0, 1.0, 1.0}, {}), InvalidParameters);
  CHECK_THROWS_AS(evolve(m, fock_state(3, 0), {}, {}), InvalidParameters);
  DensityMatrix bad = fock_state(3, 0);
  bad(1, 1) = -0.5;
  bad(0, 0) = 1.5;
  CHECK_THROWS_AS(evolve(m, bad, {0.0, 1.0}, {}), InvalidParameters);
  CHECK_THROWS_AS(evolve(m, fock_state(3, 0), {0.0, 1.0}, {{"n", number(4)}}), InvalidDimension);
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 0.0), InvalidParameters);
  CHECK(uniform_grid(0.0, 1.0, 0.25).size() == 5);
}

TEST_CASE("step-size underflow raises a stiffness error") {
  EvolveOptions opts;
  opts.min_step = 1.0;
  opts.initial_step = 5.0;
  LindbladModel m;
  m.hamiltonian.push_back({50.0, OperatorExpr::parse("n")});
  m.dissipators.push_back({1.0, OperatorExpr::parse("a")});
  CHECK_THROWS_AS(evolve(m, coherent_state(6, 1.0), {0.0, 10.0}, {}, opts), StiffnessError);
}

TEST_CASE("fit_decay on synthetic traces") {
  const DecayFit f = fit_decay(synthetic(cd(-0.05, 10.0), 80.0, 0.01), 0.0);
  CHECK(f.rate == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(f.frequency == doctest::Approx(10.0).epsilon(1e-10));
  CHECK(f.fit_residual < 1e-10);
  CHECK_FALSE(f.low_confidence);

  const DecayFit g = fit_decay(synthetic(cd(-0.2, -3.0), 40.0, 0.02, cd(0.3, -0.1)), 5.0, cd(0.3, -0.1));
  CHECK(g.rate == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(g.frequency == doctest::Approx(-3.0).epsilon(1e-9));

  CHECK(fit_decay(synthetic(cd(-0.05, 1.0), 10.0, 0.01), 0.0).low_confidence);
  CHECK_THROWS_AS(fit_decay(synthetic(cd(0.0, 0.0), 10.0, 0.1), 0.0), FitFailure);
  CHECK_THROWS_AS(fit_decay(synthetic(cd(0.1, 0.0), 10.0, 0.1), 0.0), FitFailure);
  CHECK_THROWS_AS(fit_decay(synthetic(cd(-0.1, 0.0), 10.0, 0.1), 9.95), FitFailure);
}

TEST_CASE("trace CSV format") {
  TimeTrace tr{{0.0, 0.5}, {cd(1.0, 0.0), cd(0.25, -1e-20)}, "a,b"};
  std::ostringstream os;
  write_traces_csv(os, {tr});
  CHECK(os.str() == "t,re_value,im_value,observable_tag\n0,1,0,\"a,b\"\n0.5,0.25,-1e-20,\"a,b\"\n");
}

TEST_CASE("steady state matches the long-time limit of the dynamics") {
  const Index dim = 20;
  const AssembledModel am = assemble(vdp(1.0, 0.1), dim);
  const DensityMatrix ss = steady_state(build_superoperator(am));
  const FockOperator a = annihilation(dim);
  const auto ev = evolve(am, coherent_state(dim, std::sqrt(0.45)), {0.0, 60.0}, {{"a", a}});
  CHECK(std::abs(ev.traces[0].values.back() - expectation(a, ss)) <= 1e-6);
}

TEST_CASE("decay of the coherence matches the spectral gap") {
  const Index dim = 24;
  const AssembledModel am = assemble(vdp(1.0, 0.05), dim);
  const Liouvillian L = build_superoperator(am);
  const SpectrumResult s = dense_spectrum(L);
  const DensityMatrix ss = steady_state(L, s);
  const FockOperator a = annihilation(dim);
  const cd a_ss = expectation(a, ss);
  const auto ev = evolve(am, coherent_state(dim, std::sqrt(0.45)), uniform_grid(0.0, 20.0, 0.02), {{"a", a}});
  const DecayFit f = fit_decay(ev.traces[0], 10.0 - 5.0, a_ss);
  CHECK(f.rate == doctest::Approx(s.gap).epsilon(0.05));
  CHECK(std::abs(f.frequency) == doctest::Approx(std::abs(s.lambda1().imag())).epsilon(0.05));
}
