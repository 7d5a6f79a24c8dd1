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

// Command-line front end: gap, sweep, spectrum, evolve, steady.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lgap/lgap.hpp"

namespace {

using lgap::Index;
using cd = std::complex<double>;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;

struct PointArgs {
  std::string config;
  std::optional<double> inv_eta, gamma, u_kerr;
  std::optional<std::uint64_t> seed;
};

void add_point_options(CLI::App* sub, PointArgs& a) {
  sub->add_option("--config", a.config, "sweep config file (JSON, comments allowed)")->required();
  sub->add_option("--inv-eta", a.inv_eta, "1/eta (default: first axis value)");
  sub->add_option("--gamma", a.gamma, "dephasing rate (default: first axis value)");
  sub->add_option("--u-kerr", a.u_kerr, "Kerr coefficient (default: first axis value)");
  sub->add_option("--seed", a.seed, "seed for Krylov start vectors (default 0)");
}

lgap::SweepConfig load(const PointArgs& a) {
  lgap::SweepConfig cfg = lgap::load_sweep_config(a.config);
  if (a.seed) cfg.solver.iterative.seed = *a.seed;
  return cfg;
}

lgap::SweepPoint pick_point(const lgap::SweepConfig& cfg, const PointArgs& a) {
  const lgap::SweepPoint first = lgap::sweep_points(cfg).front();
  lgap::SweepPoint p{a.inv_eta.value_or(first.inv_eta), a.gamma.value_or(first.gamma),
                     a.u_kerr.value_or(first.u_kerr)};
  if (!(p.inv_eta > 0.0)) throw lgap::SchemaError("--inv-eta", "must be > 0");
  if (!(p.gamma >= 0.0)) throw lgap::SchemaError("--gamma", "must be >= 0");
  if (!(p.u_kerr >= 0.0)) throw lgap::SchemaError("--u-kerr", "must be >= 0");
  return p;
}

std::string dims_string(const std::vector<Index>& dims) {
  std::string s;
  for (Index d : dims) s += (s.empty() ? "" : " ") + std::to_string(d);
  return s;
}

/// Truncation for a single point: an explicit --dim, else the adaptive policy.
Index resolve_dim(const lgap::SweepConfig& cfg, const lgap::LindbladModel& m, const lgap::SweepPoint& p,
                  std::optional<Index> dim) {
  if (dim) {
    if (*dim < 2) throw lgap::InvalidDimension("--dim must be >= 2");
    return *dim;
  }
  const lgap::GapPoint g = lgap::converge_truncation(m, p, cfg.truncation, cfg.solver, cfg.resolved_dim_max());
  std::cerr << "truncation: dims tried " << dims_string(g.dims_tried) << ", using " << g.dim_used << " ("
            << lgap::to_string(g.status) << ")\n";
  if (g.status == lgap::PointStatus::Failed) throw lgap::ConvergenceError(g.note, NAN);
  return g.dim_used;
}

lgap::Liouvillian build(const lgap::LindbladModel& m, Index dim) {
  return lgap::build_superoperator(m, dim, lgap::BuildOptions{dim * dim});
}

int cmd_gap(const PointArgs& a, const std::string& dump) {
  const lgap::SweepConfig cfg = load(a);
  const lgap::SweepPoint p = pick_point(cfg, a);
  const lgap::LindbladModel m = lgap::point_model(cfg, p);
  const lgap::GapPoint g = lgap::converge_truncation(m, p, cfg.truncation, cfg.solver, cfg.resolved_dim_max());
  std::cout << lgap::kSweepCsvHeader << '\n' << lgap::csv_row(g) << '\n';
  std::cout << "# status " << lgap::to_string(g.status) << "; dims tried " << dims_string(g.dims_tried)
            << "; gap " << lgap::format_double(g.gap) << " at dim " << g.dim_used << "; lambda1 "
            << lgap::format_double(g.lambda1.real()) << (g.lambda1.imag() < 0 ? " - " : " + ")
            << lgap::format_double(std::abs(g.lambda1.imag())) << "i; top-level population "
            << lgap::format_double(g.top_population) << '\n';
  if (!g.note.empty()) std::cout << "# note: " << g.note << '\n';
  if (!dump.empty()) {
    std::ofstream os(dump);
    if (!os) throw lgap::SchemaError("--dump-liouvillian", "cannot open " + dump);
    lgap::write_coordinate(os, build(m, g.dim_used));
  }
  return g.status == lgap::PointStatus::Failed ? kNumericalError : kOk;
}

int cmd_sweep(const PointArgs& a, std::string out) {
  const lgap::SweepConfig cfg = load(a);
  if (out.empty()) out = cfg.output;
  const lgap::SweepResult r = lgap::run_sweep(cfg);
  for (const auto& row : r.rows) {
    std::cerr << "point inv_eta=" << lgap::format_double(row.inv_eta) << " gamma=" << lgap::format_double(row.gamma)
              << " u_kerr=" << lgap::format_double(row.u_kerr) << ": dims " << dims_string(row.dims_tried) << " -> "
              << lgap::to_string(row.status) << (row.note.empty() ? "" : " (" + row.note + ")") << '\n';
  }
  if (out.empty() || out == "-") {
    lgap::write_sweep_csv(std::cout, r.rows);
    std::cerr << lgap::format_summary(r);
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw lgap::SchemaError("--out", "cannot open " + out);
    lgap::write_sweep_csv(os, r.rows);
    std::cout << lgap::format_summary(r);
  }
  return kOk;
}

int cmd_spectrum(const PointArgs& a, Index top, std::optional<Index> dim) {
  if (top < 2) throw lgap::SchemaError("--top", "must be >= 2");
  const lgap::SweepConfig cfg = load(a);
  const lgap::SweepPoint p = pick_point(cfg, a);
  const lgap::LindbladModel m = lgap::point_model(cfg, p);
  const Index n = resolve_dim(cfg, m, p, dim);
  const lgap::Liouvillian L = build(m, n);
  lgap::SpectrumResult s;
  const bool dense = cfg.solver.kind == lgap::SolverKind::Dense ||
                     (cfg.solver.kind == lgap::SolverKind::Auto && n <= cfg.solver.auto_dense_max_dim);
  if (dense) {
    s = lgap::dense_spectrum(L, cfg.solver.dense);
  } else {
    lgap::IterativeOptions it = cfg.solver.iterative;
    it.harmonics = static_cast<int>((top + 1) / 2);
    s = lgap::leading_eigs_iterative(L, top, it);
  }
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "re,im\n";
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(top), s.eigenvalues.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::cout << lgap::format_double(s.eigenvalues[i].real()) << ',' << lgap::format_double(s.eigenvalues[i].imag())
              << '\n';
  }
  std::cout << "# dim " << n << "; zero multiplicity " << s.zero_multiplicity << "; gap "
            << lgap::format_double(s.gap) << '\n';
  if (top >= 3) {
    const lgap::SpacingStats st = lgap::imag_spacing_uniformity(s, top - 1);
    std::cout << "# imag spacing mean " << lgap::format_double(st.mean_spacing) << " rel_spread "
              << lgap::format_double(st.rel_spread) << '\n';
  }
  return kOk;
}

int cmd_evolve(const PointArgs& a, double t_max, double dt, const std::string& out, std::optional<Index> dim) {
  if (!(t_max > 0.0)) throw lgap::SchemaError("--t-max", "must be > 0");
  const lgap::SweepConfig cfg = load(a);
  const lgap::SweepPoint p = pick_point(cfg, a);
  const lgap::LindbladModel m = lgap::point_model(cfg, p);
  const Index n = resolve_dim(cfg, m, p, dim);
  const double g = cfg.fixed.g, kappa = cfg.fixed.kappa;
  cd alpha = 0.0;
  if (!cfg.inline_model && g > kappa && std::isfinite(p.inv_eta)) alpha = std::sqrt((g - kappa) * p.inv_eta / 2.0);
  const lgap::Evolution ev =
      lgap::evolve(m, lgap::coherent_state(n, alpha), lgap::uniform_grid(0.0, t_max, dt),
                   {{"a", lgap::annihilation(n)}, {"n", lgap::number(n)}});
  std::ofstream os(out, std::ios::binary);
  if (!os) throw lgap::SchemaError("--out", "cannot open " + out);
  lgap::write_traces_csv(os, ev.traces);
  std::cout << "dim " << n << "; steps accepted " << ev.stats.accepted << ", rejected " << ev.stats.rejected
            << "; cumulative symmetrization correction " << lgap::format_double(ev.stats.cumulative_correction)
            << '\n';
  return kOk;
}

int cmd_steady(const PointArgs& a, std::optional<Index> dim) {
  const lgap::SweepConfig cfg = load(a);
  const lgap::SweepPoint p = pick_point(cfg, a);
  const lgap::LindbladModel m = lgap::point_model(cfg, p);
  const Index n = resolve_dim(cfg, m, p, dim);
  const lgap::Liouvillian L = build(m, n);
  lgap::SteadyStateOptions opts;
  opts.iterative = cfg.solver.iterative;
  const lgap::DensityMatrix rho = lgap::steady_state(L, opts);
  const cd a_mean = lgap::expectation(lgap::annihilation(n), rho);
  std::cout << "dim " << n << '\n'
            << "mean_n " << lgap::format_double(lgap::expectation(lgap::number(n), rho).real()) << '\n'
            << "re_a " << lgap::format_double(a_mean.real()) << '\n'
            << "im_a " << lgap::format_double(a_mean.imag()) << '\n'
            << "purity " << lgap::format_double(lgap::purity(rho)) << '\n'
            << "top_population " << lgap::format_double(rho(n - 1, n - 1).real()) << '\n'
            << "min_eigenvalue " << lgap::format_double(lgap::min_eigenvalue(rho)) << '\n';
  return kOk;
}

int report(const std::string& kind, const std::string& message, const std::string& path, int code) {
  nlohmann::json j{{"error", kind}, {"message", message}, {"exit_code", code}};
  if (!path.empty()) j["path"] = path;
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liouvillian spectral-gap toolkit"};
  app.require_subcommand(1);

  PointArgs args;
  std::string dump, out;
  Index top = 9;
  double t_max = 0.0, dt = 0.05;
  std::optional<Index> dim;

  auto* gap = app.add_subcommand("gap", "converged gap at one point (CSV row + summary)");
  add_point_options(gap, args);
  gap->add_option("--dump-liouvillian", dump, "write L at the used truncation as 'row col re im' lines");

  auto* sweep = app.add_subcommand("sweep", "full sweep over the config axes");
  sweep->add_option("--config", args.config, "sweep config file")->required();
  sweep->add_option("--out", out, "CSV output path (default: config 'output', else stdout)");
  sweep->add_option("--seed", args.seed, "seed for Krylov start vectors (default 0)");

  auto* spectrum = app.add_subcommand("spectrum", "leading eigenvalues and imaginary-spacing statistics");
  add_point_options(spectrum, args);
  spectrum->add_option("--top", top, "number of leading eigenvalues")->capture_default_str();
  spectrum->add_option("--dim", dim, "fixed Fock truncation (default: adaptive)");

  auto* evolve = app.add_subcommand("evolve", "time traces of <a> and <n> from a displaced vacuum");
  add_point_options(evolve, args);
  evolve->add_option("--t-max", t_max, "final time")->required();
  evolve->add_option("--dt", dt, "sampling interval")->capture_default_str();
  evolve->add_option("--out", out, "trace CSV path")->required();
  evolve->add_option("--dim", dim, "fixed Fock truncation (default: adaptive)");

  auto* steady = app.add_subcommand("steady", "steady-state diagnostics");
  add_point_options(steady, args);
  steady->add_option("--dim", dim, "fixed Fock truncation (default: adaptive)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return report("usage", e.what(), "", kConfigError);
  }

  try {
    if (*gap) return cmd_gap(args, dump);
    if (*sweep) return cmd_sweep(args, out);
    if (*spectrum) return cmd_spectrum(args, top, dim);
    if (*evolve) return cmd_evolve(args, t_max, dt, out, dim);
    if (*steady) return cmd_steady(args, dim);
  } catch (const lgap::SchemaError& e) {
    return report(e.kind(), e.what(), e.path(), kConfigError);
  } catch (const lgap::InvalidParameters& e) {
    return report(e.kind(), e.what(), "", kConfigError);
  } catch (const lgap::InvalidDimension& e) {
    return report(e.kind(), e.what(), "", kConfigError);
  } catch (const lgap::Error& e) {
    return report(e.kind(), e.what(), "", kNumericalError);
  } catch (const std::exception& e) {
    return report("internal", e.what(), "", kNumericalError);
  }
  return kOk;
}
