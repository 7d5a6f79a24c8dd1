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

#include "lgap/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "lgap/csv.hpp"
#include "lgap/liouvillian.hpp"

namespace lgap {

using nlohmann::json;

namespace {

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw SchemaError(path, "must be finite");
  return x;
}

Index get_index(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return static_cast<Index>(j.get<long long>());
}

std::vector<double> get_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw SchemaError(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
}

SolverKind parse_kind(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected \"dense\", \"iterative\" or \"auto\"");
  const auto s = j.get<std::string>();
  if (s == "dense") return SolverKind::Dense;
  if (s == "iterative") return SolverKind::Iterative;
  if (s == "auto") return SolverKind::Auto;
  throw SchemaError(path, "unknown solver '" + s + "'");
}

Index round_up_even(double x) {
  auto d = static_cast<Index>(std::ceil(x - 1e-9));
  return d % 2 == 0 ? d : d + 1;
}

double top_level_population(const DensityMatrix& rho) {
  const Index n = rho.rows();
  return rho(n - 1, n - 1).real();
}

}  // namespace

Index SweepConfig::resolved_dim_max() const {
  if (truncation.dim_max > 0) return truncation.dim_max;
  return solver.kind == SolverKind::Dense ? 64 : 120;
}

SweepConfig parse_sweep_config(const json& tree) {
  require_object(tree, "config");
  reject_unknown(tree, "", {"schema_version", "model", "fixed", "axes", "truncation", "solver",
                            "solver_options", "output", "parallelism", "seed"});
  SweepConfig c;
  if (!tree.contains("schema_version")) throw SchemaError("schema_version", "missing (expected 1)");
  if (!tree["schema_version"].is_number_integer() || tree["schema_version"].get<int>() != 1) {
    throw SchemaError("schema_version", "unsupported version (expected 1)");
  }

  if (tree.contains("model")) {
    const auto& m = tree["model"];
    if (m.is_string()) {
      if (m.get<std::string>() != "vdp") throw SchemaError("model", "unknown built-in model '" + m.get<std::string>() + "'");
    } else {
      c.inline_model = model_from_config(m, "model");
    }
  }

  if (tree.contains("fixed")) {
    const auto& f = tree["fixed"];
    require_object(f, "fixed");
    reject_unknown(f, "fixed", {"g", "kappa", "delta", "sqrt_eta_eps", "prefactors"});
    if (f.contains("g")) c.fixed.g = get_number(f["g"], "fixed.g");
    if (f.contains("kappa")) c.fixed.kappa = get_number(f["kappa"], "fixed.kappa");
    if (f.contains("delta")) c.fixed.delta = get_number(f["delta"], "fixed.delta");
    if (f.contains("sqrt_eta_eps")) c.fixed.sqrt_eta_eps = get_number(f["sqrt_eta_eps"], "fixed.sqrt_eta_eps");
    if (c.fixed.g < 0) throw SchemaError("fixed.g", "must be >= 0");
    if (c.fixed.kappa < 0) throw SchemaError("fixed.kappa", "must be >= 0");
    if (f.contains("prefactors")) {
      const auto& p = f["prefactors"];
      require_object(p, "fixed.prefactors");
      reject_unknown(p, "fixed.prefactors", {"gain", "loss", "two_photon", "dephasing"});
      auto& pf = c.fixed.prefactors;
      for (auto [key, dst] : {std::pair{"gain", &pf.gain}, std::pair{"loss", &pf.loss},
                              std::pair{"two_photon", &pf.two_photon}, std::pair{"dephasing", &pf.dephasing}}) {
        if (p.contains(key)) {
          *dst = get_number(p[key], std::string("fixed.prefactors.") + key);
          if (*dst < 0) throw SchemaError(std::string("fixed.prefactors.") + key, "must be >= 0");
        }
      }
    }
  }

  if (tree.contains("axes")) {
    const auto& a = tree["axes"];
    require_object(a, "axes");
    reject_unknown(a, "axes", {"inv_eta_values", "gamma_values", "u_kerr_values"});
    if (a.contains("inv_eta_values")) c.inv_eta_values = get_list(a["inv_eta_values"], "axes.inv_eta_values");
    if (a.contains("gamma_values")) c.gamma_values = get_list(a["gamma_values"], "axes.gamma_values");
    if (a.contains("u_kerr_values")) c.u_kerr_values = get_list(a["u_kerr_values"], "axes.u_kerr_values");
  }
  for (std::size_t i = 0; i < c.inv_eta_values.size(); ++i) {
    if (!(c.inv_eta_values[i] > 0)) throw SchemaError("axes.inv_eta_values[" + std::to_string(i) + "]", "must be > 0");
  }
  for (std::size_t i = 0; i < c.gamma_values.size(); ++i) {
    if (c.gamma_values[i] < 0) throw SchemaError("axes.gamma_values[" + std::to_string(i) + "]", "must be >= 0");
  }
  for (std::size_t i = 0; i < c.u_kerr_values.size(); ++i) {
    if (c.u_kerr_values[i] < 0) throw SchemaError("axes.u_kerr_values[" + std::to_string(i) + "]", "must be >= 0");
  }
  if (c.gamma_values.empty()) throw SchemaError("axes.gamma_values", "must not be empty");
  if (c.u_kerr_values.empty()) throw SchemaError("axes.u_kerr_values", "must not be empty");
  if (!c.inline_model && c.inv_eta_values.empty()) {
    throw SchemaError("axes.inv_eta_values", "required for the vdp model");
  }

  if (tree.contains("truncation")) {
    const auto& t = tree["truncation"];
    require_object(t, "truncation");
    reject_unknown(t, "truncation", {"dim_start", "dim_growth", "dim_max", "gap_rtol", "top_population_tol"});
    if (t.contains("dim_start")) c.truncation.dim_start = get_index(t["dim_start"], "truncation.dim_start");
    if (t.contains("dim_growth")) c.truncation.dim_growth = get_number(t["dim_growth"], "truncation.dim_growth");
    if (t.contains("dim_max")) c.truncation.dim_max = get_index(t["dim_max"], "truncation.dim_max");
    if (t.contains("gap_rtol")) c.truncation.gap_rtol = get_number(t["gap_rtol"], "truncation.gap_rtol");
    if (t.contains("top_population_tol")) {
      c.truncation.top_population_tol = get_number(t["top_population_tol"], "truncation.top_population_tol");
    }
  }
  if (c.truncation.dim_start < 4) throw SchemaError("truncation.dim_start", "must be >= 4");
  if (!(c.truncation.dim_growth > 1.0)) throw SchemaError("truncation.dim_growth", "must be > 1");
  if (!(c.truncation.gap_rtol > 0.0 && c.truncation.gap_rtol < 0.1)) {
    throw SchemaError("truncation.gap_rtol", "must lie in (0, 0.1)");
  }
  if (!(c.truncation.top_population_tol > 0.0)) throw SchemaError("truncation.top_population_tol", "must be > 0");

  if (tree.contains("solver")) c.solver.kind = parse_kind(tree["solver"], "solver");
  if (c.truncation.dim_max != 0 && c.truncation.dim_max < c.truncation.dim_start) {
    throw SchemaError("truncation.dim_max", "must be >= dim_start");
  }
  if (tree.contains("solver_options")) {
    const auto& s = tree["solver_options"];
    const std::string p = "solver_options";
    require_object(s, p);
    reject_unknown(s, p, {"dense_max_dim", "dense_max", "nev", "subspace", "residual_tol", "krylov_tol",
                          "max_restarts", "transform"});
    auto& it = c.solver.iterative;
    if (s.contains("dense_max_dim")) c.solver.auto_dense_max_dim = get_index(s["dense_max_dim"], p + ".dense_max_dim");
    if (s.contains("dense_max")) c.solver.dense.dense_max = get_index(s["dense_max"], p + ".dense_max");
    if (s.contains("nev")) it.nev = get_index(s["nev"], p + ".nev");
    if (s.contains("subspace")) it.subspace = get_index(s["subspace"], p + ".subspace");
    if (s.contains("residual_tol")) it.residual_tol = get_number(s["residual_tol"], p + ".residual_tol");
    if (s.contains("krylov_tol")) it.krylov_tol = get_number(s["krylov_tol"], p + ".krylov_tol");
    if (s.contains("max_restarts")) it.max_restarts = static_cast<int>(get_index(s["max_restarts"], p + ".max_restarts"));
    if (s.contains("transform")) {
      const auto& t = s["transform"];
      if (t == "shift-invert") {
        it.transform = SpectralTransform::ShiftInvert;
      } else if (t == "scaled-shift") {
        it.transform = SpectralTransform::ScaledShift;
      } else {
        throw SchemaError(p + ".transform", "expected \"shift-invert\" or \"scaled-shift\"");
      }
    }
    if (it.nev < 0 || it.subspace < 0) throw SchemaError(p, "nev and subspace must be >= 0");
  }

  if (tree.contains("output")) {
    if (!tree["output"].is_string()) throw SchemaError("output", "expected a path string");
    c.output = tree["output"].get<std::string>();
  }
  if (tree.contains("parallelism")) {
    const Index par = get_index(tree["parallelism"], "parallelism");
    if (par < 0) throw SchemaError("parallelism", "must be >= 0");
    c.parallelism = static_cast<unsigned>(par);
  }
  if (tree.contains("seed")) {
    const Index seed = get_index(tree["seed"], "seed");
    if (seed < 0) throw SchemaError("seed", "must be >= 0");
    c.solver.iterative.seed = static_cast<std::uint64_t>(seed);
  }
  return c;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path, "cannot open config file");
  json tree;
  try {
    tree = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw SchemaError(path, std::string("parse error: ") + e.what());
  }
  return parse_sweep_config(tree);
}

LindbladModel point_model(const SweepConfig& cfg, const SweepPoint& p) {
  if (!cfg.inline_model) {
    VdPParams v = VdPParams::with_drive_product(cfg.fixed.g, cfg.fixed.kappa, cfg.fixed.delta, p.inv_eta,
                                                cfg.fixed.sqrt_eta_eps, p.gamma, p.u_kerr);
    v.prefactors = cfg.fixed.prefactors;
    return vdp_model(v);
  }
  LindbladModel m = *cfg.inline_model;
  using F = OperatorExpr::Factor;
  if (std::isfinite(p.inv_eta)) {
    m.dissipators.push_back({1.0 / p.inv_eta, OperatorExpr({F{Ladder::Annihilate, 2}})});
  }
  if (p.gamma != 0.0) m.dissipators.push_back({2.0 * p.gamma, OperatorExpr({F{Ladder::Number, 1}})});
  if (p.u_kerr != 0.0) {
    m.hamiltonian.push_back({p.u_kerr, OperatorExpr({F{Ladder::Create, 2}, F{Ladder::Annihilate, 2}})});
  }
  return m;
}

std::vector<SweepPoint> sweep_points(const SweepConfig& cfg) {
  std::vector<double> inv = cfg.inv_eta_values;
  if (inv.empty()) inv.push_back(std::numeric_limits<double>::infinity());
  std::vector<SweepPoint> pts;
  for (double x : inv) {
    for (double g : cfg.gamma_values) {
      for (double u : cfg.u_kerr_values) pts.push_back({x, g, u});
    }
  }
  return pts;
}

std::vector<Index> dimension_sequence(const TruncationPolicy& policy, Index dim_max) {
  std::vector<Index> dims;
  Index d = policy.dim_start;
  while (d < dim_max) {
    dims.push_back(d);
    d = std::max(round_up_even(static_cast<double>(d) * policy.dim_growth), d + 1);
  }
  dims.push_back(dim_max);
  return dims;
}

SpectrumResult solve_spectrum(const Liouvillian& L, const SolverConfig& solver, Index k) {
  switch (solver.kind) {
    case SolverKind::Dense: return dense_spectrum(L, solver.dense);
    case SolverKind::Iterative: return leading_eigs_iterative(L, k, solver.iterative);
    case SolverKind::Auto:
      return L.dim <= solver.auto_dense_max_dim ? dense_spectrum(L, solver.dense)
                                                : leading_eigs_iterative(L, k, solver.iterative);
  }
  throw InvalidParameters("unknown solver kind");
}

const char* to_string(PointStatus s) {
  switch (s) {
    case PointStatus::Converged: return "converged";
    case PointStatus::Unconverged: return "unconverged";
    case PointStatus::Unresolved: return "unresolved";
    case PointStatus::Failed: return "failed";
  }
  return "?";
}

GapPoint converge_truncation(const LindbladModel& model, const SweepPoint& where, const TruncationPolicy& policy,
                             const SolverConfig& solver, Index dim_max) {
  GapPoint pt;
  pt.inv_eta = where.inv_eta;
  pt.gamma = where.gamma;
  pt.u_kerr = where.u_kerr;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> prev_gap;
  for (Index dim : dimension_sequence(policy, dim_max)) {
    pt.dims_tried.push_back(dim);
    try {
      const Liouvillian L = build_superoperator(model, dim, BuildOptions{dim * dim});
      const SpectrumResult s = solve_spectrum(L, solver);
      pt.dim_used = dim;
      pt.gap = s.gap;
      pt.zero_tol = s.zero_tol;
      pt.lambda1 = s.degenerate ? std::complex<double>(nan, nan) : s.lambda1();
      bool population_ok = true;
      if (s.zero_multiplicity == 1) {
        pt.top_population = top_level_population(steady_state(L, s));
        population_ok = pt.top_population < policy.top_population_tol;
      } else {
        pt.top_population = nan;
      }
      const bool unresolved = s.degenerate || s.gap < 10.0 * s.zero_tol;
      pt.status = unresolved ? PointStatus::Unresolved : PointStatus::Unconverged;
      if (!unresolved && prev_gap &&
          std::abs(s.gap - *prev_gap) <= policy.gap_rtol * std::max(s.gap, s.zero_tol) && population_ok) {
        pt.status = PointStatus::Converged;
        pt.converged = true;
        return pt;
      }
      prev_gap = s.gap;
    } catch (const Error& e) {
      pt.status = PointStatus::Failed;
      pt.converged = false;
      pt.gap = nan;
      pt.lambda1 = {nan, nan};
      pt.dim_used = dim;
      pt.note = e.kind() + ": " + e.what();
      return pt;
    }
  }
  if (pt.status == PointStatus::Unresolved) pt.note = "gap below 10 x zero_tol";
  else pt.note = "dim_max reached before convergence";
  return pt;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParameters("loglog_slope needs >= 2 points");
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::vector<SeriesSummary> summarize(const std::vector<GapPoint>& rows) {
  std::vector<SeriesSummary> out;
  std::vector<std::pair<double, double>> keys;
  for (const auto& r : rows) {
    const std::pair<double, double> key{r.gamma, r.u_kerr};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& [gamma, u] : keys) {
    SeriesSummary s;
    s.gamma = gamma;
    s.u_kerr = u;
    std::vector<std::pair<double, double>> pts;  // (inv_eta, gap), converged only
    for (const auto& r : rows) {
      if (r.gamma == gamma && r.u_kerr == u && r.converged && std::isfinite(r.inv_eta) && r.gap > 0) {
        pts.emplace_back(r.inv_eta, r.gap);
      }
    }
    std::sort(pts.begin(), pts.end());
    s.converged_points = pts.size();
    if (!pts.empty()) {
      s.last_inv_eta = pts.back().first;
      s.last_gap = pts.back().second;
    }
    if (pts.size() >= 2) {
      std::vector<double> x, y;
      for (const auto& [a, b] : pts) {
        x.push_back(a);
        y.push_back(b);
      }
      if (gamma == 0.0) s.loglog_slope = loglog_slope(x, y);
      const auto& p1 = pts[pts.size() - 2];
      const auto& p2 = pts.back();
      const double slope = std::log(p2.second / p1.second) / std::log(p2.first / p1.first);
      if (gamma > 0.0) {
        s.plateau = p2.second;
        s.plateau_slope = slope;
        s.plateau_flat = std::abs(slope) < 0.15;
      }
    }
    out.push_back(s);
  }
  return out;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  const std::vector<SweepPoint> pts = sweep_points(cfg);
  unsigned threads = cfg.parallelism;
  if (const char* env = std::getenv("LGAP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) threads = static_cast<unsigned>(v);
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(pts.size(), 1)));

  SweepResult res;
  res.rows.resize(pts.size());
  const Index dim_max = cfg.resolved_dim_max();
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < pts.size(); i = next++) {
      try {
        res.rows[i] = converge_truncation(point_model(cfg, pts[i]), pts[i], cfg.truncation, cfg.solver, dim_max);
      } catch (const Error& e) {
        GapPoint& p = res.rows[i];
        p.inv_eta = pts[i].inv_eta;
        p.gamma = pts[i].gamma;
        p.u_kerr = pts[i].u_kerr;
        p.status = PointStatus::Failed;
        p.gap = std::numeric_limits<double>::quiet_NaN();
        p.lambda1 = {p.gap, p.gap};
        p.note = e.kind() + ": " + e.what();
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  res.series = summarize(res.rows);
  return res;
}

std::string csv_row(const GapPoint& p) {
  std::string s = format_double(p.inv_eta) + ',' + format_double(p.gamma) + ',' + format_double(p.u_kerr) + ',' +
                  std::to_string(p.dim_used) + ',' + format_double(p.gap) + ',' + format_double(p.lambda1.real()) +
                  ',' + format_double(p.lambda1.imag()) + ',' + (p.converged ? "true" : "false");
  return s;
}

void write_sweep_csv(std::ostream& os, const std::vector<GapPoint>& rows) {
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows) os << csv_row(r) << '\n';
}

std::string format_summary(const SweepResult& r) {
  std::ostringstream os;
  std::size_t conv = 0;
  for (const auto& row : r.rows) conv += row.converged ? 1 : 0;
  os << "points: " << r.rows.size() << " (converged " << conv << ")\n";
  for (const auto& row : r.rows) {
    if (!row.converged) {
      os << "  inv_eta=" << format_double(row.inv_eta) << " gamma=" << format_double(row.gamma)
         << " u_kerr=" << format_double(row.u_kerr) << ": " << to_string(row.status);
      if (!row.note.empty()) os << " (" << row.note << ")";
      os << '\n';
    }
  }
  for (const auto& s : r.series) {
    os << "series gamma=" << format_double(s.gamma) << " u_kerr=" << format_double(s.u_kerr) << ": "
       << s.converged_points << " converged";
    if (s.loglog_slope) os << ", loglog_slope=" << format_double(*s.loglog_slope);
    if (s.plateau) {
      os << ", plateau=" << format_double(*s.plateau) << " (slope " << format_double(*s.plateau_slope)
         << (s.plateau_flat ? ", flat" : ", not flat") << ")";
    }
    if (s.last_gap && s.u_kerr > 0) os << ", gap/U=" << format_double(*s.last_gap / s.u_kerr);
    os << '\n';
  }
  return os.str();
}

}  // namespace lgap
