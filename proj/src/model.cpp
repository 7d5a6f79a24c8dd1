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

#include "lgap/model.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace lgap {

namespace {

FockOperator ladder_at(Ladder s, Index dim) {
  switch (s) {
    case Ladder::Annihilate: return annihilation(dim);
    case Ladder::Create: return creation(dim);
    case Ladder::Number: return number(dim);
    case Ladder::Identity: return identity(dim);
  }
  throw InvalidParameters("unknown ladder symbol");
}

const char* symbol_name(Ladder s) {
  switch (s) {
    case Ladder::Annihilate: return "a";
    case Ladder::Create: return "ad";
    case Ladder::Number: return "n";
    case Ladder::Identity: return "id";
  }
  return "?";
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

OperatorExpr::OperatorExpr(std::vector<Factor> factors) : factors_(std::move(factors)) {
  for (const auto& f : factors_) {
    if (f.power < 0) throw InvalidParameters("operator power must be non-negative");
  }
}

OperatorExpr OperatorExpr::parse(std::string_view text) {
  std::vector<Factor> out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '*')) ++i;
  };
  skip();
  while (i < text.size()) {
    std::size_t start = i;
    while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
    const std::string_view name = text.substr(start, i - start);
    Ladder sym;
    if (name == "a") {
      sym = Ladder::Annihilate;
    } else if (name == "ad" || name == "adag") {
      sym = Ladder::Create;
    } else if (name == "n") {
      sym = Ladder::Number;
    } else if (name == "id" || name == "I") {
      sym = Ladder::Identity;
    } else {
      throw InvalidParameters("unknown operator symbol '" + std::string(name.empty() ? text.substr(start, 1) : name) +
                              "' in \"" + std::string(text) + "\"");
    }
    int power = 1;
    if (i < text.size() && text[i] == '^') {
      ++i;
      auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), power);
      if (ec != std::errc() || power < 0) {
        throw InvalidParameters("malformed power in \"" + std::string(text) + "\"");
      }
      i = static_cast<std::size_t>(ptr - text.data());
    }
    out.push_back({sym, power});
    if (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '*') {
      throw InvalidParameters("unexpected character '" + std::string(1, text[i]) + "' in \"" +
                              std::string(text) + "\"");
    }
    skip();
  }
  if (out.empty()) throw InvalidParameters("empty operator expression");
  return OperatorExpr(std::move(out));
}

FockOperator OperatorExpr::at(Index dim) const {
  FockOperator out = identity(dim);
  for (const auto& f : factors_) {
    if (f.symbol == Ladder::Identity) continue;
    out = mul(out, power(ladder_at(f.symbol, dim), f.power));
  }
  return out;
}

std::string OperatorExpr::str() const {
  std::string s;
  for (const auto& f : factors_) {
    if (!s.empty()) s += ' ';
    s += symbol_name(f.symbol);
    if (f.power != 1) s += "^" + std::to_string(f.power);
  }
  return s;
}

void LindbladModel::validate() const {
  for (std::size_t k = 0; k < dissipators.size(); ++k) {
    const double r = dissipators[k].rate;
    if (!finite(r) || r < 0.0) {
      throw InvalidParameters("dissipator " + std::to_string(k) + " (" + dissipators[k].op.str() +
                              ") has invalid rate " + detail::num(r));
    }
  }
  for (const auto& t : hamiltonian) {
    if (!finite(t.coeff.real()) || !finite(t.coeff.imag())) {
      throw InvalidParameters("Hamiltonian coefficient is not finite");
    }
  }
  // A Hermitian sum of monomials stays Hermitian under truncation because the
  // truncated a and a† remain exact adjoints; checking a few sizes catches
  // unpaired terms.
  for (Index dim : {2, 3, 5, 8}) {
    FockOperator h = zero(dim);
    for (const auto& t : hamiltonian) h = add(h, scale(t.coeff, t.op.at(dim)));
    if (hermiticity_defect(h) > 1e-12 * std::max(1.0, h.matrix().norm())) {
      throw InvalidParameters("Hamiltonian is not Hermitian (checked at dim " +
                              std::to_string(dim) + ")");
    }
  }
}

VdPParams VdPParams::with_drive_product(double g, double kappa, double delta, double inv_eta,
                                        double sqrt_eta_eps, double gamma, double u_kerr) {
  if (!(inv_eta > 0.0) || !std::isfinite(inv_eta)) {
    throw InvalidParameters("inv_eta must be positive and finite");
  }
  VdPParams p;
  p.g = g;
  p.kappa = kappa;
  p.delta = delta;
  p.eta = 1.0 / inv_eta;
  p.epsilon = sqrt_eta_eps * std::sqrt(inv_eta);
  p.gamma = gamma;
  p.u_kerr = u_kerr;
  return p;
}

void VdPParams::validate() const {
  for (double x : {g, kappa, eta, delta, epsilon, gamma, u_kerr}) {
    if (!finite(x)) throw InvalidParameters("Van der Pol parameter is not finite");
  }
  if (!(eta > 0.0)) throw InvalidParameters("eta must be > 0 (probe eta -> 0 by sweeping)");
  if (g < 0.0 || kappa < 0.0 || gamma < 0.0 || u_kerr < 0.0) {
    throw InvalidParameters("rates g, kappa, gamma, u_kerr must be >= 0");
  }
  const auto& f = prefactors;
  if (f.gain < 0.0 || f.loss < 0.0 || f.two_photon < 0.0 || f.dephasing < 0.0) {
    throw InvalidParameters("channel prefactors must be >= 0");
  }
}

LindbladModel vdp_model(const VdPParams& p) {
  p.validate();
  using F = OperatorExpr::Factor;
  const OperatorExpr a({F{Ladder::Annihilate, 1}});
  const OperatorExpr ad({F{Ladder::Create, 1}});
  const OperatorExpr n({F{Ladder::Number, 1}});

  LindbladModel m;
  m.hamiltonian.push_back({p.delta, n});
  m.hamiltonian.push_back({p.epsilon, a});
  m.hamiltonian.push_back({p.epsilon, ad});
  if (p.u_kerr != 0.0) {
    m.hamiltonian.push_back({p.u_kerr, OperatorExpr({F{Ladder::Create, 2}, F{Ladder::Annihilate, 2}})});
  }
  m.dissipators.push_back({p.prefactors.gain * p.g, ad});
  m.dissipators.push_back({p.prefactors.loss * p.kappa, a});
  m.dissipators.push_back({p.prefactors.two_photon * p.eta, OperatorExpr({F{Ladder::Annihilate, 2}})});
  if (p.gamma != 0.0) {
    m.dissipators.push_back({p.prefactors.dephasing * p.gamma, n});
  }
  return m;
}

AssembledModel assemble(const LindbladModel& model, Index dim) {
  detail::require_dim(dim, 2, "assemble");
  AssembledModel out{zero(dim), {}};
  for (const auto& t : model.hamiltonian) {
    out.hamiltonian = add(out.hamiltonian, scale(t.coeff, t.op.at(dim)));
  }
  out.channels.reserve(model.dissipators.size());
  for (const auto& c : model.dissipators) out.channels.emplace_back(c.rate, c.op.at(dim));
  return out;
}

namespace {

using nlohmann::json;

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw SchemaError(path, "must be finite");
  return x;
}

std::complex<double> complex_at(const json& j, const std::string& path) {
  if (j.is_number()) return number_at(j, path);
  if (j.is_array() && j.size() == 2) {
    return {number_at(j[0], path + "[0]"), number_at(j[1], path + "[1]")};
  }
  if (j.is_object() && j.contains("re")) {
    const double im = j.contains("im") ? number_at(j["im"], path + ".im") : 0.0;
    return {number_at(j["re"], path + ".re"), im};
  }
  throw SchemaError(path, "expected a number, [re, im] or {re, im}");
}

OperatorExpr expr_at(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected an operator expression string");
  try {
    return OperatorExpr::parse(j.get<std::string>());
  } catch (const InvalidParameters& e) {
    throw SchemaError(path, e.what());
  }
}

}  // namespace

LindbladModel model_from_config(const json& tree, const std::string& path) {
  if (!tree.is_object()) throw SchemaError(path, "expected an object");
  LindbladModel m;

  const char* hkey = tree.contains("hamiltonian") ? "hamiltonian" : "H";
  if (tree.contains(hkey)) {
    const auto& h = tree[hkey];
    const std::string hpath = path + "." + hkey;
    if (!h.is_array()) throw SchemaError(hpath, "expected a list of terms");
    for (std::size_t k = 0; k < h.size(); ++k) {
      const std::string tpath = hpath + "[" + std::to_string(k) + "]";
      const auto& t = h[k];
      if (!t.is_object() || !t.contains("coeff") || !t.contains("op")) {
        throw SchemaError(tpath, "term needs 'coeff' and 'op'");
      }
      m.hamiltonian.push_back({complex_at(t["coeff"], tpath + ".coeff"), expr_at(t["op"], tpath + ".op")});
    }
  }

  if (tree.contains("dissipators")) {
    const auto& d = tree["dissipators"];
    const std::string dpath = path + ".dissipators";
    if (!d.is_array()) throw SchemaError(dpath, "expected a list of channels");
    for (std::size_t k = 0; k < d.size(); ++k) {
      const std::string cpath = dpath + "[" + std::to_string(k) + "]";
      const auto& c = d[k];
      if (!c.is_object() || !c.contains("rate") || !c.contains("op")) {
        throw SchemaError(cpath, "channel needs 'rate' and 'op'");
      }
      const double rate = number_at(c["rate"], cpath + ".rate");
      if (rate < 0.0) throw SchemaError(cpath + ".rate", "rate must be >= 0");
      m.dissipators.push_back({rate, expr_at(c["op"], cpath + ".op")});
    }
  }

  for (const auto& [key, _] : tree.items()) {
    if (key != "hamiltonian" && key != "H" && key != "dissipators") {
      throw SchemaError(path + "." + key, "unknown field");
    }
  }

  try {
    m.validate();
  } catch (const InvalidParameters& e) {
    throw SchemaError(path + "." + hkey, e.what());
  }
  return m;
}

nlohmann::json model_to_config(const LindbladModel& model) {
  json h = json::array();
  for (const auto& t : model.hamiltonian) {
    h.push_back({{"coeff", {t.coeff.real(), t.coeff.imag()}}, {"op", t.op.str()}});
  }
  json d = json::array();
  for (const auto& c : model.dissipators) d.push_back({{"rate", c.rate}, {"op", c.op.str()}});
  return {{"hamiltonian", h}, {"dissipators", d}};
}

}  // namespace lgap
