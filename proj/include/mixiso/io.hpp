#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mixiso/chain.hpp"
#include "mixiso/error.hpp"
#include "mixiso/gradients.hpp"
#include "mixiso/isoperimetry.hpp"
#include "mixiso/profile.hpp"
#include "mixiso/spectral.hpp"
#include "mixiso/verify.hpp"

namespace mixiso {

using Json = nlohmann::ordered_json;

inline constexpr double kStationaryFileTol = 1e-9;

/// Parses {"n": int, "P": [[...]], "pi": [...]?}. A supplied pi is checked
/// against the solved stationary distribution.
inline MarkovChain chain_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("P"))
    throw Error(ErrorKind::Parse, "chain file needs fields \"n\" and \"P\"");
  std::size_t n = 0;
  std::vector<std::vector<double>> rows;
  try {
    n = j.at("n").get<std::size_t>();
    rows = j.at("P").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed chain: ") + e.what());
  }
  if (rows.size() != n) throw Error(ErrorKind::Parse, "\"P\" has " + std::to_string(rows.size()) + " rows, n = " + std::to_string(n));
  auto chain = build_chain(rows);
  if (j.contains("pi")) {
    std::vector<double> pi;
    try {
      pi = j.at("pi").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, std::string("malformed pi: ") + e.what());
    }
    if (pi.size() != n) throw Error(ErrorKind::Parse, "\"pi\" has the wrong length");
    for (std::size_t i = 0; i < n; ++i)
      if (!(std::abs(pi[i] - chain.pi(i)) <= kStationaryFileTol))
        throw Error(ErrorKind::StationaryMismatch, "supplied pi differs from the stationary distribution at state " +
                                                       std::to_string(i));
  }
  return chain;
}

inline MarkovChain chain_from_string(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  return chain_from_json(j);
}

inline MarkovChain load_chain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return chain_from_string(ss.str());
}

inline Json to_json(const MarkovChain& chain) {
  const auto n = chain.size();
  Json P = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(chain.P(i, j));
    P.push_back(std::move(row));
  }
  Json pi = Json::array();
  for (std::size_t i = 0; i < n; ++i) pi.push_back(chain.pi(i));
  return Json{{"n", n}, {"P", std::move(P)}, {"pi", std::move(pi)}};
}

inline Json to_json(const SpreadRecord& r) {
  return Json{{"psi_plus", r.psi_plus}, {"psi_minus", r.psi_minus}, {"psi_gl", r.psi_gl},
              {"psi_mod", r.psi_mod},   {"psi_evo", r.psi_evo},     {"psi_big", r.psi_big},
              {"conductance", r.conductance}, {"reversed", r.reversed}};
}

inline Json to_json(const GradientRecord& r) {
  return Json{{"p", std::string(to_string(r.p))},
              {"sign", std::string(to_string(r.sign))},
              {"value", r.value},
              {"q_flow", r.q_flow},
              {"denominator", r.denominator}};
}

inline Json to_json(const SandwichReport& r) {
  return Json{{"sign", std::string(to_string(r.sign))},
              {"psi", r.psi},
              {"upper", r.upper},
              {"upper_h1_hinf", r.upper_h1_hinf},
              {"lower_log", r.lower_log},
              {"lower_sqrt", r.lower_sqrt},
              {"lower_alon", r.lower_alon},
              {"lower_js", r.lower_js},
              {"p_star", r.p_star},
              {"p_min", r.p_min},
              {"p_min_normalized", r.p_min_normalized},
              {"degenerate_log", r.degenerate_log},
              {"holds", r.holds()},
              {"discrete_outer_sets", true}};
}

inline Json to_json(const MixingReport& r) {
  Json j{{"epsilon", r.epsilon}, {"tau_exact", r.tau_exact}, {"chi2_exact", r.chi2_exact}};
  j["bounds"] = Json(r.bounds);
  j["lower_bounds"] = Json(r.lower_bounds);
  if (r.lambda) j["spectral_gap"] = *r.lambda;
  j["caveats"] = Json(r.caveats);
  return j;
}

inline Json to_json(const VerifyReport& r) {
  Json checks = Json::object();
  for (std::size_t i = 0; i < kCheckCount; ++i) {
    const auto& t = r.tallies[i];
    if (t.evaluated == 0) continue;
    Json c{{"evaluated", t.evaluated}, {"violations", t.violations}, {"worst_gap", t.worst_gap}};
    c["first_violation"] = t.first_violation == kNoMask ? Json(nullptr) : Json(t.first_violation);
    checks[std::string(kCheckNames[i])] = std::move(c);
  }
  Json chain_checks = Json::array();
  for (const auto& c : r.chain_checks)
    chain_checks.push_back(Json{{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"ok", c.ok}});
  return Json{{"states", r.states},   {"subsets", r.subsets},         {"small_subsets", r.small_subsets},
              {"lazy", r.lazy},       {"reversible", r.reversible},   {"violations", r.violations()},
              {"checks", std::move(checks)}, {"chain_checks", std::move(chain_checks)}, {"skipped", r.skipped}};
}

namespace detail {

inline std::string format_real(double x, int digits) {
  if (!std::isfinite(x)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline void write_json(std::string& out, const Json& j, int digits, int indent, int depth) {
  const auto pad = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(d * indent), ' ');
  };
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += '{';
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (!first) out += ',';
      first = false;
      pad(depth + 1);
      out += Json(k).dump();
      out += indent < 0 ? ":" : ": ";
      write_json(out, v, digits, indent, depth + 1);
    }
    pad(depth);
    out += '}';
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    out += '[';
    bool first = true;
    for (const auto& v : j) {
      if (!first) out += ',';
      first = false;
      pad(depth + 1);
      write_json(out, v, digits, indent, depth + 1);
    }
    pad(depth);
    out += ']';
  } else if (j.is_number_float()) {
    out += format_real(j.get<double>(), digits);
  } else {
    out += j.dump();
  }
}

}  // namespace detail

/// Serializes with every real printed to `digits` significant digits
/// (17 for machine output).
inline std::string dump_json(const Json& j, int digits = 17, int indent = 2) {
  std::string out;
  detail::write_json(out, j, digits, indent, 0);
  out += '\n';
  return out;
}

}  // namespace mixiso
