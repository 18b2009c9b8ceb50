#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradest/bernstein/ledger.hpp"
#include "gradest/bernstein/levelset.hpp"
#include "gradest/bernstein/scaling.hpp"
#include "gradest/harness/config.hpp"
#include "gradest/model/exponents.hpp"
#include "gradest/solver/newton.hpp"

namespace gradest {

/// Outcome of one experiment. `payload` fields are deterministic; timestamp and
/// wall time live under "provenance".
struct RunRecord {
  std::string digest;
  std::string timestamp;
  nlohmann::json config;
  std::string status = "ok";  // ok | nonconvergence | error
  std::string failure;
  SolveReport report;
  std::map<std::string, double> norms;
  nlohmann::json exponents = nlohmann::json::object();
  BernsteinLedger ledger;
  std::vector<std::string> notes;
  std::optional<LevelScan> scan;
  std::map<std::string, std::string> artifacts;
  std::filesystem::path directory;
};

/// Doubles that are not finite are written as strings ("inf", "-inf", "nan").
inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return NAN;
}

inline nlohmann::json to_json(const SolveReport& r, bool with_time) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : r.stages)
    stages.push_back({{"eps", s.eps},
                      {"gamma", s.gamma},
                      {"iterations", s.iterations},
                      {"residual", json_number(s.residual)},
                      {"converged", s.converged}});
  nlohmann::json j{{"stages", stages},
                   {"final_residual", json_number(r.final_residual)},
                   {"damping_events", r.damping_events},
                   {"total_iterations", r.total_iterations},
                   {"converged", r.converged}};
  if (with_time) j["wall_time"] = r.wall_time;
  return j;
}

inline nlohmann::json to_json(const LedgerRow& r) {
  nlohmann::json constants = nlohmann::json::object();
  for (const auto& [k, v] : r.constants) constants[k] = json_number(v);
  return {{"id", r.id},
          {"kind", to_string(r.kind)},
          {"lhs", json_number(r.lhs)},
          {"rhs", json_number(r.rhs)},
          {"slack", json_number(r.slack)},
          {"tolerance", json_number(r.tolerance)},
          {"fitted", json_number(r.fitted)},
          {"pass", r.pass},
          {"constants", constants}};
}

inline nlohmann::json to_json(const BernsteinLedger& L) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : L.rows) rows.push_back(to_json(r));
  return {{"h", L.h}, {"c_tol", L.c_tol}, {"rows", rows}, {"pass_count", L.pass_count()}, {"all_pass", L.all_pass()}};
}

inline nlohmann::json to_json(const LevelScan& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"k", r.k},
                    {"measure", r.measure},
                    {"Z", json_number(r.Z)},
                    {"chebyshev_lhs", r.chebyshev_lhs},
                    {"chebyshev_rhs", r.chebyshev_rhs},
                    {"chebyshev_pass", r.chebyshev_pass},
                    {"omega_raw", json_number(r.omega_raw)},
                    {"omega", json_number(r.omega)},
                    {"z_minus", r.z_minus ? json_number(*r.z_minus) : nlohmann::json(nullptr)},
                    {"z_plus", r.z_plus ? json_number(*r.z_plus) : nlohmann::json(nullptr)}});
  return {{"r", s.r},
          {"gamma", s.gamma},
          {"theta", s.theta},
          {"c", s.c},
          {"v_max", s.v_max},
          {"rows", rows},
          {"Z_nonincreasing", s.Z_nonincreasing()},
          {"chebyshev_all", s.chebyshev_all()},
          {"omega_raw_nonincreasing_top_half", s.omega_raw_nonincreasing_top_half()}};
}

inline nlohmann::json to_json(const EstimateFit& f) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : f.points) pts.push_back({{"s", p.s}, {"X", p.X}, {"Y", p.Y}, {"solved", p.solved}});
  return {{"eta", f.eta},
          {"q_eta", f.q_eta},
          {"points", pts},
          {"slope", f.slope},
          {"intercept", f.intercept},
          {"fitted_points", f.fitted_points},
          {"theoretical", f.theoretical},
          {"partial", f.partial},
          {"failure", f.failure}};
}

inline nlohmann::json to_json(const Theorem1Exponents& e) {
  return {{"beta", to_string(e.beta)}, {"eta", to_string(e.eta)}, {"alpha", to_string(e.alpha)}, {"q_eta", to_string(e.q_eta)}};
}

inline nlohmann::json to_json(const ExponentTable& t) {
  nlohmann::json tags = nlohmann::json::array();
  for (auto r : t.regime.tags) tags.push_back(to_string(r));
  nlohmann::json j{{"N", t.N},
                   {"p", to_string(t.p)},
                   {"gamma", to_string(t.gamma)},
                   {"q", to_string(t.q)},
                   {"lambda", to_string(t.lambda)},
                   {"regime", tags}};
  if (t.q_end) j["q_end"] = to_string(*t.q_end);
  if (t.thm1) j["thm1"] = to_json(*t.thm1);
  if (t.thm2) {
    if (const auto* e = std::get_if<Theorem2Exponents>(&*t.thm2))
      j["thm2"] = {{"r", to_string(e->r)}, {"beta", to_string(e->beta)}, {"eta", to_string(e->eta)}};
    else
      j["thm2"] = {{"proof_gap", true}, {"r", to_string(std::get<ProofGap>(*t.thm2).r)}};
  }
  if (t.r_gamma) j["r_gamma"] = to_string(*t.r_gamma);
  if (t.q_gamma) j["q_gamma"] = to_string(*t.q_gamma);
  return j;
}

/// Deterministic part of a record.
inline nlohmann::json record_payload(const RunRecord& r) {
  nlohmann::json norms = nlohmann::json::object();
  for (const auto& [k, v] : r.norms) norms[k] = json_number(v);
  nlohmann::json j{{"digest", r.digest},
                   {"config", r.config},
                   {"status", r.status},
                   {"failure", r.failure},
                   {"solver", to_json(r.report, false)},
                   {"norms", norms},
                   {"exponents", r.exponents},
                   {"ledger", to_json(r.ledger)},
                   {"notes", r.notes},
                   {"artifacts", r.artifacts}};
  j["level_scan"] = r.scan ? to_json(*r.scan) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const RunRecord& r) {
  auto j = record_payload(r);
  j["provenance"] = {{"timestamp", r.timestamp}, {"wall_time", r.report.wall_time}};
  return j;
}

}  // namespace gradest
