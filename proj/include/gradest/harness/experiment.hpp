#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>

#include "gradest/bernstein/levelset.hpp"
#include "gradest/bernstein/maximal.hpp"
#include "gradest/bernstein/thm1.hpp"
#include "gradest/bernstein/thm2.hpp"
#include "gradest/grid/io.hpp"
#include "gradest/harness/record.hpp"
#include "gradest/solver/manufactured.hpp"
#include "gradest/solver/newton.hpp"

namespace gradest {

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

template <int Dim>
Grid<Dim> config_grid(const RunConfig& c) {
  Box<Dim> box;
  typename Grid<Dim>::Index cells{};
  for (int d = 0; d < Dim; ++d) {
    box.extents[d] = c.extents[static_cast<std::size_t>(d)];
    cells[d] = c.n.size() == 1 ? c.n[0] : c.n[static_cast<std::size_t>(d)];
  }
  return Grid<Dim>(box, cells);
}

template <int Dim>
std::optional<AnalyticField<Dim>> config_exact_solution(const RunConfig& c, const Grid<Dim>& g) {
  if (c.source.kind != "manufactured") return std::nullopt;
  std::array<int, Dim> wave{};
  for (int d = 0; d < Dim; ++d) wave[d] = c.source.wave.empty() ? 1 : c.source.wave[static_cast<std::size_t>(d)];
  return cosine_product_field<Dim>(g.box(), wave, c.source.amplitude);
}

/// ProblemSpec on a given grid; a manufactured source is tabulated from its exact solution.
template <int Dim>
ProblemSpec config_problem(const RunConfig& c, const Grid<Dim>& g) {
  ProblemSpec pb = problem_spec(c);
  if (auto exact = config_exact_solution<Dim>(c, g)) {
    pb.source = continuum_source(pb, *exact, g);
    if (c.scale != 1.0) pb.source = scaled(pb.source, c.scale);
  }
  return pb;
}

/// Norms, exponents, ledgers and scans on a solved field.
template <int Dim>
void analyse(const RunConfig& c, const ProblemSpec& pb, const ScalarField<Dim>& u, RunRecord& rec) {
  const auto& g = u.grid;
  const auto du = gradient(u).magnitude();
  const auto f = evaluate_source(pb.source, g);
  rec.norms["u_l2"] = lp_norm(u, 2.0);
  rec.norms["u_linf"] = max_abs(u);
  rec.norms["du_l2"] = lp_norm(du, 2.0);
  rec.norms["du_max"] = max_abs(du);
  rec.norms["h"] = g.max_spacing();

  const auto q = config_q(c);
  if (auto e = config_eta(c)) {
    rec.norms["eta"] = e->first;
    rec.norms["q_eta"] = e->second;
    rec.norms["du_eta"] = lp_norm(du, e->first);
    rec.norms["f_q_eta"] = lp_norm(f, e->second);
  }
  if (q) {
    const double qd = to_double(*q);
    rec.norms["q"] = qd;
    rec.norms["du_q_gamma"] = lp_norm(du, qd * pb.gamma);
    const auto m = maximal_regularity_norms(u, qd, pb.gamma);
    rec.norms["maximal_norm"] = m.direct;
    rec.norms["maximal_norm_via_power"] = m.via_power;
    rec.norms["f_q"] = lp_norm(f, qd);
  }
  if (auto exact = config_exact_solution<Dim>(c, g)) {
    double linf = 0.0, l2 = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double e = u[k] - exact->value(g.center(k));
      linf = std::max(linf, std::abs(e));
      l2 += e * e;
    }
    rec.norms["err_linf"] = linf;
    rec.norms["err_l2"] = std::sqrt(l2 * g.cell_volume());
  }

  // Exponents.
  std::optional<Theorem2Exponents> thm2;
  const Rational p = config_p(c), gamma = config_gamma(c);
  if (q) {
    const auto table = exponent_table(c.N, p, gamma, *q, rational_from_double(c.lambda),
                                      c.beta ? std::optional<Rational>(parse_rational(*c.beta)) : std::nullopt);
    rec.exponents = to_json(table);
    if (table.thm2)
      if (const auto* e = std::get_if<Theorem2Exponents>(&*table.thm2)) thm2 = *e;
  }
  if (c.N == 2)
    if (auto t = config_thm1(c)) rec.exponents["thm1_surrogate"] = to_json(*t);

  // Ledgers.
  const double res_tol = std::max(1e-8, 10.0 * c.solver.tolerance);
  rec.ledger.h = g.max_spacing();
  rec.ledger.c_tol = c.c_tol;
  if (c.wants("weak")) rec.ledger.rows.push_back(weak_identity_check(pb, u, c.weak_beta, c.c_tol, res_tol));
  if (c.wants("thm1")) rec.ledger.append(thm1_ledger(pb, u, to_double(parse_rational(*c.beta)), c.c_tol, res_tol));
  if (c.wants("thm2") || c.wants("levelscan")) {
    if (!thm2) {
      rec.notes.push_back("second proof chain skipped: needs N >= 3, p >= 2, a declared q >= q_end and r > 2");
    } else {
      if (c.wants("thm2"))
        for (double k : c.k_list) rec.ledger.append(thm2_ledger(pb, u, k, *thm2, c.c_tol, res_tol));
      if (c.wants("levelscan"))
        rec.scan = levelset_scan(u, pb.eps, to_double(thm2->r), pb.gamma, c.k_list);
    }
  }
}

namespace detail {

inline std::string random_suffix() {
  std::random_device rd;
  std::ostringstream os;
  os << std::hex << rd() << rd();
  return os.str();
}

}  // namespace detail

/// Writes <dir>/<digest>/{record.json, u.field} through a temporary directory and a
/// rename. An existing record directory is left untouched.
template <int Dim>
void persist_record(RunRecord& rec, const ScalarField<Dim>* u, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path target = out_dir / rec.digest;
  rec.directory = target;
  if (u) rec.artifacts["u"] = "u.field";
  if (fs::exists(target)) {
    rec.notes.push_back("record directory already exists; kept unchanged");
    return;
  }
  const fs::path tmp = out_dir / (".tmp-" + rec.digest + "-" + detail::random_suffix());
  fs::create_directories(tmp);
  try {
    if (u) write_field((tmp / "u.field").string(), *u);
    std::ofstream os(tmp / "record.json");
    os << to_json(rec).dump(2) << "\n";
    os.close();
    if (!os) throw Error("failed to write record.json");
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
      fs::remove_all(tmp);
      if (!fs::exists(target)) throw Error("cannot commit record directory: " + ec.message());
      rec.notes.push_back("record directory committed concurrently; kept unchanged");
    }
  } catch (...) {
    std::error_code ignore;
    fs::remove_all(tmp, ignore);
    throw;
  }
}

template <int Dim>
RunRecord run_experiment_dim(const RunConfig& c, bool persist) {
  RunRecord rec;
  rec.digest = config_digest(c);
  rec.timestamp = utc_timestamp();
  rec.config = to_json(c, false);
  const auto grid = config_grid<Dim>(c);
  const ProblemSpec pb = config_problem<Dim>(c, grid);
  std::optional<ScalarField<Dim>> u;
  try {
    auto res = solve<Dim>(pb, grid, c.solver);
    rec.report = res.report;
    u = std::move(res.u);
    analyse<Dim>(c, pb, *u, rec);
  } catch (const NonConvergence& e) {
    rec.status = "nonconvergence";
    rec.failure = e.what();
    rec.report = e.report();
  } catch (const Error& e) {
    if (!u) throw;
    rec.status = "error";
    rec.failure = e.what();
  }
  if (persist) persist_record<Dim>(rec, u ? &*u : nullptr, c.directory);
  return rec;
}

/// solve -> norms -> ledgers/scans -> persisted record. Solver or analysis failures
/// produce a record with status "nonconvergence" or "error".
inline RunRecord run_experiment(const RunConfig& c, bool persist = true) {
  validate(c);
  return c.N == 2 ? run_experiment_dim<2>(c, persist) : run_experiment_dim<3>(c, persist);
}

inline nlohmann::json read_record_json(const std::filesystem::path& dir) {
  std::ifstream in(dir / "record.json");
  if (!in) throw ConfigError("no record.json in " + dir.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed record.json: ") + e.what());
  }
}

/// Recomputes ledgers and scans from a persisted record and its solution snapshot.
inline RunRecord analyse_record(const std::filesystem::path& dir, const std::vector<std::string>& ledgers = {}) {
  const auto j = read_record_json(dir);
  RunConfig c = config_from_json(j.at("config"));
  if (!ledgers.empty()) c.ledgers = ledgers;
  validate(c);
  if (j.at("status").get<std::string>() != "ok") throw RejectedInput("record " + dir.string() + " has no converged solution");
  RunRecord rec;
  rec.digest = j.at("digest").get<std::string>();
  rec.timestamp = utc_timestamp();
  rec.config = to_json(c, false);
  rec.directory = dir;
  const auto path = (dir / "u.field").string();
  if (field_dimension(path) != c.N) throw ContractError("snapshot dimension differs from the record config");
  if (c.N == 2) {
    const auto u = read_field<2>(path);
    analyse<2>(c, config_problem<2>(c, u.grid), u, rec);
  } else {
    const auto u = read_field<3>(path);
    analyse<3>(c, config_problem<3>(c, u.grid), u, rec);
  }
  return rec;
}

}  // namespace gradest
