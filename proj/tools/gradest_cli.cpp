// Command-line front end: exponents, check, solve, bernstein, sweep, report.
//
// Exit codes: 0 success, 2 config or regime error, 3 solver nonconvergence,
// 4 ledger row outside tolerance.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gradest/gradest.hpp"

namespace fs = std::filesystem;
using namespace gradest;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNonConvergence = 3;
constexpr int kLedgerFailure = 4;

int record_exit_code(const RunRecord& r) {
  if (r.status == "nonconvergence") return kNonConvergence;
  if (r.status != "ok") return kConfigError;
  return r.ledger.all_pass() ? kOk : kLedgerFailure;
}

void print_ledger(const BernsteinLedger& L) {
  std::printf("%-14s %-10s %14s %14s %14s %14s %s\n", "row", "kind", "lhs", "rhs", "slack", "tol", "pass");
  for (const auto& r : L.rows)
    std::printf("%-14s %-10s %14.6e %14.6e %14.6e %14.6e %s\n", r.id.c_str(), to_string(r.kind).c_str(), r.lhs, r.rhs,
                r.slack, r.tolerance, r.pass ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized quasilinear Neumann problems: solver and integral-estimate ledgers"};
  app.require_subcommand(1);

  std::string config_path, out_dir, axis = "eps", format = "json", record_dir;
  std::string p_text, gamma_text, q_text, beta_text, lambda_text = "1";
  int N = 3;
  std::vector<std::string> ledgers;

  auto* exponents = app.add_subcommand("exponents", "Print the exponent table for (N, p, gamma, q[, beta])");
  exponents->add_option("--N", N, "dimension")->required();
  exponents->add_option("--p", p_text, "diffusion exponent")->required();
  exponents->add_option("--gamma", gamma_text, "Hamiltonian growth")->required();
  exponents->add_option("--q", q_text, "integrability of f")->required();
  exponents->add_option("--beta", beta_text, "first-chain beta");
  exponents->add_option("--lambda", lambda_text, "zero-order coefficient");

  auto* check = app.add_subcommand("check", "Structure and growth condition reports for a config");
  check->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

  auto* solve_cmd = app.add_subcommand("solve", "Run one experiment and persist its record");
  solve_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--out", out_dir, "record directory (overrides output.directory)");

  auto* bern = app.add_subcommand("bernstein", "Recompute ledgers on an existing record");
  bern->add_option("--record", record_dir, "record directory")->required()->check(CLI::ExistingDirectory);
  bern->add_option("--ledgers", ledgers, "weak thm1 thm2 levelscan");

  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one axis and write a report");
  sweep_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--axis", axis)->check(CLI::IsMember({"eps", "scale", "h", "k", "lambda"}));
  sweep_cmd->add_option("--out", out_dir);
  sweep_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  auto* report = app.add_subcommand("report", "Collect records under a directory into a report");
  report->add_option("--out", out_dir, "directory holding record subdirectories")->required();
  report->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (exponents->parsed()) {
      std::optional<Rational> beta;
      if (!beta_text.empty()) beta = parse_rational(beta_text);
      const auto t = exponent_table(N, parse_rational(p_text), parse_rational(gamma_text), parse_rational(q_text),
                                    parse_rational(lambda_text), beta);
      std::cout << to_json(t).dump(2) << "\n";
      return t.regime.admissible() ? kOk : kConfigError;
    }

    if (check->parsed()) {
      const auto c = parse_config(config_path);
      const auto pb = problem_spec(c);
      const auto s = check_structure_conditions(pb.coefficient, pb.eps, std::max(1e6, 10.0 * pb.eps), 1000);
      const auto g = check_growth_conditions(pb.hamiltonian(), 1.0, 1e3, 1000);
      nlohmann::json j{{"structure",
                        {{"t_min", s.t_min}, {"t_max", s.t_max}, {"samples", s.samples},
                         {"inf_ratio", s.sampled_inf_ratio}, {"sup_ratio", s.sampled_sup_ratio}, {"c_bar", s.c_bar},
                         {"C_bar", s.C_bar}, {"c_tilde", s.c_tilde}, {"C_a", s.C_a}, {"a1", s.a1}, {"a2", s.a2},
                         {"a3", s.a3}, {"a4", s.a4}, {"pass", s.pass()}}},
                       {"growth", {{"c_H", g.c_H}, {"C_H", g.C_H}, {"pass", g.pass}}}};
      std::cout << j.dump(2) << "\n";
      return s.pass() && g.pass ? kOk : kConfigError;
    }

    if (solve_cmd->parsed()) {
      auto c = parse_config(config_path);
      if (!out_dir.empty()) c.directory = out_dir;
      const auto rec = run_experiment(c);
      std::cout << "digest  " << rec.digest << "\nstatus  " << rec.status << "\nrecord  " << rec.directory.string()
                << "\n";
      if (!rec.failure.empty()) std::cout << "failure " << rec.failure << "\n";
      for (const auto& [k, v] : rec.norms) std::printf("%-24s %.10g\n", k.c_str(), v);
      if (!rec.ledger.rows.empty()) print_ledger(rec.ledger);
      for (const auto& n : rec.notes) std::cout << "note: " << n << "\n";
      return record_exit_code(rec);
    }

    if (bern->parsed()) {
      const auto rec = analyse_record(record_dir, ledgers);
      print_ledger(rec.ledger);
      if (rec.scan) std::cout << to_json(*rec.scan).dump(2) << "\n";
      for (const auto& n : rec.notes) std::cout << "note: " << n << "\n";
      return rec.ledger.all_pass() ? kOk : kLedgerFailure;
    }

    if (sweep_cmd->parsed()) {
      auto c = parse_config(config_path);
      if (!out_dir.empty()) c.directory = out_dir;
      const auto res = sweep(c, parse_axis(axis));
      const fs::path dir = fs::path(c.directory) / ("sweep-" + axis + "-" + config_digest(c).substr(0, 12));
      for (const auto& p : emit_report(res.records, format, dir, res.summary)) std::cout << "wrote " << p.string() << "\n";
      std::cout << res.summary.dump(2) << "\n";
      for (const auto& r : res.records)
        if (r.status == "nonconvergence") return kNonConvergence;
      for (const auto& r : res.records)
        if (int code = record_exit_code(r)) return code;
      return kOk;
    }

    if (report->parsed()) {
      std::vector<RunRecord> records;
      for (const auto& entry : fs::directory_iterator(out_dir)) {
        if (!entry.is_directory() || !fs::exists(entry.path() / "record.json")) continue;
        const auto j = read_record_json(entry.path());
        RunRecord r;
        r.digest = j.at("digest").get<std::string>();
        r.config = j.at("config");
        r.status = j.at("status").get<std::string>();
        r.exponents = j.at("exponents");
        for (const auto& [k, v] : j.at("norms").items()) r.norms[k] = number_from_json(v);
        for (const auto& row : j.at("ledger").at("rows")) {
          LedgerRow lr;
          lr.id = row.at("id").get<std::string>();
          lr.pass = row.at("pass").get<bool>();
          r.ledger.rows.push_back(lr);
        }
        records.push_back(std::move(r));
      }
      std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) { return a.digest < b.digest; });
      for (const auto& p : emit_report(records, format, out_dir)) std::cout << "wrote " << p.string() << "\n";
      return kOk;
    }
  } catch (const NonConvergence& e) {
    std::cerr << "nonconvergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const RegimeError& e) {
    std::cerr << "regime error: " << e.what() << "\n";
    return kConfigError;
  } catch (const MembershipError& e) {
    std::cerr << "membership error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
