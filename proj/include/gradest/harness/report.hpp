#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "gradest/harness/record.hpp"

namespace gradest {

/// CSV column order (fixed). Empty cells mark quantities the record does not carry.
inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{
      "digest",  "status",     "regime",     "N",        "p",           "gamma",     "q",          "lambda",
      "epsilon", "scale",      "n",          "beta",     "eta",         "q_eta",     "r",          "u_l2",
      "du_max",  "du_eta",     "du_q_gamma", "maximal_norm", "f_q",     "f_q_eta",   "err_linf",   "err_l2",
      "ledger_rows", "ledger_pass", "fit_slope"};
  return cols;
}

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

/// One CSV row per record; fit_slope is filled from the sweep summary when given.
inline std::vector<std::string> report_row(const RunRecord& r, std::optional<double> fit_slope = std::nullopt) {
  const auto& pr = r.config.at("problem");
  const auto& an = r.config.at("analysis");
  auto norm = [&](const std::string& k) { return r.norms.count(k) ? format_real(r.norms.at(k)) : std::string(); };
  auto text = [](const nlohmann::json& j) { return j.is_null() ? std::string() : j.get<std::string>(); };
  std::string regime;
  if (r.exponents.contains("regime"))
    for (const auto& t : r.exponents.at("regime")) regime += (regime.empty() ? "" : "|") + t.get<std::string>();
  std::string rr;
  if (r.exponents.contains("thm2")) rr = r.exponents.at("thm2").at("r").get<std::string>();
  std::string n;
  for (const auto& v : r.config.at("grid").at("n")) n += (n.empty() ? "" : "x") + std::to_string(v.get<int>());
  return {r.digest,
          r.status,
          regime,
          std::to_string(pr.at("N").get<int>()),
          pr.at("p").get<std::string>(),
          pr.at("gamma").get<std::string>(),
          r.norms.count("q") ? norm("q") : text(an.at("q")),
          format_real(pr.at("lambda").get<double>()),
          format_real(pr.at("epsilon").get<double>()),
          format_real(pr.at("scale").get<double>()),
          n,
          text(an.at("beta")),
          norm("eta"),
          norm("q_eta"),
          rr,
          norm("u_l2"),
          norm("du_max"),
          norm("du_eta"),
          norm("du_q_gamma"),
          norm("maximal_norm"),
          norm("f_q"),
          norm("f_q_eta"),
          norm("err_linf"),
          norm("err_l2"),
          std::to_string(r.ledger.rows.size()),
          std::to_string(r.ledger.pass_count()),
          fit_slope ? format_real(*fit_slope) : std::string()};
}

inline void write_csv(std::ostream& os, const std::vector<RunRecord>& records, std::optional<double> fit_slope) {
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& r : records) {
    const auto row = report_row(r, fit_slope);
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
    os << "\n";
  }
}

/// Writes report.csv or report.json into `dir`, plus two-column plot data: one
/// level-scan file per record carrying a scan (k, Z) and, for a scale-sweep
/// summary, scaling_fit.dat (log X, log Y). Returns the written paths.
inline std::vector<std::filesystem::path> emit_report(const std::vector<RunRecord>& records, const std::string& format,
                                                      const std::filesystem::path& dir,
                                                      const nlohmann::json& summary = nlohmann::json()) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("output directory is not writable: " + dir.string());
  std::vector<fs::path> written;
  auto open = [&](const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    written.push_back(p);
    return os;
  };

  std::optional<double> slope;
  if (summary.is_object() && summary.contains("fit")) slope = summary.at("fit").at("slope").get<double>();

  if (format == "csv") {
    auto os = open(dir / "report.csv");
    write_csv(os, records, slope);
  } else if (format == "json") {
    nlohmann::json all = nlohmann::json::array();
    for (const auto& r : records) all.push_back(to_json(r));
    nlohmann::json doc{{"records", all}};
    if (!summary.is_null()) doc["summary"] = summary;
    auto os = open(dir / "report.json");
    os << doc.dump(2) << "\n";
  } else {
    throw ConfigError("unknown report format '" + format + "' (csv, json)");
  }

  for (const auto& r : records) {
    if (!r.scan) continue;
    auto os = open(dir / ("levelscan_" + r.digest.substr(0, 12) + ".dat"));
    os << "# k Z\n";
    for (const auto& row : r.scan->rows) os << format_real(row.k) << " " << format_real(row.Z) << "\n";
  }
  if (summary.is_object() && summary.contains("fit")) {
    auto os = open(dir / "scaling_fit.dat");
    os << "# log_X log_Y\n";
    for (const auto& p : summary.at("fit").at("points"))
      if (p.at("solved").get<bool>())
        os << format_real(std::log(p.at("X").get<double>())) << " " << format_real(std::log(p.at("Y").get<double>())) << "\n";
  }
  return written;
}

}  // namespace gradest
