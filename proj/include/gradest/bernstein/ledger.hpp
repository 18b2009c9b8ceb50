#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace gradest {

enum class RowKind {
  Identity,    // |lhs - rhs| <= tol
  Inequality,  // lhs >= rhs - tol
  Empirical,   // reports a fitted constant; passes when it is finite and non-negative
};

inline std::string to_string(RowKind k) {
  switch (k) {
    case RowKind::Identity: return "identity";
    case RowKind::Inequality: return "inequality";
    case RowKind::Empirical: return "empirical";
  }
  return "?";
}

struct LedgerRow {
  std::string id;
  RowKind kind = RowKind::Inequality;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
  double fitted = 0.0;  // empirical rows: the reported constant
  bool pass = false;
  std::map<std::string, double> constants;
};

struct BernsteinLedger {
  double h = 0.0;
  double c_tol = 1.0;
  std::vector<LedgerRow> rows;

  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
  int pass_count() const {
    int n = 0;
    for (const auto& r : rows) n += r.pass ? 1 : 0;
    return n;
  }
  const LedgerRow* find(const std::string& id) const {
    for (const auto& r : rows)
      if (r.id == id) return &r;
    return nullptr;
  }
  void append(const BernsteinLedger& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }
};

/// tol(h) = c_tol h^{1/2} |lhs|.
inline double ledger_tolerance(double c_tol, double h, double lhs) { return c_tol * std::sqrt(h) * std::abs(lhs); }

inline LedgerRow make_row(std::string id, RowKind kind, double lhs, double rhs, double h, double c_tol,
                          std::map<std::string, double> constants = {}) {
  LedgerRow r;
  r.id = std::move(id);
  r.kind = kind;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = lhs - rhs;
  r.tolerance = ledger_tolerance(c_tol, h, lhs);
  r.constants = std::move(constants);
  switch (kind) {
    case RowKind::Identity: r.pass = std::abs(r.slack) <= r.tolerance; break;
    case RowKind::Inequality: r.pass = r.slack >= -r.tolerance; break;
    case RowKind::Empirical:
      r.fitted = rhs != 0.0 ? lhs / rhs : 0.0;
      r.pass = std::isfinite(r.fitted) && r.fitted >= 0.0;
      break;
  }
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) r.pass = false;
  return r;
}

}  // namespace gradest
