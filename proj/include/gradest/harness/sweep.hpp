#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "gradest/bernstein/scaling.hpp"
#include "gradest/harness/experiment.hpp"
#include "gradest/solver/manufactured.hpp"

namespace gradest {

enum class SweepAxis { Eps, Scale, H, K, Lambda };

inline SweepAxis parse_axis(const std::string& s) {
  if (s == "eps") return SweepAxis::Eps;
  if (s == "scale") return SweepAxis::Scale;
  if (s == "h") return SweepAxis::H;
  if (s == "k") return SweepAxis::K;
  if (s == "lambda") return SweepAxis::Lambda;
  throw ConfigError("unknown sweep axis '" + s + "' (eps, scale, h, k, lambda)");
}

inline std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Eps: return "eps";
    case SweepAxis::Scale: return "scale";
    case SweepAxis::H: return "h";
    case SweepAxis::K: return "k";
    case SweepAxis::Lambda: return "lambda";
  }
  return "?";
}

struct SweepResult {
  SweepAxis axis = SweepAxis::Eps;
  std::vector<double> values;
  std::vector<RunRecord> records;
  nlohmann::json summary = nlohmann::json::object();
  bool partial = false;
};

/// The axis values declared by the config: problem.eps_list, problem.scale_list,
/// grid.levels, analysis.k_list or problem.lambda_list.
inline std::vector<double> sweep_values(const RunConfig& c, SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Eps: return c.eps_list;
    case SweepAxis::Scale: return c.scale_list;
    case SweepAxis::H: return std::vector<double>(c.levels.begin(), c.levels.end());
    case SweepAxis::K: return c.k_list;
    case SweepAxis::Lambda: return c.lambda_list;
  }
  return {};
}

/// The single-run config for one point of the sweep.
inline RunConfig sweep_point(RunConfig c, SweepAxis axis, double v) {
  switch (axis) {
    case SweepAxis::Eps: c.epsilon = v; break;
    case SweepAxis::Scale: c.scale = v; break;
    case SweepAxis::H: c.n = {static_cast<int>(v)}; break;
    case SweepAxis::K: c.k_list = {v}; break;
    case SweepAxis::Lambda: c.lambda = v; break;
  }
  // The sweep lists describe the family, not the point.
  c.eps_list.clear();
  c.scale_list.clear();
  c.lambda_list.clear();
  c.levels.clear();
  if (axis == SweepAxis::K) {
    c.ledgers.erase(std::remove(c.ledgers.begin(), c.ledgers.end(), "levelscan"), c.ledgers.end());
  }
  return c;
}

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline double relative_variation(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return *hi != 0.0 ? (*hi - *lo) / std::abs(*hi) : 0.0;
}

/// Observed orders log(e_i/e_{i+1}) / log(h_i/h_{i+1}).
inline std::vector<double> observed_orders(const std::vector<double>& h, const std::vector<double>& err) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < h.size() && i + 1 < err.size(); ++i)
    out.push_back(err[i] > 0.0 && err[i + 1] > 0.0 ? std::log(err[i] / err[i + 1]) / std::log(h[i] / h[i + 1]) : 0.0);
  return out;
}

/// Fit of ||Du||_{L^eta} against ||f_s||_{L^{q_eta}} over the records of a scale sweep.
inline EstimateFit fit_from_records(const std::vector<RunRecord>& recs, double p) {
  EstimateFit fit;
  fit.theoretical = 1.0 / (p - 1.0);
  for (const auto& r : recs) {
    ScalePoint pt;
    pt.s = r.config.at("problem").at("scale").get<double>();
    pt.solved = r.status == "ok" && r.norms.count("du_eta") && r.norms.count("f_q_eta");
    if (pt.solved) {
      pt.X = r.norms.at("f_q_eta");
      pt.Y = r.norms.at("du_eta");
      fit.eta = r.norms.at("eta");
      fit.q_eta = r.norms.at("q_eta");
    } else {
      fit.partial = true;
    }
    fit.points.push_back(pt);
  }
  std::sort(fit.points.begin(), fit.points.end(), [](const ScalePoint& a, const ScalePoint& b) { return a.s < b.s; });
  if (fit.points.size() >= 3) fit_top_half(fit);
  else fit.partial = true;
  return fit;
}

/// One swept axis; every point is a complete run_experiment, executed concurrently.
inline SweepResult sweep(const RunConfig& c, SweepAxis axis, bool persist = true) {
  validate(c);
  SweepResult out;
  out.axis = axis;
  out.values = sweep_values(c, axis);
  if (out.values.empty()) throw ConfigError("no values declared for sweep axis '" + to_string(axis) + "'");
  std::vector<RunConfig> points;
  for (double v : out.values) {
    points.push_back(sweep_point(c, axis, v));
    validate(points.back());
  }
  out.records.resize(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out.records[i] = run_experiment(points[i], persist); });

  auto& s = out.summary;
  s["axis"] = to_string(axis);
  s["values"] = out.values;
  nlohmann::json status = nlohmann::json::array();
  nlohmann::json digests = nlohmann::json::array();
  for (const auto& r : out.records) {
    status.push_back(r.status);
    digests.push_back(r.digest);
    if (r.status != "ok") out.partial = true;
  }
  s["status"] = status;
  s["digests"] = digests;
  s["partial"] = out.partial;
  auto column = [&](const std::string& key) {
    std::vector<double> col;
    for (const auto& r : out.records)
      if (r.status == "ok" && r.norms.count(key)) col.push_back(r.norms.at(key));
    return col;
  };
  switch (axis) {
    case SweepAxis::Eps:
    case SweepAxis::Lambda: {
      const auto col = column("du_q_gamma");
      s["du_q_gamma"] = col;
      s["du_eta"] = column("du_eta");
      s["relative_variation_du_q_gamma"] = relative_variation(col);
      break;
    }
    case SweepAxis::Scale: {
      const auto fit = fit_from_records(out.records, to_double(config_p(c)));
      s["fit"] = to_json(fit);
      break;
    }
    case SweepAxis::H: {
      const auto h = column("h");
      s["h"] = h;
      s["du_q_gamma"] = column("du_q_gamma");
      s["maximal_norm"] = column("maximal_norm");
      if (c.source.kind == "manufactured") {
        s["err_linf"] = column("err_linf");
        s["order_linf"] = observed_orders(h, column("err_linf"));
        s["order_l2"] = observed_orders(h, column("err_l2"));
      }
      break;
    }
    case SweepAxis::K: {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : out.records) rows.push_back({{"pass_count", r.ledger.pass_count()}, {"rows", r.ledger.rows.size()}});
      s["ledger"] = rows;
      break;
    }
  }
  return out;
}

struct OrderRow {
  int n = 0;
  double h = 0.0;
  double err_linf = 0.0;
  double err_l2 = 0.0;
  double order_linf = 0.0;  // against the previous row
  double order_l2 = 0.0;
};

struct OrderTable {
  std::vector<OrderRow> rows;
  bool partial = false;
  std::string failure;
};

/// Errors against an analytic u* with the source evaluated from the continuous operator.
template <int Dim>
OrderTable convergence_study(const ProblemSpec& base, const AnalyticField<Dim>& u_star, const std::vector<int>& resolutions,
                             const SolverOptions& options = {}) {
  if (resolutions.size() < 3) throw ParameterError("convergence study needs at least three resolutions");
  for (std::size_t i = 1; i < resolutions.size(); ++i)
    if (resolutions[i] != 2 * resolutions[i - 1]) throw ParameterError("each resolution must double the previous one");
  OrderTable t;
  Box<Dim> box;
  for (int d = 0; d < Dim; ++d) box.extents[d] = base.extents[static_cast<std::size_t>(d)];
  for (int n : resolutions) {
    typename Grid<Dim>::Index cells;
    cells.fill(n);
    Grid<Dim> g(box, cells);
    ProblemSpec pb = base;
    pb.source = continuum_source(pb, u_star, g);
    try {
      const auto res = solve<Dim>(pb, g, options);
      OrderRow row;
      row.n = n;
      row.h = g.max_spacing();
      double l2 = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double e = res.u[k] - u_star.value(g.center(k));
        row.err_linf = std::max(row.err_linf, std::abs(e));
        l2 += e * e;
      }
      row.err_l2 = std::sqrt(l2 * g.cell_volume());
      if (!t.rows.empty()) {
        const auto& prev = t.rows.back();
        const double ratio = std::log(prev.h / row.h);
        row.order_linf = prev.err_linf > 0.0 && row.err_linf > 0.0 ? std::log(prev.err_linf / row.err_linf) / ratio : 0.0;
        row.order_l2 = prev.err_l2 > 0.0 && row.err_l2 > 0.0 ? std::log(prev.err_l2 / row.err_l2) / ratio : 0.0;
      }
      t.rows.push_back(row);
    } catch (const NonConvergence& e) {
      t.partial = true;
      t.failure = e.what();
      break;
    }
  }
  return t;
}

}  // namespace gradest
