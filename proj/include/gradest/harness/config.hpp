#pragma once

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradest/core/rational.hpp"
#include "gradest/model/exponents.hpp"
#include "gradest/model/problem.hpp"
#include "gradest/solver/newton.hpp"

namespace gradest {

struct SourceConfig {
  std::string kind = "cosine";  // cosine | radial | random | constant | manufactured
  double amplitude = 1.0;
  std::vector<int> wave{};
  std::vector<double> center{};
  double power = 0.0;
  double core = 0.0;
  std::uint64_t seed = 0;
  int cutoff = 4;
};

/// One experiment, as read from a sectioned key-value file.
struct RunConfig {
  // [problem]
  int N = 2;
  std::vector<double> extents{};
  std::string p = "2";
  std::string gamma = "2";
  double lambda = 1.0;
  double epsilon = 1e-2;
  std::string coefficient = "power";  // power | perturbed
  double delta = 0.0;
  std::string hamiltonian = "power";
  SourceConfig source{};
  double scale = 1.0;
  std::vector<double> scale_list{};
  std::vector<double> eps_list{};
  std::vector<double> lambda_list{};
  // [grid]
  std::vector<int> n{};
  std::vector<int> levels{};
  // [solver]
  SolverOptions solver{};
  // [analysis]
  std::optional<std::string> beta{};
  std::optional<std::string> q{};
  std::optional<double> eta{};
  std::optional<double> q_eta{};
  double weak_beta = 4.0;
  std::vector<double> k_list{};
  std::vector<std::string> ledgers{};  // weak, thm1, thm2, levelscan
  double c_tol = 1.0;
  // [output]
  std::string directory = "runs";
  std::vector<std::string> formats{"json"};

  bool wants(const std::string& ledger) const {
    return std::find(ledgers.begin(), ledgers.end(), ledger) != ledgers.end();
  }
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema{
      {"problem",
       {"N", "extents", "p", "gamma", "lambda", "epsilon", "coefficient", "delta", "hamiltonian", "source", "amplitude",
        "wave", "center", "power", "core", "seed", "cutoff", "scale", "scale_list", "eps_list", "lambda_list"}},
      {"grid", {"n", "levels"}},
      {"solver",
       {"tolerance", "stage_tolerance", "max_iterations", "backtrack", "armijo", "min_step", "eps_ratio", "gamma_stages",
        "max_bisections", "continuation"}},
      {"analysis", {"beta", "q", "eta", "q_eta", "weak_beta", "k_list", "ledgers", "c_tol"}},
      {"output", {"directory", "formats"}},
  };
  return schema;
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline double to_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + text + "'");
  }
}

inline long long to_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not an integer: '" + text + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + text + "'");
}

inline std::string canonical_rational(const std::string& key, const std::string& text) {
  try {
    return to_string(parse_rational(text));
  } catch (const ParameterError&) {
    throw ConfigError("key '" + key + "': not a rational number: '" + text + "'");
  }
}

template <class T, class Conv>
std::vector<T> to_list(const std::string& text, Conv conv) {
  std::vector<T> out;
  for (const auto& tok : split_list(text)) out.push_back(conv(tok));
  return out;
}

}  // namespace detail

/// Rebuilds a config from flat section/key strings; unknown sections or keys are errors.
inline RunConfig config_from_entries(const std::map<std::string, std::map<std::string, std::string>>& entries) {
  using namespace detail;
  const auto& schema = config_schema();
  for (const auto& [section, keys] : entries) {
    auto it = schema.find(section);
    if (it == schema.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : keys)
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }
  auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    auto s = entries.find(section);
    if (s == entries.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
  };
  auto require = [&](const std::string& section, const std::string& key) {
    auto v = get(section, key);
    if (!v) throw ConfigError("missing required key '" + key + "' in [" + section + "]");
    return *v;
  };

  RunConfig c;
  c.N = static_cast<int>(to_integer("N", require("problem", "N")));
  if (c.N != 2 && c.N != 3) throw ConfigError("N must be 2 or 3");
  c.extents = get("problem", "extents")
                  ? to_list<double>(*get("problem", "extents"), [](const std::string& t) { return to_real("extents", t); })
                  : std::vector<double>(static_cast<std::size_t>(c.N), 1.0);
  c.p = canonical_rational("p", require("problem", "p"));
  c.gamma = canonical_rational("gamma", require("problem", "gamma"));
  c.lambda = to_real("lambda", require("problem", "lambda"));
  c.epsilon = to_real("epsilon", require("problem", "epsilon"));
  if (auto v = get("problem", "coefficient")) c.coefficient = *v;
  if (auto v = get("problem", "delta")) c.delta = to_real("delta", *v);
  if (auto v = get("problem", "hamiltonian")) c.hamiltonian = *v;
  c.source.kind = require("problem", "source");
  if (auto v = get("problem", "amplitude")) c.source.amplitude = to_real("amplitude", *v);
  if (auto v = get("problem", "wave"))
    c.source.wave = to_list<int>(*v, [](const std::string& t) { return static_cast<int>(to_integer("wave", t)); });
  if (auto v = get("problem", "center"))
    c.source.center = to_list<double>(*v, [](const std::string& t) { return to_real("center", t); });
  if (auto v = get("problem", "power")) c.source.power = to_real("power", *v);
  if (auto v = get("problem", "core")) c.source.core = to_real("core", *v);
  if (auto v = get("problem", "seed")) c.source.seed = static_cast<std::uint64_t>(to_integer("seed", *v));
  if (auto v = get("problem", "cutoff")) c.source.cutoff = static_cast<int>(to_integer("cutoff", *v));
  if (auto v = get("problem", "scale")) c.scale = to_real("scale", *v);
  auto reals = [&](const std::string& section, const std::string& key) {
    auto v = get(section, key);
    return v ? to_list<double>(*v, [&](const std::string& t) { return to_real(key, t); }) : std::vector<double>{};
  };
  c.scale_list = reals("problem", "scale_list");
  c.eps_list = reals("problem", "eps_list");
  c.lambda_list = reals("problem", "lambda_list");

  auto ints = [&](const std::string& key, const std::string& text) {
    return to_list<int>(text, [&](const std::string& t) { return static_cast<int>(to_integer(key, t)); });
  };
  c.n = ints("n", require("grid", "n"));
  if (auto v = get("grid", "levels")) c.levels = ints("levels", *v);

  auto& o = c.solver;
  if (auto v = get("solver", "tolerance")) o.tolerance = to_real("tolerance", *v);
  if (auto v = get("solver", "stage_tolerance")) o.stage_tolerance = to_real("stage_tolerance", *v);
  if (auto v = get("solver", "max_iterations")) o.max_iterations = static_cast<int>(to_integer("max_iterations", *v));
  if (auto v = get("solver", "backtrack")) o.backtrack = to_real("backtrack", *v);
  if (auto v = get("solver", "armijo")) o.armijo = to_real("armijo", *v);
  if (auto v = get("solver", "min_step")) o.min_step = to_real("min_step", *v);
  if (auto v = get("solver", "eps_ratio")) o.eps_ratio = to_real("eps_ratio", *v);
  if (auto v = get("solver", "gamma_stages")) o.gamma_stages = static_cast<int>(to_integer("gamma_stages", *v));
  if (auto v = get("solver", "max_bisections")) o.max_bisections = static_cast<int>(to_integer("max_bisections", *v));
  if (auto v = get("solver", "continuation")) o.continuation = to_bool("continuation", *v);

  if (auto v = get("analysis", "beta")) c.beta = canonical_rational("beta", *v);
  if (auto v = get("analysis", "q")) c.q = canonical_rational("q", *v);
  if (auto v = get("analysis", "eta")) c.eta = to_real("eta", *v);
  if (auto v = get("analysis", "q_eta")) c.q_eta = to_real("q_eta", *v);
  if (auto v = get("analysis", "weak_beta")) c.weak_beta = to_real("weak_beta", *v);
  c.k_list = reals("analysis", "k_list");
  if (auto v = get("analysis", "ledgers")) c.ledgers = split_list(*v);
  if (auto v = get("analysis", "c_tol")) c.c_tol = to_real("c_tol", *v);

  if (auto v = get("output", "directory")) c.directory = *v;
  if (auto v = get("output", "formats")) c.formats = split_list(*v);
  return c;
}

inline std::map<std::string, std::map<std::string, std::string>> parse_ini_entries(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  std::map<std::string, std::map<std::string, std::string>> entries;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside of a section");
    auto& out = entries[section];
    for (const auto& [key, value] : body) out[key] = value.get_value<std::string>();
  }
  return entries;
}

/// Checks the config against the problem hypotheses: gamma > p-1, admissible regime
/// for a declared q, L^q membership of the source, known ledger and source names.
inline void validate(const RunConfig& c);

inline RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  auto c = config_from_entries(parse_ini_entries(in));
  validate(c);
  return c;
}

inline RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  auto c = config_from_entries(parse_ini_entries(in));
  validate(c);
  return c;
}

inline Rational config_p(const RunConfig& c) { return parse_rational(c.p); }
inline Rational config_gamma(const RunConfig& c) { return parse_rational(c.gamma); }

/// Exponents of the first chain for the config's beta (three-dimensional bookkeeping when N = 2).
inline std::optional<Theorem1Exponents> config_thm1(const RunConfig& c) {
  if (!c.beta) return std::nullopt;
  return theorem1_exponents(std::max(c.N, 3), config_p(c), parse_rational(*c.beta));
}

/// eta and q_eta: explicit overrides first, then the first-chain exponents.
inline std::optional<std::pair<double, double>> config_eta(const RunConfig& c) {
  auto t = config_thm1(c);
  if (c.eta && c.q_eta) return std::pair{*c.eta, *c.q_eta};
  if (!t) return std::nullopt;
  return std::pair{c.eta.value_or(to_double(t->eta)), c.q_eta.value_or(to_double(t->q_eta))};
}

/// Integrability exponent used for norms: declared q, else q_eta.
inline std::optional<Rational> config_q(const RunConfig& c) {
  if (c.q) return parse_rational(*c.q);
  if (c.q_eta) return rational_from_double(*c.q_eta);
  if (auto t = config_thm1(c)) return t->q_eta;
  return std::nullopt;
}

/// ProblemSpec without the grid-dependent manufactured source (left as the base cosine).
inline ProblemSpec problem_spec(const RunConfig& c) {
  ProblemSpec pb;
  pb.N = c.N;
  pb.extents = c.extents;
  pb.p = to_double(config_p(c));
  pb.gamma = to_double(config_gamma(c));
  pb.lambda = c.lambda;
  pb.eps = c.epsilon;
  if (c.coefficient == "power")
    pb.coefficient = PowerDiffusion{pb.p};
  else if (c.coefficient == "perturbed")
    pb.coefficient = PerturbedPower{pb.p, c.delta};
  else
    throw ConfigError("unknown coefficient family '" + c.coefficient + "' (power, perturbed)");
  if (c.hamiltonian != "power") throw ConfigError("unknown hamiltonian '" + c.hamiltonian + "' (power)");

  const auto& s = c.source;
  SourceSpec base;
  if (s.kind == "cosine" || s.kind == "manufactured") {
    std::vector<int> wave = s.wave.empty() ? std::vector<int>(static_cast<std::size_t>(c.N), 1) : s.wave;
    if (static_cast<int>(wave.size()) != c.N) throw ConfigError("wave needs " + std::to_string(c.N) + " entries");
    base = SourceSpec{CosineProduct{s.amplitude, wave}};
  } else if (s.kind == "constant") {
    base = SourceSpec{CosineProduct{s.amplitude, std::vector<int>(static_cast<std::size_t>(c.N), 0)}};
  } else if (s.kind == "radial") {
    std::vector<double> center = s.center;
    if (center.empty())
      for (double l : c.extents) center.push_back(0.5 * l);
    std::optional<double> target;
    if (c.q) target = to_double(parse_rational(*c.q));
    base = SourceSpec{make_radial_singular(c.N, center, s.power, s.amplitude, s.core, target)};
  } else if (s.kind == "random") {
    base = SourceSpec{SeededSmoothRandom{s.seed, s.cutoff}};
  } else {
    throw ConfigError("unknown source '" + s.kind + "' (cosine, radial, random, constant, manufactured)");
  }
  pb.source = c.scale == 1.0 ? base : scaled(base, c.scale);
  return pb;
}

inline void validate(const RunConfig& c) {
  if (static_cast<int>(c.extents.size()) != c.N) throw ConfigError("extents needs " + std::to_string(c.N) + " entries");
  if (c.n.size() != 1 && static_cast<int>(c.n.size()) != c.N)
    throw ConfigError("grid n needs 1 or " + std::to_string(c.N) + " entries");
  for (const auto& l : c.ledgers)
    if (l != "weak" && l != "thm1" && l != "thm2" && l != "levelscan")
      throw ConfigError("unknown ledger '" + l + "' (weak, thm1, thm2, levelscan)");
  for (const auto& f : c.formats)
    if (f != "json" && f != "csv") throw ConfigError("unknown output format '" + f + "' (json, csv)");
  validate(c.solver);
  const ProblemSpec pb = problem_spec(c);  // membership of a declared q is checked here
  validate(pb);
  if (c.q) {
    const auto regime = classify_regime(c.N, config_p(c), config_gamma(c), parse_rational(*c.q),
                                        rational_from_double(c.lambda));
    if (!regime.admissible())
      throw RegimeError("inadmissible regime for (N, p, gamma, q, lambda) = (" + std::to_string(c.N) + ", " + c.p +
                        ", " + c.gamma + ", " + *c.q + ", " + std::to_string(c.lambda) + ")");
    if (!belongs_to_lq(pb.source, to_double(parse_rational(*c.q))))
      throw MembershipError("source is not in L^" + *c.q);
  }
  if (c.wants("thm2") && c.k_list.empty()) throw ConfigError("ledger thm2 needs analysis.k_list");
  if (c.wants("levelscan") && c.k_list.size() < 2) throw ConfigError("levelscan needs at least two k values");
  if (c.wants("thm1") && !c.beta) throw ConfigError("ledger thm1 needs analysis.beta");
  if (!(c.c_tol >= 0.0)) throw ConfigError("analysis.c_tol must be non-negative");
}

// JSON form. Rationals are kept as canonical strings, reals as doubles.

inline nlohmann::json to_json(const SolverOptions& o) {
  return {{"tolerance", o.tolerance},       {"stage_tolerance", o.stage_tolerance}, {"max_iterations", o.max_iterations},
          {"backtrack", o.backtrack},       {"armijo", o.armijo},                   {"min_step", o.min_step},
          {"eps_ratio", o.eps_ratio},       {"gamma_stages", o.gamma_stages},       {"max_bisections", o.max_bisections},
          {"continuation", o.continuation}};
}

inline nlohmann::json to_json(const RunConfig& c, bool include_output = true) {
  using nlohmann::json;
  json problem{{"N", c.N},
               {"extents", c.extents},
               {"p", c.p},
               {"gamma", c.gamma},
               {"lambda", c.lambda},
               {"epsilon", c.epsilon},
               {"coefficient", c.coefficient},
               {"delta", c.delta},
               {"hamiltonian", c.hamiltonian},
               {"source",
                {{"kind", c.source.kind},
                 {"amplitude", c.source.amplitude},
                 {"wave", c.source.wave},
                 {"center", c.source.center},
                 {"power", c.source.power},
                 {"core", c.source.core},
                 {"seed", c.source.seed},
                 {"cutoff", c.source.cutoff}}},
               {"scale", c.scale},
               {"scale_list", c.scale_list},
               {"eps_list", c.eps_list},
               {"lambda_list", c.lambda_list}};
  json analysis{{"beta", c.beta ? json(*c.beta) : json(nullptr)},
                {"q", c.q ? json(*c.q) : json(nullptr)},
                {"eta", c.eta ? json(*c.eta) : json(nullptr)},
                {"q_eta", c.q_eta ? json(*c.q_eta) : json(nullptr)},
                {"weak_beta", c.weak_beta},
                {"k_list", c.k_list},
                {"ledgers", c.ledgers},
                {"c_tol", c.c_tol}};
  json j{{"problem", problem},
         {"grid", {{"n", c.n}, {"levels", c.levels}}},
         {"solver", to_json(c.solver)},
         {"analysis", analysis}};
  if (include_output) j["output"] = {{"directory", c.directory}, {"formats", c.formats}};
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  try {
    RunConfig c;
    const auto& pr = j.at("problem");
    c.N = pr.at("N").get<int>();
    c.extents = pr.at("extents").get<std::vector<double>>();
    c.p = pr.at("p").get<std::string>();
    c.gamma = pr.at("gamma").get<std::string>();
    c.lambda = pr.at("lambda").get<double>();
    c.epsilon = pr.at("epsilon").get<double>();
    c.coefficient = pr.at("coefficient").get<std::string>();
    c.delta = pr.at("delta").get<double>();
    c.hamiltonian = pr.at("hamiltonian").get<std::string>();
    const auto& s = pr.at("source");
    c.source.kind = s.at("kind").get<std::string>();
    c.source.amplitude = s.at("amplitude").get<double>();
    c.source.wave = s.at("wave").get<std::vector<int>>();
    c.source.center = s.at("center").get<std::vector<double>>();
    c.source.power = s.at("power").get<double>();
    c.source.core = s.at("core").get<double>();
    c.source.seed = s.at("seed").get<std::uint64_t>();
    c.source.cutoff = s.at("cutoff").get<int>();
    c.scale = pr.at("scale").get<double>();
    c.scale_list = pr.at("scale_list").get<std::vector<double>>();
    c.eps_list = pr.at("eps_list").get<std::vector<double>>();
    c.lambda_list = pr.at("lambda_list").get<std::vector<double>>();
    c.n = j.at("grid").at("n").get<std::vector<int>>();
    c.levels = j.at("grid").at("levels").get<std::vector<int>>();
    const auto& so = j.at("solver");
    c.solver.tolerance = so.at("tolerance").get<double>();
    c.solver.stage_tolerance = so.at("stage_tolerance").get<double>();
    c.solver.max_iterations = so.at("max_iterations").get<int>();
    c.solver.backtrack = so.at("backtrack").get<double>();
    c.solver.armijo = so.at("armijo").get<double>();
    c.solver.min_step = so.at("min_step").get<double>();
    c.solver.eps_ratio = so.at("eps_ratio").get<double>();
    c.solver.gamma_stages = so.at("gamma_stages").get<int>();
    c.solver.max_bisections = so.at("max_bisections").get<int>();
    c.solver.continuation = so.at("continuation").get<bool>();
    const auto& an = j.at("analysis");
    if (!an.at("beta").is_null()) c.beta = an.at("beta").get<std::string>();
    if (!an.at("q").is_null()) c.q = an.at("q").get<std::string>();
    if (!an.at("eta").is_null()) c.eta = an.at("eta").get<double>();
    if (!an.at("q_eta").is_null()) c.q_eta = an.at("q_eta").get<double>();
    c.weak_beta = an.at("weak_beta").get<double>();
    c.k_list = an.at("k_list").get<std::vector<double>>();
    c.ledgers = an.at("ledgers").get<std::vector<std::string>>();
    c.c_tol = an.at("c_tol").get<double>();
    if (j.contains("output")) {
      c.directory = j.at("output").at("directory").get<std::string>();
      c.formats = j.at("output").at("formats").get<std::vector<std::string>>();
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

/// Content hash of the config without its output section.
inline std::string config_digest(const RunConfig& c) { return sha256_hex(to_json(c, false).dump()); }

}  // namespace gradest
