#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gradest/gradest.hpp"

using namespace gradest;
namespace fs = std::filesystem;

namespace {

const char* kTrivial = R"(
[problem]
N = 2
p = 3
gamma = 3
lambda = 1
epsilon = 0.01
source = constant
amplitude = 0.001

[grid]
n = 12

[analysis]
beta = 4
ledgers = weak thm1
)";

const char* kCosine = R"(
[problem]
N = 2
p = 3
gamma = 3
lambda = 1
epsilon = 0.01
source = cosine
amplitude = 4
scale_list = 1 2

[grid]
n = 16

[analysis]
beta = 6
ledgers = weak thm1
)";

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gradest_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GRADEST_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name) << text;
  return dir / name;
}

}  // namespace

TEST(Config, MinimalConfigParses) {
  const auto c = parse_config_string(kTrivial);
  EXPECT_EQ(c.N, 2);
  EXPECT_EQ(c.p, "3");
  EXPECT_EQ(c.extents, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(c.n, (std::vector<int>{12}));
  EXPECT_TRUE(c.wants("thm1"));
  EXPECT_FALSE(c.wants("thm2"));
  EXPECT_EQ(*c.beta, "4");
}

TEST(Config, RationalsAreCanonical) {
  std::string text = kTrivial;
  text.replace(text.find("gamma = 3"), 9, "gamma = 2.50");
  EXPECT_EQ(parse_config_string(text).gamma, "5/2");
}

TEST(Config, UnknownKeyRejected) {
  EXPECT_THROW(parse_config_string(std::string(kTrivial) + "[grid]\nspacing = 3\n"), ConfigError);
  EXPECT_THROW(parse_config_string(std::string(kTrivial) + "[extras]\nx = 1\n"), ConfigError);
}

TEST(Config, MissingRequiredKeyRejected) {
  EXPECT_THROW(parse_config_string("[problem]\nN = 2\n"), ConfigError);
}

TEST(Config, GammaAtPMinusOneIsRegimeError) {
  std::string text = kTrivial;
  text.replace(text.find("gamma = 3"), 9, "gamma = 2");
  EXPECT_THROW(parse_config_string(text), RegimeError);
}

TEST(Config, RadialSourceOutsideDeclaredLqRejected) {
  const char* text = R"(
[problem]
N = 3
p = 2
gamma = 6
lambda = 1
epsilon = 0.01
source = radial
power = 1.6

[grid]
n = 8

[analysis]
q = 2
)";
  EXPECT_THROW(parse_config_string(text), MembershipError);
}

TEST(Config, LedgerPrerequisites) {
  std::string text = kTrivial;
  text.replace(text.find("ledgers = weak thm1"), 19, "ledgers = levelscan");
  EXPECT_THROW(parse_config_string(text), ConfigError);
  std::string no_beta = kTrivial;
  no_beta.replace(no_beta.find("beta = 4"), 8, "c_tol = 1");
  EXPECT_THROW(parse_config_string(no_beta), ConfigError);
}

TEST(Config, JsonRoundTripKeepsDigest) {
  const auto c = parse_config_string(kCosine);
  const auto back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(config_digest(back), config_digest(c));
  EXPECT_EQ(config_digest(c).size(), 64u);
  auto moved = c;
  moved.directory = "elsewhere";
  EXPECT_EQ(config_digest(moved), config_digest(c));
  moved.epsilon = 0.02;
  EXPECT_NE(config_digest(moved), config_digest(c));
}

TEST(Config, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Experiment, TrivialProblemHasZeroGradient) {
  auto c = parse_config_string(kTrivial);
  c.source.amplitude = std::pow(c.epsilon, 1.5);
  const auto rec = run_experiment(c, false);
  EXPECT_EQ(rec.status, "ok");
  EXPECT_LT(rec.norms.at("du_max"), 1e-14);
  EXPECT_LT(rec.norms.at("du_eta"), 1e-14);
  EXPECT_TRUE(rec.ledger.all_pass());
  EXPECT_EQ(rec.ledger.rows.size(), 7u);
  EXPECT_TRUE(rec.exponents.contains("thm1_surrogate"));
}

TEST(Experiment, PersistedRecordIsImmutable) {
  auto c = parse_config_string(kCosine);
  c.directory = scratch("persist").string();
  const auto first = run_experiment(c);
  const auto dir = fs::path(c.directory) / first.digest;
  ASSERT_TRUE(fs::exists(dir / "record.json"));
  ASSERT_TRUE(fs::exists(dir / "u.field"));
  const auto before = fs::last_write_time(dir / "record.json");
  const auto stored = read_record_json(dir);
  const auto second = run_experiment(c);
  EXPECT_EQ(fs::last_write_time(dir / "record.json"), before);
  auto a = record_payload(first), b = record_payload(second);
  a.erase("notes");
  b.erase("notes");
  EXPECT_EQ(a, b);
  EXPECT_EQ(stored.at("digest"), first.digest);
  EXPECT_TRUE(stored.contains("provenance"));
  EXPECT_FALSE(record_payload(first).contains("provenance"));
  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(c.directory)) entries += e.is_directory() ? 1 : 0;
  EXPECT_EQ(entries, 1u);
}

TEST(Experiment, AnalyseRecordReproducesLedger) {
  auto c = parse_config_string(kCosine);
  c.directory = scratch("analyse").string();
  const auto rec = run_experiment(c);
  const auto again = analyse_record(rec.directory);
  ASSERT_EQ(again.ledger.rows.size(), rec.ledger.rows.size());
  for (std::size_t i = 0; i < rec.ledger.rows.size(); ++i) {
    EXPECT_EQ(again.ledger.rows[i].id, rec.ledger.rows[i].id);
    EXPECT_DOUBLE_EQ(again.ledger.rows[i].lhs, rec.ledger.rows[i].lhs);
  }
}

TEST(Experiment, NonConvergenceProducesRecord) {
  auto c = parse_config_string(kCosine);
  c.source.amplitude = 200.0;
  c.gamma = "6";
  c.solver.max_iterations = 1;
  c.solver.continuation = false;
  c.solver.max_bisections = 0;
  const auto rec = run_experiment(c, false);
  EXPECT_EQ(rec.status, "nonconvergence");
  EXPECT_FALSE(rec.failure.empty());
  EXPECT_TRUE(rec.ledger.rows.empty());
}

TEST(Sweep, SinglePointMatchesDirectRun) {
  auto c = parse_config_string(kCosine);
  c.scale_list = {1.0};
  const auto res = sweep(c, SweepAxis::Scale, false);
  ASSERT_EQ(res.records.size(), 1u);
  const auto direct = run_experiment(sweep_point(c, SweepAxis::Scale, 1.0), false);
  EXPECT_EQ(res.records[0].digest, direct.digest);
  EXPECT_EQ(record_payload(res.records[0]), record_payload(direct));
}

TEST(Sweep, EpsilonAxisSummary) {
  auto c = parse_config_string(kCosine);
  c.eps_list = {1e-2, 1e-3};
  const auto res = sweep(c, SweepAxis::Eps, false);
  EXPECT_FALSE(res.partial);
  EXPECT_EQ(res.summary.at("du_q_gamma").size(), 2u);
  EXPECT_LT(res.summary.at("relative_variation_du_q_gamma").get<double>(), 0.1);
  EXPECT_THROW(parse_axis("time"), ConfigError);
}

TEST(Sweep, ObservedOrdersOracle) {
  const auto o = observed_orders({0.1, 0.05, 0.025}, {4e-2, 1e-2, 2.5e-3});
  ASSERT_EQ(o.size(), 2u);
  EXPECT_NEAR(o[0], 2.0, 1e-12);
  EXPECT_NEAR(o[1], 2.0, 1e-12);
}

TEST(Sweep, ConvergenceStudyOfZeroSolution) {
  ProblemSpec pb;
  pb.p = 3.0;
  pb.gamma = 3.0;
  pb.coefficient = PowerDiffusion{3.0};
  const auto zero = cosine_product_field<2>(Box<2>{{1.0, 1.0}}, {1, 1}, 0.0);
  const auto t = convergence_study<2>(pb, zero, {8, 16, 32});
  ASSERT_EQ(t.rows.size(), 3u);
  for (const auto& r : t.rows) EXPECT_LT(r.err_linf, 1e-12);
  EXPECT_THROW(convergence_study<2>(pb, zero, {8, 16}), ParameterError);
  EXPECT_THROW(convergence_study<2>(pb, zero, {8, 12, 24}), ParameterError);
}

TEST(Report, EmptyReportIsHeaderOnly) {
  std::ostringstream os;
  write_csv(os, {}, std::nullopt);
  const auto text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_EQ(text.rfind("digest,status,regime,", 0), 0u);
}

TEST(Report, CsvRowMatchesJsonRecord) {
  auto c = parse_config_string(kCosine);
  const auto rec = run_experiment(c, false);
  const auto row = report_row(rec);
  const auto& cols = report_columns();
  ASSERT_EQ(row.size(), cols.size());
  const auto j = to_json(rec);
  auto at = [&](const std::string& name) { return row[std::find(cols.begin(), cols.end(), name) - cols.begin()]; };
  EXPECT_EQ(at("digest"), j.at("digest").get<std::string>());
  EXPECT_EQ(std::stod(at("du_eta")), j.at("norms").at("du_eta").get<double>());
  EXPECT_EQ(std::stod(at("u_l2")), j.at("norms").at("u_l2").get<double>());
  EXPECT_EQ(at("ledger_pass"), std::to_string(j.at("ledger").at("pass_count").get<int>()));
  EXPECT_EQ(at("p"), "3");
}

TEST(Report, EmitWritesFiles) {
  auto c = parse_config_string(kCosine);
  const auto rec = run_experiment(c, false);
  const auto dir = scratch("report");
  const auto csv = emit_report({rec}, "csv", dir);
  ASSERT_EQ(csv.size(), 1u);
  EXPECT_TRUE(fs::exists(dir / "report.csv"));
  emit_report({rec}, "json", dir);
  std::ifstream in(dir / "report.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("records").size(), 1u);
  EXPECT_THROW(emit_report({rec}, "xml", dir), ConfigError);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  EXPECT_EQ(run_cli("exponents --N 3 --p 2 --gamma 6 --q 3"), 0);
  EXPECT_EQ(run_cli("exponents --N 3 --p 3 --gamma 2 --q 3"), 2);
  const auto good = write_file(dir, "good.ini", kTrivial);
  EXPECT_EQ(run_cli("check --config " + good.string()), 0);
  EXPECT_EQ(run_cli("solve --config " + good.string() + " --out " + (dir / "runs").string()), 0);
  std::string bad_text = kTrivial;
  bad_text += "[grid]\nunknown = 1\n";
  EXPECT_EQ(run_cli("solve --config " + write_file(dir, "bad.ini", bad_text).string()), 2);
  std::string hard = kCosine;
  hard.replace(hard.find("amplitude = 4"), 13, "amplitude = 200");
  hard.replace(hard.find("gamma = 3"), 9, "gamma = 6");
  hard += "[solver]\nmax_iterations = 1\ncontinuation = false\nmax_bisections = 0\n";
  EXPECT_EQ(run_cli("solve --config " + write_file(dir, "hard.ini", hard).string() + " --out " +
                    (dir / "runs").string()),
            3);
  std::string strict = kCosine;
  // A tolerance far below the quadrature gap of the weak identity on a 16x16 grid.
  strict.replace(strict.find("[analysis]"), 10, "[analysis]\nc_tol = 1e-12");
  EXPECT_EQ(run_cli("solve --config " + write_file(dir, "strict.ini", strict).string() + " --out " +
                    (dir / "runs").string()),
            4);
  EXPECT_EQ(run_cli("report --out " + (dir / "runs").string() + " --format csv"), 0);
  EXPECT_TRUE(fs::exists(dir / "runs" / "report.csv"));
}
