#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace {

using nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string data(const std::string& name) { return std::string(CIMM_DATA) + "/" + name; }

Run cli(const std::string& args, const std::string& env = "") {
  const std::string base = ::testing::TempDir() + "cimm_" +
                           ::testing::UnitTest::GetInstance()->current_test_info()->name();
  const std::string out = base + ".out", err = base + ".err";
  const std::string cmd = env + " '" + CIMM_CLI + "' " + args + " > '" + out + "' 2> '" + err + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST(CliValidate, ValidSquare) {
  const auto r = cli("validate " + data("square.json"));
  EXPECT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j.at("ok").get<bool>());
  EXPECT_TRUE(j.at("violations").empty());
}

TEST(CliValidate, DiameterViolation) {
  const auto r = cli("validate " + data("square_bad_diameter.json"));
  EXPECT_EQ(r.code, 1);
  const auto j = json::parse(r.out);
  ASSERT_FALSE(j.at("violations").empty());
  for (const auto& v : j.at("violations")) EXPECT_EQ(v.at("axiom"), "diameter");
}

TEST(CliValidate, MalformedAndMissingFiles) {
  EXPECT_EQ(cli("validate " + data("malformed.json")).code, 2);
  EXPECT_EQ(cli("validate " + data("does_not_exist.json")).code, 2);
  EXPECT_EQ(cli("validate").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
}

TEST(CliValidate, PseudometricNeedsTheFlag) {
  EXPECT_EQ(cli("validate " + data("pseudo.json")).code, 1);
  EXPECT_EQ(cli("--allow-pseudo validate " + data("pseudo.json")).code, 0);
}

TEST(CliEval, TwoPointExamples) {
  auto r = cli("eval " + data("two_point.json") + " 'int x . rho(a, x)'");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j.at("value").get<double>(), 0.5);
  EXPECT_EQ(j.at("bound").get<double>(), 1.0);

  r = cli("eval " + data("two_point.json") + " 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out).at("value").get<double>(), 1.0);

  r = cli("eval " + data("two_point.json") + " 'sup x . rho(a, x)'");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out).at("value").get<double>(), 1.0);
}

TEST(CliEval, AssignmentsAndTables) {
  auto r = cli("eval " + data("two_point.json") + " 'rho(x, a)' -a x=q");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j.at("value").get<double>(), 1.0);
  EXPECT_EQ(j.at("slope").get<double>(), 1.0);
  EXPECT_EQ(j.at("free_vars"), json::array({"x"}));

  r = cli("eval " + data("two_point.json") + " 'rho(x, y)'");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out).at("values"), json::parse("[0.0, 1.0, 1.0, 0.0]"));
}

TEST(CliEval, Errors) {
  EXPECT_EQ(cli("eval " + data("two_point.json") + " 'Q(x)'").code, 2);
  EXPECT_EQ(cli("eval " + data("two_point.json") + " 'rho(x,'").code, 2);
  EXPECT_EQ(cli("eval " + data("two_point.json") + " 'rho(x, y)' -a x=p").code, 2);
  EXPECT_EQ(cli("eval " + data("two_point.json") + " 'rho(x, a)' -a x=zz").code, 2);
}

TEST(CliEval, PowerCap) {
  const std::string args = "eval " + data("two_point.json") + " 'rho(x, y)'";
  EXPECT_EQ(cli("--cap 3 " + args).code, 2);
  EXPECT_EQ(cli(args, "CIMM_CAP=3").code, 2);
  EXPECT_EQ(cli("--cap 4 " + args, "CIMM_CAP=3").code, 0);
}

TEST(CliCheck, SquareAxioms) {
  const auto r = cli("check " + data("square.json") + " " + data("square_axioms.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j.at("holds").get<bool>());
  EXPECT_LE(j.at("worst_gap").get<double>(), 1e-12);
}

TEST(CliQuotient, PseudoExample) {
  const auto r = cli("quotient " + data("pseudo.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("projection"), json::parse("[0, 0, 1]"));
  EXPECT_EQ(j.at("structure").at("points"), json::parse(R"(["a~b", "c"])"));
}

TEST(CliUltraproduct, LosCheck) {
  const auto r = cli("ultraproduct " + data("square.json") + " " + data("square.json") +
                     " -j 1 -f 'int x . Rf(x)' -f 'sup x . rho(c0, x)'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out).at("los_discrepancy").get<double>(), 0.0);
  EXPECT_EQ(cli("ultraproduct " + data("square.json") + " -j 3").code, 2);
}

TEST(CliRiesz, LineExample) {
  const std::string args =
      "riesz " + data("line3.json") + " " + data("line3_functional.json") + " " + data("line3_functions.json");
  const auto r = cli("--eps 0.3 " + args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j.at("eps_cert_raw").get<double>(), 0.1, 1e-12);
  EXPECT_EQ(cli(args).code, 2);
}

TEST(CliInvariant, SquareRotations) {
  const auto r = cli("--eps 0.1 invariant " + data("square.json") + " " + data("square_rotations.json") +
                     " --tests " + data("square_tests.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("eps_cert").get<double>(), 0.0);
  EXPECT_EQ(j.at("nu"), json::parse("[0.25, 0.25, 0.25, 0.25]"));
}

TEST(CliInvariant, RejectsNonIsometry) {
  const std::string path = ::testing::TempDir() + "cimm_bad_iso.json";
  std::ofstream(path) << R"([[1, 0, 2, 3]])";
  EXPECT_EQ(cli("--eps 0.1 invariant " + data("square.json") + " " + path).code, 2);
}

TEST(CliFuzz, DeterministicAcrossRunsAndThreads) {
  const auto a = cli("--seed 1 fuzz -n 100");
  const auto b = cli("--seed 1 fuzz -n 100");
  const auto c = cli("--seed 1 fuzz -n 100", "OMP_NUM_THREADS=1");
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  EXPECT_NE(a.out, cli("--seed 2 fuzz -n 100").out);
  EXPECT_NO_THROW(json::parse(a.out));
}

TEST(CliOutput, WritesTheReportFile) {
  const std::string path = ::testing::TempDir() + "cimm_report.json";
  std::remove(path.c_str());
  const auto r = cli("--out " + path + " validate " + data("square.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_TRUE(json::parse(slurp(path)).at("ok").get<bool>());
}
