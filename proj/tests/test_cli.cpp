#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using stable_sde::cli::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

std::string value_of(const std::string& table, const std::string& key) {
  std::istringstream is(table);
  std::string k, v;
  while (is >> k >> v)
    if (k == key) return v;
  return {};
}

}  // namespace

TEST(CliExponent, InfiniteVariationBoundary) {
  const auto r = run({"exponent", "--alpha", "1.5", "--c", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(value_of(r.out, "beta")), 0.5, 1e-12);
  EXPECT_EQ(value_of(r.out, "regime"), "infinite-variation");
  EXPECT_NEAR(std::stod(value_of(r.out, "holder_sigma[none]")), 1.0 / 1.5, 1e-12);
}

TEST(CliExponent, FiniteVariationOneSided) {
  const auto r = run({"exponent", "--alpha", "0.75", "--c", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(value_of(r.out, "beta")), 0.5, 1e-12);
  // a- = 0 < a+ favours non-increasing gamma: index alpha - beta.
  EXPECT_NEAR(std::stod(value_of(r.out, "holder_gamma[non-increasing]")), 0.25, 1e-12);
  EXPECT_NEAR(std::stod(value_of(r.out, "holder_gamma[non-decreasing]")), 0.75, 1e-12);
}

TEST(CliExponent, DomainErrorsExitTwo) {
  const auto r = run({"exponent", "--alpha", "0.75", "--c", "0.8"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("DomainError"), std::string::npos);
  EXPECT_EQ(run({"exponent", "--alpha", "1.5"}).code, 2);
  EXPECT_EQ(run({"exponent", "--alpha", "1.5", "--c", "0.5", "--a-minus", "1", "--a-plus", "1"}).code, 2);
}

TEST(CliExponent, IntensitiesGiveTheSameBeta) {
  const auto a = run({"exponent", "--alpha", "1.5", "--a-minus", "2", "--a-plus", "4"});
  const auto b = run({"exponent", "--alpha", "1.5", "--c", "0.5"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(value_of(a.out, "beta"), value_of(b.out, "beta"));
}

TEST(CliUsage, UnknownFlagAndHelp) {
  EXPECT_EQ(run({"exponent", "--alpha", "1.5", "--c", "1", "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  for (const std::string cmd : {"exponent", "integrals", "simulate", "couple", "contract"}) {
    const auto h = run({cmd, "--help"});
    EXPECT_EQ(h.code, 0) << cmd;
    EXPECT_NE(h.out.find("--help"), std::string::npos) << cmd;
    if (cmd != "exponent") {
      EXPECT_NE(h.out.find("--gnuplot-script"), std::string::npos) << cmd;
    }
  }
  EXPECT_NE(run({"simulate", "--help"}).out.find("--out-dir"), std::string::npos);
  EXPECT_NE(run({"integrals", "--help"}).out.find("--critical"), std::string::npos);
}

TEST(CliIntegrals, CriticalRowsVanish) {
  const auto r = run({"integrals", "--critical", "--alpha", "0.75,1.5", "--a-minus", "0,0.5", "--a-plus", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "alpha,beta,a_minus,a_plus,closed_form,quadrature,abs_diff");
  int rows = 0;
  while (std::getline(is, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
    ASSERT_EQ(cols.size(), 7u);
    EXPECT_LT(std::abs(std::stod(cols[4])), 1e-10) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}

TEST(CliIntegrals, DefaultGridAgrees) {
  const auto r = run({"integrals"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 10 * 3 * 3);
}

TEST(CliIntegrals, EmptyGridAndDomainErrors) {
  EXPECT_EQ(run({"integrals", "--alpha", ""}).code, 2);
  EXPECT_EQ(run({"integrals", "--beta", ""}).code, 2);
  EXPECT_EQ(run({"integrals", "--alpha", "0.75", "--beta", "0.9"}).code, 2);
  // |cos(0.55 pi)| < 1, so the symmetric finite-variation critical exponent does not exist.
  EXPECT_EQ(run({"integrals", "--critical", "--alpha", "0.55", "--a-minus", "1"}).code, 2);
  EXPECT_EQ(run({"integrals", "--alpha", "x"}).code, 2);
}

TEST_F(CliTest, IntegralsScriptNeedsOut) {
  const auto script = (dir_ / "p.gp").string();
  EXPECT_EQ(run({"integrals", "--alpha", "0.75", "--gnuplot-script", script}).code, 2);
  const auto csv = (dir_ / "i.csv").string();
  EXPECT_EQ(run({"integrals", "--alpha", "0.75", "--out", csv, "--gnuplot-script", script}).code, 0);
  EXPECT_NE(slurp(script).find(csv), std::string::npos);
  EXPECT_EQ(slurp(csv).rfind("alpha,beta", 0), 0u);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const auto cfg = write("sim.ini",
                         "[stable]\nalpha = 1.5\na_minus = 1\na_plus = 1\n"
                         "[coeffs]\nsigma = \"1 + 0.5*min(abs(x), 2)\"\nb = \"-x\"\n"
                         "[sim]\nhorizon = 1\nepsilon = 0.05\neuler_step = 0.01\nn_paths = 3\nseed = 7\n");
  const auto a = run({"simulate", "--config", cfg, "--out-dir", (dir_ / "a").string()});
  const auto b = run({"simulate", "--config", cfg, "--out-dir", (dir_ / "b").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  for (int i = 0; i < 3; ++i) {
    const std::string f = "path_000" + std::to_string(i) + ".csv";
    const auto text = slurp(dir_ / "a" / f);
    EXPECT_EQ(text.rfind("t,value,is_jump\n", 0), 0u);
    EXPECT_EQ(text, slurp(dir_ / "b" / f));
  }
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 4);
}

TEST_F(CliTest, SimulateDriftOnly) {
  const auto cfg = write("sim.ini",
                         "[stable]\nalpha = 0.75\na_minus = 1\na_plus = 1\n"
                         "[coeffs]\nsigma = \"0\"\nb = \"1\"\n"
                         "[sim]\nhorizon = 2.5\nx0 = 0.5\nn_paths = 1\nscheme = thinning\n");
  const auto r = run({"simulate", "--config", cfg, "--out-dir", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_EQ(header, "path,file,final_value,n_jumps,regenerations");
  EXPECT_EQ(row.rfind("0,path_0000.csv,", 0), 0u);
  EXPECT_NEAR(std::stod(row.substr(16)), 3.0, 1e-12);
  EXPECT_EQ(row.substr(row.find(',', 16)), ",0,0");
}

TEST_F(CliTest, SimulateSchemeMismatch) {
  const auto cfg = write("sim.ini",
                         "[stable]\nalpha = 1.5\na_minus = 1\na_plus = 1\n"
                         "[coeffs]\nsigma = \"1\"\n[sim]\nscheme = thinning\n");
  const auto r = run({"simulate", "--config", cfg, "--out-dir", dir_.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("RegimeMismatch"), std::string::npos);
}

TEST_F(CliTest, SimulateBlowupExitsFour) {
  const auto cfg = write("sim.ini",
                         "[stable]\nalpha = 1.5\na_minus = 1\na_plus = 1\n"
                         "[coeffs]\nsigma = \"0\"\nb = \"x*x\"\n[sim]\nx0 = 2\nhorizon = 2\nblowup_guard = 1e6\n");
  const auto r = run({"simulate", "--config", cfg, "--out-dir", dir_.string()});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("Blowup"), std::string::npos);
}

TEST_F(CliTest, StrictConfig) {
  auto code_of = [&](const std::string& text) {
    return run({"simulate", "--config", write("c.ini", text), "--out-dir", dir_.string()}).code;
  };
  const std::string ok = "[stable]\nalpha = 1.5\na_minus = 1\na_plus = 1\n[coeffs]\nsigma = \"1\"\n";
  EXPECT_EQ(code_of(ok + "[sim]\nn_paths = 1\nepsilon = 0.1\n"), 0);
  EXPECT_EQ(code_of(ok + "[sim]\nepsilom = 0.1\n"), 2);
  EXPECT_EQ(code_of(ok + "[sim]\nepsilon = 0.1\nepsilon = 0.2\n"), 2);
  EXPECT_EQ(code_of(ok + "[simulation]\n"), 2);
  EXPECT_EQ(code_of(ok + "[sim]\nepsilon = small\n"), 2);
  EXPECT_EQ(code_of(ok + "[sim]\njust text\n"), 2);
  EXPECT_EQ(code_of("alpha = 1.5\n"), 2);
  EXPECT_EQ(code_of("[coeffs]\nsigma = \"1\"\n"), 2);
  EXPECT_EQ(code_of("[stable]\nalpha = 1.5\na_minus = 1\na_plus = 1\n[coeffs]\nsigma = \"1 +\"\n"), 2);
  EXPECT_EQ(code_of("[stable]\nalpha = 1.5\na_minus = 1\na_plus = 1\n[coeffs]\ngamma = \"1\"\n"), 2);
  EXPECT_EQ(run({"simulate", "--config", (dir_ / "missing.ini").string()}).code, 2);
}

TEST(RunConfigParser, CommentsAndLists) {
  auto cfg = stable_sde::RunConfig::parse("# top\n[sim]\n  ; note\ncheckpoints = 0.5, 1 ,2\nseed = 11\n", {"sim"});
  EXPECT_EQ(*cfg.numbers("sim", "checkpoints"), (std::vector<double>{0.5, 1, 2}));
  EXPECT_EQ(*cfg.integer("sim", "seed"), 11u);
  EXPECT_NO_THROW(cfg.reject_unused());
  auto neg = stable_sde::RunConfig::parse("[sim]\nseed = -1\n", {"sim"});
  EXPECT_THROW(neg.integer("sim", "seed"), stable_sde::Error);
  auto unused = stable_sde::RunConfig::parse("[sim]\nseed = 1\n", {"sim"});
  EXPECT_THROW(unused.reject_unused(), stable_sde::Error);
}

TEST_F(CliTest, CoupleNeedsEnoughPaths) {
  const auto cfg = write("c.ini", "[experiment]\nname = E1\n[sim]\nn_paths = 10\n");
  const auto r = run({"couple", "--config", cfg});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("InsufficientPaths"), std::string::npos);
}

TEST_F(CliTest, CoupleEqualityAtReducedScale) {
  const auto cfg = write("c.ini", "[experiment]\nname = E2\n[sim]\nn_paths = 400\nepsilon = 0.01\n");
  const auto r = run({"couple", "--config", cfg});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("scenario,t,beta,mean,std_error,n_paths,bias_budget,target,verdict\n", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
}

TEST_F(CliTest, CoupleGateValidation) {
  EXPECT_EQ(run({"couple", "--config", write("a.ini", "[experiment]\nname = E1\ngate = bound\n[sim]\nn_paths = 100\n")})
                .code,
            2);
  EXPECT_EQ(run({"couple", "--config",
                 write("b.ini", "[experiment]\nname = E1\nbeta = 0.5\n[sim]\nn_paths = 100\n")})
                .code,
            2);
  EXPECT_EQ(run({"couple", "--config", write("c.ini", "[experiment]\nname = E1\ngate = maybe\n")}).code, 2);
  // b = -x is not constant, so the equality theorem does not apply.
  EXPECT_EQ(run({"couple", "--config", write("d.ini", "[experiment]\nname = lipschitz\n[sim]\nn_paths = 100\n")}).code,
            2);
}

TEST_F(CliTest, CoupleBoundAndMomentGates) {
  const auto bound = write("b.ini",
                           "[experiment]\nname = lipschitz\ngate = bound\nbeta = 0.5\n"
                           "[sim]\nn_paths = 200\nhorizon = 1\ncheckpoints = 0.25,0.5,0.75,1\n");
  const auto b = run({"couple", "--config", bound});
  EXPECT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(std::count(b.out.begin(), b.out.end(), '\n'), 1 + 3 * 4);

  const auto moment = write("m.ini",
                            "[experiment]\nname = additive\ngate = moment\nbeta = 0.5\nhorizons = 1,2\n"
                            "[sim]\nn_paths = 200\nepsilon = 0.05\n");
  const auto m = run({"couple", "--config", moment});
  EXPECT_EQ(m.code, 0) << m.err;
  EXPECT_EQ(m.out.rfind("scenario,horizon,beta,half_mean,", 0), 0u);
}

TEST_F(CliTest, ContractRequiresSymmetricNoise) {
  const auto cfg = write("c.ini",
                         "[experiment]\nname = contraction\n[stable]\nalpha = 1.5\na_minus = 0.5\na_plus = 1\n"
                         "[sim]\nn_paths = 10\n");
  const auto r = run({"contract", "--config", cfg});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("RegimeMismatch"), std::string::npos);
}

TEST_F(CliTest, ContractEqualStartsAreTrivial) {
  const auto cfg = write("c.ini",
                         "[experiment]\nname = contraction\nwindow_times = 0,2,4\n"
                         "[sim]\nn_paths = 10\nhorizon = 4\nx0 = 0.3\nx0_tilde = 0.3\n");
  const auto csv = (dir_ / "c.csv").string();
  const auto script = (dir_ / "c.gp").string();
  const auto r = run({"contract", "--config", cfg, "--out", csv, "--gnuplot-script", script});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(csv), "scenario,window_start,median_tail_sup,threshold,n_paths\n"
                        "contraction,0,0,0,10\ncontraction,2,0,0,10\ncontraction,4,0,0,10\n");
  EXPECT_TRUE(fs::exists(script));
}

TEST_F(CliTest, OutputIndependentOfThreadCount) {
  const auto cfg = write("c.ini", "[experiment]\nname = E1\n[sim]\nn_paths = 120\nepsilon = 0.02\n");
  setenv("STABLE_SDE_THREADS", "1", 1);
  const auto one = run({"couple", "--config", cfg});
  setenv("STABLE_SDE_THREADS", "4", 1);
  const auto four = run({"couple", "--config", cfg});
  unsetenv("STABLE_SDE_THREADS");
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(one.code, four.code);
}
