#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "nehari/cli.hpp"

using namespace nehari;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nehari");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nehari_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  fs::path dir_;
};

const char* kQuartic =
    "# quartic on the interval\n"
    "grid.dim = 1\n"
    "grid.n = 15\n"
    "nonlinearity.p = 4   # exponent\n"
    "solver.restarts = 3\n";

}  // namespace

TEST(Config, Defaults) {
  const Config c = parse_config("");
  EXPECT_EQ(c.dim, 1);
  EXPECT_EQ(c.n, 15);
  EXPECT_EQ(c.p, 4.0);
  EXPECT_EQ(c.weight_kind, "constant");
  EXPECT_EQ(c.tol_inner, 1e-10);
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, ParsesAllKeys) {
  const Config c = parse_config(
      "grid.dim=2\ngrid.n=9\ngrid.extent=2.5\nnonlinearity.family=power\nnonlinearity.p=3.5\n"
      "nonlinearity.weight.kind=affine\nnonlinearity.weight.params=1, 0.5,0.25\n"
      "solver.tol_outer=1e-7\nsolver.tol_inner=1e-11\nsolver.max_outer=50\nsolver.max_iter_inner=80\n"
      "solver.restarts=2\nsolver.seed=9\noutput.dir=/tmp/x # trailing\n");
  EXPECT_EQ(c.dim, 2);
  EXPECT_EQ(c.n, 9);
  EXPECT_EQ(c.extent, 2.5);
  EXPECT_EQ(c.p, 3.5);
  EXPECT_EQ(c.weight_params, (std::vector<double>{1, 0.5, 0.25}));
  EXPECT_EQ(c.tol_outer, 1e-7);
  EXPECT_EQ(c.max_outer, 50);
  EXPECT_EQ(c.max_iter_inner, 80);
  EXPECT_EQ(c.restarts, 2);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.output_dir, "/tmp/x");
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, Rejects) {
  auto code = [](const std::string& text) {
    try {
      validate(parse_config(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  EXPECT_EQ(code("grid.size = 3"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code("grid.n = ten"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code("grid.n 3"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code("grid.dim = 3"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code("grid.n = 0"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code("nonlinearity.p = 2"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code("nonlinearity.family = exp"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code("nonlinearity.weight.params = -1"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code("nonlinearity.weight.kind = affine\nnonlinearity.weight.params = 0.1, -1"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code("nonlinearity.weight.kind = table\nnonlinearity.weight.params = 1,2"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code("solver.tol_outer = 0"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code("solver.tol_inner = -1e-9"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code("solver.restarts = 0"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code("solver.seed = -4"), ErrorCode::ConfigInvalid);
}

TEST_F(CliTest, SolveWritesOutputs) {
  const fs::path cfg = write_config("a.cfg", kQuartic);
  const Outcome o = run_cli({"solve", "--config", cfg.string(), "--out", (dir_ / "run").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("energy="), std::string::npos);
  EXPECT_EQ(std::count(o.out.begin(), o.out.end(), '\n'), 1);
  const auto j = read_json(dir_ / "run" / "summary.json");
  EXPECT_GT(j.at("energy").get<double>(), 0.0);
  for (const char* key : {"energy", "s_final", "outer_iterations", "residual_pde_inf", "residual_manifold", "converged",
                          "multistart_energies", "config"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_TRUE(j.at("converged").get<bool>());
  EXPECT_EQ(j.at("multistart_energies").size(), 3u);
  for (const auto& [k, v] : j.at("config").items()) EXPECT_FALSE(v.is_object()) << k;
  EXPECT_EQ(j.at("config").at("nonlinearity.p").get<double>(), 4.0);
}

TEST_F(CliTest, FieldsRoundTrip) {
  for (const std::string extra : {"", "grid.dim = 2\ngrid.n = 7\nnonlinearity.weight.kind = affine\n"
                                      "nonlinearity.weight.params = 1, 0.5, 0.25\n"}) {
    const fs::path cfg = write_config("a.cfg", std::string(kQuartic) + extra);
    ASSERT_EQ(run_cli({"solve", "--config", cfg.string(), "--out", (dir_ / "rt").string()}).code, 0);
    const Config c = load_config(cfg.string());
    const Grid g = make_grid(c);
    const std::string csv = slurp(dir_ / "rt" / "fields.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), g.dim() == 1 ? "x,u,v" : "x,y,u,v");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), g.size() + 1);
    const StatePair z = read_fields_csv(dir_ / "rt" / "fields.csv", g);
    const double reread = phi(g, make_nonlinearity(c, g), z);
    const double reported = read_json(dir_ / "rt" / "summary.json").at("energy").get<double>();
    EXPECT_NEAR(reread, reported, 1e-12 * std::abs(reported));
  }
}

TEST_F(CliTest, Deterministic) {
  const fs::path cfg = write_config("a.cfg", kQuartic);
  ASSERT_EQ(run_cli({"solve", "--config", cfg.string(), "--out", (dir_ / "one").string()}).code, 0);
  ASSERT_EQ(run_cli({"solve", "--config", cfg.string(), "--out", (dir_ / "two").string()}).code, 0);
  EXPECT_EQ(slurp(dir_ / "one" / "summary.json"), slurp(dir_ / "two" / "summary.json"));
  EXPECT_EQ(slurp(dir_ / "one" / "fields.csv"), slurp(dir_ / "two" / "fields.csv"));
}

TEST_F(CliTest, OutputDirFromConfig) {
  const fs::path cfg = write_config("a.cfg", std::string(kQuartic) + "output.dir = " + (dir_ / "fromcfg").string());
  ASSERT_EQ(run_cli({"solve", "--config", cfg.string()}).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "fromcfg" / "summary.json"));
}

TEST_F(CliTest, InvalidConfigExitsFour) {
  const fs::path cfg = write_config("p2.cfg", "nonlinearity.p = 2\n");
  const Outcome o = run_cli({"solve", "--config", cfg.string(), "--out", (dir_ / "x").string()});
  EXPECT_EQ(o.code, 4);
  EXPECT_EQ(o.err.rfind("error: CONFIG_INVALID:", 0), 0u) << o.err;
  EXPECT_EQ(std::count(o.err.begin(), o.err.end(), '\n'), 1);
  EXPECT_FALSE(fs::exists(dir_ / "x"));
  EXPECT_EQ(run_cli({"solve", "--config", (dir_ / "missing.cfg").string()}).code, 4);
  EXPECT_EQ(run_cli({"solve", "--config", write_config("u.cfg", "solver.speed = 2\n").string()}).code, 4);
}

TEST_F(CliTest, NonConvergenceExitsThree) {
  const fs::path cfg = write_config("short.cfg", std::string(kQuartic) + "solver.max_outer = 1\n");
  const Outcome o = run_cli({"solve", "--config", cfg.string(), "--out", (dir_ / "short").string()});
  EXPECT_EQ(o.code, 3);
  EXPECT_EQ(o.err.rfind("error: NO_CONVERGENCE:", 0), 0u) << o.err;
  EXPECT_FALSE(read_json(dir_ / "short" / "summary.json").at("converged").get<bool>());
}

TEST_F(CliTest, CheckNonlinearity) {
  const Outcome ok = run_cli({"check-nonlinearity"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("F8: pass"), std::string::npos);
  const Outcome bad = run_cli({"check-nonlinearity", "--config", write_config("p2.cfg", "nonlinearity.p = 2\n").string()});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.out.find("F5: fail"), std::string::npos);
  EXPECT_EQ(bad.err.rfind("error: CONDITIONS_FAILED:", 0), 0u);
  const Outcome neg =
      run_cli({"check-nonlinearity", "--config", write_config("neg.cfg", "nonlinearity.weight.params = -1\n").string()});
  EXPECT_EQ(neg.code, 2);
}

TEST_F(CliTest, Gradcheck) {
  const Outcome o = run_cli({"gradcheck", "--config", write_config("a.cfg", kQuartic).string()});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("phi samples=20"), std::string::npos);
  EXPECT_NE(o.out.find("psi samples=20"), std::string::npos);
}

TEST_F(CliTest, OracleTable) {
  const Outcome o = run_cli({"oracle", "--config", write_config("a.cfg", kQuartic).string(), "--count", "16"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("min_energy="), std::string::npos);
}

TEST_F(CliTest, Toy) {
  const Outcome o = run_cli({"toy", "--c", "4"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("energy computed=0.0625 closed_form=0.0625"), std::string::npos) << o.out;
  EXPECT_EQ(run_cli({"toy", "--c", "-1"}).code, 4);
}

TEST_F(CliTest, Usage) {
  EXPECT_EQ(run_cli({}).code, 4);
  EXPECT_EQ(run_cli({"bogus"}).code, 4);
  EXPECT_EQ(run_cli({"solve"}).code, 4);
  const Outcome help = run_cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("solve"), std::string::npos);
}
