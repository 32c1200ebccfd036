#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

#include "ergo/cli.hpp"
#include "ergo/problem_io.hpp"

using namespace ergo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ergo_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "ergo");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json summary(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "summary.json")); }

}  // namespace

TEST_CASE("flags fill defaults") {
  const RunConfig c = parse_config({"ergo", "--problem", "ou-quadratic", "--command", "lambda-star"});
  CHECK(c.command == "lambda-star");
  CHECK(c.tol == 1e-6);
  CHECK(c.seed == 42);
  CHECK_FALSE(c.R.has_value());
  CHECK(c.problem.name == "ou-quadratic");
}

TEST_CASE("missing or malformed fields are ConfigErrors naming the field") {
  try {
    parse_config({"ergo", "--problem", "ou-quadratic"});
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    CHECK(std::string(e.what()).find("command") != std::string::npos);
  }
  std::string err;
  CHECK(run({"--problem", "ou-quadratic", "--command", "solve"}, &err) == 2);
  CHECK(err.find("lambda") != std::string::npos);
  CHECK(run({"--problem", "ou-quadratic", "--command", "dance"}) == 2);
  CHECK(run({"--problem", "ou-quadratic", "--command", "solve", "--lambda", "abc", "--out",
             scratch("badlambda").string()}) == 2);
  CHECK(run({"--problem", "no-such", "--command", "validate"}) == 2);
  CHECK(run({"--problem", "ou-quadratic", "--command", "validate", "--n", "100"}) == 2);
  CHECK(run({"--bogus-flag"}) == 2);
  CHECK(run({"--config", "/nonexistent/cfg.json"}) == 2);
}

TEST_CASE("config file round trip with an inline problem") {
  const fs::path dir = scratch("roundtrip");
  fs::create_directories(dir);
  RunConfig c;
  c.problem = builtin("ou-bounded-v");
  c.problem.name = "inline";
  c.problem_name = "inline";
  c.command = "lambda-star";
  c.R = 6.0;
  c.seed = 9;
  const nlohmann::json j = config_to_json(c);
  CHECK(config_to_json(config_from_json(j)) == j);
  {
    std::ofstream(dir / "cfg.json") << j.dump(2);
  }
  const RunConfig back = parse_config({"ergo", "--config", (dir / "cfg.json").string(), "--seed", "11"});
  CHECK(back.seed == 11);
  CHECK(back.R.value() == 6.0);
  CHECK(to_json(back.problem) == to_json(c.problem));
}

TEST_CASE("lambda-star writes a summary with the resolved config and version") {
  const fs::path dir = scratch("ls");
  CHECK(run({"--problem", "ou-quadratic", "--command", "lambda-star", "--plot", "--out", dir.string()}) == 0);
  const auto s = summary(dir);
  CHECK(std::abs(s["lambda_star"].get<double>() - oracle::kLambdaStar) <= 1e-6);
  CHECK(s["version"] == ERGO_VERSION);
  CHECK(s["config"]["command"] == "lambda-star");
  CHECK(s["config"]["seed"] == 42);
  CHECK(fs::exists(dir / "r_trace.csv"));
  CHECK(fs::exists(dir / "w_star.csv"));
  CHECK(fs::exists(dir / "w_star.svg"));
}

TEST_CASE("classify above the critical value") {
  const fs::path dir = scratch("cls");
  CHECK(run({"--problem", "ou-quadratic", "--command", "classify", "--lambda", "star+1", "--out", dir.string()}) == 0);
  CHECK(summary(dir)["verdict"] == "Transient");
  const fs::path star = scratch("cls_star");
  CHECK(run({"--problem", "ou-quadratic", "--command", "classify", "--out", star.string()}) == 0);
  CHECK(summary(star)["verdict"] == "Ergodic");
}

TEST_CASE("numerical failure exits with 1 and still writes a summary") {
  const fs::path dir = scratch("fail");
  CHECK(run({"--problem", "ou-quadratic", "--command", "solve", "--lambda", "star-0.5", "--out", dir.string()}) == 1);
  const auto s = summary(dir);
  CHECK(s["error"]["kind"] == "NoConvergence");
  CHECK(s["status"] == 1);
}

TEST_CASE("simulation output is byte-identical for a fixed seed") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  const std::vector<std::string> base{"--problem", "ou-quadratic", "--command", "simulate", "--T", "2", "--paths", "100"};
  auto with_out = [&](const fs::path& p) {
    auto v = base;
    v.push_back("--out");
    v.push_back(p.string());
    return v;
  };
  CHECK(run(with_out(a)) == 0);
  CHECK(run(with_out(b)) == 0);
  CHECK(slurp(a / "histogram.csv") == slurp(b / "histogram.csv"));
  CHECK(slurp(a / "exit.csv") == slurp(b / "exit.csv"));
  CHECK_FALSE(slurp(a / "histogram.csv").empty());
}

TEST_CASE("remaining commands") {
  const fs::path v = scratch("validate"), l = scratch("leqg"), d = scratch("dual"), p = scratch("perturb"),
                 s = scratch("solve");
  CHECK(run({"--problem", "confining-v", "--command", "validate", "--out", v.string()}) == 0);
  CHECK(summary(v)["assumptions"]["a3_note"] == "checked on window");

  CHECK(run({"--problem", "leqg-2d", "--command", "leqg", "--out", l.string()}) == 0);
  CHECK(summary(l)["stable"] == true);

  CHECK(run({"--problem", "ou-quadratic", "--command", "duality", "--out", d.string()}) == 0);
  CHECK(summary(d)["gap"].get<double>() <= 1e-4);
  CHECK(fs::exists(d / "mu_star.csv"));

  CHECK(run({"--problem", "ou-quadratic", "--command", "perturb", "--out", p.string()}) == 0);
  CHECK(summary(p)["rows"].size() == 5);

  CHECK(run({"--problem", "ou-quadratic", "--command", "solve", "--lambda", "plus", "--out", s.string()}) == 0);
  CHECK(summary(s)["lambda"].get<double>() == doctest::Approx(oracle::kLambdaPlus));
  CHECK(fs::exists(s / "solution.csv"));

  CHECK(run({"--problem", "leqg-2d", "--command", "solve", "--lambda", "0"}) == 2);
}
