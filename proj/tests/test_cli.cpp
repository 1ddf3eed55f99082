#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "dstori/config.h"
#include "dstori/errors.h"

using namespace dstori;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// runs the CLI with stderr discarded; DSTORI_OUTPUT_DIR is cleared unless given
Run cli(const std::string& args, const std::string& env = "env -u DSTORI_OUTPUT_DIR") {
  std::string cmd = env + " " + DSTORI_CLI_PATH + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("dstori_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig c;
  c.rotation_tol = 1e-7;
  c.q_max = 32;
  c.output_dir = "elsewhere";
  c.seed = 7;
  RunConfig back = RunConfig::from_json(Json::parse(dump_json(c.to_json())));
  CHECK(back.to_json() == c.to_json());
  CHECK_THROWS_AS(RunConfig::from_json(Json{{"no_such_key", 1}}), Error);
  CHECK_THROWS_AS(RunConfig::from_json(Json{{"rotation_tol", -1}}).validate(), Error);
  RunConfig partial = RunConfig::from_json(Json{{"workers", 2}});
  CHECK(partial.workers == 2);
  CHECK(partial.q_max == RunConfig{}.q_max);
}

TEST_CASE("build writes a report") {
  fs::path d = scratch("build");
  Run r = cli("--output-dir " + d.string() + " build rect-torus --theta 1 --x 2");
  CHECK(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["area"].get<double>() == doctest::Approx(1).epsilon(1e-9));
  CHECK(fs::exists(d / "build_rect-torus.json"));
  fs::remove_all(d);
}

TEST_CASE("exit codes") {
  fs::path d = scratch("codes");
  // malformed spec: validation, and nothing is written
  fs::path spec = fs::temp_directory_path() / ("dstori_bad_spec_" + std::to_string(::getpid()) + ".json");
  std::ofstream(spec) << "{not json";
  CHECK(cli("--output-dir " + d.string() + " build custom --spec " + spec.string()).code == 2);
  CHECK_FALSE(fs::exists(d));
  fs::remove(spec);
  CHECK(cli("--output-dir " + d.string() + " build rect-torus --theta -1").code == 2);
  CHECK(cli("--output-dir " + d.string() + " build rect-torus --x 0.5").code == 2);
  CHECK(cli("no-such-command").code == 2);
  CHECK(cli("check no-such-suite --output-dir " + d.string()).code == 2);
  // budget exhaustion maps to 3
  fs::path cfg = fs::temp_directory_path() / ("dstori_cfg_" + std::to_string(::getpid()) + ".json");
  std::ofstream(cfg) << R"({"bisection_depth": 2})";
  CHECK(cli("--config " + cfg.string() + " --output-dir " + d.string() +
            " realize irrational --theta 1 --rho 0.6180339887 --tol 1e-9")
            .code == 3);
  std::ofstream(cfg) << R"({"bogus": 1})";
  CHECK(cli("--config " + cfg.string() + " --output-dir " + d.string() + " check traces").code == 2);
  fs::remove(cfg);
  fs::remove_all(d);
}

TEST_CASE("output directory precedence") {
  fs::path a = scratch("env"), b = scratch("flag");
  CHECK(cli("build rect-torus", "DSTORI_OUTPUT_DIR=" + a.string()).code == 0);
  CHECK(fs::exists(a / "build_rect-torus.json"));
  CHECK(cli("--output-dir " + b.string() + " build rect-torus", "DSTORI_OUTPUT_DIR=" + a.string()).code == 0);
  CHECK(fs::exists(b / "build_rect-torus.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("runs are deterministic") {
  fs::path a = scratch("det_a"), b = scratch("det_b");
  Run x = cli("--output-dir " + a.string() + " --seed 5 check gauss-bonnet");
  Run y = cli("--output-dir " + b.string() + " --seed 5 --workers 1 check gauss-bonnet");
  CHECK(x.code == 0);
  CHECK(x.out == y.out);
  CHECK(slurp(a / "check_gauss-bonnet.json") == slurp(b / "check_gauss-bonnet.json"));
  Run s1 = cli("--output-dir " + a.string() + " sweep rotation --theta 1");
  Run s2 = cli("--output-dir " + b.string() + " --workers 3 sweep rotation --theta 1");
  CHECK(s1.code == 0);
  CHECK(slurp(a / "sweep_rotation.csv") == slurp(b / "sweep_rotation.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("trace writes csv, svg and json") {
  fs::path d = scratch("trace");
  Run r = cli("--output-dir " + d.string() +
              " trace --theta 1 --x 3 --start-x 2 --start-y 0 --kind alpha --pass-through --jumps 5 --name leaf");
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["closed"].get<bool>());
  for (const char* f : {"leaf.csv", "leaf.svg", "leaf.json"}) CHECK(fs::exists(d / f));
  fs::remove_all(d);
}
